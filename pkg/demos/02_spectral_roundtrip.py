"""
Forward and inverse maps for a few peakon pairs
================================================

A random configuration of K=3 interlacing pairs is mapped to its spectral
data and back.  The inverse uses nothing but the Heine-type sums of the two
spectral measures.
"""

import numpy as np

from gxpeakon import forward_map, inverse_map
from gxpeakon.bimoments import HeineMemo, spectral_measures
from gxpeakon.dynamics import conserved_coefficients, conserved_from_spectrum
from gxpeakon.verification import configuration_error, random_configuration

rng = np.random.default_rng(7)
p = random_configuration(rng, 3)
print("positions", np.round(p.x, 4))
print("m (odd)  ", np.round(p.m_odd, 4))
print("n (even) ", np.round(p.n_even, 4))

r = forward_map(p)
print("lambda   ", np.round(r.lam, 6))
print("mu       ", np.round(r.mu, 6))
print("a, b     ", np.round(r.a, 6), np.round(r.b, 6))

# %%
# The coefficients of A(lambda) are sums of minors of the matrix M E N, and
# at the same time elementary symmetric functions of 1/(2 lambda_i).
print("minor sums     ", conserved_coefficients(p).A_coeffs)
print("from spectrum  ", conserved_from_spectrum(r).A_coeffs)

# %%
# Recovery.  The outermost position comes from I_00 + b_inf alpha_0.
J = HeineMemo(*spectral_measures(r))
print("0.5 exp(2 x_6) =", J(1, 1) + r.b_inf * J(1, 0), " direct:", 0.5 * np.exp(2 * p.x[-1]))

q = inverse_map(r)
print("roundtrip error", configuration_error(p, q))
