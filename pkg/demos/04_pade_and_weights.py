"""
Hermite-Pade triples and the even weights
==========================================

For each order j the polynomials (Q_j, P_j, R_j) approximate the Weyl
functions at infinity.  Built from the spectral measures alone, they agree
with the entries of the partial transition products, and their values at
zero telescope into the even interval weights.
"""

import numpy as np

from gxpeakon import forward_map
from gxpeakon.approximation import (
    approximation_orders,
    pade_triple,
    recover_even_differences,
    triple_difference,
    triple_from_transition,
)
from gxpeakon.bimoments import spectral_measures
from gxpeakon.core_types import to_interval
from gxpeakon.forward_spectral import weyl_functions
from gxpeakon.verification import random_configuration

K = 3
p = random_configuration(np.random.default_rng(5), K)
r = forward_map(p)
alpha, beta = spectral_measures(r)
meas = to_interval(p)
weyl = weyl_functions(r)

triples = [pade_triple(alpha, beta, r.b_inf, j) for j in range(K + 1)]
for t in triples[1:]:
    diff = triple_difference(t, triple_from_transition(meas, t.j))
    worst = approximation_orders(t, weyl, K).worst()
    print(f"j={t.j}  deg Q={t.Q.degree}  vs transition {diff:.1e}  order residual {worst:.1e}")

h, hy = recover_even_differences(triples)
print("h from triples  ", np.round([float(v) for v in h], 10))
print("h from the map  ", np.round(meas.h, 10))
