"""
The smallest case: one odd and one even peakon
===============================================

With K=1 everything is explicit.  We start from a configuration, read off
its four spectral numbers, invert them again and then let the pair move.
"""

import math

import numpy as np

from gxpeakon import InterlacingConfiguration, SpectralData, forward_map, inverse_map
from gxpeakon.core_types import to_interval
from gxpeakon.dynamics import k1_closed_form, trajectories

# Sites at -ln(sqrt 3) and ln(sqrt 3) with equal masses sqrt(3)/4 put unit
# weights at y = -1/2 and y = 1/2 on the interval.
r3 = math.sqrt(3.0)
p = InterlacingConfiguration(1, (-math.log(r3), math.log(r3)), (r3 / 4,), (r3 / 4,))
meas = to_interval(p)
print("interval sites  ", meas.y)
print("interval weights", meas.g, meas.h)

# The forward map gives (lambda_1, a_1, b_inf, b_inf_star) = (8, 2, 3/4, 3/4).
r = forward_map(p)
print("spectral data   ", r.lam, r.a, r.b_inf, r.b_inf_star)

# Only data with 2 lambda_1 b_inf b_inf_star > 1 come from a configuration.
print("constraint value", 2 * r.lam[0] * r.b_inf * r.b_inf_star)

q = inverse_map(SpectralData((8.0,), (), (2.0,), (), 0.75, 0.75))
print("recovered       ", q.x, q.m_odd, q.n_even)

# %%
# Time evolution
# --------------
# a_1 grows like exp(t/lambda_1); nothing else moves.  Both sites travel at
# the same speed and the masses trade off exponentially.
times = np.linspace(0.0, 2.0, 5)
for sample in trajectories(p, times):
    exact = k1_closed_form(p, sample.t)
    print(f"t={sample.t:.1f}  x={np.round(sample.config.x, 6)}  closed form x={np.round(exact.x, 6)}")
