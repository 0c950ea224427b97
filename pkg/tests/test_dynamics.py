import math
from fractions import Fraction

import numpy as np
import pytest

from gxpeakon.core_types import InterlacingConfiguration, SpectralData, ValidationError
from gxpeakon.dynamics import (
    conserved_coefficients,
    conserved_from_determinant,
    conserved_from_spectrum,
    evolve_spectral,
    k1_closed_form,
    ode_rhs,
    richardson_check,
    rk4_states,
    rk4_trajectory,
    trajectories,
    trajectory_csv,
)
from gxpeakon.forward_spectral import forward_map
from gxpeakon.verification import configuration_error, random_configuration, random_exact_configuration, random_spectral_data


def gentle(rng, K):
    return random_configuration(rng, K, span=2.0, mass_low=0.3, mass_high=3.0)


def test_evolve_at_zero_is_identity(rng):
    r = random_spectral_data(rng, 3)
    assert evolve_spectral(r, 0.0) == r


def test_evolve_semigroup(rng):
    r = random_spectral_data(rng, 3)
    a = evolve_spectral(evolve_spectral(r, 0.3), 0.4)
    b = evolve_spectral(r, 0.7)
    np.testing.assert_allclose(a.a + a.b, b.a + b.b, rtol=1e-15)
    assert (a.lam, a.mu, a.b_inf, a.b_inf_star) == (r.lam, r.mu, r.b_inf, r.b_inf_star)


def test_residue_growth_rate(rng):
    r = random_spectral_data(rng, 2)
    h = 1e-6
    # Central difference: a forward one is off by h/(2 lambda) relative.
    up, down = evolve_spectral(r, h), evolve_spectral(r, -h)
    for a0, a1, a2, lam in zip(r.a, up.a, down.a, r.lam):
        assert (a1 - a2) / (2 * h) == pytest.approx(a0 / lam, rel=1e-6)


def test_k1_constraint_is_time_invariant():
    # Only a_1 moves, and the constraint does not involve it.
    r = SpectralData((1.0,), (), (1.0,), (), 0.8, 0.8)
    for t in (-5.0, 0.0, 5.0):
        evolve_spectral(r, t)
    with pytest.raises(ValidationError):
        evolve_spectral(SpectralData((1.0,), (), (1.0,), (), 0.5, 0.5), 1.0)


def test_k1_closed_form(rng):
    p0 = gentle(rng, 1)
    for s in trajectories(p0, np.linspace(0, 1, 6)):
        assert configuration_error(s.config, k1_closed_form(p0, s.t)) < 1e-10


def test_k1_closed_form_needs_k1(rng):
    with pytest.raises(ValueError):
        k1_closed_form(gentle(rng, 2), 0.1)


def test_trajectory_at_zero_is_start(rng):
    p0 = gentle(rng, 3)
    assert configuration_error(trajectories(p0, [0.0])[0].config, p0) < 1e-8


@pytest.mark.parametrize("K", [1, 2, 3])
def test_spectral_trajectory_matches_rk4(rng, K):
    p0 = gentle(rng, K)
    times, states = rk4_states(p0, 1.0, 4000, record_every=400)
    for sample, state in zip(trajectories(p0, times), states):
        c = sample.config
        assert np.max(np.abs(np.concatenate([c.x, c.m_odd, c.n_even]) - state)) < 1e-6


def test_richardson_estimate_is_small(rng):
    assert richardson_check(gentle(rng, 2), 0.5, 500) < 1e-9


def test_rk4_trajectory_samples(rng):
    samples = rk4_trajectory(gentle(rng, 2), 0.1, 10, record_every=5)
    assert [s.t for s in samples] == pytest.approx([0.0, 0.05, 0.1])


def test_ode_rhs_k1(rng):
    p = gentle(rng, 1)
    dx, dm, dn = ode_rhs(p)
    c = p.m_odd[0] * p.n_even[0] * math.exp(p.x[0] - p.x[1])
    assert dx == pytest.approx((c, c), rel=1e-15)
    assert dm[0] / p.m_odd[0] == pytest.approx(c, rel=1e-15)
    assert dn[0] / p.n_even[0] == pytest.approx(-c, rel=1e-15)


def test_ode_rhs_k2_expanded(rng):
    p = gentle(rng, 2)
    x = p.x
    m1, m3 = p.m_odd
    n2, n4 = p.n_even
    E = lambda i, j: math.exp(x[i - 1] - x[j - 1])
    want_dx = [
        (m1 + m3 * E(1, 3)) * (n2 * E(1, 2) + n4 * E(1, 4)),
        (m1 * E(1, 2) + m3 * E(2, 3)) * (n2 + n4 * E(2, 4)),
        (m1 * E(1, 3) + m3) * (n2 * E(2, 3) + n4 * E(3, 4)),
        (m1 * E(1, 4) + m3 * E(3, 4)) * (n2 * E(2, 4) + n4),
    ]
    want_m1 = (m1 + m3 * E(1, 3)) * (n2 * E(1, 2) + n4 * E(1, 4)) - 2 * m3 * E(1, 3) * (n2 * E(1, 2) + n4 * E(1, 4))
    want_n2 = (-m1 * E(1, 2) + m3 * E(2, 3)) * (n2 + n4 * E(2, 4)) - 2 * (m1 * E(1, 2) + m3 * E(2, 3)) * n4 * E(2, 4)
    want_m3 = (m1 * E(1, 3) + m3) * (-n2 * E(2, 3) + n4 * E(3, 4)) + 2 * m1 * E(1, 3) * (n2 * E(2, 3) + n4 * E(3, 4))
    want_n4 = (-m1 * E(1, 4) - m3 * E(3, 4)) * (n2 * E(2, 4) + n4) + 2 * (m1 * E(1, 4) + m3 * E(3, 4)) * n2 * E(2, 4)
    dx, dm, dn = ode_rhs(p)
    np.testing.assert_allclose(dx, want_dx, rtol=1e-13)
    np.testing.assert_allclose(np.asarray(dm) / p.m_odd, [want_m1, want_m3], rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(np.asarray(dn) / p.n_even, [want_n2, want_n4], rtol=1e-12, atol=1e-14)


def test_ode_rhs_mass_scaling(rng):
    p = gentle(rng, 2)
    s = 1.7
    q = InterlacingConfiguration(2, p.x, tuple(s * v for v in p.m_odd), tuple(s * v for v in p.n_even))
    dxp, dmp, _ = ode_rhs(p)
    dxq, dmq, _ = ode_rhs(q)
    np.testing.assert_allclose(dxq, s ** 2 * np.asarray(dxp), rtol=1e-13)
    np.testing.assert_allclose(np.asarray(dmq) / q.m_odd, s ** 2 * np.asarray(dmp) / p.m_odd, rtol=1e-12)


# --- constants of motion ------------------------------------------------------

def test_first_and_last_conserved_coefficients(rng):
    cfg = random_exact_configuration(rng, 3)
    q, m, n = cfg.q, cfg.m_odd, cfg.n_even
    E = lambda i, j: q[i - 1] / q[j - 1]  # e^{x_i - x_j} for i < j
    A = conserved_coefficients(cfg).A_coeffs
    first = sum(m[(i - 1) // 2] * n[j // 2 - 1] * E(i, j) for i in (1, 3, 5) for j in (2, 4, 6) if i < j)
    assert A[0] == first
    last = m[0] * n[0] * E(1, 2) * (1 - E(2, 3) ** 2) * m[1] * n[1] * E(3, 4) * (1 - E(4, 5) ** 2) * m[2] * n[2] * E(5, 6)
    assert A[-1] == last


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_minor_sums_equal_determinant_coefficients_exactly(rng, K):
    cfg = random_exact_configuration(rng, K)
    assert conserved_coefficients(cfg) == conserved_from_determinant(cfg)


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_minor_sums_equal_spectral_symmetric_functions(rng, K):
    p = random_configuration(rng, K)
    c = conserved_coefficients(p)
    s = conserved_from_spectrum(forward_map(p))
    np.testing.assert_allclose(c.A_coeffs, s.A_coeffs, rtol=1e-10)
    np.testing.assert_allclose(c.A_twin_coeffs, s.A_twin_coeffs, rtol=1e-10)


def test_conserved_coefficients_are_positive(rng):
    c = conserved_coefficients(random_configuration(rng, 4))
    assert all(v > 0 for v in c.A_coeffs + c.A_twin_coeffs)


@pytest.mark.parametrize("K", [2, 3])
def test_conservation_along_trajectory(rng, K):
    p0 = gentle(rng, K)
    c0 = conserved_coefficients(p0)
    for s in trajectories(p0, np.linspace(0, 1, 5)):
        c = conserved_coefficients(s.config)
        for u, v in zip(c.A_coeffs + c.A_twin_coeffs, c0.A_coeffs + c0.A_twin_coeffs):
            assert abs(u / v - 1) <= 1e-9


def test_trajectory_csv_layout(rng):
    p0 = gentle(rng, 2)
    text = trajectory_csv(trajectories(p0, [0.0, 0.5]))
    lines = text.strip().split("\n")
    assert lines[0] == "t,x_1,x_2,x_3,x_4,m_1,n_2,m_3,n_4"
    assert len(lines) == 3
    row = [float(v) for v in lines[1].split(",")]
    assert row[5] == pytest.approx(p0.m_odd[0], rel=1e-8)
    assert row[6] == pytest.approx(p0.n_even[0], rel=1e-8)
