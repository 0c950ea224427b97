import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from gxpeakon.core_types import (
    ExtendedConfiguration,
    SpectralData,
    ValidationError,
    from_interval,
    to_interval,
)
from gxpeakon.forward_spectral import adjoint_residues, forward_map
from gxpeakon.inverse_spectral import (
    NearConstraintWarning,
    inverse_map,
    recover_interval,
    recover_K1,
    recover_interval_K1,
    recover_realline,
    recovery_sensitivity,
)
from gxpeakon.verification import configuration_error, random_configuration, random_spectral_data, spectral_error

ROOT3 = math.sqrt(3.0)


def test_k1_worked_example():
    p = recover_K1(SpectralData((8.0,), (), (2.0,), (), 0.75, 0.75))
    assert p.x[0] == pytest.approx(-math.log(ROOT3), abs=1e-15)
    assert p.x[1] == pytest.approx(math.log(ROOT3), abs=1e-15)
    assert p.m_odd[0] == pytest.approx(ROOT3 / 4, rel=1e-15)
    assert p.n_even[0] == pytest.approx(ROOT3 / 4, rel=1e-15)


def test_k1_constraint_violation():
    with pytest.raises(ValidationError) as info:
        recover_K1(SpectralData((1.0,), (), (1.0,), (), 0.5, 0.5))
    assert any("K=1 constraint" in v for v in info.value.violations)


def test_k1_near_constraint_warns():
    lam = (1 + 1e-12) / (2 * 0.5 * 1.0)
    with pytest.warns(NearConstraintWarning):
        p = recover_K1(SpectralData((lam,), (), (1.0,), (), 0.5, 1.0))
    assert p.x[0] < p.x[1]


def test_k1_separation_law(rng):
    for _ in range(20):
        r = random_spectral_data(rng, 1)
        p = recover_K1(r)
        assert math.exp(2 * (p.x[1] - p.x[0])) == pytest.approx(2 * r.lam[0] * r.b_inf * r.b_inf_star, rel=1e-12)


def test_k1_redirect():
    r = SpectralData((8.0,), (), (2.0,), (), 0.75, 0.75)
    with pytest.raises(ValueError, match="recover_K1"):
        recover_interval(r)
    with pytest.raises(ValueError, match="recover_K1"):
        recover_realline(r)
    with pytest.raises(ValueError):
        recover_K1(random_spectral_data(np.random.default_rng(0), 2))


def test_non_admissible_rejected():
    with pytest.raises(ValidationError):
        inverse_map(SpectralData((2.0, 1.0), (1.0,), (1.0, 1.0), (1.0,), 1.0, 1.0))


def test_k2_expanded_formulas():
    F = Fraction
    l1, l2, m1 = F(1), F(3), F(2)
    a1, a2, b1 = F(1, 2), F(2), F(3, 2)
    binf, bstar = F(3, 4), F(5, 4)
    r = SpectralData((l1, l2), (m1,), (a1, a2), (b1,), binf, bstar)
    p = recover_realline(r, extended=True)
    with mpmath.workprec(128):
        e = lambda k: mpmath.exp(2 * p.x[k]) / 2
        I00 = a1 * b1 / (l1 + m1) + a2 * b1 / (l2 + m1)
        J21 = (l1 - l2) ** 2 / ((l1 + m1) * (l2 + m1)) * a1 * a2 * b1
        J11_10 = l1 * a1 * b1 / (l1 + m1) + l2 * a2 * b1 / (l2 + m1)
        want_e = [
            J21 / (l1 * a1 + l2 * a2 + 2 * bstar * l1 * l2 / m1 * J11_10),
            J21 / (l1 * a1 + l2 * a2),
            I00,
            I00 + binf * (a1 + a2),
        ]
        for k in range(4):
            assert abs(e(k) / mpmath.mpf(want_e[k].numerator) * want_e[k].denominator - 1) < 1e-30
        amp = [
            2 * p.m_odd[0] * mpmath.exp(-p.x[0]),
            2 * p.n_even[0] * mpmath.exp(-p.x[1]),
            2 * p.m_odd[1] * mpmath.exp(-p.x[2]),
            2 * p.n_even[1] * mpmath.exp(-p.x[3]),
        ]
        want_amp = [
            m1 * (l1 * a1 + l2 * a2) / (l1 * l2 * J11_10) + 2 * bstar,
            (l1 * a1 + l2 * a2) * J11_10 / ((a1 + a2) * m1 * J21),
            (a1 + a2) / J11_10,
            1 / (a1 + a2),
        ]
        for got, want in zip(amp, want_amp):
            assert abs(got / (mpmath.mpf(want.numerator) / want.denominator) - 1) < 1e-30


def test_k3_last_amplitude(rng):
    r = random_spectral_data(rng, 3)
    p = inverse_map(r)
    assert 2 * p.n_even[-1] * math.exp(-p.x[-1]) == pytest.approx(1 / sum(r.a), rel=1e-12)


@pytest.mark.parametrize("K", [2, 3, 4])
def test_recover_interval_matches_forward_measures(rng, K):
    for _ in range(10):
        p = random_configuration(rng, K)
        got = recover_interval(forward_map(p))
        want = to_interval(p)
        for u, v in zip(got.g + got.h + got.l, want.g + want.h + want.l):
            assert u == pytest.approx(v, rel=1e-8)


def test_last_weight_formula(rng):
    r = random_spectral_data(rng, 3)
    alpha0 = sum(r.a)
    I00 = sum(a * b / (l + m) for a, l in zip(r.a, r.lam) for b, m in zip(r.b, r.mu))
    assert recover_interval(r).h[-1] == pytest.approx((I00 + 0.5) / alpha0 + r.b_inf, rel=1e-13)


@pytest.mark.parametrize("K", [2, 3, 4])
def test_interval_and_realline_routes_agree(rng, K):
    for _ in range(10):
        r = random_spectral_data(rng, K)
        assert configuration_error(from_interval(recover_interval(r)), recover_realline(r)) < 1e-8


def test_direct_starred_sums_agree_with_symmetry(rng):
    r = forward_map(random_configuration(rng, 3))
    a = recover_interval(r)
    b = recover_interval(r, adjoint=adjoint_residues(r))
    np.testing.assert_allclose(a.g + a.h + a.l, b.g + b.h + b.l, rtol=1e-9)


@pytest.mark.parametrize("K", [1, 2, 3, 4, 5])
def test_roundtrip_configuration(rng, K):
    for _ in range(20):
        p = random_configuration(rng, K)
        assert configuration_error(p, inverse_map(forward_map(p))) < 1e-8


@pytest.mark.parametrize("K", [1, 2, 3])
def test_roundtrip_spectral_extended(rng, K):
    for _ in range(20):
        r = random_spectral_data(rng, K)
        q = inverse_map(r, extended=True)
        assert isinstance(q, ExtendedConfiguration)
        assert spectral_error(r, forward_map(q)) < 1e-8


def test_extended_rounds_to_float_inverse(rng):
    r = random_spectral_data(rng, 3)
    assert configuration_error(inverse_map(r, extended=True).rounded(), inverse_map(r)) < 1e-12


@pytest.mark.parametrize("K", [2, 3, 4, 5])
def test_recovered_positions_increase(rng, K):
    for _ in range(40):
        p = inverse_map(random_spectral_data(rng, K))
        assert all(np.diff(p.x) > 0)


@pytest.mark.parametrize("K", [2, 3, 4])
def test_near_degenerate_spectrum_keeps_order(rng, K):
    r = random_spectral_data(rng, K)
    lam = tuple(r.lam[0] * (1 + 1e-4) ** i for i in range(K))
    mu = tuple(r.lam[0] * 2 * (1 + 1e-4) ** j for j in range(K - 1))
    q = SpectralData(lam, mu, r.a, r.b, r.b_inf, r.b_inf_star)
    p = inverse_map(q, extended=True)
    assert all(b > a for a, b in zip(p.x, p.x[1:]))


def test_sensitivity_is_finite(rng):
    s = recovery_sensitivity(random_spectral_data(rng, 2))
    assert 0 < s < math.inf


def test_k1_interval_recovery_is_rational():
    r = SpectralData((Fraction(8),), (), (Fraction(2),), (), Fraction(3, 4), Fraction(3, 4))
    meas = recover_interval_K1(r)
    assert meas.l == (Fraction(1, 2), Fraction(1), Fraction(1, 2))
    assert meas.g == (Fraction(1),) and meas.h == (Fraction(1),)


def test_k1_interval_recovery_matches_forward(rng):
    for _ in range(10):
        p = random_configuration(rng, 1)
        got, want = recover_interval_K1(forward_map(p)), to_interval(p)
        np.testing.assert_allclose(got.l + got.g + got.h, want.l + want.g + want.h, rtol=1e-12)
