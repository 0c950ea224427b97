import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from gxpeakon.core_types import (
    ExactConfiguration,
    InterlacingConfiguration,
    SpectralData,
    reflect_configuration,
    to_interval,
    validate_admissible,
)
from gxpeakon.forward_spectral import (
    PoleProximityError,
    adjoint_from_transition,
    adjoint_products,
    adjoint_residues,
    b_inf_closed_form,
    b_inf_product,
    b_inf_star_closed_form,
    eigenvalues,
    eigenvalues_exact,
    forward_map,
    residues,
    sturm_roots,
    weyl_eval,
    weyl_from_transition,
    weyl_functions,
    weyl_relation_residuals,
)
from gxpeakon.transition import Polynomial, abc_polynomials, transition_matrix
from gxpeakon.verification import random_configuration, random_exact_configuration

ROOT3 = math.sqrt(3.0)
K1_CONFIG = InterlacingConfiguration(1, (-math.log(ROOT3), math.log(ROOT3)), (ROOT3 / 4,), (ROOT3 / 4,))


def rel(u, v):
    return abs(float(u) / float(v) - 1)


def test_k1_worked_example():
    r = forward_map(K1_CONFIG)
    assert r.mu == () and r.b == ()
    assert r.lam[0] == pytest.approx(8, rel=1e-14)
    assert r.a[0] == pytest.approx(2, rel=1e-14)
    assert r.b_inf == pytest.approx(0.75, rel=1e-14)
    assert r.b_inf_star == pytest.approx(0.75, rel=1e-14)


def test_k1_exact_rational_example():
    cfg = ExactConfiguration(1, (Fraction(1, 2), Fraction(2)), (Fraction(1),), (Fraction(3, 2),))
    r = forward_map(cfg)
    assert r.lam == (Fraction(4, 3),)
    assert r.a == (Fraction(2, 3),)
    assert (r.b_inf, r.b_inf_star) == (Fraction(3), Fraction(2))


@pytest.mark.parametrize("K", [1, 2, 3, 5, 7])
def test_against_high_precision_oracle(rng, K):
    for _ in range(3):
        p = random_configuration(rng, K)
        r = forward_map(p)
        lam, mu, a, b, b_inf, b_star = oracles.forward(p.x, p.m_odd, p.n_even)
        got = r.lam + r.mu + r.a + r.b + (r.b_inf, r.b_inf_star)
        want = list(lam) + list(mu) + list(a) + list(b) + [b_inf, b_star]
        assert max(rel(u, v) for u, v in zip(got, want)) < 1e-12


def test_exact_sturm_matches_float_eigenvalues(rng):
    for _ in range(5):
        cfg = random_exact_configuration(rng, 2)
        lam_f, mu_f = eigenvalues(cfg.to_float())
        S31 = transition_matrix(to_interval(cfg)).S.entry(3, 1)
        roots = sturm_roots(Polynomial(S31.coeffs[1:]), Fraction(1, 10 ** 30))
        assert max(rel(u, v) for u, v in zip(lam_f, roots)) < 1e-12
        lam_e, mu_e = eigenvalues_exact(cfg)
        assert max(rel(u, v) for u, v in zip(mu_f, mu_e)) < 1e-12


def test_sturm_returns_exact_rational_roots():
    p = Polynomial([Fraction(-6), Fraction(11), Fraction(-6), Fraction(1)])  # (x-1)(x-2)(x-3)
    assert sturm_roots(p) == [1, 2, 3]


@pytest.mark.parametrize("s", [0.5, 3.0])
def test_mass_scaling_scales_eigenvalues_by_inverse_square(rng, s):
    # Each coefficient [A]_k is homogeneous of degree 2k in the masses.
    p = random_configuration(rng, 3)
    q = InterlacingConfiguration(3, p.x, tuple(s * v for v in p.m_odd), tuple(s * v for v in p.n_even))
    lp, mp = eigenvalues(p)
    lq, mq = eigenvalues(q)
    np.testing.assert_allclose(lq, np.asarray(lp) / s ** 2, rtol=1e-12)
    np.testing.assert_allclose(mq, np.asarray(mp) / s ** 2, rtol=1e-12)


def test_translation_invariance(rng):
    p = random_configuration(rng, 3)
    q = InterlacingConfiguration(3, tuple(v + 0.7 for v in p.x), p.m_odd, p.n_even)
    np.testing.assert_allclose(eigenvalues(p)[0], eigenvalues(q)[0], rtol=1e-12)


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_reflection_exchanges_plain_and_adjoint_data(rng, K):
    p = random_configuration(rng, K)
    r = forward_map(p)
    adj = adjoint_residues(r)
    s = forward_map(reflect_configuration(p))
    np.testing.assert_allclose(s.lam, r.lam, rtol=1e-12)
    np.testing.assert_allclose(s.mu, r.mu, rtol=1e-12)
    np.testing.assert_allclose(s.a, adj.a_star, rtol=1e-10)
    np.testing.assert_allclose(s.b, adj.b_star, rtol=1e-10)
    assert s.b_inf == pytest.approx(r.b_inf_star, rel=1e-12)
    assert s.b_inf_star == pytest.approx(r.b_inf, rel=1e-12)


@pytest.mark.parametrize("K", [1, 2, 3])
def test_residue_routes_agree(rng, K):
    p = random_configuration(rng, K)
    lam, mu = eigenvalues(p)
    real = residues(p, lam, mu)
    interval = residues(p, lam, mu, route="interval")
    for u, v in zip(real[0] + real[1] + [real[2], real[3]], interval[0] + interval[1] + [interval[2], interval[3]]):
        assert rel(u, v) < 1e-9


def test_unknown_residue_route():
    with pytest.raises(ValueError):
        residues(K1_CONFIG, [8.0], [], route="bogus")


@pytest.mark.parametrize("K", [1, 2, 4])
def test_b_inf_closed_forms_match_interval_measures(rng, K):
    p = random_configuration(rng, K)
    r = forward_map(p)
    meas = to_interval(p)
    assert rel(b_inf_closed_form(meas), r.b_inf) < 1e-12
    assert rel(b_inf_star_closed_form(meas), r.b_inf_star) < 1e-12
    assert rel(b_inf_product(meas, r), r.b_inf * r.b_inf_star) < 1e-12


@pytest.mark.parametrize("K", [2, 3])
def test_b_inf_is_limit_of_twin_weyl_numerators(rng, K):
    cfg = random_exact_configuration(rng, K)
    abc = abc_polynomials(cfg)
    # W~ = -B~/A~ tends to -(lead B~)/(lead A~).
    limit = abc.B_twin.leading() / abc.A_twin.leading()
    assert rel(limit, forward_map(cfg.to_float()).b_inf) < 1e-12


def test_k1_adjoint_residue():
    r = SpectralData((8.0,), (), (2.0,), (), 0.75, 0.75)
    assert adjoint_residues(r).a_star == pytest.approx((2.0,))


def test_k2_twin_adjoint_product(rng):
    r = forward_map(random_configuration(rng, 2))
    _, bb = adjoint_products(r)
    mu = r.mu[0]
    assert rel(bb[0], 0.5 * mu * (1 + mu / r.lam[0]) * (1 + mu / r.lam[1])) < 1e-14


@pytest.mark.parametrize("K", [2, 3, 4, 5])
def test_adjoint_products_match_transition_route(rng, K):
    p = random_configuration(rng, K)
    r = forward_map(p)
    a_star, b_star = adjoint_from_transition(to_interval(p), r.lam, r.mu)
    aa, bb = adjoint_products(r)
    assert max(rel(u * v, w) for u, v, w in zip(r.a, a_star, aa)) < 1e-10
    assert max([0.0] + [rel(u * v, w) for u, v, w in zip(r.b, b_star, bb)]) < 1e-10


def test_d_matches_adjoint_weyl_at_minus_mu(rng):
    r = forward_map(random_configuration(rng, 3))
    adj = adjoint_residues(r)
    W = weyl_functions(r, adj).W
    for j, mu in enumerate(r.mu):
        assert rel(adj.d[j], -W(-mu) * r.b[j]) < 1e-12


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_weyl_relations(rng, K):
    r = forward_map(random_configuration(rng, K))
    adj = adjoint_residues(r)
    for lam in np.exp(rng.uniform(-4, 4, 25)):
        plain, starred = weyl_relation_residuals(weyl_eval(r, adj, lam), weyl_eval(r, adj, -lam))
        assert plain < 1e-11 and starred < 1e-11


def test_weyl_functions_match_transition_ratios(rng):
    cfg = random_exact_configuration(rng, 2)
    meas = to_interval(cfg)
    r = forward_map(cfg.to_float())
    S = transition_matrix(meas).S
    St = transition_matrix(meas, twin=True).S
    lam = Fraction(5, 7)
    ratios = weyl_from_transition(S, St, lam)
    partial = weyl_eval(r, None, float(lam))
    for name, v in ratios.items():
        assert rel(partial[name], v) < 1e-10, name


def test_w_decays_at_infinity(rng):
    r = forward_map(random_configuration(rng, 3))
    lam = 1e8
    assert abs(weyl_eval(r, None, lam)["W"]) < 2 * sum(r.a) / lam


def test_pole_proximity_names_the_pole():
    r = forward_map(K1_CONFIG)
    with pytest.raises(PoleProximityError, match="pole"):
        weyl_eval(r, None, r.lam[0] + 1e-14)
    with pytest.raises(PoleProximityError):
        weyl_eval(r, None, 0.0)


@settings(max_examples=60)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_image_is_admissible_and_simple(K, seed):
    r = forward_map(random_configuration(np.random.default_rng(seed), K))
    assert validate_admissible(r)
    assert all(v > 0 for v in r.lam + r.mu + r.a + r.b + (r.b_inf, r.b_inf_star))
    assert all(np.diff(r.lam) > 0) and all(np.diff(r.mu) > 0)
