from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gxpeakon.bimoments import (
    DiscreteMeasure,
    HeineMemo,
    HeineSumKey,
    RankDeficiencyError,
    ShapeMismatchError,
    bimoment,
    bimoment_matrix,
    biorthogonal_pair,
    cauchy_pairing,
    determinant,
    determinant_identity_suite,
    distance_inequalities,
    heine_sum,
    k_determinant,
    k_sequence,
    moment,
    spectral_measures,
    starred_closed_form,
    starred_heine,
)
from gxpeakon.core_types import SpectralData, ValidationError
from gxpeakon.forward_spectral import adjoint_residues, forward_map
from gxpeakon.verification import random_configuration, random_spectral_data


def rational_measure(rng, size):
    support = sorted(Fraction(int(v), 4) for v in rng.choice(np.arange(1, 40), size, replace=False))
    weights = [Fraction(int(v), 3) for v in rng.integers(1, 12, size)]
    return DiscreteMeasure(tuple(support), tuple(weights))


def float_measure(rng, size):
    support = np.sort(rng.uniform(0.1, 10.0, size))
    return DiscreteMeasure(tuple(support), tuple(np.exp(rng.uniform(-2, 2, size))))


fraction_atoms = st.lists(st.integers(1, 60), min_size=1, max_size=4, unique=True).map(sorted)


@st.composite
def measures(draw):
    support = draw(fraction_atoms)
    weights = draw(st.lists(st.integers(1, 20), min_size=len(support), max_size=len(support)))
    return DiscreteMeasure(tuple(Fraction(v, 5) for v in support), tuple(Fraction(w, 7) for w in weights))


def test_measure_validation():
    with pytest.raises(ValidationError):
        DiscreteMeasure((2.0, 1.0), (1.0, 1.0))
    with pytest.raises(ValidationError):
        DiscreteMeasure((1.0,), (0.0,))
    with pytest.raises(ValidationError):
        DiscreteMeasure((1.0,), (1.0, 2.0))


def test_moments():
    mu = DiscreteMeasure((2,), (3,))
    assert moment(mu, 0) == 3
    assert moment(mu, 2) == 12


def test_moment_is_one_sided_heine_sum(rng):
    alpha, beta = rational_measure(rng, 3), rational_measure(rng, 2)
    for k in range(4):
        assert heine_sum(alpha, beta, HeineSumKey(1, 0, k)) == moment(alpha, k)
        assert heine_sum(alpha, beta, HeineSumKey(0, 1, 0, k)) == moment(beta, k)


def test_unit_atoms_bimoment_is_half():
    one = DiscreteMeasure((1,), (1,))
    assert all(bimoment(one, one, a, b) == Fraction(1, 2) for a in range(3) for b in range(3))


@given(measures(), measures(), st.integers(0, 3), st.integers(0, 3))
def test_shift_relation_is_exact(alpha, beta, a, b):
    assert bimoment(alpha, beta, a + 1, b) + bimoment(alpha, beta, a, b + 1) == moment(alpha, a) * moment(beta, b)


def test_k2_bimoment_example():
    r = SpectralData((1.0, 3.0), (2.0,), (0.5, 4.0), (1.5,), 1.0, 1.0)
    alpha, beta = spectral_measures(r)
    want = 0.5 * 1.5 / 3.0 + 4.0 * 1.5 / 5.0
    assert bimoment(alpha, beta, 0, 0) == pytest.approx(want, rel=1e-15)


def test_trivial_heine_sums(rng):
    alpha, beta = rational_measure(rng, 3), rational_measure(rng, 2)
    assert heine_sum(alpha, beta, HeineSumKey(0, 0, 2, 1)) == 1
    assert heine_sum(alpha, beta, HeineSumKey(4, 0)) == 0
    assert heine_sum(alpha, beta, HeineSumKey(1, 3)) == 0


def test_full_heine_sum_is_a_single_term(rng):
    alpha, beta = rational_measure(rng, 3), rational_measure(rng, 2)
    lam, a = alpha.support, alpha.weights
    mu, b = beta.support, beta.weights
    vander = ((lam[0] - lam[1]) * (lam[0] - lam[2]) * (lam[1] - lam[2])) ** 2 * (mu[0] - mu[1]) ** 2
    cauchy = 1
    for x, y in product(lam, mu):
        cauchy *= x + y
    want = vander / cauchy * a[0] * a[1] * a[2] * b[0] * b[1]
    assert heine_sum(alpha, beta, HeineSumKey(3, 2)) == want


def test_negative_subset_size_rejected():
    with pytest.raises(ValueError):
        HeineSumKey(-1, 0)


@given(measures(), measures())
def test_heine_sums_positive_within_shape(alpha, beta):
    for n in range(len(alpha) + 1):
        for m in range(len(beta) + 1):
            assert heine_sum(alpha, beta, HeineSumKey(n, m, 1, 1)) > 0


def test_log_domain_matches_direct(rng):
    alpha, beta = float_measure(rng, 6), float_measure(rng, 5)
    for n, m in [(2, 1), (4, 3), (6, 5), (3, 4)]:
        key = HeineSumKey(n, m, 1, 0)
        assert heine_sum(alpha, beta, key, log_domain=True) == pytest.approx(heine_sum(alpha, beta, key), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bimoment_determinant_is_exact_heine_sum(rng, n):
    alpha, beta = rational_measure(rng, 4), rational_measure(rng, 4)
    for r, s in product(range(3), range(3)):
        assert determinant(bimoment_matrix(alpha, beta, n, r, s)) == heine_sum(alpha, beta, HeineSumKey(n, n, r, s))


def test_determinant_identity_suite_exact_on_rationals(rng):
    checks = determinant_identity_suite(rational_measure(rng, 5), rational_measure(rng, 5), 3)
    assert checks and all(c.exact for c in checks)


def test_determinant_identity_suite_float(rng):
    for _ in range(3):
        checks = determinant_identity_suite(float_measure(rng, 5), float_measure(rng, 5), 4)
        assert max(c.residual for c in checks) < 1e-10


def test_k_recurrence_matches_raw_determinant(rng):
    alpha, beta = rational_measure(rng, 4), rational_measure(rng, 3)
    ks = k_sequence(HeineMemo(alpha, beta), 4)
    assert ks[0] == bimoment(alpha, beta, 0, 0) + Fraction(1, 2)
    assert ks == [k_determinant(alpha, beta, n) for n in range(1, 5)]


def test_float_determinant():
    assert determinant([[2.0, 1.0], [1.0, 3.0]]) == pytest.approx(5.0)
    assert determinant([]) == 1


# --- starred sums -------------------------------------------------------------

@pytest.mark.parametrize("K", [2, 3, 4])
def test_starred_sums_two_ways(rng, K):
    r = forward_map(random_configuration(rng, K))
    adj = adjoint_residues(r)
    for n in range(K + 1):
        for m in range(K):
            for rr, ss in product((0, 1), (0, 1)):
                direct, closed = starred_heine(r, adj, HeineSumKey(n, m, rr, ss))
                assert float(direct) == pytest.approx(float(closed), rel=1e-10)


def test_starred_special_cases(rng):
    K = 3
    r = forward_map(random_configuration(rng, K))
    J = HeineMemo(*spectral_measures(r))
    L, M = np.prod(r.lam), np.prod(r.mu)
    assert starred_closed_form(r, HeineSumKey(0, 0)) == pytest.approx(1.0, rel=1e-12)
    i00 = starred_closed_form(r, HeineSumKey(1, 1))
    assert i00 == pytest.approx(J(K - 1, K - 2, 1, 1) / (4 * J(K, K - 1)), rel=1e-12)
    alpha0 = starred_closed_form(r, HeineSumKey(1, 0))
    assert alpha0 == pytest.approx(L / M * J(K - 1, K - 1, 1, 0) / (2 * J(K, K - 1)), rel=1e-12)


def test_starred_shape_mismatch():
    r = SpectralData((1.0, 2.0), (1.5,), (1.0, 1.0), (1.0,), 1.0, 1.0)
    adj = adjoint_residues(r)
    bad = SpectralData((1.0, 2.0, 3.0), (1.5,), (1.0, 1.0, 1.0), (1.0,), 1.0, 1.0)
    with pytest.raises(ShapeMismatchError):
        starred_heine(bad, adj, HeineSumKey(0, 0))


# --- biorthogonal polynomials -------------------------------------------------

def test_first_biorthogonal_pair(rng):
    alpha, beta = float_measure(rng, 4), float_measure(rng, 4)
    p, q = biorthogonal_pair(alpha, beta, 0)
    c = 1 / np.sqrt(bimoment(alpha, beta, 0, 0))
    assert p.coeffs[0] == pytest.approx(c) and q.coeffs[0] == pytest.approx(c)


def test_biorthogonality(rng):
    alpha, beta = float_measure(rng, 4), float_measure(rng, 4)
    pairs = [biorthogonal_pair(alpha, beta, n) for n in range(3)]
    assert all(p.degree == n and q.degree == n for n, (p, q) in enumerate(pairs))
    gram = np.array([[cauchy_pairing(alpha, beta, pairs[i][0], pairs[j][1]) for j in range(3)] for i in range(3)])
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-10)


def test_biorthogonality_exact(rng):
    alpha, beta = rational_measure(rng, 3), rational_measure(rng, 3)
    pairs = [biorthogonal_pair(alpha, beta, n) for n in range(3)]
    gram = [[cauchy_pairing(alpha, beta, pairs[i][0], pairs[j][1]) for j in range(3)] for i in range(3)]
    np.testing.assert_allclose(np.array(gram, dtype=float), np.eye(3), atol=1e-12)


def test_biorthogonal_rank_deficiency(rng):
    with pytest.raises(RankDeficiencyError):
        biorthogonal_pair(float_measure(rng, 2), float_measure(rng, 2), 2)


# --- positivity ---------------------------------------------------------------

@pytest.mark.parametrize("K", [2, 3, 4, 5])
def test_distance_inequalities(rng, K):
    for _ in range(25):
        memo = HeineMemo(*spectral_measures(random_spectral_data(rng, K)))
        values = distance_inequalities(memo, K)
        assert len(values) == max(K - 2, 0) + K - 1
        assert all(v > 0 for _, v in values)
