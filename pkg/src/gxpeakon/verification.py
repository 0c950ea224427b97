"""Small randomized property suites, runnable from the command line.

Each suite returns a :class:`SuiteResult` holding the largest residual seen
and the tolerance it is held to.  Sizes are modest so ``verify --suite all``
finishes in well under a minute; the test suite runs the same properties at
full scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from . import approximation, bimoments, dynamics, forward_spectral, inverse_spectral, transition
from .core_types import ExactConfiguration, InterlacingConfiguration, SpectralData, to_interval


@dataclass
class SuiteResult:
    name: str
    residual: float
    tolerance: float
    cases: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def random_configuration(rng: np.random.Generator, K: int, span: float = 3.0, mass_low: float = 0.1, mass_high: float = 10.0) -> InterlacingConfiguration:
    """Sorted uniform positions on [-span, span], log-uniform masses."""
    while True:
        x = np.sort(rng.uniform(-span, span, 2 * K))
        if np.all(np.diff(x) > 0):
            break
    lo, hi = math.log(mass_low), math.log(mass_high)
    m = np.exp(rng.uniform(lo, hi, K))
    n = np.exp(rng.uniform(lo, hi, K))
    return InterlacingConfiguration(K, tuple(x), tuple(m), tuple(n))


def random_exact_configuration(rng: np.random.Generator, K: int) -> ExactConfiguration:
    q = sorted(Fraction(int(v), 8) for v in rng.choice(np.arange(1, 65), 2 * K, replace=False))
    m = [Fraction(int(v), 4) for v in rng.integers(1, 17, K)]
    n = [Fraction(int(v), 4) for v in rng.integers(1, 17, K)]
    return ExactConfiguration(K, tuple(q), tuple(m), tuple(n))


def random_spectral_data(rng: np.random.Generator, K: int) -> SpectralData:
    """Log-uniform admissible spectral data; for K=1 the constraint is enforced by rejection."""
    while True:
        lam = np.sort(np.exp(rng.uniform(math.log(0.1), math.log(10.0), K)))
        mu = np.sort(np.exp(rng.uniform(math.log(0.1), math.log(10.0), K - 1)))
        a = np.exp(rng.uniform(math.log(0.1), math.log(10.0), K))
        b = np.exp(rng.uniform(math.log(0.1), math.log(10.0), K - 1))
        b_inf, b_star = np.exp(rng.uniform(math.log(0.1), math.log(10.0), 2))
        if np.any(np.diff(lam) <= 0) or np.any(np.diff(mu) <= 0):
            continue
        r = SpectralData(tuple(lam), tuple(mu), tuple(a), tuple(b), float(b_inf), float(b_star))
        if K == 1 and not 2 * r.lam[0] * r.b_inf * r.b_inf_star > 1:
            continue
        return r


def configuration_error(p: InterlacingConfiguration, q: InterlacingConfiguration) -> float:
    """Positions: |dx|/max(|x|, 1); masses: plain relative error."""
    ex = max(abs(u - v) / max(abs(u), 1.0) for u, v in zip(p.x, q.x))
    em = max(abs(u / v - 1) for u, v in zip(p.m_odd + p.n_even, q.m_odd + q.n_even))
    return max(ex, em)


def spectral_error(r: SpectralData, s: SpectralData) -> float:
    pairs = list(zip(r.lam + r.mu + r.a + r.b, s.lam + s.mu + s.a + s.b))
    pairs += [(r.b_inf, s.b_inf), (r.b_inf_star, s.b_inf_star)]
    return max(abs(float(u) / float(v) - 1) for u, v in pairs)


def suite_roundtrip(rng, cases: int = 40) -> SuiteResult:
    worst = 0.0
    for K in (1, 2, 3, 4, 5):
        for _ in range(cases):
            p = random_configuration(rng, K)
            worst = max(worst, configuration_error(p, inverse_spectral.inverse_map(forward_spectral.forward_map(p))))
            r = random_spectral_data(rng, K)
            worst = max(worst, spectral_error(r, forward_spectral.forward_map(inverse_spectral.inverse_map(r, extended=True))))
    return SuiteResult("roundtrip", worst, 1e-8, 10 * cases)


def suite_algebra(rng, cases: int = 3) -> SuiteResult:
    failures = []
    total = 0
    for K in (1, 2, 3):
        for _ in range(cases):
            total += 1
            cfg = random_exact_configuration(rng, K)
            meas = to_interval(cfg)
            S = transition.transition_matrix(meas).S
            St = transition.transition_matrix(meas, twin=True).S
            abc = transition.abc_polynomials(cfg)
            con = dynamics.conserved_coefficients(cfg)
            checks = {
                "det S": S.determinant() == transition.ONE,
                "det S-twin": St.determinant() == transition.ONE,
                "sigma": transition.sigma_involution(S) == St,
                "S31 = -2 lambda A": S.entry(3, 1) == abc.A * transition.Polynomial([0, -2]),
                "degrees": S.degrees() == transition.expected_degrees(K, False),
                "minor sums": all(abc.coefficient("A", k) == con.A_coeffs[k - 1] for k in range(1, K + 1)),
            }
            if K >= 2:
                checks["twin degrees"] = St.degrees() == transition.expected_degrees(K, True)
            failures += [f"K={K}: {name}" for name, ok in checks.items() if not ok]
    return SuiteResult("algebra", float(len(failures)), 0.0, total, "; ".join(failures))


def suite_weyl(rng, cases: int = 10, points: int = 20) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        K = int(rng.integers(1, 5))
        r = forward_spectral.forward_map(random_configuration(rng, K))
        adj = forward_spectral.adjoint_residues(r)
        for lam in np.exp(rng.uniform(-4, 4, points)):
            at = forward_spectral.weyl_eval(r, adj, lam)
            neg = forward_spectral.weyl_eval(r, adj, -lam)
            worst = max(worst, *forward_spectral.weyl_relation_residuals(at, neg))
    return SuiteResult("weyl", worst, 1e-11, cases * points)


def suite_residues(rng, cases: int = 10) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        for K in (1, 2, 3, 4, 5):
            p = random_configuration(rng, K)
            r = forward_spectral.forward_map(p)
            meas = to_interval(p)
            a_star, b_star = forward_spectral.adjoint_from_transition(meas, r.lam, r.mu)
            aa, bb = forward_spectral.adjoint_products(r)
            worst = max(worst, *(abs(u * v / w - 1) for u, v, w in zip(r.a, a_star, aa)))
            worst = max([worst] + [abs(u * v / w - 1) for u, v, w in zip(r.b, b_star, bb)])
            worst = max(worst, abs(forward_spectral.b_inf_product(meas, r) / (r.b_inf * r.b_inf_star) - 1))
    return SuiteResult("residues", worst, 1e-10, 5 * cases)


def _random_measure(rng, size: int) -> bimoments.DiscreteMeasure:
    while True:
        x = np.sort(rng.uniform(0.1, 10.0, size))
        if np.all(np.diff(x) > 0):
            return bimoments.DiscreteMeasure(tuple(x), tuple(np.exp(rng.uniform(-2.3, 2.3, size))))


def suite_determinants(rng, cases: int = 5) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        checks = bimoments.determinant_identity_suite(_random_measure(rng, 5), _random_measure(rng, 5), 4)
        worst = max(worst, max(c.residual for c in checks))
    return SuiteResult("determinants", worst, 1e-10, cases)


def suite_starred(rng, cases: int = 5) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        for K in (2, 3, 4):
            r = forward_spectral.forward_map(random_configuration(rng, K))
            adj = forward_spectral.adjoint_residues(r)
            for n in range(K + 1):
                for m in range(K):
                    for rr in (0, 1):
                        for ss in (0, 1):
                            direct, closed = bimoments.starred_heine(r, adj, bimoments.HeineSumKey(n, m, rr, ss))
                            worst = max(worst, abs(float(direct) / float(closed) - 1))
    return SuiteResult("starred", worst, 1e-10, 3 * cases)


def suite_pade(rng, cases: int = 5) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        for K in (1, 2, 3, 4):
            p = random_configuration(rng, K)
            r = forward_spectral.forward_map(p)
            alpha, beta = bimoments.spectral_measures(r)
            meas = to_interval(p)
            weyl = forward_spectral.weyl_functions(r)
            for j in range(1, K + 1):
                t = approximation.pade_triple(alpha, beta, r.b_inf, j)
                worst = max(worst, approximation.triple_difference(t, approximation.triple_from_transition(meas, j)))
                worst = max(worst, approximation.approximation_orders(t, weyl, K).worst())
    return SuiteResult("pade", worst, 1e-10, 4 * cases)


def suite_dynamics(rng, cases: int = 1) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        for K in (1, 2, 3):
            p = random_configuration(rng, K, span=2.0, mass_low=0.3, mass_high=3.0)
            times, states = dynamics.rk4_states(p, 1.0, 2000, record_every=200)
            for sample, state in zip(dynamics.trajectories(p, times), states):
                c = sample.config
                worst = max(worst, float(np.max(np.abs(np.concatenate([c.x, c.m_odd, c.n_even]) - state))))
    return SuiteResult("dynamics", worst, 1e-6, 3 * cases, "RK4 with step 5e-4")


def suite_positivity(rng, cases: int = 40) -> SuiteResult:
    bad = []
    for K in (2, 3, 4, 5):
        for _ in range(cases):
            r = random_spectral_data(rng, K)
            memo = bimoments.HeineMemo(*bimoments.spectral_measures(r))
            bad += [name for name, v in bimoments.distance_inequalities(memo, K) if not v > 0]
            p = inverse_spectral.inverse_map(r)
            if any(b <= a for a, b in zip(p.x, p.x[1:])):
                bad.append("unordered positions")
            s = forward_spectral.forward_map(random_configuration(rng, K))
            if min(s.lam + s.mu + s.a + s.b + (s.b_inf, s.b_inf_star)) <= 0:
                bad.append("nonpositive spectral value")
    return SuiteResult("positivity", float(len(bad)), 0.0, 4 * cases, "; ".join(sorted(set(bad))))


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "roundtrip": suite_roundtrip,
    "algebra": suite_algebra,
    "weyl": suite_weyl,
    "residues": suite_residues,
    "determinants": suite_determinants,
    "starred": suite_starred,
    "pade": suite_pade,
    "dynamics": suite_dynamics,
    "positivity": suite_positivity,
}


def run_suites(name: str, seed: Optional[int] = None) -> List[SuiteResult]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {', '.join(['all'] + list(SUITES))}")
        out.append(SUITES[n](np.random.default_rng(seed)))
    return out
