"""Inverse spectral map: peakon data from eigenvalues, residues and b_inf, b_inf_star.

Every recovered quantity is a ratio of Heine sums of the spectral measures
alpha = sum a_i delta_{lambda_i}, beta = sum b_j delta_{mu_j}.  Inputs made of
Fractions give exact interval measures.
"""

from __future__ import annotations

import math
import warnings

import mpmath
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .bimoments import HeineMemo, HeineSumKey, spectral_measures, starred_closed_form, starred_measures
from .core_types import (
    AdjointResidues,
    ExactConfiguration,
    ExtendedConfiguration,
    InterlacingConfiguration,
    IntervalMeasures,
    RecoveryError,
    SpectralData,
    ValidationError,
    _rational_sqrt,
    validate_admissible,
)


class NearConstraintWarning(UserWarning):
    """K=1 data with 2 lambda_1 b_inf b_inf_star barely above 1: the two sites nearly collide."""


NEAR_CONSTRAINT_MARGIN = 1e-10


def _half(r: SpectralData):
    return Fraction(1, 2) if isinstance(r.lam[0], Fraction) else 0.5


def _require_admissible(r: SpectralData) -> None:
    report = validate_admissible(r)
    if not report:
        raise ValidationError("spectral data are not admissible", report.violations)


def _require_k_at_least_two(r: SpectralData) -> None:
    if r.K == 1:
        raise ValueError("K=1 spectral data are recovered by recover_K1")


class _StarredSums:
    """J-sums of the adjoint measures, either summed directly or through the lambda/mu symmetry."""

    def __init__(self, r: SpectralData, memo: HeineMemo, adj: Optional[AdjointResidues]):
        self.r, self.memo = r, memo
        self.direct = HeineMemo(*starred_measures(r, adj)) if adj is not None else None
        self._cache: Dict[Tuple[int, int, int, int], object] = {}

    def __call__(self, n: int, m: int, r: int = 0, s: int = 0):
        if self.direct is not None:
            return self.direct(n, m, r, s)
        key = (n, m, r, s)
        if key not in self._cache:
            self._cache[key] = starred_closed_form(self.r, HeineSumKey(n, m, r, s), self.memo)
        return self._cache[key]


def _weights_from_sums(J, K: int, half, b_const) -> Tuple[List, List]:
    """Weights w_1..w_K (first from the far end) and the products with (1 -+ y).

    Entry j-1 of each list belongs to order j of the approximation problem:
    j=1 is the outermost mass, recovered with b_const.
    """
    alpha0 = J(1, 0)
    weights = [(_I00(J) + half) / alpha0 + b_const]
    products = [1 / alpha0]
    for j in range(2, K + 1):
        den = J(j - 1, j - 2, 0, 1) * J(j, j - 1, 0, 1)
        weights.append(J(j - 1, j - 1, 1, 0) * (J(j, j - 1) + half * J(j - 1, j - 2, 1, 1)) / den)
        products.append(J(j - 1, j - 2, 1, 1) * J(j - 1, j - 1, 1, 0) / den)
    return weights, products


def _I00(J):
    # I_00 is the one-by-one Heine sum J^{00}_{11}.
    return J(1, 1)


def recover_interval(r: SpectralData, adjoint: Optional[AdjointResidues] = None) -> IntervalMeasures:
    """Interval weights and sites from spectral data (K >= 2).

    Even sites come from the sums of (alpha, beta); odd sites from the same
    formulas applied to the adjoint measures.  With ``adjoint=None`` the
    adjoint sums are obtained from (alpha, beta) by the product symmetry;
    passing adjoint residues sums over them directly instead.
    """
    _require_k_at_least_two(r)
    _require_admissible(r)
    K, half = r.K, _half(r)
    memo = HeineMemo(*spectral_measures(r))
    h_rev, hy_rev = _weights_from_sums(memo, K, half, r.b_inf)
    g, gy = _weights_from_sums(_StarredSums(r, memo, adjoint), K, half, r.b_inf_star)
    h = list(reversed(h_rev))
    one_minus_y = [p / w for p, w in zip(reversed(hy_rev), h)]
    one_plus_y = [p / w for p, w in zip(gy, g)]
    y = []
    for a in range(K):
        y.append(one_plus_y[a] - 1)
        y.append(1 - one_minus_y[a])
    gaps = [one_plus_y[0]]
    for k in range(1, 2 * K):
        gaps.append(y[k] - y[k - 1])
    gaps.append(one_minus_y[-1])
    meas = IntervalMeasures(K, tuple(y), tuple(gaps), tuple(g), tuple(h))
    problems = meas.violations(tol=1e-8)
    if problems:
        raise RecoveryError(f"recovered interval measures are inconsistent: {problems}")
    return meas


def _log_half_double(value) -> float:
    """x with (1/2) e^{2x} = value."""
    return 0.5 * math.log(2 * value)


def _exp_positions_squared(r: SpectralData, memo: HeineMemo) -> List:
    """(1/2) e^{2 x_k} for k = 1..2K."""
    J, K = memo, r.K
    L = _product(r.lam)
    M = _product(r.mu)
    out = [None] * (2 * K)
    out[2 * K - 1] = J(1, 1) + r.b_inf * J(1, 0)
    for j in range(2, K + 1):
        out[2 * (K + 1 - j) - 1] = J(j, j - 1) / J(j - 1, j - 2, 1, 1)
    for j in range(1, K):
        out[2 * (K + 1 - j) - 2] = J(j, j) / J(j - 1, j - 1, 1, 1)
    out[0] = J(K, K - 1) / (J(K - 1, K - 2, 1, 1) + 2 * r.b_inf_star * L / M * J(K - 1, K - 1, 1, 0))
    return out


def _amplitude_ratios(r: SpectralData, memo: HeineMemo) -> List:
    """2 w_k e^{-x_k} for every site k, w being m at odd and n at even sites."""
    J, K = memo, r.K
    L = _product(r.lam)
    M = _product(r.mu)
    out = [None] * (2 * K)
    out[2 * K - 1] = 1 / J(1, 0)
    for j in range(2, K + 1):
        out[2 * (K + 1 - j) - 1] = J(j - 1, j - 2, 1, 1) * J(j - 1, j - 1, 1, 0) / (
            J(j - 1, j - 2, 0, 1) * J(j, j - 1, 0, 1)
        )
    for j in range(1, K):
        out[2 * (K + 1 - j) - 2] = J(j - 1, j - 1, 1, 1) * J(j, j - 1, 0, 1) / (
            J(j, j, 1, 0) * J(j - 1, j - 1, 1, 0)
        )
    out[0] = M * J(K - 1, K - 2, 1, 1) / (L * J(K - 1, K - 1, 1, 0)) + 2 * r.b_inf_star
    return out


def _product(values):
    out = 1
    for v in values:
        out = out * v
    return out


EXTENDED_BITS = 128


def _assemble(K: int, half_e2x: List, amp: List, extended: bool = False):
    """Configuration from (1/2) e^{2x_k} and 2 w_k e^{-x_k}; exact when every e^{x_k} is rational."""
    if extended:
        with mpmath.workprec(EXTENDED_BITS):
            x = [mpmath.log(2 * _mp(v)) / 2 for v in half_e2x]
            _check_order(x)
            w = [_mp(amp[k]) * mpmath.exp(x[k]) / 2 for k in range(2 * K)]
            return ExtendedConfiguration(K, tuple(x), tuple(w[0::2]), tuple(w[1::2]))
    if all(isinstance(v, Fraction) for v in half_e2x):
        q = [_rational_sqrt(2 * v) for v in half_e2x]
        if all(v is not None for v in q):
            w = [amp[k] * q[k] / 2 for k in range(2 * K)]
            _check_order([float(v) for v in q])
            return ExactConfiguration(K, tuple(q), tuple(w[0::2]), tuple(w[1::2]))
    x = [_log_half_double(v) for v in half_e2x]
    _check_order(x)
    w = [float(amp[k]) * math.exp(x[k]) / 2 for k in range(2 * K)]
    return InterlacingConfiguration(K, tuple(x), tuple(w[0::2]), tuple(w[1::2]))


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _exact(r: SpectralData) -> SpectralData:
    """The same spectral data with every binary64 value read as an exact rational."""
    conv = lambda values: tuple(Fraction(v) for v in values)
    return SpectralData(conv(r.lam), conv(r.mu), conv(r.a), conv(r.b), Fraction(r.b_inf), Fraction(r.b_inf_star))


def _check_order(values: List[float]) -> None:
    for k in range(len(values) - 1):
        if not values[k] < values[k + 1]:
            raise RecoveryError(
                f"recovered positions are not increasing at sites {k + 1}, {k + 2}: {values[k]!r} >= {values[k + 1]!r}"
            )


def recover_realline(r: SpectralData, extended: bool = False) -> InterlacingConfiguration:
    """Positions and masses on the real line (K >= 2), non-starred formulas only.

    With ``extended=True`` the Heine sums are taken exactly on the rational
    values of the inputs and the result is an :class:`ExtendedConfiguration`
    carrying 128-bit positions and masses.
    """
    _require_k_at_least_two(r)
    _require_admissible(r)
    if extended:
        r = _exact(r)
    memo = HeineMemo(*spectral_measures(r))
    return _assemble(r.K, _exp_positions_squared(r, memo), _amplitude_ratios(r, memo), extended)


def recover_K1(r: SpectralData, extended: bool = False) -> InterlacingConfiguration:
    """Closed-form recovery of (x_1, x_2, m_1, n_2) when K = 1."""
    if r.K != 1:
        raise ValueError(f"recover_K1 needs K=1, got K={r.K}")
    _require_admissible(r)
    if extended:
        r = _exact(r)
    lam, a = r.lam[0], r.a[0]
    margin = 2 * lam * r.b_inf * r.b_inf_star - 1
    if margin <= NEAR_CONSTRAINT_MARGIN:
        warnings.warn(
            f"2*lambda_1*b_inf*b_inf_star exceeds 1 by only {float(margin):.3e}; positions nearly coincide",
            NearConstraintWarning,
            stacklevel=2,
        )
    a_star = lam / (2 * a)
    # (1/2) e^{2 x_2} = a b_inf and (1/2) e^{-2 x_1} = a* b*_inf; 2 n e^{-x_2} = 1/a and
    # 2 m e^{x_1} = 1/a*, so 2 m e^{-x_1} = e^{-2 x_1}/a* = 2 b*_inf.
    half_e2x = [1 / (4 * a_star * r.b_inf_star), a * r.b_inf]
    amp = [2 * r.b_inf_star, 1 / a]
    return _assemble(1, half_e2x, amp, extended)


def recover_interval_K1(r: SpectralData) -> IntervalMeasures:
    """Interval weights and gaps when K = 1; rational for rational input."""
    if r.K != 1:
        raise ValueError(f"recover_interval_K1 needs K=1, got K={r.K}")
    _require_admissible(r)
    half = _half(r)
    lam, a = r.lam[0], r.a[0]
    a_star = lam / (2 * a)
    l0 = 1 / (a_star * r.b_inf_star + half)
    l2 = 1 / (a * r.b_inf + half)
    g = r.b_inf_star + 1 / (2 * a_star)
    h = r.b_inf + 1 / (2 * a)
    y = (l0 - 1, 1 - l2)
    return IntervalMeasures(1, y, (l0, y[1] - y[0], l2), (g,), (h,))


def inverse_map(r: SpectralData, extended: bool = False) -> InterlacingConfiguration:
    """The configuration whose spectral data is r.

    Binary64 positions cannot resolve two sites whose gap is far below
    1e-16 |x|; ``extended=True`` returns the positions at 128 bits instead.
    """
    return recover_K1(r, extended) if r.K == 1 else recover_realline(r, extended)


def recovery_sensitivity(r: SpectralData, step: float = 1e-7) -> float:
    """Largest relative change of any recovered coordinate per relative change of one input.

    A forward-difference estimate; positions are measured by absolute change
    since they can sit near zero.
    """
    base = inverse_map(r)
    worst = 0.0
    fields = ["lam", "mu", "a", "b"]
    for name in fields:
        values = list(getattr(r, name))
        for i in range(len(values)):
            bumped = list(values)
            bumped[i] = values[i] * (1 + step)
            try:
                other = inverse_map(SpectralData(**{**_as_dict(r), name: tuple(bumped)}))
            except (ValidationError, RecoveryError):
                return math.inf
            worst = max(worst, _config_change(base, other) / step)
    for name in ("b_inf", "b_inf_star"):
        other = inverse_map(SpectralData(**{**_as_dict(r), name: getattr(r, name) * (1 + step)}))
        worst = max(worst, _config_change(base, other) / step)
    return worst


def _as_dict(r: SpectralData) -> dict:
    return {"lam": r.lam, "mu": r.mu, "a": r.a, "b": r.b, "b_inf": r.b_inf, "b_inf_star": r.b_inf_star}


def _config_change(p: InterlacingConfiguration, q: InterlacingConfiguration) -> float:
    dx = max(abs(u - v) for u, v in zip(p.x, q.x))
    dm = max(abs(u / v - 1) for u, v in zip(p.m_odd + p.n_even, q.m_odd + q.n_even))
    return max(dx, dm)
