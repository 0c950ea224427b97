"""Moments, Cauchy bimoments, Heine-type subset sums and the identities linking them.

For two discrete measures ``alpha = sum a_i delta_{lambda_i}`` and
``beta = sum b_j delta_{mu_j}`` on the positive axis the Heine sum is

    J^{rs}_{nm} = sum_{|I|=n, |J|=m} Delta_I^2 Delta~_J^2 / Gamma_IJ
                  * prod_{i in I} lambda_i^r a_i * prod_{j in J} mu_j^s b_j

with Delta_I the Vandermonde product over I and Gamma_IJ the Cauchy product
prod (lambda_i + mu_j).  All routines accept floats or Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core_types import AdjointResidues, GXError, Scalar, SpectralData, ValidationError
from .transition import Polynomial


class RankDeficiencyError(GXError, ArithmeticError):
    """A bimoment determinant needed as a normaliser vanished."""


class ShapeMismatchError(GXError, ValueError):
    """Starred sums need K atoms in alpha and K-1 atoms in beta."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many positive atoms ``weights[i]`` at ``support[i]``."""

    support: Tuple[Scalar, ...]
    weights: Tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "weights", tuple(self.weights))
        problems = []
        if len(self.support) != len(self.weights):
            problems.append(f"{len(self.support)} atoms but {len(self.weights)} weights")
        if any(not v > 0 for v in self.support):
            problems.append("support must be positive")
        if any(not (b > a) for a, b in zip(self.support, self.support[1:])):
            problems.append("support must be strictly increasing")
        if any(not w > 0 for w in self.weights):
            problems.append("weights must be positive")
        if problems:
            raise ValidationError("invalid discrete measure", problems)

    def __len__(self) -> int:
        return len(self.support)

    def scaled(self, power: int) -> "DiscreteMeasure":
        """The measure x^power d(self)."""
        return DiscreteMeasure(self.support, tuple(w * x ** power for x, w in zip(self.support, self.weights)))


def spectral_measures(r: SpectralData) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    """(alpha, beta) built from the eigenvalues and residues."""
    return DiscreteMeasure(r.lam, r.a), DiscreteMeasure(r.mu, r.b)


def starred_measures(r: SpectralData, adj: AdjointResidues) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    return DiscreteMeasure(r.lam, adj.a_star), DiscreteMeasure(r.mu, adj.b_star)


def moment(measure: DiscreteMeasure, k: int) -> Scalar:
    total = 0
    for x, w in zip(measure.support, measure.weights):
        total = total + w * x ** k
    return total


def bimoment(alpha: DiscreteMeasure, beta: DiscreteMeasure, a: int, b: int) -> Scalar:
    """I_ab = sum_ij lambda_i^a mu_j^b a_i b_j / (lambda_i + mu_j)."""
    total = 0
    for x, u in zip(alpha.support, alpha.weights):
        for y, v in zip(beta.support, beta.weights):
            total = total + x ** a * y ** b * u * v / (x + y)
    return total


# ---------------------------------------------------------------------------
# Heine sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeineSumKey:
    n: int
    m: int
    r: int = 0
    s: int = 0

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError(f"subset sizes must be nonnegative, got n={self.n}, m={self.m}")


def _subset_factors(points, weights, size: int, power: int, log_domain: bool):
    """For each subset: (indices, Delta^2 * prod x^power w), or its logarithm."""
    out = []
    for idx in combinations(range(len(points)), size):
        if log_domain:
            value = 0.0
            for p, i in enumerate(idx):
                value += power * math.log(points[i]) + math.log(weights[i])
                for j in idx[p + 1:]:
                    value += 2.0 * math.log(abs(points[i] - points[j]))
        else:
            value = 1
            for p, i in enumerate(idx):
                value = value * points[i] ** power * weights[i]
                for j in idx[p + 1:]:
                    value = value * (points[i] - points[j]) ** 2
        out.append((idx, value))
    return out


def heine_sum(alpha: DiscreteMeasure, beta: DiscreteMeasure, key: HeineSumKey, log_domain: bool = False) -> Scalar:
    """J^{rs}_{nm} by direct subset enumeration.

    The number of terms is C(A, n) C(B, m).  ``log_domain`` accumulates the
    Vandermonde and Cauchy products as logarithms and combines the terms with
    a log-sum-exp, which keeps large K away from under- and overflow (floats
    only).
    """
    n, m, r, s = key.n, key.m, key.r, key.s
    if n > len(alpha) or m > len(beta):
        return 0
    if n == 0 and m == 0:
        return 1
    lam, mu = alpha.support, beta.support
    left = _subset_factors(lam, alpha.weights, n, r, log_domain)
    right = _subset_factors(mu, beta.weights, m, s, log_domain)
    if log_domain:
        logs = []
        for I, u in left:
            for J, v in right:
                g = sum(math.log(lam[i] + mu[j]) for i in I for j in J)
                logs.append(u + v - g)
        top = max(logs)
        return math.exp(top) * math.fsum(math.exp(t - top) for t in logs)
    total = 0
    for I, u in left:
        for J, v in right:
            gamma = 1
            for i in I:
                for j in J:
                    gamma = gamma * (lam[i] + mu[j])
            total = total + u * v / gamma
    return total


@dataclass
class HeineMemo:
    """Per-call cache of Heine sums for one pair of measures."""

    alpha: DiscreteMeasure
    beta: DiscreteMeasure
    log_domain: bool = False
    _cache: Dict[Tuple[int, int, int, int], Scalar] = field(default_factory=dict)

    def __call__(self, n: int, m: int, r: int = 0, s: int = 0) -> Scalar:
        k = (n, m, r, s)
        if k not in self._cache:
            self._cache[k] = heine_sum(self.alpha, self.beta, HeineSumKey(n, m, r, s), self.log_domain)
        return self._cache[k]


# ---------------------------------------------------------------------------
# Starred sums (adjoint measures)
# ---------------------------------------------------------------------------

def starred_heine(r: SpectralData, adj: AdjointResidues, key: HeineSumKey) -> Tuple[Scalar, Scalar]:
    """(direct, closed form) values of the starred sum J*^{rs}_{nm}.

    The direct value sums over the adjoint measures; the closed form is
    L^{2n-m+r-1} M^{2m-n+s-1} J^{1-r,1-s}_{A-n,B-m} / (2^{n+m} J^{00}_{AB})
    with L, M the products of the lambda's and mu's.
    """
    A, B = len(r.lam), len(r.mu)
    if B != A - 1:
        raise ShapeMismatchError(f"starred sums need B = A - 1, got A={A}, B={B}")
    alpha_s, beta_s = starred_measures(r, adj)
    direct = heine_sum(alpha_s, beta_s, key)
    return direct, starred_closed_form(r, key)


def starred_closed_form(r: SpectralData, key: HeineSumKey, memo: Optional[HeineMemo] = None) -> Scalar:
    A, B = len(r.lam), len(r.mu)
    n, m = key.n, key.m
    if n > A or m > B:
        return 0
    if memo is None:
        memo = HeineMemo(*spectral_measures(r))
    L = _prod(r.lam)
    M = _prod(r.mu)
    num = _power(L, 2 * n - m + key.r - 1) * _power(M, 2 * m - n + key.s - 1)
    return num * memo(A - n, B - m, 1 - key.r, 1 - key.s) / (2 ** (n + m) * memo(A, B))


def _prod(values) -> Scalar:
    out = 1
    for v in values:
        out = out * v
    return out


def _power(base: Scalar, e: int) -> Scalar:
    return base ** e if e >= 0 else 1 / base ** (-e)


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------

def determinant(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant: exact Gaussian elimination for Fractions, LAPACK otherwise."""
    n = len(rows)
    if n == 0:
        return 1
    if any(isinstance(v, Fraction) for row in rows for v in row):
        a = [[Fraction(v) for v in row] for row in rows]
        det = Fraction(1)
        for c in range(n):
            pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != c:
                a[c], a[pivot] = a[pivot], a[c]
                det = -det
            det *= a[c][c]
            for i in range(c + 1, n):
                f = a[i][c] / a[c][c]
                if f:
                    for j in range(c, n):
                        a[i][j] -= f * a[c][j]
        return det
    return float(np.linalg.det(np.asarray(rows, dtype=float)))


def bimoment_matrix(alpha, beta, n: int, r: int = 0, s: int = 0) -> List[List[Scalar]]:
    """(I_{r+i, s+j})_{i,j < n}."""
    return [[bimoment(alpha, beta, r + i, s + j) for j in range(n)] for i in range(n)]


def k_matrix(alpha: DiscreteMeasure, beta: DiscreteMeasure, n: int) -> List[List[Scalar]]:
    """The n x n matrix whose first column is I_{i0} + delta_{i0}/2 and whose others are I_{i+1, c-1}."""
    half = Fraction(1, 2) if isinstance(alpha.support[0], Fraction) else 0.5
    rows = []
    for i in range(n):
        row = [bimoment(alpha, beta, i, 0) + (half if i == 0 else 0)]
        row += [bimoment(alpha, beta, i + 1, c - 1) for c in range(1, n)]
        rows.append(row)
    return rows


def k_determinant(alpha, beta, n: int) -> Scalar:
    """K_n as a raw determinant (test path)."""
    return determinant(k_matrix(alpha, beta, n))


def k_sequence(memo: HeineMemo, n_max: int) -> List[Scalar]:
    """K_1..K_{n_max} from the recurrence seeded at K_1 = I_00 + 1/2.

    K_{n+1}/J^{01}_{n+1,n} = K_n/J^{01}_{n,n-1}
        + J^{10}_{nn} (J^{00}_{n+1,n} + J^{11}_{n,n-1}/2) / (J^{01}_{n,n-1} J^{01}_{n+1,n}).
    """
    J = memo
    half = Fraction(1, 2) if isinstance(memo.alpha.support[0], Fraction) else 0.5
    out = [bimoment(memo.alpha, memo.beta, 0, 0) + half]
    for n in range(1, n_max):
        ratio = out[-1] / J(n, n - 1, 0, 1)
        ratio = ratio + J(n, n, 1, 0) * (J(n + 1, n) + half * J(n, n - 1, 1, 1)) / (
            J(n, n - 1, 0, 1) * J(n + 1, n, 0, 1)
        )
        out.append(ratio * J(n + 1, n, 0, 1))
    return out


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: Scalar
    rhs: Scalar
    # Magnitude of the largest term on either side; differences of products
    # are measured against it rather than against their (cancelled) value.
    term_scale: Optional[float] = None

    @property
    def residual(self) -> float:
        lhs, rhs = float(self.lhs), float(self.rhs)
        scale = max(abs(lhs), abs(rhs), self.term_scale or 0.0)
        return abs(lhs - rhs) / scale if scale else 0.0

    @property
    def exact(self) -> bool:
        return self.lhs == self.rhs


def as_fraction_measure(measure: DiscreteMeasure) -> DiscreteMeasure:
    """The same measure with every float replaced by its exact binary value."""
    return DiscreteMeasure(tuple(Fraction(v) for v in measure.support), tuple(Fraction(v) for v in measure.weights))


def determinant_identity_suite(
    alpha: DiscreteMeasure, beta: DiscreteMeasure, n: int, exact_determinants: bool = True
) -> List[IdentityCheck]:
    """Compare each bimoment determinant with its Heine-sum evaluation.

    Covers the plain and shifted bimoment determinants, the determinant with
    a moment column (two variants), both Lewis Carroll relations and the K_n
    recurrence, for every size from 1 to ``n``.

    The Heine sums are evaluated in the arithmetic of the inputs.  Bimoment
    matrices are Hilbert-like and lose roughly their condition number in
    floating point, so by default the determinant sides are evaluated exactly
    on the binary values of the inputs; pass ``exact_determinants=False`` to
    see the floating-point determinants instead.
    """
    J = HeineMemo(alpha, beta)
    if exact_determinants:
        alpha, beta = as_fraction_measure(alpha), as_fraction_measure(beta)
    checks: List[IdentityCheck] = []
    for size in range(1, n + 1):
        checks.append(IdentityCheck(f"bimoment det n={size}", determinant(bimoment_matrix(alpha, beta, size)), J(size, size)))
        for r in range(3):
            for s in range(3):
                checks.append(IdentityCheck(
                    f"shifted bimoment det n={size} r={r} s={s}",
                    determinant(bimoment_matrix(alpha, beta, size, r, s)),
                    J(size, size, r, s),
                ))
        for r in range(2):
            for s in range(2):
                rows = [
                    [bimoment(alpha, beta, r + i, s + c) for c in range(size - 1)] + [moment(alpha, r + i)]
                    for i in range(size)
                ]
                checks.append(IdentityCheck(f"moment-column det n={size} r={r} s={s}", determinant(rows), J(size, size - 1, r, s)))
        rows = [[moment(alpha, i)] + [bimoment(alpha, beta, i + 1, c) for c in range(size - 1)] for i in range(size)]
        checks.append(IdentityCheck(f"shifted moment-column det n={size}", determinant(rows), J(size, size - 1, 0, 1)))
        for r in range(2):
            for s in range(2):
                lhs = J(size + 1, size + 1, r, s) * J(size - 1, size - 1, r + 1, s + 1)
                first = J(size, size, r, s) * J(size, size, r + 1, s + 1)
                second = J(size, size, r + 1, s) * J(size, size, r, s + 1)
                checks.append(IdentityCheck(
                    f"Lewis Carroll (square) n={size} r={r} s={s}", lhs, first - second, float(max(first, second))
                ))
        lhs = J(size + 1, size, 0, 1) * J(size - 1, size - 1, 2, 0)
        first = J(size, size - 1, 0, 1) * J(size, size, 2, 0)
        second = J(size, size - 1, 1, 1) * J(size, size, 1, 0)
        checks.append(IdentityCheck(f"Lewis Carroll (rectangular) n={size}", lhs, first - second, float(max(first, second))))
    ks = k_sequence(J, n)
    for size in range(1, n + 1):
        checks.append(IdentityCheck(f"K_n recurrence n={size}", k_determinant(alpha, beta, size), ks[size - 1]))
    return checks


# ---------------------------------------------------------------------------
# Cauchy biorthogonal polynomials
# ---------------------------------------------------------------------------

def _cofactor_polynomial(rows: List[List[Scalar]], last_row_powers: int) -> Polynomial:
    """Expand det of ``rows`` with a final row (1, z, ..., z^k) along that row."""
    size = len(rows) + 1
    coeffs = []
    for c in range(size):
        minor = [[row[j] for j in range(size) if j != c] for row in rows]
        sign = 1 if (size - 1 + c) % 2 == 0 else -1
        coeffs.append(sign * determinant(minor))
    return Polynomial(coeffs)


def biorthogonal_pair(alpha: DiscreteMeasure, beta: DiscreteMeasure, n: int, tol: float = 1e-300) -> Tuple[Polynomial, Polynomial]:
    """p_n, q_n normalised so that the Cauchy pairing of p_i with q_j is delta_ij."""
    D_n = determinant(bimoment_matrix(alpha, beta, n))
    D_next = determinant(bimoment_matrix(alpha, beta, n + 1))
    if not (D_n > tol and D_next > tol):
        raise RankDeficiencyError(
            f"bimoment determinants D_{n} = {float(D_n):.3e}, D_{n + 1} = {float(D_next):.3e} are not positive; "
            f"alpha has {len(alpha)} atoms and beta {len(beta)}"
        )
    norm = D_n * D_next
    norm = math.sqrt(norm) if not isinstance(norm, Fraction) else _fraction_sqrt(norm)
    # p_n: columns j < n of (I_ij) plus a column of x^i; expand along that column.
    rows_p = [[bimoment(alpha, beta, i, j) for i in range(n + 1)] for j in range(n)]
    # q_n: rows i < n of (I_ij), j <= n, plus a last row of y^j.
    rows_q = [[bimoment(alpha, beta, i, j) for j in range(n + 1)] for i in range(n)]
    p = _cofactor_polynomial(rows_p, n) * (1 / norm)
    q = _cofactor_polynomial(rows_q, n) * (1 / norm)
    return p, q


def _fraction_sqrt(v: Fraction):
    num, den = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if num * num == v.numerator and den * den == v.denominator:
        return Fraction(num, den)
    return math.sqrt(v)


def cauchy_pairing(alpha: DiscreteMeasure, beta: DiscreteMeasure, p: Polynomial, q: Polynomial) -> Scalar:
    """Double sum of p(x) q(y)/(x + y) against alpha x beta."""
    total = 0
    for x, u in zip(alpha.support, alpha.weights):
        for y, v in zip(beta.support, beta.weights):
            total = total + p(x) * q(y) * u * v / (x + y)
    return total


# ---------------------------------------------------------------------------
# Positivity inequalities used for the ordering of recovered positions
# ---------------------------------------------------------------------------

def distance_inequalities(memo: HeineMemo, K: int) -> List[Tuple[str, Scalar]]:
    """Left sides of the two families of inequalities behind positional ordering.

    J^{00}_{j,j-1} J^{11}_{j-1,j-1} - J^{00}_{jj} J^{11}_{j-1,j-2} for 2 <= j <= K-1, and
    J^{00}_{jj} J^{11}_{j,j-1} - J^{00}_{j+1,j} J^{11}_{j-1,j-1} for 1 <= j <= K-1.
    Both must be positive.
    """
    J = memo
    out = []
    for j in range(2, K):
        out.append((f"first j={j}", J(j, j - 1) * J(j - 1, j - 1, 1, 1) - J(j, j) * J(j - 1, j - 2, 1, 1)))
    for j in range(1, K):
        out.append((f"second j={j}", J(j, j) * J(j, j - 1, 1, 1) - J(j + 1, j) * J(j - 1, j - 1, 1, 1)))
    return out
