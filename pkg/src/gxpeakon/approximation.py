"""Simultaneous rational approximation of the Weyl functions by (Q_j, P_j, R_j).

For 1 <= j <= K the triple is fixed by deg Q = j, deg P = deg R = j - 1,
Q(0) = 0, P(0) = 1 and the three conditions

    W Q - P = O(1/lambda),  Z Q - R = O(1/lambda),
    R + P W~(-lambda) + Q Z~(-lambda) = O(1/lambda^j),

the last one vanishing identically at j = K.  It can be built from the
spectral measures alone (``pade_triple``) or read off the partial transition
products (``triple_from_transition``); the two agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import lapack

from .bimoments import DiscreteMeasure, HeineMemo, as_fraction_measure, bimoment, k_sequence, moment
from .core_types import GXError, IntervalMeasures, Scalar, SpectralData
from .forward_spectral import WeylFunctionSet
from .transition import ONE, ZERO, Polynomial, transition_matrix


class RankError(GXError, ArithmeticError):
    """The bimoment system for p is singular (j exceeds what the measures support)."""


@dataclass(frozen=True)
class PadeTriple:
    j: int
    Q: Polynomial
    P: Polynomial
    R: Polynomial
    condition: float = 1.0

    def degrees_ok(self) -> bool:
        if self.j == 0:
            return self.Q.is_zero() and self.P == ONE and self.R.is_zero()
        return self.Q.degree == self.j and self.P.degree <= self.j - 1 and self.R.degree <= self.j - 1

    def normalised(self, tol: float = 1e-12) -> bool:
        return abs(float(self.Q(0))) <= tol and abs(float(self.P(0)) - 1) <= tol


DEGENERATE_TRIPLE = PadeTriple(0, ZERO, ONE, ZERO)


def _solve_transpose_row0(M: List[List[Scalar]]) -> Tuple[List[Scalar], float]:
    """Row 0 of M^{-1}, i.e. z with M^T z = e_0, plus a condition estimate."""
    n = len(M)
    if any(isinstance(v, Fraction) for row in M for v in row):
        A = [[Fraction(M[c][r]) for c in range(n)] + [Fraction(int(r == 0))] for r in range(n)]
        for c in range(n):
            pivot = next((i for i in range(c, n) if A[i][c] != 0), None)
            if pivot is None:
                raise RankError(f"bimoment system of size {n} is singular")
            A[c], A[pivot] = A[pivot], A[c]
            for i in range(n):
                if i != c and A[i][c] != 0:
                    f = A[i][c] / A[c][c]
                    A[i] = [u - f * v for u, v in zip(A[i], A[c])]
        return [A[i][n] / A[i][i] for i in range(n)], 1.0
    Mt = np.asarray(M, dtype=float).T.copy(order="F")
    lu, ipiv, jpiv, info = lapack.dgetc2(Mt)
    if info > 0 and abs(lu[info - 1, info - 1]) == 0:
        raise RankError(f"bimoment system of size {n} is singular")
    rhs = np.zeros(n)
    rhs[0] = 1.0
    z, scale = lapack.dgesc2(lu, rhs, ipiv, jpiv)
    cond = float(np.linalg.cond(np.asarray(M, dtype=float)))
    return list(z / scale), cond


def p_polynomial(alpha: DiscreteMeasure, beta: DiscreteMeasure, j: int) -> Tuple[Polynomial, float]:
    """p with Q = lambda p: ratio of the determinant with a power column to the one with moments.

    The matrix has first column alpha_i and further columns I_{i+1,c}, c <= j-2.
    By Cramer's rule the coefficients of p form row 0 of its inverse.
    """
    if j < 1:
        raise ValueError("p is defined for j >= 1")
    M = [[moment(alpha, i)] + [bimoment(alpha, beta, i + 1, c) for c in range(j - 1)] for i in range(j)]
    coeffs, cond = _solve_transpose_row0(M)
    return Polynomial(coeffs), cond


EXACT_REFINEMENT_CONDITION = 1e3


def pade_triple(
    alpha: DiscreteMeasure, beta: DiscreteMeasure, b_inf: Scalar, j: int, method: str = "auto"
) -> PadeTriple:
    """(Q_j, P_j, R_j) from the spectral measures and b_inf.

    ``method="float"`` solves for p by LU with full pivoting and stops there.
    The bimoment matrix is Hilbert-like, so its condition number grows fast
    with j while the triple itself stays well determined by the atoms.
    ``method="auto"`` (default) therefore redoes the construction in exact
    rational arithmetic on the binary values of the inputs whenever the
    condition estimate exceeds EXACT_REFINEMENT_CONDITION, and rounds the
    result.  ``method="exact"`` always does so.
    """
    if j == 0:
        return DEGENERATE_TRIPLE
    if j > len(alpha):
        raise RankError(f"j = {j} exceeds the {len(alpha)} atoms of alpha")
    is_exact = isinstance(alpha.support[0], Fraction)
    if not is_exact and method != "float":
        cond = 0.0
        if method == "auto":
            _, cond = p_polynomial(alpha, beta, j)
        if method == "exact" or cond > EXACT_REFINEMENT_CONDITION:
            exact = pade_triple(as_fraction_measure(alpha), as_fraction_measure(beta), Fraction(b_inf), j)
            to_float = lambda poly: Polynomial(float(c) for c in poly.coeffs)
            return PadeTriple(j, to_float(exact.Q), to_float(exact.P), to_float(exact.R), cond or 1.0)
    p, cond = p_polynomial(alpha, beta, j)
    Q = p * Polynomial([0, 1])
    P = ZERO
    R = ZERO
    for lam_i, a_i in zip(alpha.support, alpha.weights):
        dq = Q.difference_quotient(lam_i)
        P = P + dq * a_i
        for mu_j, b_j in zip(beta.support, beta.weights):
            R = R + dq * (a_i * b_j / (lam_i + mu_j))
    half = Fraction(1, 2) if isinstance(b_inf, Fraction) else 0.5
    R = R + p * half + P * b_inf
    return PadeTriple(j, Q, P, R, cond)


def triple_from_transition(meas: IntervalMeasures, j: int) -> PadeTriple:
    """Q = -(T_j)_32, P = (T_j)_22, R = (T_j)_12 from the partial transition product."""
    T = transition_matrix(meas).partials[j]
    return PadeTriple(j, -T.entry(3, 2), T.entry(2, 2), T.entry(1, 2))


def triple_difference(a: PadeTriple, b: PadeTriple) -> float:
    """Largest coefficientwise difference, relative to the largest coefficient involved."""
    worst = 0.0
    for name in ("Q", "P", "R"):
        x, y = getattr(a, name), getattr(b, name)
        n = max(len(x.coeffs), len(y.coeffs))
        scale = max([abs(float(c)) for c in x.coeffs + y.coeffs] + [1e-300])
        for k in range(n):
            worst = max(worst, abs(float(x.coeff(k) - y.coeff(k))) / scale)
    return worst


def derivative_at_zero(p: Polynomial) -> Scalar:
    return p.coeff(1)


# ---------------------------------------------------------------------------
# Laurent expansions at infinity
# ---------------------------------------------------------------------------

class Laurent:
    """Truncated series sum_k coeff[k] lambda^k for k from ``top`` down to ``bottom``.

    ``size`` tracks, per coefficient, the sum of absolute values of every
    product that contributed to it; residuals are reported relative to it.
    """

    def __init__(self, coeffs: Dict[int, Scalar], bottom: int, size: Optional[Dict[int, float]] = None):
        self.coeffs = dict(coeffs)
        self.bottom = bottom
        self.size = dict(size) if size is not None else {k: abs(float(v)) for k, v in coeffs.items()}

    @classmethod
    def from_polynomial(cls, p: Polynomial, bottom: int) -> "Laurent":
        return cls({k: c for k, c in enumerate(p.coeffs)}, bottom)

    @classmethod
    def from_partial_fraction(cls, poles, residues, constant, half_over_lambda, sign: int, order: int) -> "Laurent":
        """Expansion of F(sign * lambda) for F = constant + [1/(2 lambda)] + sum r/(lambda - p).

        1/(s lambda - p) = s sum_k (s p)^k lambda^{-k-1} for s = +-1.
        """
        coeffs: Dict[int, Scalar] = {0: constant}
        for k in range(order):
            term = 0
            for p_, r_ in zip(poles, residues):
                term = term + r_ * (sign * p_) ** k
            coeffs[-k - 1] = sign * term
        if half_over_lambda:
            half = Fraction(1, 2) if isinstance(constant, Fraction) else 0.5
            coeffs[-1] = coeffs[-1] + sign * half
        return cls(coeffs, -order)

    def __add__(self, other: "Laurent") -> "Laurent":
        keys = set(self.coeffs) | set(other.coeffs)
        bottom = max(self.bottom, other.bottom)
        out, size = {}, {}
        for k in keys:
            if k < bottom:
                continue
            out[k] = self.coeffs.get(k, 0) + other.coeffs.get(k, 0)
            size[k] = self.size.get(k, 0.0) + other.size.get(k, 0.0)
        return Laurent(out, bottom, size)

    def __neg__(self) -> "Laurent":
        return Laurent({k: -v for k, v in self.coeffs.items()}, self.bottom, self.size)

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: "Laurent") -> "Laurent":
        top_a = max(self.coeffs, default=0)
        top_b = max(other.coeffs, default=0)
        bottom = max(self.bottom + top_b, other.bottom + top_a)
        out: Dict[int, Scalar] = {}
        size: Dict[int, float] = {}
        for i, u in self.coeffs.items():
            for k, v in other.coeffs.items():
                e = i + k
                if e < bottom:
                    continue
                out[e] = out.get(e, 0) + u * v
                size[e] = size.get(e, 0.0) + abs(float(u)) * abs(float(v))
        return Laurent(out, bottom, size)

    def relative(self, k: int) -> float:
        value = abs(float(self.coeffs.get(k, 0)))
        scale = self.size.get(k, 0.0)
        return value / scale if scale else value


@dataclass
class OrderReport:
    """Relative sizes of the Laurent coefficients that must vanish."""

    j: int
    first: Dict[int, float]
    second: Dict[int, float]
    third: Dict[int, float]

    def worst(self) -> float:
        return max(list(self.first.values()) + list(self.second.values()) + list(self.third.values()) + [0.0])


def approximation_orders(triple: PadeTriple, weyl: WeylFunctionSet, K: int, extra: int = 2) -> OrderReport:
    """Laurent coefficients of W Q - P, Z Q - R and R + P W~(-.) + Q Z~(-.).

    The first two must vanish at powers lambda^k, k >= 0; the third at
    k >= 1 - j, and at every computed power when j = K.
    """
    j = triple.j
    order = 2 * K + 2 + extra + j
    W = Laurent.from_partial_fraction(weyl.W.poles, weyl.W.residues, 0 * weyl.W_twin.constant, False, 1, order)
    Z = Laurent.from_partial_fraction(weyl.Z.poles, weyl.Z.residues, 0 * weyl.W_twin.constant, True, 1, order)
    Wt = Laurent.from_partial_fraction(weyl.W_twin.poles, weyl.W_twin.residues, weyl.W_twin.constant, False, -1, order)
    Zt = Laurent.from_partial_fraction(weyl.Z_twin.poles, weyl.Z_twin.residues, 0 * weyl.W_twin.constant, True, -1, order)
    Q = Laurent.from_polynomial(triple.Q, -order)
    P = Laurent.from_polynomial(triple.P, -order)
    R = Laurent.from_polynomial(triple.R, -order)
    first = W * Q - P
    second = Z * Q - R
    third = R + P * Wt + Q * Zt
    top = j + 1
    report_first = {k: first.relative(k) for k in range(0, top + 1)}
    report_second = {k: second.relative(k) for k in range(0, top + 1)}
    low = third.bottom if j == K else 1 - j
    report_third = {k: third.relative(k) for k in range(low, top + 1)}
    return OrderReport(j, report_first, report_second, report_third)


def recover_even_differences(triples: Sequence[PadeTriple]) -> Tuple[List[Scalar], List[Scalar]]:
    """h_j and (1 - y_2j) h_j for j = 1..K from the triples of orders 0..K.

    h_j = R_{K-j+1}(0) - R_{K-j}(0) and (1 - y_2j) h_j = Q'_{K-j+1}(0) - Q'_{K-j}(0).
    """
    orders = [t.j for t in triples]
    if orders != list(range(len(triples))) or len(triples) < 2:
        raise ValueError(f"need triples of orders 0..K in sequence, got {orders}")
    K = len(triples) - 1
    h, hy = [], []
    for j in range(1, K + 1):
        hi, lo = triples[K - j + 1], triples[K - j]
        h.append(hi.R(0) - lo.R(0))
        hy.append(derivative_at_zero(hi.Q) - derivative_at_zero(lo.Q))
    return h, hy


def closed_form_checks(alpha: DiscreteMeasure, beta: DiscreteMeasure, b_inf: Scalar, triple: PadeTriple) -> Tuple[float, float]:
    """Relative errors of Q'(0) = J^{20}_{j-1,j-1}/J^{01}_{j,j-1} and R(0) = K_j/J^{01}_{j,j-1} + b_inf."""
    j = triple.j
    J = HeineMemo(alpha, beta)
    q0 = J(j - 1, j - 1, 2, 0) / J(j, j - 1, 0, 1)
    r0 = k_sequence(J, j)[-1] / J(j, j - 1, 0, 1) + b_inf
    e1 = abs(float(derivative_at_zero(triple.Q) - q0)) / abs(float(q0))
    e2 = abs(float(triple.R(0) - r0)) / abs(float(r0))
    return e1, e2
