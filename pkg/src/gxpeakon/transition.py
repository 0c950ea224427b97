"""Polynomial 3x3 matrices: transition matrices, the sigma involution, real-line ABC polynomials.

Coefficients are plain Python scalars, so the same code runs in binary64 and
in exact rational arithmetic (``fractions.Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .core_types import (
    AnyConfiguration,
    ExactConfiguration,
    GXError,
    IntervalMeasures,
    Scalar,
)


class Polynomial:
    """Dense univariate polynomial in lambda, coefficients low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: Tuple[Scalar, ...] = tuple(c)

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, value: Scalar = 1) -> "Polynomial":
        return cls([0] * degree + [value])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = _as_poly(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def derivative(self) -> "Polynomial":
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def reflect(self) -> "Polynomial":
        """p(-lambda)."""
        return Polynomial(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def divide_linear(self, root: Scalar) -> Tuple["Polynomial", Scalar]:
        """Synthetic division by (lambda - root): returns (quotient, remainder)."""
        if not self.coeffs:
            return Polynomial(), 0
        n = len(self.coeffs) - 1
        quotient = [0] * n
        acc = self.coeffs[n]
        for k in range(n - 1, -1, -1):
            quotient[k] = acc
            acc = self.coeffs[k] + acc * root
        return Polynomial(quotient), acc

    def difference_quotient(self, root: Scalar) -> "Polynomial":
        """(p(lambda) - p(root)) / (lambda - root)."""
        return self.divide_linear(root)[0]

    def max_abs_diff(self, other: "Polynomial") -> float:
        n = max(len(self.coeffs), len(other.coeffs))
        return max((abs(float(self.coeff(k) - other.coeff(k))) for k in range(n)), default=0.0)


def _as_poly(value) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial([value])


ZERO = Polynomial()
ONE = Polynomial([1])


class PolynomialMatrix:
    """3x3 matrix with :class:`Polynomial` entries (row-major, 0-based)."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence]):
        self.entries: Tuple[Tuple[Polynomial, ...], ...] = tuple(
            tuple(_as_poly(e) for e in row) for row in entries
        )

    @classmethod
    def identity(cls) -> "PolynomialMatrix":
        return cls([[1 if i == j else 0 for j in range(3)] for i in range(3)])

    def __getitem__(self, ij: Tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    def entry(self, i: int, j: int) -> Polynomial:
        """1-based access, S.entry(3, 1) is S_31."""
        return self.entries[i - 1][j - 1]

    def __matmul__(self, other: "PolynomialMatrix") -> "PolynomialMatrix":
        A, B = self.entries, other.entries
        return PolynomialMatrix(
            [[A[i][0] * B[0][j] + A[i][1] * B[1][j] + A[i][2] * B[2][j] for j in range(3)]
             for i in range(3)]
        )

    def __eq__(self, other):
        return isinstance(other, PolynomialMatrix) and self.entries == other.entries

    def __repr__(self):
        return f"PolynomialMatrix({[[list(p.coeffs) for p in row] for row in self.entries]!r})"

    def map(self, fn) -> "PolynomialMatrix":
        return PolynomialMatrix([[fn(p) for p in row] for row in self.entries])

    def transpose(self) -> "PolynomialMatrix":
        return PolynomialMatrix([[self.entries[j][i] for j in range(3)] for i in range(3)])

    def reflect(self) -> "PolynomialMatrix":
        """X(-lambda)."""
        return self.map(Polynomial.reflect)

    def __call__(self, lam):
        return [[p(lam) for p in row] for row in self.entries]

    def degrees(self) -> List[List[int]]:
        return [[p.degree for p in row] for row in self.entries]

    def determinant(self) -> Polynomial:
        a = self.entries
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )

    def adjugate(self) -> "PolynomialMatrix":
        a = self.entries

        def minor(i, j):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            return a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]]

        cof = [[minor(i, j) if (i + j) % 2 == 0 else -minor(i, j) for j in range(3)]
               for i in range(3)]
        return PolynomialMatrix(cof).transpose()

    def max_abs_diff(self, other: "PolynomialMatrix") -> float:
        return max(self.entries[i][j].max_abs_diff(other.entries[i][j])
                   for i in range(3) for j in range(3))


# Anti-diagonal signature matrix used by sigma.
J_MATRIX = PolynomialMatrix([[0, 0, 1], [0, -1, 0], [1, 0, 0]])


def propagation_matrix(l: Scalar) -> PolynomialMatrix:
    """Identity except the (3,1) entry, which is -lambda * l."""
    if l < 0:
        raise ValueError("gap length must be nonnegative")
    zero = l * 0
    return PolynomialMatrix([
        [1, 0, 0],
        [0, 1, 0],
        [Polynomial([zero, -l]), 0, 1],
    ])


def mass_jump_matrix(x: Scalar, y: Scalar) -> PolynomialMatrix:
    """Unit upper-triangular jump with (1,2)=x, (2,3)=y, (1,3)=x*y/2."""
    half = Fraction(1, 2) if isinstance(x * y, (int, Fraction)) else 0.5
    return PolynomialMatrix([
        [1, x, x * y * half],
        [0, 1, y],
        [0, 0, 1],
    ])


@dataclass(frozen=True)
class TransitionProducts:
    """S (or S-twin) together with its partial products T_0..T_K."""

    S: PolynomialMatrix
    partials: Tuple[PolynomialMatrix, ...]
    twin: bool


def transition_matrix(meas: IntervalMeasures, twin: bool = False) -> TransitionProducts:
    """Build S = L_2K j(h_K,0) L_2K-1 j(0,g_K) L_2K-2 ... j(h_1,0) L_1 j(0,g_1) L_0.

    The twin swaps the arguments of every jump matrix.  ``partials[i]`` is the
    product of the leftmost 1+4i factors, ending with L_{2(K-i)}.
    """
    K = meas.K
    zero = meas.l[0] * 0
    T = propagation_matrix(meas.l[2 * K])
    partials = [T]
    for i in range(1, K + 1):
        a = K - i  # 0-based index of the mass pair being added
        if twin:
            even_jump = mass_jump_matrix(zero, meas.h[a])
            odd_jump = mass_jump_matrix(meas.g[a], zero)
        else:
            even_jump = mass_jump_matrix(meas.h[a], zero)
            odd_jump = mass_jump_matrix(zero, meas.g[a])
        T = T @ even_jump @ propagation_matrix(meas.l[2 * a + 1]) @ odd_jump @ propagation_matrix(meas.l[2 * a])
        partials.append(T)
    return TransitionProducts(T, tuple(partials), twin)


class NonUnimodularError(GXError, ValueError):
    """sigma requires det X = 1 identically."""


def sigma_involution(X: PolynomialMatrix, check: bool = True, tol: float = 0.0) -> PolynomialMatrix:
    """Return J X(-lambda)^{-T} J, computed through the adjugate (no division)."""
    if check:
        det = X.determinant()
        residual = det.max_abs_diff(ONE)
        if residual > tol:
            raise NonUnimodularError(f"det X - 1 has coefficient size {residual!r}")
    # For det X = 1, X^{-T} = adj(X)^T.
    return J_MATRIX @ X.reflect().adjugate().transpose() @ J_MATRIX


def expected_degrees(j: int, twin: bool) -> List[List[int]]:
    """Entry degree tables for T_j (j >= 1) and T-twin_j (j >= 2)."""
    if twin:
        return [[j - 1, j - 1, j - 2], [j, j, j - 1], [j, j, j - 1]]
    return [[j, j - 1, j - 1], [j, j - 1, j - 1], [j + 1, j, j]]


def leading_coefficient_S31(meas: IntervalMeasures, twin: bool = False) -> Scalar:
    """Closed form for the top coefficient of S_31 (degree K+1) or S-twin_31 (degree K)."""
    K = meas.K
    l, g, h = meas.l, meas.g, meas.h
    if not twin:
        value = (-1) ** (K + 1)
        for m in range(K + 1):
            value = value * l[2 * m]
        for a in range(K):
            value = value * g[a] * h[a]
        return value
    if K == 1:
        return -2 * (l[0] * 0 + 1)
    value = (-1) ** K * (l[2 * K] + l[2 * K - 1]) * (l[0] + l[1])
    for m in range(2, K):
        value = value * l[2 * m - 1]
    for a in range(K - 1):
        value = value * g[a + 1] * h[a]
    return value


# ---------------------------------------------------------------------------
# Real-line polynomials A, B, C
# ---------------------------------------------------------------------------

def _real_line_jump(k: int, m, n, q, twin: bool) -> PolynomialMatrix:
    """Jump matrix at site k (1-based) acting on (A, B, C); q = e^{x_k}."""
    odd = k % 2 == 1
    if twin:
        odd = not odd
        weight = n if k % 2 == 0 else m
    else:
        weight = m if odd else n
    if odd:
        return PolynomialMatrix([
            [1, 0, 0],
            [weight * q, 1, Polynomial([0, weight / q])],
            [0, 0, 1],
        ])
    return PolynomialMatrix([
        [1, Polynomial([0, -2 * weight / q]), 0],
        [0, 1, 0],
        [0, 2 * weight * q, 1],
    ])


@dataclass(frozen=True)
class WeylNumerators:
    """(A, B, C) from the real-line product, plus the twin (A~, B~, C~)."""

    A: Polynomial
    B: Polynomial
    C: Polynomial
    A_twin: Polynomial
    B_twin: Polynomial
    C_twin: Polynomial

    def coefficient(self, name: str, k: int) -> Scalar:
        """[X]_k, the coefficient of (-2 lambda)^k."""
        return getattr(self, name).coeff(k) / (-2) ** k


def _abc_vector(config: AnyConfiguration, twin: bool) -> Tuple[Polynomial, Polynomial, Polynomial]:
    m, n = config.site_masses()
    q = config.exp_positions()
    vec = [ONE, ZERO, ZERO]
    for k in range(1, config.N + 1):
        jump = _real_line_jump(k, m[k - 1], n[k - 1], q[k - 1], twin).entries
        vec = [jump[i][0] * vec[0] + jump[i][1] * vec[1] + jump[i][2] * vec[2] for i in range(3)]
    return vec[0], vec[1], vec[2]


def abc_values(config: AnyConfiguration, lam: Scalar, twin: bool = False) -> Tuple[Scalar, Scalar, Scalar]:
    """(A, B, C) at a single point, propagated numerically without expanding coefficients."""
    m, n = config.site_masses()
    q = config.exp_positions()
    A, B, C = 1, 0, 0
    for k in range(1, config.N + 1):
        odd = (k % 2 == 1) != twin
        w = m[k - 1] if k % 2 == 1 else n[k - 1]
        if odd:
            B = B + w * q[k - 1] * A + lam * w / q[k - 1] * C
        else:
            A = A - 2 * lam * w / q[k - 1] * B
            C = C + 2 * w * q[k - 1] * B
    return A, B, C


def abc_polynomials(config: AnyConfiguration) -> WeylNumerators:
    """Real-line polynomials A, B, C and their twins, started from (1, 0, 0)."""
    A, B, C = _abc_vector(config, twin=False)
    At, Bt, Ct = _abc_vector(config, twin=True)
    return WeylNumerators(A, B, C, At, Bt, Ct)


# ---------------------------------------------------------------------------
# Wavefunction on the interval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WavefunctionProfile:
    """Piecewise description of Phi(y) on (-1, 1).

    ``breakpoints`` has 2K+2 entries -1 = y_0 < y_1 < ... < y_2K+1 = 1.
    ``left[k]`` is Phi just right of y_k and ``right[k]`` just left of y_{k+1}
    on the k-th open interval.  phi_1, phi_2 are constant on each piece and
    phi_3 is linear with slope -lambda * phi_1.
    """

    lam: Scalar
    twin: bool
    breakpoints: Tuple[Scalar, ...]
    left: Tuple[Tuple[Scalar, Scalar, Scalar], ...]
    right: Tuple[Tuple[Scalar, Scalar, Scalar], ...]

    @property
    def endpoint(self) -> Tuple[Scalar, Scalar, Scalar]:
        return self.right[-1]

    def rows(self):
        """(y, phi1, phi2, phi3) at both ends of every piece."""
        for k in range(len(self.left)):
            yield (self.breakpoints[k],) + tuple(self.left[k])
            yield (self.breakpoints[k + 1],) + tuple(self.right[k])


def evaluate_wavefunction(meas: IntervalMeasures, lam: Scalar, twin: bool = False) -> WavefunctionProfile:
    """Propagate Phi(-1) = (1, 0, 0) across the interval at a fixed lambda."""
    K = meas.K
    one = meas.l[0] * 0 + 1
    ys = (-one,) + tuple(meas.y) + (one,)
    phi = [one, one * 0, one * 0]
    left, right = [], []
    for k in range(2 * K + 1):
        if k > 0:
            site = k  # 1-based site index of y_k
            a = (site - 1) // 2
            odd = site % 2 == 1
            if not twin:
                if odd:
                    phi[1] = phi[1] + meas.g[a] * phi[2]
                else:
                    phi[0] = phi[0] + meas.h[a] * phi[1]
            else:
                if odd:
                    phi[0] = phi[0] + meas.g[a] * phi[1]
                else:
                    phi[1] = phi[1] + meas.h[a] * phi[2]
        left.append(tuple(phi))
        phi[2] = phi[2] - lam * meas.l[k] * phi[0]
        right.append(tuple(phi))
    return WavefunctionProfile(lam, twin, ys, tuple(left), tuple(right))
