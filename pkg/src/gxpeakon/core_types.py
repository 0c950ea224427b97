"""Value types, the real-line/interval change of variables, and admissibility checks.

Indexing convention: mathematical site labels run 1..2K, storage is 0-based.
``x[k]`` holds x_{k+1}; ``m_odd[a]`` holds m_{2a+1}; ``n_even[a]`` holds n_{2a+2};
``l[k]`` holds the gap l_k (k = 0..2K) so no shift is needed there.

Two arithmetic backends share these types.  Floating point configurations store
positions ``x``; exact configurations (:class:`ExactConfiguration`) store the
rational numbers ``q_k = exp(x_k)`` so every downstream formula stays rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import mpmath

Scalar = Union[float, Fraction]


class GXError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(GXError, ValueError):
    """Input data violate the invariants of their type."""

    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations) or [message]


class DomainError(GXError, ValueError):
    """A value lies outside the domain of a transform."""


class TransformOverflowError(GXError, OverflowError):
    """tanh saturated to +-1 in binary64, so the interval picture is lost."""

    def __init__(self, index: int, x: float):
        super().__init__(
            f"position x_{index + 1} = {x!r} saturates tanh to +-1 in binary64"
        )
        self.index = index


class NumericalDegeneracyError(GXError, ArithmeticError):
    """Eigenvalues came back complex, repeated or nonpositive."""


class RecoveryError(GXError, ValueError):
    """Spectral data cannot be mapped back to a configuration."""


def _strictly_increasing(values: Sequence[Scalar]) -> bool:
    return all(values[i] < values[i + 1] for i in range(len(values) - 1))


@dataclass(frozen=True)
class InterlacingConfiguration:
    """Peakon data x_1 < ... < x_2K with masses m at odd and n at even sites."""

    K: int
    x: Tuple[float, ...]
    m_odd: Tuple[float, ...]
    n_even: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "m_odd", tuple(float(v) for v in self.m_odd))
        object.__setattr__(self, "n_even", tuple(float(v) for v in self.n_even))
        problems = configuration_violations(self.K, self.x, self.m_odd, self.n_even)
        if problems:
            raise ValidationError("invalid interlacing configuration", problems)

    @property
    def N(self) -> int:
        return 2 * self.K

    def exp_positions(self) -> List[float]:
        return [math.exp(v) for v in self.x]

    def site_masses(self) -> Tuple[List[float], List[float]]:
        """Return (m_1..m_N, n_1..n_N) with zeros at the empty sites."""
        m = [0.0] * self.N
        n = [0.0] * self.N
        for a in range(self.K):
            m[2 * a] = self.m_odd[a]
            n[2 * a + 1] = self.n_even[a]
        return m, n


@dataclass(frozen=True)
class ExactConfiguration:
    """Exact-mode configuration parameterized by q_k = exp(x_k) in Q."""

    K: int
    q: Tuple[Fraction, ...]
    m_odd: Tuple[Fraction, ...]
    n_even: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(Fraction(v) for v in self.q))
        object.__setattr__(self, "m_odd", tuple(Fraction(v) for v in self.m_odd))
        object.__setattr__(self, "n_even", tuple(Fraction(v) for v in self.n_even))
        problems = configuration_violations(self.K, self.q, self.m_odd, self.n_even)
        if any(v <= 0 for v in self.q):
            problems.append("q entries must be positive (q_k = exp(x_k))")
        if problems:
            raise ValidationError("invalid exact configuration", problems)

    @property
    def N(self) -> int:
        return 2 * self.K

    def exp_positions(self) -> List[Fraction]:
        return list(self.q)

    def site_masses(self) -> Tuple[List[Fraction], List[Fraction]]:
        m = [Fraction(0)] * self.N
        n = [Fraction(0)] * self.N
        for a in range(self.K):
            m[2 * a] = self.m_odd[a]
            n[2 * a + 1] = self.n_even[a]
        return m, n

    def to_float(self) -> InterlacingConfiguration:
        return InterlacingConfiguration(
            self.K,
            tuple(math.log(v) for v in self.q),
            tuple(float(v) for v in self.m_odd),
            tuple(float(v) for v in self.n_even),
        )


@dataclass(frozen=True)
class ExtendedConfiguration:
    """Configuration with positions and masses held as mpmath numbers.

    Produced by ``inverse_map(r, extended=True)`` for data whose recovered
    sites sit closer together than binary64 can resolve at their magnitude.
    The forward map accepts it and treats every value as exact.
    """

    K: int
    x: Tuple
    m_odd: Tuple
    n_even: Tuple

    def __post_init__(self):
        for name in ("x", "m_odd", "n_even"):
            values = getattr(self, name)
            object.__setattr__(self, name, tuple(v if isinstance(v, mpmath.mpf) else mpmath.mpf(v) for v in values))
        problems = configuration_violations(self.K, self.x, self.m_odd, self.n_even)
        if problems:
            raise ValidationError("invalid extended configuration", problems)

    @property
    def N(self) -> int:
        return 2 * self.K

    def site_masses(self):
        m = [0] * self.N
        n = [0] * self.N
        for a in range(self.K):
            m[2 * a] = self.m_odd[a]
            n[2 * a + 1] = self.n_even[a]
        return m, n

    def rounded(self) -> InterlacingConfiguration:
        """Nearest binary64 configuration (may fail validation if sites merge)."""
        return InterlacingConfiguration(
            self.K,
            tuple(float(v) for v in self.x),
            tuple(float(v) for v in self.m_odd),
            tuple(float(v) for v in self.n_even),
        )


AnyConfiguration = Union[InterlacingConfiguration, ExactConfiguration]


def configuration_violations(K, positions, m_odd, n_even) -> List[str]:
    problems: List[str] = []
    if not isinstance(K, int) or K < 1:
        return [f"K must be a positive integer, got {K!r}"]
    if len(positions) != 2 * K:
        problems.append(f"expected {2 * K} positions, got {len(positions)}")
    if len(m_odd) != K:
        problems.append(f"expected {K} odd-site masses, got {len(m_odd)}")
    if len(n_even) != K:
        problems.append(f"expected {K} even-site masses, got {len(n_even)}")
    if problems:
        return problems
    if not all(math.isfinite(float(v)) for v in positions):
        problems.append("positions must be finite")
    elif not _strictly_increasing(positions):
        problems.append("positions must be strictly increasing")
    for name, values in (("m_odd", m_odd), ("n_even", n_even)):
        for i, v in enumerate(values):
            if not (v > 0) or not math.isfinite(float(v)):
                problems.append(f"{name}[{i}] = {v!r} must be positive and finite")
    return problems


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues, residues and the two constants b_inf, b_inf_star.

    The JSON key for ``lam`` is ``"lambda"``.  Construction does not validate;
    use :func:`validate_admissible` for a membership report.
    """

    lam: Tuple[Scalar, ...]
    mu: Tuple[Scalar, ...]
    a: Tuple[Scalar, ...]
    b: Tuple[Scalar, ...]
    b_inf: Scalar
    b_inf_star: Scalar

    def __post_init__(self):
        for name in ("lam", "mu", "a", "b"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def K(self) -> int:
        return len(self.lam)

    def as_floats(self) -> "SpectralData":
        return SpectralData(
            tuple(float(v) for v in self.lam),
            tuple(float(v) for v in self.mu),
            tuple(float(v) for v in self.a),
            tuple(float(v) for v in self.b),
            float(self.b_inf),
            float(self.b_inf_star),
        )


@dataclass(frozen=True)
class IntervalMeasures:
    """Sites y_1..y_2K in (-1, 1), gaps l_0..l_2K, weights g (odd), h (even)."""

    K: int
    y: Tuple[Scalar, ...]
    l: Tuple[Scalar, ...]
    g: Tuple[Scalar, ...]
    h: Tuple[Scalar, ...]

    def __post_init__(self):
        for name in ("y", "l", "g", "h"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def violations(self, tol: float = 1e-12) -> List[str]:
        K = self.K
        problems: List[str] = []
        if len(self.y) != 2 * K or len(self.l) != 2 * K + 1:
            return ["shape mismatch between K, y and l"]
        if len(self.g) != K or len(self.h) != K:
            return ["shape mismatch between K, g and h"]
        if not all(-1 < v < 1 for v in self.y):
            problems.append("sites must lie in the open interval (-1, 1)")
        if not _strictly_increasing(self.y):
            problems.append("sites must be strictly increasing")
        if any(v <= 0 for v in self.l):
            problems.append("gaps must be positive")
        if abs(float(sum(self.l)) - 2.0) > tol * 2:
            problems.append(f"gaps must sum to 2, got {float(sum(self.l))!r}")
        ends = [-1] + list(self.y) + [1]
        for k, lk in enumerate(self.l):
            if abs(float(lk - (ends[k + 1] - ends[k]))) > tol:
                problems.append(f"gap l_{k} inconsistent with sites")
                break
        if any(v <= 0 for v in self.g) or any(v <= 0 for v in self.h):
            problems.append("weights must be positive")
        return problems


@dataclass(frozen=True)
class AdjointResidues:
    """Residues of the adjoint Weyl functions and of Z, Z-twin."""

    a_star: Tuple[Scalar, ...]
    b_star: Tuple[Scalar, ...]
    c: Tuple[Scalar, ...]
    d: Tuple[Scalar, ...]

    def __post_init__(self):
        for name in ("a_star", "b_star", "c", "d"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass
class AdmissibilityReport:
    ok: bool
    violations: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def gaps_from_sites(y: Sequence[Scalar]) -> List[Scalar]:
    one = type(y[0])(1) if y else 1
    ends = [-one] + list(y) + [one]
    return [ends[k + 1] - ends[k] for k in range(len(ends) - 1)]


def to_interval(config: AnyConfiguration) -> IntervalMeasures:
    """Map real-line peakon data to weights on (-1, 1).

    y_k = tanh x_k, g_a = 2 m_{2a-1} cosh x_{2a-1}, h_a = 2 n_{2a} cosh x_{2a}.
    Exact configurations use q = e^x, so y = (q^2-1)/(q^2+1), 2 cosh x = q + 1/q.
    """
    K = config.K
    if isinstance(config, ExactConfiguration):
        q = config.q
        y = [(v * v - 1) / (v * v + 1) for v in q]
        two_cosh = [v + 1 / v for v in q]
        l = gaps_from_sites(y)
    else:
        y = []
        for k, v in enumerate(config.x):
            t = math.tanh(v)
            if abs(t) >= 1.0:
                raise TransformOverflowError(k, v)
            y.append(t)
        two_cosh = [2.0 * math.cosh(v) for v in config.x]
        l = _float_gaps(config.x)
    g = [config.m_odd[a] * two_cosh[2 * a] for a in range(K)]
    h = [config.n_even[a] * two_cosh[2 * a + 1] for a in range(K)]
    return IntervalMeasures(K, tuple(y), tuple(l), tuple(g), tuple(h))


def _float_gaps(x: Sequence[float]) -> List[float]:
    # tanh differences written without cancellation:
    # tanh b - tanh a = sinh(b-a) / (cosh a cosh b), 1 - tanh x = e^{-x} / cosh x.
    l = [math.exp(x[0]) / math.cosh(x[0])]
    for k in range(len(x) - 1):
        l.append(math.sinh(x[k + 1] - x[k]) / (math.cosh(x[k]) * math.cosh(x[k + 1])))
    l.append(math.exp(-x[-1]) / math.cosh(x[-1]))
    return l


def from_interval(meas: IntervalMeasures) -> AnyConfiguration:
    """Inverse of :func:`to_interval`.

    Fraction-valued measures give an :class:`ExactConfiguration` when every
    q_k = sqrt((1+y)/(1-y)) is rational; otherwise a float configuration.
    """
    K = meas.K
    for k, v in enumerate(meas.y):
        if not (-1 < v < 1):
            raise DomainError(f"site y_{k + 1} = {v!r} lies outside (-1, 1)")
    if all(isinstance(v, Fraction) for v in meas.y):
        q = [_rational_sqrt((1 + v) / (1 - v)) for v in meas.y]
        if all(v is not None for v in q):
            two_cosh = [v + 1 / v for v in q]
            m = [meas.g[a] / two_cosh[2 * a] for a in range(K)]
            n = [meas.h[a] / two_cosh[2 * a + 1] for a in range(K)]
            return ExactConfiguration(K, tuple(q), tuple(m), tuple(n))
    x = [math.atanh(float(v)) for v in meas.y]
    m = [float(meas.g[a]) / (2.0 * math.cosh(x[2 * a])) for a in range(K)]
    n = [float(meas.h[a]) / (2.0 * math.cosh(x[2 * a + 1])) for a in range(K)]
    return InterlacingConfiguration(K, tuple(x), tuple(m), tuple(n))


def _rational_sqrt(v: Fraction):
    num, den = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if num * num == v.numerator and den * den == v.denominator:
        return Fraction(num, den)
    return None


def validate_admissible(r: SpectralData) -> AdmissibilityReport:
    """Check membership of r in the admissible set of spectral data."""
    problems: List[str] = []
    K = len(r.lam)
    if K < 1:
        return AdmissibilityReport(False, ["at least one eigenvalue lambda is required"])
    if len(r.mu) != K - 1:
        problems.append(f"shape: expected {K - 1} values of mu, got {len(r.mu)}")
    if len(r.a) != K:
        problems.append(f"shape: expected {K} residues a, got {len(r.a)}")
    if len(r.b) != K - 1:
        problems.append(f"shape: expected {K - 1} residues b, got {len(r.b)}")
    if problems:
        return AdmissibilityReport(False, problems)
    if not _strictly_increasing(r.lam):
        problems.append("ordering: lambda must be strictly increasing")
    if not _strictly_increasing(r.mu):
        problems.append("ordering: mu must be strictly increasing")
    for name in ("lam", "mu", "a", "b"):
        if any(not (v > 0) for v in getattr(r, name)):
            problems.append(f"positivity: all entries of {name} must be positive")
    if not (r.b_inf > 0):
        problems.append("positivity: b_inf must be positive")
    if not (r.b_inf_star > 0):
        problems.append("positivity: b_inf_star must be positive")
    if K == 1 and not problems:
        value = 2 * r.lam[0] * r.b_inf * r.b_inf_star
        if not (value > 1):
            problems.append(
                f"K=1 constraint: 2*lambda_1*b_inf*b_inf_star = {float(value)!r} must exceed 1"
            )
    return AdmissibilityReport(not problems, problems)


def reflect_configuration(config: AnyConfiguration) -> AnyConfiguration:
    """Mirror x -> -x and swap the roles of m and n.

    Site k of the result is site N+1-k of the input; the odd masses of the
    result are the even masses of the input read backwards.
    """
    K = config.K
    m = tuple(reversed(config.n_even))
    n = tuple(reversed(config.m_odd))
    if isinstance(config, ExactConfiguration):
        return ExactConfiguration(K, tuple(1 / v for v in reversed(config.q)), m, n)
    return InterlacingConfiguration(K, tuple(-v for v in reversed(config.x)), m, n)
