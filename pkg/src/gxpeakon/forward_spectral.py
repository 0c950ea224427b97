"""Forward spectral map: eigenvalues, residues, adjoint residues, Weyl functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .core_types import (
    AdjointResidues,
    AnyConfiguration,
    ExactConfiguration,
    ExtendedConfiguration,
    GXError,
    IntervalMeasures,
    NumericalDegeneracyError,
    Scalar,
    SpectralData,
    to_interval,
)
from .transition import Polynomial, PolynomialMatrix, abc_polynomials, abc_values, transition_matrix


class ResidueConsistencyError(GXError, ArithmeticError):
    """A residue came out nonpositive, which means the eigenvalues are off."""


class PoleProximityError(GXError, ValueError):
    """Weyl function evaluated too close to one of its poles."""


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------

def _e_matrix(x: Sequence[float], rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    xr = np.asarray([x[i] for i in rows], dtype=float)
    xc = np.asarray([x[j] for j in cols], dtype=float)
    return np.exp(-np.abs(xr[:, None] - xc[None, :]))


def oscillatory_matrix(config) -> np.ndarray:
    """(I + L) M E N with E_ij = exp(-|x_{2i-1} - x_{2j}|)."""
    K = config.K
    E = _e_matrix(config.x, range(0, 2 * K, 2), range(1, 2 * K, 2))
    MEN = np.asarray(config.m_odd, dtype=float)[:, None] * E * np.asarray(config.n_even, dtype=float)[None, :]
    return np.cumsum(MEN, axis=0)


def twin_oscillatory_matrix(config) -> np.ndarray:
    """(I' + L') N' E'^T M' after dropping m_1 and n_2K (size K-1)."""
    K = config.K
    if K == 1:
        return np.zeros((0, 0))
    # E' rows: odd sites 3..2K-1; columns: even sites 2..2K-2.
    Ep = _e_matrix(config.x, range(2, 2 * K, 2), range(1, 2 * K - 2, 2))
    Np = np.asarray(config.n_even[:-1], dtype=float)
    Mp = np.asarray(config.m_odd[1:], dtype=float)
    NEM = Np[:, None] * Ep.T * Mp[None, :]
    return np.cumsum(NEM, axis=0)


def _eig_to_lambdas(X: np.ndarray, label: str) -> np.ndarray:
    if X.shape[0] == 0:
        return np.zeros(0)
    nu = np.linalg.eigvals(X)
    scale = np.max(np.abs(nu))
    if np.max(np.abs(nu.imag)) > 1e-8 * scale:
        raise NumericalDegeneracyError(
            f"{label}: complex eigenvalues {nu!r} (max imaginary part "
            f"{np.max(np.abs(nu.imag)):.3e}, cond {np.linalg.cond(X):.3e})"
        )
    nu = np.sort(nu.real)[::-1]
    if nu[-1] <= 0:
        raise NumericalDegeneracyError(f"{label}: nonpositive eigenvalue {nu[-1]!r}")
    lam = 1.0 / (2.0 * nu)
    return lam


EXTENDED_BITS = 128


class _ExtendedSites:
    """Site weights and e^{x_k} held in extended precision (inputs taken as exact)."""

    def __init__(self, config):
        m, n = config.site_masses()
        self.N = config.N
        q = [mpmath.exp(mpmath.mpf(v)) for v in config.x]
        w = [mpmath.mpf(m[k] if k % 2 == 0 else n[k]) for k in range(self.N)]
        self.up = [w[k] * q[k] for k in range(self.N)]
        self.down = [w[k] / q[k] for k in range(self.N)]

    def propagate(self, lam, twin: bool):
        """A, A' and B at lambda, carrying lambda-derivatives along the jump product."""
        zero = mpmath.mpf(0)
        A, B, C = mpmath.mpf(1), zero, zero
        dA, dB, dC = zero, zero, zero
        for k in range(self.N):
            up, down = self.up[k], self.down[k]
            if (k % 2 == 0) != twin:
                ld = lam * down
                B, dB = B + up * A + ld * C, dB + up * dA + down * C + ld * dC
            else:
                ld = 2 * lam * down
                A, dA = A - ld * B, dA - 2 * down * B - ld * dB
                C, dC = C + 2 * up * B, dC + 2 * up * dB
        return A, dA, B


def _newton_polish(sites: _ExtendedSites, roots, twin: bool, max_steps: int = 12, drift: float = 1e-6):
    # Tiny residues come from B having a root right next to lambda_i, so
    # lambda_i is needed beyond double precision for -B/A' to keep its digits.
    out = []
    # Quadratic convergence: once a step is below 2^{-bits/2} the iterate is good to ~bits.
    target = mpmath.mpf(2) ** (-(EXTENDED_BITS // 2) + 4)
    for r in roots:
        start = x = mpmath.mpf(float(r))
        for _ in range(max_steps):
            value, slope, _ = sites.propagate(x, twin)
            if slope == 0:
                break
            step = value / slope
            x -= step
            if abs(step) <= target * abs(x):
                break
        if not (x > 0) or abs(x / start - 1) > drift:
            raise NumericalDegeneracyError(
                f"Newton refinement of eigenvalue {float(start)!r} drifted to {float(x)!r}"
            )
        out.append(x)
    return out


def _check_simple(values: np.ndarray, label: str) -> None:
    if len(values) > 1 and np.min(np.diff(values)) <= 0:
        raise NumericalDegeneracyError(f"{label}: repeated or unordered eigenvalues {values!r}")


def _eigenvalues_extended(config):
    lam = _eig_to_lambdas(oscillatory_matrix(config), "lambda")
    mu = _eig_to_lambdas(twin_oscillatory_matrix(config), "mu")
    sites = _ExtendedSites(config)
    # Starting values come from the binary64 matrix, which for an extended
    # configuration can be off by far more than a rounding error.
    drift = 1e-2 if isinstance(config, ExtendedConfiguration) else 1e-6
    lam = sorted(_newton_polish(sites, lam, twin=False, drift=drift))
    mu = sorted(_newton_polish(sites, mu, twin=True, drift=drift))
    _check_simple(np.array([float(v) for v in lam]), "lambda")
    _check_simple(np.array([float(v) for v in mu]), "mu")
    return sites, lam, mu


def eigenvalues(config, polish: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Nonzero eigenvalues (lambda_1..K, mu_1..K-1), ascending.

    lambda_i = 1/(2 nu_i) for the eigenvalues nu of the oscillatory matrix
    (I+L) M E N; mu likewise from the reduced twin matrix.  With ``polish``
    each value is refined by Newton's method on A (resp. A~) in extended
    precision before rounding.
    """
    if isinstance(config, ExactConfiguration):
        raise TypeError("use eigenvalues_exact for exact configurations")
    if not polish:
        lam = np.sort(_eig_to_lambdas(oscillatory_matrix(config), "lambda"))
        mu = np.sort(_eig_to_lambdas(twin_oscillatory_matrix(config), "mu"))
        _check_simple(lam, "lambda")
        _check_simple(mu, "mu")
        return lam, mu
    with mpmath.workprec(EXTENDED_BITS):
        _, lam, mu = _eigenvalues_extended(config)
        return np.array([float(v) for v in lam]), np.array([float(v) for v in mu])


# ---------------------------------------------------------------------------
# Exact root isolation (Sturm sequences over Q)
# ---------------------------------------------------------------------------

def _poly_rem(a: Polynomial, b: Polynomial) -> Polynomial:
    rem = list(a.coeffs)
    db = b.degree
    lead = b.leading()
    while len(rem) - 1 >= db and any(c != 0 for c in rem):
        shift = len(rem) - 1 - db
        factor = rem[-1] / lead
        for k, c in enumerate(b.coeffs):
            rem[k + shift] -= factor * c
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return Polynomial(rem)


def sturm_sequence(p: Polynomial) -> List[Polynomial]:
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        r = _poly_rem(seq[-2], seq[-1])
        if r.is_zero():
            break
        seq.append(-r)
    return seq


def _sign_changes(seq: Sequence[Polynomial], x) -> int:
    signs = [s for s in (_sign(p(x)) for p in seq) if s != 0]
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sturm_roots(p: Polynomial, rel_tol: Fraction = Fraction(1, 10 ** 16)) -> List[Fraction]:
    """Positive real roots of a squarefree rational polynomial, by bisection.

    Each root is returned as the midpoint of an isolating interval whose width
    is below ``rel_tol`` times its left end, unless the root is rational, in
    which case it is returned exactly.
    """
    coeffs = [Fraction(c) for c in p.coeffs]
    p = Polynomial(coeffs)
    # A rational root u/v has v dividing the leading coefficient once the
    # coefficients are cleared to integers.
    common = math.lcm(*(c.denominator for c in coeffs))
    max_den = abs(coeffs[-1] * common)
    seq = sturm_sequence(p)
    bound = 1 + max(abs(c / coeffs[-1]) for c in coeffs[:-1])
    lo, hi = Fraction(0), Fraction(bound)
    roots: List[Fraction] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        count = _sign_changes(seq, a) - _sign_changes(seq, b)
        if count == 0:
            continue
        if count == 1 and a > 0 and (b - a) <= rel_tol * a:
            guess = ((a + b) / 2).limit_denominator(int(max_den))
            roots.append(guess if a < guess <= b and p(guess) == 0 else (a + b) / 2)
            continue
        mid = (a + b) / 2
        # Sturm counts roots in (a, b]; a root exactly at mid is kept on the left.
        stack.append((mid, b))
        stack.append((a, mid))
    return sorted(roots)


def eigenvalues_exact(config: ExactConfiguration, rel_tol: Fraction = Fraction(1, 10 ** 20)):
    """lambda and mu via exact Sturm isolation: exact when rational, else to ``rel_tol``."""
    abc = abc_polynomials(config)
    lam = sturm_roots(abc.A, rel_tol)
    mu = sturm_roots(abc.A_twin, rel_tol) if abc.A_twin.degree > 0 else []
    return lam, mu


# ---------------------------------------------------------------------------
# Residues
# ---------------------------------------------------------------------------

def _derivative_at_root(roots: Sequence[Scalar], k: int) -> Scalar:
    """d/dlambda prod_i (1 - lambda/root_i) at lambda = root_k."""
    value = -1 / roots[k]
    for i, r in enumerate(roots):
        if i != k:
            value = value * (1 - roots[k] / r)
    return value


def b_inf_closed_form(meas: IntervalMeasures) -> Scalar:
    """b_inf from gaps and weights: h_K l_2K-1/(l_2K + l_2K-1), or h_1 (l_0+l_1)/2 when K=1."""
    K, l, h = meas.K, meas.l, meas.h
    if K == 1:
        return h[0] * (l[0] + l[1]) / 2
    return h[K - 1] * l[2 * K - 1] / (l[2 * K] + l[2 * K - 1])


def b_inf_star_closed_form(meas: IntervalMeasures) -> Scalar:
    """b_inf_star = g_1 l_1/(l_0 + l_1), or g_1 (l_1+l_2)/2 when K=1."""
    K, l, g = meas.K, meas.l, meas.g
    if K == 1:
        return g[0] * (l[1] + l[2]) / 2
    return g[0] * l[1] / (l[0] + l[1])


def _b_constants_real_line(config) -> Tuple[Scalar, Scalar]:
    # Same closed forms rewritten in e^{x}: no tanh cancellation near the ends.
    K = config.K
    if isinstance(config, ExactConfiguration):
        q = config.q
        b_inf = config.n_even[-1] * q[-1]
        b_star = config.m_odd[0] / q[0]
        if K >= 2:
            b_inf = b_inf * (1 - (q[-2] / q[-1]) ** 2)
            b_star = b_star * (1 - (q[0] / q[1]) ** 2)
        return b_inf, b_star
    if isinstance(config, ExtendedConfiguration):
        with mpmath.workprec(EXTENDED_BITS):
            x = config.x
            b_inf = config.n_even[-1] * mpmath.exp(x[-1])
            b_star = config.m_odd[0] * mpmath.exp(-x[0])
            if K >= 2:
                b_inf *= -mpmath.expm1(-2 * (x[-1] - x[-2]))
                b_star *= -mpmath.expm1(-2 * (x[1] - x[0]))
            return float(b_inf), float(b_star)
    x = config.x
    b_inf = config.n_even[-1] * math.exp(x[-1])
    b_star = config.m_odd[0] * math.exp(-x[0])
    if K >= 2:
        b_inf *= -math.expm1(-2.0 * (x[-1] - x[-2]))
        b_star *= -math.expm1(-2.0 * (x[1] - x[0]))
    return b_inf, b_star


def residues(config, lam, mu, route: str = "realline"):
    """(a, b, b_inf, b_inf_star) for already computed eigenvalues.

    a_i = -B(lambda_i)/A'(lambda_i) and b_j = -B~(mu_j)/A~'(mu_j) with
    A = prod(1 - lambda/lambda_i).  ``route="interval"`` uses
    -S_21(lambda_i)/S_31'(lambda_i) from the transition matrices instead.
    """
    lam, mu = list(lam), list(mu)
    if route == "realline":
        a = [-abc_values(config, lam[i])[1] / _derivative_at_root(lam, i) for i in range(len(lam))]
        b = [-abc_values(config, mu[j], twin=True)[1] / _derivative_at_root(mu, j) for j in range(len(mu))]
        b_inf, b_star = _b_constants_real_line(config)
    elif route == "interval":
        meas = to_interval(config)
        S = transition_matrix(meas).S
        St = transition_matrix(meas, twin=True).S
        # S_31 = -2 lambda A, S_21 = -2 lambda B.
        a = [-S.entry(2, 1)(v) / (-2 * v * _derivative_at_root(lam, i)) for i, v in enumerate(lam)]
        b = [-St.entry(2, 1)(v) / (-2 * v * _derivative_at_root(mu, j)) for j, v in enumerate(mu)]
        b_inf = b_inf_closed_form(meas)
        b_star = b_inf_star_closed_form(meas)
    else:
        raise ValueError(f"unknown residue route {route!r}")
    _check_positive({"a": a, "b": b, "b_inf": [b_inf], "b_inf_star": [b_star]})
    return a, b, b_inf, b_star


def _check_positive(groups) -> None:
    for name, values in groups.items():
        for v in values:
            if not v > 0:
                raise ResidueConsistencyError(f"nonpositive residue {name} = {v!r}")


def forward_map(config) -> SpectralData:
    """Spectral data of a configuration (float or exact input)."""
    if isinstance(config, ExactConfiguration):
        lam, mu = eigenvalues_exact(config)
        a, b, b_inf, b_star = residues(config, lam, mu)
        return SpectralData(tuple(lam), tuple(mu), tuple(a), tuple(b), b_inf, b_star)
    with mpmath.workprec(EXTENDED_BITS):
        sites, lam, mu = _eigenvalues_extended(config)
        a = [-sites.propagate(v, False)[2] / _derivative_at_root(lam, i) for i, v in enumerate(lam)]
        b = [-sites.propagate(v, True)[2] / _derivative_at_root(mu, j) for j, v in enumerate(mu)]
        a, b = [float(v) for v in a], [float(v) for v in b]
        lam, mu = [float(v) for v in lam], [float(v) for v in mu]
    _check_positive({"a": a, "b": b})
    b_inf, b_star = _b_constants_real_line(config)
    return SpectralData(tuple(lam), tuple(mu), tuple(a), tuple(b), b_inf, b_star)


# ---------------------------------------------------------------------------
# Adjoint data
# ---------------------------------------------------------------------------

def adjoint_products(r: SpectralData) -> Tuple[List[Scalar], List[Scalar]]:
    """Closed forms for a_k a*_k and b_k b*_k in terms of the eigenvalues."""
    lam, mu = list(r.lam), list(r.mu)
    K = len(lam)
    if K == 1:
        return [lam[0] / 2], []
    aa = []
    for k in range(K):
        num = lam[k] / 2
        for m in mu:
            num = num * (1 + lam[k] / m)
        for i in range(K):
            if i != k:
                num = num / (1 - lam[k] / lam[i]) ** 2
        aa.append(num)
    bb = []
    for k in range(K - 1):
        num = mu[k] / 2
        for v in lam:
            num = num * (1 + mu[k] / v)
        for j in range(K - 1):
            if j != k:
                num = num / (1 - mu[k] / mu[j]) ** 2
        bb.append(num)
    return aa, bb


def b_inf_product(meas: IntervalMeasures, r: SpectralData) -> Scalar:
    """Closed form of b_inf * b_inf_star from gaps and eigenvalues."""
    l, K = meas.l, meas.K
    if K == 1:
        return (l[0] + l[1]) * (l[1] + l[2]) / (2 * l[0] * l[2] * r.lam[0])
    value = 1
    for k in range(1, 2 * K, 2):
        value = value * l[k]
    for k in range(0, 2 * K + 1, 2):
        value = value / l[k]
    for m in r.mu:
        value = value * m
    for v in r.lam:
        value = value / v
    return value


def adjoint_residues(r: SpectralData) -> AdjointResidues:
    """a*, b* from the residue product formulas; c, d from the Cauchy-kernel relation."""
    aa, bb = adjoint_products(r)
    a_star = [aa[k] / r.a[k] for k in range(len(aa))]
    b_star = [bb[k] / r.b[k] for k in range(len(bb))]
    c, d = _cd(r.lam, r.mu, r.a, r.b, r.b_inf)
    return AdjointResidues(tuple(a_star), tuple(b_star), tuple(c), tuple(d))


def _cd(lam, mu, a, b, b_inf):
    c = []
    for i in range(len(lam)):
        v = a[i] * b_inf
        for j in range(len(mu)):
            v = v + a[i] * b[j] / (lam[i] + mu[j])
        c.append(v)
    d = []
    for j in range(len(mu)):
        v = 0 * b_inf
        for i in range(len(lam)):
            v = v + a[i] * b[j] / (lam[i] + mu[j])
        d.append(v)
    return c, d


def starred_cd(r: SpectralData, adj: AdjointResidues):
    """c*, d* from a*, b*, b_inf_star."""
    return _cd(r.lam, r.mu, adj.a_star, adj.b_star, r.b_inf_star)


def _to_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(float(v))


def adjoint_from_transition(meas: IntervalMeasures, lam, mu, exact: bool = True):
    """a*_k = -S_32(lambda_k)/S_31'(lambda_k) and b*_k = -S~_32(mu_k)/S~_31'(mu_k).

    With ``exact=True`` the (float) measures and eigenvalues are converted to
    binary fractions and the polynomials are built and evaluated exactly, so
    the only error left is that of the eigenvalues themselves.
    """
    if exact:
        meas = IntervalMeasures(
            meas.K,
            tuple(_to_fraction(v) for v in meas.y),
            tuple(_to_fraction(v) for v in meas.l),
            tuple(_to_fraction(v) for v in meas.g),
            tuple(_to_fraction(v) for v in meas.h),
        )
        lam = [_to_fraction(v) for v in lam]
        mu = [_to_fraction(v) for v in mu]
    S = transition_matrix(meas).S
    St = transition_matrix(meas, twin=True).S
    if not exact:
        dS31 = S.entry(3, 1).derivative()
        dSt31 = St.entry(3, 1).derivative()
        return [-S.entry(3, 2)(v) / dS31(v) for v in lam], [-St.entry(3, 2)(v) / dSt31(v) for v in mu]
    with mpmath.workprec(EXTENDED_BITS):
        a_star = _adjoint_extended(S, lam)
        b_star = _adjoint_extended(St, mu)
    return a_star, b_star


def _adjoint_extended(S: PolynomialMatrix, roots) -> List[float]:
    # Small a*_k need the eigenvalue beyond binary64, as for a_k: refine each
    # root of S_31 by Newton on its exact coefficients before evaluating.
    num = [_mp_fraction(c) for c in S.entry(3, 2).coeffs]
    den = [_mp_fraction(c) for c in S.entry(3, 1).coeffs]
    dden = [k * c for k, c in enumerate(den)][1:]
    out = []
    for v in roots:
        x = _mp_fraction(v)
        for _ in range(8):
            step = mpmath.polyval(den[::-1], x) / mpmath.polyval(dden[::-1], x)
            x -= step
            if abs(step) <= mpmath.mpf(2) ** (-(EXTENDED_BITS // 2) + 4) * abs(x):
                break
        out.append(float(-mpmath.polyval(num[::-1], x) / mpmath.polyval(dden[::-1], x)))
    return out


def _mp_fraction(v):
    v = Fraction(v)
    return mpmath.mpf(v.numerator) / v.denominator


# ---------------------------------------------------------------------------
# Weyl functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartialFraction:
    """constant + half_over_lambda/(2 lambda) + sum residues_k / (lambda - poles_k)."""

    poles: Tuple[Scalar, ...]
    residues: Tuple[Scalar, ...]
    constant: Scalar = 0
    half_over_lambda: bool = False

    def __call__(self, lam):
        value = self.constant
        if self.half_over_lambda:
            value = value + 1 / (2 * lam)
        for p, c in zip(self.poles, self.residues):
            value = value + c / (lam - p)
        return value


@dataclass(frozen=True)
class WeylFunctionSet:
    W: PartialFraction
    Z: PartialFraction
    W_twin: PartialFraction
    Z_twin: PartialFraction
    W_star: PartialFraction
    Z_star: PartialFraction
    W_twin_star: PartialFraction
    Z_twin_star: PartialFraction

    NAMES = ("W", "Z", "W_twin", "Z_twin", "W_star", "Z_star", "W_twin_star", "Z_twin_star")

    def poles(self) -> List[Scalar]:
        return list(self.W.poles) + list(self.W_twin.poles)


def weyl_functions(r: SpectralData, adj: Optional[AdjointResidues] = None) -> WeylFunctionSet:
    if adj is None:
        adj = adjoint_residues(r)
    lam, mu = tuple(r.lam), tuple(r.mu)
    cs, ds = starred_cd(r, adj)
    return WeylFunctionSet(
        W=PartialFraction(lam, tuple(r.a)),
        Z=PartialFraction(lam, tuple(adj.c), 0, True),
        W_twin=PartialFraction(mu, tuple(r.b), -r.b_inf),
        Z_twin=PartialFraction(mu, tuple(adj.d), 0, True),
        W_star=PartialFraction(lam, tuple(adj.a_star)),
        Z_star=PartialFraction(lam, tuple(cs), 0, True),
        W_twin_star=PartialFraction(mu, tuple(adj.b_star), -r.b_inf_star),
        Z_twin_star=PartialFraction(mu, tuple(ds), 0, True),
    )


def weyl_eval(r: SpectralData, adj: Optional[AdjointResidues], lam, min_distance: float = 1e-12) -> Dict[str, Scalar]:
    """Values of all eight Weyl functions at a point away from the poles."""
    for p in list(r.lam) + list(r.mu) + [0]:
        if abs(lam - p) <= min_distance:
            raise PoleProximityError(f"lambda = {lam!r} is within {min_distance} of the pole {p!r}")
    fs = weyl_functions(r, adj)
    return {name: getattr(fs, name)(lam) for name in WeylFunctionSet.NAMES}


def weyl_from_transition(S: PolynomialMatrix, S_twin: PolynomialMatrix, lam) -> Dict[str, Scalar]:
    """The same eight functions as ratios of transition matrix entries."""
    s31, t31 = S.entry(3, 1)(lam), S_twin.entry(3, 1)(lam)
    return {
        "W": -S.entry(2, 1)(lam) / s31,
        "Z": -S.entry(1, 1)(lam) / s31,
        "W_twin": -S_twin.entry(2, 1)(lam) / t31,
        "Z_twin": -S_twin.entry(1, 1)(lam) / t31,
        "W_star": -S.entry(3, 2)(lam) / s31,
        "Z_star": -S.entry(3, 3)(lam) / s31,
        "W_twin_star": -S_twin.entry(3, 2)(lam) / t31,
        "Z_twin_star": -S_twin.entry(3, 3)(lam) / t31,
    }


def weyl_relation_residuals(values_at: Dict[str, Scalar], values_at_neg: Dict[str, Scalar]) -> Tuple[float, float]:
    """Relative residuals of Z + W W~(-.) + Z~(-.) = 0 and its starred twin.

    ``values_at`` holds the functions at lambda, ``values_at_neg`` at -lambda.
    """
    out = []
    for suffix in ("", "_star"):
        terms = [
            values_at["Z" + suffix],
            values_at["W" + suffix] * values_at_neg["W_twin" + suffix],
            values_at_neg["Z_twin" + suffix],
        ]
        scale = max(abs(float(t)) for t in terms)
        out.append(abs(float(sum(terms))) / scale if scale else 0.0)
    return out[0], out[1]
