"""Peakon time evolution.

Spectral coordinates linearise the flow: eigenvalues, b_inf and b_inf_star
stay put while a_i and b_j grow like exp(t/lambda_i) and exp(t/mu_j).  A
configuration at time t is obtained by evolving the spectral data and
inverting, so there is no time stepping and no error build-up.  A plain RK4
integrator of the peakon ODEs is provided as an independent check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .bimoments import determinant
from .core_types import ExactConfiguration, InterlacingConfiguration, SpectralData, ValidationError, validate_admissible
from .forward_spectral import forward_map
from .inverse_spectral import inverse_map
from .transition import Polynomial, PolynomialMatrix


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    config: InterlacingConfiguration


@dataclass(frozen=True)
class ConservedSet:
    """[A]_1..[A]_K and [A~]_1..[A~]_{K-1}."""

    A_coeffs: Tuple
    A_twin_coeffs: Tuple


def evolve_spectral(r: SpectralData, t: float) -> SpectralData:
    """Spectral data at time t: a_i e^{t/lambda_i}, b_j e^{t/mu_j}, everything else fixed."""
    a = tuple(a * math.exp(t / lam) for a, lam in zip(r.a, r.lam))
    b = tuple(b * math.exp(t / mu) for b, mu in zip(r.b, r.mu))
    out = SpectralData(r.lam, r.mu, a, b, r.b_inf, r.b_inf_star)
    report = validate_admissible(out)
    if not report:
        raise ValidationError(f"spectral data leave the admissible set at t={t!r}", report.violations)
    return out


def trajectories(p0: InterlacingConfiguration, times: Iterable[float]) -> List[TrajectorySample]:
    """Configurations at the requested times, each computed independently from p0's spectral data."""
    r0 = forward_map(p0)
    return [TrajectorySample(float(t), inverse_map(evolve_spectral(r0, t))) for t in times]


def trajectory_csv(samples: Sequence[TrajectorySample]) -> str:
    """Rows t, x_1..x_2K, then masses in site order m_1, n_2, m_3, ..."""
    K = samples[0].config.K if samples else 0
    header = ["t"] + [f"x_{k}" for k in range(1, 2 * K + 1)]
    header += [f"{'m' if k % 2 else 'n'}_{k}" for k in range(1, 2 * K + 1)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for s in samples:
        masses = [v for pair in zip(s.config.m_odd, s.config.n_even) for v in pair]
        writer.writerow([repr(s.t)] + [repr(float(v)) for v in s.config.x] + [repr(float(v)) for v in masses])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Direct integration of the peakon ODEs
# ---------------------------------------------------------------------------

def _field_values(x: np.ndarray, weights: np.ndarray):
    """u(x_k) and the average derivative u_x(x_k), with sgn 0 = 0."""
    d = x[:, None] - x[None, :]
    kernel = np.exp(-np.abs(d))
    u = kernel @ weights
    ux = -(np.sign(d) * kernel) @ weights
    return u, ux


def _rhs_arrays(x: np.ndarray, m_sites: np.ndarray, n_sites: np.ndarray):
    u, ux = _field_values(x, m_sites)
    v, vx = _field_values(x, n_sites)
    dx = u * v
    dm = m_sites * (u * vx - 2 * ux * v)
    dn = n_sites * (ux * v - 2 * u * vx)
    return dx, dm, dn


def ode_rhs(p: InterlacingConfiguration) -> Tuple[Tuple[float, ...], Tuple[float, ...], Tuple[float, ...]]:
    """(dx/dt for every site, dm/dt at odd sites, dn/dt at even sites)."""
    m, n = p.site_masses()
    dx, dm, dn = _rhs_arrays(np.asarray(p.x, float), np.asarray(m, float), np.asarray(n, float))
    return tuple(dx), tuple(dm[0::2]), tuple(dn[1::2])


def _pack(p: InterlacingConfiguration) -> np.ndarray:
    return np.concatenate([p.x, p.m_odd, p.n_even]).astype(float)


def _unpack(K: int, state: np.ndarray) -> InterlacingConfiguration:
    return InterlacingConfiguration(K, tuple(state[: 2 * K]), tuple(state[2 * K: 3 * K]), tuple(state[3 * K:]))


def _state_rhs(K: int, state: np.ndarray) -> np.ndarray:
    x = state[: 2 * K]
    m_sites = np.zeros(2 * K)
    n_sites = np.zeros(2 * K)
    m_sites[0::2] = state[2 * K: 3 * K]
    n_sites[1::2] = state[3 * K:]
    dx, dm, dn = _rhs_arrays(x, m_sites, n_sites)
    return np.concatenate([dx, dm[0::2], dn[1::2]])


def rk4_states(p0: InterlacingConfiguration, t1: float, steps: int, record_every: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step RK4 from t=0 to t1; returns (times, states) at every ``record_every`` steps."""
    K = p0.K
    h = t1 / steps
    y = _pack(p0)
    times, states = [0.0], [y.copy()]
    for k in range(1, steps + 1):
        k1 = _state_rhs(K, y)
        k2 = _state_rhs(K, y + 0.5 * h * k1)
        k3 = _state_rhs(K, y + 0.5 * h * k2)
        k4 = _state_rhs(K, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if k % record_every == 0:
            times.append(k * h)
            states.append(y.copy())
    return np.asarray(times), np.asarray(states)


def rk4_trajectory(p0: InterlacingConfiguration, t1: float, steps: int, record_every: int = 1) -> List[TrajectorySample]:
    times, states = rk4_states(p0, t1, steps, record_every)
    return [TrajectorySample(float(t), _unpack(p0.K, s)) for t, s in zip(times, states)]


def richardson_check(p0: InterlacingConfiguration, t1: float, steps: int) -> float:
    """Max-norm difference at t1 between RK4 with ``steps`` and ``2*steps`` steps (error estimate)."""
    _, coarse = rk4_states(p0, t1, steps, record_every=steps)
    _, fine = rk4_states(p0, t1, 2 * steps, record_every=2 * steps)
    return float(np.max(np.abs(coarse[-1] - fine[-1])))


def k1_closed_form(p0: InterlacingConfiguration, t: float) -> InterlacingConfiguration:
    """K=1 solution: both sites move at speed c = m n e^{x_1 - x_2}, m grows and n decays like e^{ct}."""
    if p0.K != 1:
        raise ValueError("closed form is only for K=1")
    x1, x2 = p0.x
    c = p0.m_odd[0] * p0.n_even[0] * math.exp(x1 - x2)
    return InterlacingConfiguration(
        1, (x1 + c * t, x2 + c * t), (p0.m_odd[0] * math.exp(c * t),), (p0.n_even[0] * math.exp(-c * t),)
    )


# ---------------------------------------------------------------------------
# Constants of motion
# ---------------------------------------------------------------------------

def _men_matrix(p) -> List[List]:
    """(M E N)_{ij} = m_{2i-1} E_{2i-1,2j} n_{2j} with E_ab = e^{-|x_a - x_b|}."""
    K = p.K
    if isinstance(p, ExactConfiguration):
        q = p.q
        E = lambda a, b: q[a] / q[b] if q[a] < q[b] else q[b] / q[a]
    else:
        E = lambda a, b: math.exp(-abs(p.x[a] - p.x[b]))
    return [[p.m_odd[i] * E(2 * i, 2 * j + 1) * p.n_even[j] for j in range(K)] for i in range(K)]


def _half_interlaced(I: Sequence[int], J: Sequence[int], strict_first: bool) -> bool:
    """i1 <= j1 < i2 <= j2 < ... (strict_first False) or i1 < j1 <= i2 < j2 <= ... (True)."""
    seq = [v for pair in zip(I, J) for v in pair]
    for k in range(len(seq) - 1):
        within_pair = k % 2 == 0
        strict = within_pair == strict_first
        if strict and not seq[k] < seq[k + 1]:
            return False
        if not strict and not seq[k] <= seq[k + 1]:
            return False
    return True


def conserved_coefficients(p) -> ConservedSet:
    """[A]_k as sums of minors of M E N over half-strictly interlacing index sets, and likewise [A~]_k."""
    K = p.K
    X = _men_matrix(p)
    A, At = [], []
    for k in range(1, K + 1):
        total = 0
        for I in combinations(range(K), k):
            for J in combinations(range(K), k):
                if _half_interlaced(I, J, strict_first=False):
                    total = total + determinant([[X[i][j] for j in J] for i in I])
        A.append(total)
    for k in range(1, K):
        total = 0
        for I in combinations(range(K), k):
            for J in combinations(range(K), k):
                if _half_interlaced(I, J, strict_first=True):
                    total = total + determinant([[X[j][i] for i in I] for j in J])
        At.append(total)
    return ConservedSet(tuple(A), tuple(At))


def _char_coefficients(rows: List[List]) -> List:
    """Coefficients c_k of det(I - 2 lambda X) as sum_k c_k (-2 lambda)^k, i.e. [.]_k."""
    n = len(rows)
    if n == 0:
        return [1]
    # Build the polynomial matrix I + s X with s = -2 lambda and expand.
    entries = [[Polynomial([int(i == j), rows[i][j]]) for j in range(n)] for i in range(n)]
    det = _poly_det(entries)
    return [det.coeff(k) for k in range(n + 1)]


def _poly_det(entries: List[List[Polynomial]]) -> Polynomial:
    n = len(entries)
    if n == 1:
        return entries[0][0]
    total = Polynomial()
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in entries[1:]]
        term = entries[0][c] * _poly_det(minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def conserved_from_determinant(p) -> ConservedSet:
    """The same coefficients read from det(I - 2 lambda (I+L) M E N) and det(I - 2 lambda L N E^T M)."""
    K = p.K
    X = _men_matrix(p)
    cum = [[sum(X[r][j] for r in range(i + 1)) for j in range(K)] for i in range(K)]
    # L N E^T M: strictly lower cumulative sums of (N E^T M)_{ij} = n_2i E_{2j-1,2i} m_2j-1 = X[j][i].
    twin = [[sum(X[j][r] for r in range(i)) for j in range(K)] for i in range(K)]
    A = _char_coefficients(cum)[1:]
    At = _char_coefficients(twin)[1:K]
    return ConservedSet(tuple(A), tuple(At))


def conserved_from_spectrum(r: SpectralData) -> ConservedSet:
    """[A]_k = e_k(1/(2 lambda)) and [A~]_k = e_k(1/(2 mu))."""
    def elementary(values):
        coeffs = [1]
        for v in values:
            w = 1 / (2 * v)
            coeffs = [c + (w * coeffs[i - 1] if i > 0 else 0) for i, c in enumerate(coeffs + [0])]
        return coeffs[1:]
    return ConservedSet(tuple(elementary(r.lam)), tuple(elementary(r.mu)))
