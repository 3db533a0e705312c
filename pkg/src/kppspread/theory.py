"""Closed-form and quadrature-defined speed quantities.

The central objects are the period-averaged action ``j(k)``, its inverse
``H(p)`` (flat at the profile maximum below j(M)), the limiting spreading
speed ``w_inf = min_{k >= M} k / j(k)``, and the finite-K bounds for
two-value media.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DegenerateProfileError, DomainError, ParameterError
from .media import PeriodicProfile, _plateau_above

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

# 5-point Gauss-Legendre on [-1, 1], used for sub-cell tails of cumulatives
_GL5_NODES = np.array([-0.906179845938664, -0.538469310105683, 0.0,
                       0.538469310105683, 0.906179845938664])
_GL5_WEIGHTS = np.array([0.236926885056189, 0.478628670499366,
                         0.568888888888889, 0.478628670499366,
                         0.236926885056189])


# ---------------------------------------------------------------------------
# adaptive quadrature of sqrt(k - mu0)
# ---------------------------------------------------------------------------

def _sqrt_integrand(profile: PeriodicProfile, k: float):
    def f(y):
        return np.sqrt(np.maximum(k - profile.evaluate(y), 0.0))
    return f


def _adaptive_cells(f, edges: np.ndarray, tol: float, max_depth: int = 60) -> np.ndarray:
    """Adaptive-Simpson integrals of f over each cell [edges[i], edges[i+1]].

    Each interval is bisected until two successive Simpson refinements agree
    to the width-proportional share of ``tol``; the accepted value carries
    the Richardson correction. The integrand may have sqrt-type corners.
    """
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    total = edges[-1] - edges[0]
    cell_idx = np.arange(lo.size)
    f_lo, f_hi = f(lo), f(hi)
    mid = 0.5 * (lo + hi)
    f_mid = f(mid)
    s_whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    depth = np.zeros(lo.size, dtype=int)
    out = np.zeros(edges.size - 1)

    while lo.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        f_lm, f_rm = f(lm), f(rm)
        s_left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid)
        s_right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi)
        s_two = s_left + s_right
        diff = s_two - s_whole
        done = (np.abs(diff) <= tol * (hi - lo) / total + 1e-300) | (depth >= max_depth)
        np.add.at(out, cell_idx[done], s_two[done] + diff[done] / 15.0)
        split = ~done
        lo, mid_s, hi = lo[split], mid[split], hi[split]
        f_lo, f_mid_s, f_hi = f_lo[split], f_mid[split], f_hi[split]
        lm, rm, f_lm, f_rm = lm[split], rm[split], f_lm[split], f_rm[split]
        s_left, s_right = s_left[split], s_right[split]
        cell_idx = np.concatenate([cell_idx[split], cell_idx[split]])
        depth = np.concatenate([depth[split] + 1, depth[split] + 1])
        lo = np.concatenate([lo, mid_s])
        hi = np.concatenate([mid_s, hi])
        mid = np.concatenate([lm, rm])
        f_lo = np.concatenate([f_lo, f_mid_s])
        f_hi = np.concatenate([f_mid_s, f_hi])
        f_mid = np.concatenate([f_lm, f_rm])
        s_whole = np.concatenate([s_left, s_right])
    return out


def j_of_k(profile: PeriodicProfile, k: float, n_panels: int = 4096,
           tol: float = 1e-10) -> float:
    """Period-averaged action j(k), the integral of sqrt(k - mu0) over one
    period.  Requires k >= max(mu0); the integrand has an integrable
    sqrt-corner where k - mu0 vanishes, handled by adaptive refinement."""
    M = profile.max_val
    if k < M - 1e-12 * max(1.0, M):
        raise DomainError(f"j(k) needs k >= max mu0 = {M}, got {k}")
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    return float(np.sum(_adaptive_cells(_sqrt_integrand(profile, k), edges, tol)))


def sqrt_cumulative(profile: PeriodicProfile, k: float, n_cells: int = 2048,
                    tol: float = 1e-10):
    """Nodal cumulative integral of sqrt(k - mu0) on a uniform grid of [0, 1].

    Returns (nodes, cumulative) with cumulative[0] = 0; used to assemble
    correctors.  Between nodes, interpolate with :func:`sqrt_partial`.
    """
    edges = np.linspace(0.0, 1.0, n_cells + 1)
    cells = _adaptive_cells(_sqrt_integrand(profile, k), edges, tol)
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    return edges, cum


def sqrt_partial(profile: PeriodicProfile, k: float, a, b):
    """Gauss-Legendre tail integral of sqrt(k - mu0) over short spans [a, b]
    (vectorized over a, b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    f = _sqrt_integrand(profile, k)
    acc = np.zeros(np.broadcast(a, b).shape)
    for node, w in zip(_GL5_NODES, _GL5_WEIGHTS):
        acc = acc + w * f(center + half * node)
    return acc * half


def j_at_max(profile: PeriodicProfile) -> float:
    """j(M) with M = max(mu0); strictly positive for nonconstant profiles."""
    return j_of_k(profile, profile.max_val)


# ---------------------------------------------------------------------------
# effective Hamiltonian and limiting speed
# ---------------------------------------------------------------------------

def H_of_p(profile: PeriodicProfile, p: float, tol: float = 1e-12) -> float:
    """Effective Hamiltonian: M for |p| < j(M), else the unique k >= M with
    j(k) = |p| (monotone bisection)."""
    M = profile.max_val
    q = abs(float(p))
    jM = j_at_max(profile)
    if q <= jM:
        return M
    lo = M
    hi = M + q * q + (profile.max_val - profile.min_val) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if j_of_k(profile, mid) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _golden_min(f, a: float, b: float, rel_tol: float):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * max(1.0, abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return f(x), x


def w_infinity(profile: PeriodicProfile, bracket_factor: float = 40.0,
               rel_tol: float = 1e-9):
    """Limiting spreading speed min_{k >= M} k / j(k) and its argmin.

    Golden-section refinement of a 64-point coarse log-grid bracket.  The
    map k -> k/j(k) is unimodal for the profiles exercised here; tests guard
    the result against a brute-force grid oracle.  Constant profiles are
    degenerate (j(M) = 0): callers should use the homogeneous value 2 sqrt(m).
    """
    if profile.is_constant:
        raise DegenerateProfileError(
            "w_infinity is singular for constant profiles; homogeneous speed "
            "is 2*sqrt(m)")
    M = profile.max_val

    def g(k):
        return k / j_of_k(profile, k)

    ks = np.geomspace(M + 1e-9, bracket_factor * M, 64)
    vals = np.array([g(k) for k in ks])
    i = int(np.argmin(vals))
    lo = ks[max(i - 1, 0)]
    hi = ks[min(i + 1, ks.size - 1)]
    value, k_star = _golden_min(g, lo, hi, rel_tol)
    return value, k_star


def homogeneous_speed(m: float) -> float:
    """Classical KPP invasion speed for constant growth m."""
    if m <= 0:
        raise ParameterError("homogeneous speed needs m > 0")
    return 2.0 * math.sqrt(m)


# ---------------------------------------------------------------------------
# two-value bounds and the threshold-case bounds
# ---------------------------------------------------------------------------

def _check_two_value(mu_plus: float, mu_minus: float, K: float):
    if K <= 1.0:
        raise ParameterError("two-value bounds need K > 1")
    if mu_minus <= 0.0 or mu_plus <= 0.0 or mu_minus > mu_plus:
        raise ParameterError("two-value bounds need 0 < mu_minus <= mu_plus")


def two_value_lower_bound_wstar(mu_plus: float, mu_minus: float, K: float) -> float:
    """Lower bound on the maximal speed when y_n / x_n -> K > 1:
    2 sqrt(mu_plus) * K / ((K-1) + sqrt(mu_plus/mu_minus))."""
    _check_two_value(mu_plus, mu_minus, K)
    return 2.0 * math.sqrt(mu_plus) * K / ((K - 1.0) + math.sqrt(mu_plus / mu_minus))


def two_value_upper_bound_wlow(mu_plus: float, mu_minus: float, K: float) -> float:
    """Upper bound on the minimal speed when x_{n+1} / y_n -> K > 1:
    2 sqrt(mu_minus) * (K + sqrt(mu_plus/mu_minus)) / (K + sqrt(mu_minus/mu_plus))."""
    _check_two_value(mu_plus, mu_minus, K)
    r = math.sqrt(mu_plus / mu_minus)
    return 2.0 * math.sqrt(mu_minus) * (K + r) / (K + 1.0 / r)


def plateau_length(profile: PeriodicProfile, eps: float, above: bool = True,
                   n_scan: int = 10_000) -> float:
    """Measure-length of the largest interval where mu0 > max - eps
    (above=True) or mu0 < min + eps (above=False)."""
    if above:
        _, delta = _plateau_above(profile, profile.max_val - eps, n_scan)
        return delta
    # reflect: mu0 < min + eps  <=>  (2*mid - mu0) > 2*mid - min - eps
    reflected = _Reflected(profile)
    _, delta = _plateau_above(reflected, reflected.max_val - eps, n_scan)
    return delta


class _Reflected:
    """max+min - mu0: swaps the roles of the extrema for plateau scans."""

    def __init__(self, profile: PeriodicProfile):
        self._p = profile
        self._s = profile.max_val + profile.min_val
        self.min_val = profile.min_val
        self.max_val = profile.max_val

    def evaluate(self, y):
        return self._s - self._p.evaluate(y)


def threshold_bounds_thm1(profile: PeriodicProfile, C: float, eps: float):
    """The two bounds certifying distinct speeds in the threshold case
    1/(x phi'(x)) -> C.

    Returns (lower_on_wupper, upper_on_wlower).  As C -> inf the pair tends
    to (2 sqrt(max - eps), 2 sqrt(min + eps)); with eps < (max - min)/2 and
    C large the first exceeds the second, certifying w_* < w^*.
    """
    if C <= 0.0:
        raise ParameterError("threshold bounds need C > 0")
    span = profile.max_val - profile.min_val
    if not 0.0 < eps < 0.5 * span:
        raise ParameterError("threshold bounds need eps in (0, (max-min)/2)")
    delta = plateau_length(profile, eps, above=True)
    delta_p = plateau_length(profile, eps, above=False)
    mu_hi = profile.max_val - eps
    mu_lo = profile.min_val + eps
    # overflow-safe forms in E = exp(-delta*C)
    E = math.exp(-min(delta * C, 700.0))
    S = math.sqrt(mu_hi / profile.min_val)
    lower = 2.0 * math.sqrt(mu_hi) / ((1.0 - E) + S * E)
    Ep = math.exp(-min(delta_p * C, 700.0))
    S1 = math.sqrt(profile.max_val / mu_lo)
    S2 = math.sqrt(mu_lo / profile.max_val)
    upper = 2.0 * math.sqrt(mu_lo) * (1.0 + S1 * Ep) / (1.0 + S2 * Ep)
    return lower, upper


def min_radius_subsolution(mu_minus: float, c: float) -> float:
    """Smallest ball radius supporting the traveling bump subsolution at
    speed c < 2 sqrt(mu_minus): pi / (2 sqrt(mu_minus - c^2/4)).  Callers
    must use a radius strictly larger."""
    if mu_minus <= 0.0:
        raise ParameterError("needs mu_minus > 0")
    if not 0.0 <= c < 2.0 * math.sqrt(mu_minus):
        raise ParameterError("needs 0 <= c < 2*sqrt(mu_minus)")
    return math.pi / (2.0 * math.sqrt(mu_minus - 0.25 * c * c))


# ---------------------------------------------------------------------------
# assembled bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpeedBounds:
    """Every theoretical speed value available for a medium, for reporting."""

    lower_homog: float
    upper_homog: float
    w_infinity: float | None = None
    k_star: float | None = None
    homogeneous: bool = False
    two_value_lower: float | None = None
    two_value_lower_K: float | None = None
    two_value_upper: float | None = None
    two_value_upper_K: float | None = None
    threshold_lower: float | None = None
    threshold_upper: float | None = None
    threshold_C: float | None = None
    threshold_eps: float | None = None

    def __post_init__(self):
        tol = 1e-9 * max(1.0, self.upper_homog)
        if self.lower_homog > self.upper_homog + tol:
            raise ParameterError("lower_homog must not exceed upper_homog")
        if self.w_infinity is not None:
            if not (self.lower_homog - tol <= self.w_infinity
                    <= self.upper_homog + tol):
                raise ParameterError("w_infinity violates the homogeneous sandwich")
        if self.two_value_lower is not None and \
                self.two_value_lower > self.upper_homog + tol:
            raise ParameterError("two-value lower bound exceeds 2*sqrt(max mu)")
        if self.two_value_upper is not None and \
                self.two_value_upper < self.lower_homog - tol:
            raise ParameterError("two-value upper bound is below 2*sqrt(min mu)")

    def to_dict(self) -> dict:
        return asdict(self)


def bounds_for_profile(profile: PeriodicProfile, threshold_C: float | None = None,
                       threshold_eps: float | None = None) -> SpeedBounds:
    """SpeedBounds for a composed medium built on ``profile``."""
    lower = 2.0 * math.sqrt(profile.min_val)
    upper = 2.0 * math.sqrt(profile.max_val)
    if profile.is_constant:
        m = profile.min_val
        return SpeedBounds(lower, upper, w_infinity=homogeneous_speed(m),
                           k_star=2.0 * m, homogeneous=True)
    w_inf, k_star = w_infinity(profile)
    kwargs = {}
    if threshold_C is not None:
        eps = threshold_eps if threshold_eps is not None \
            else 0.25 * (profile.max_val - profile.min_val)
        t_lo, t_hi = threshold_bounds_thm1(profile, threshold_C, eps)
        kwargs = dict(threshold_lower=t_lo, threshold_upper=t_hi,
                      threshold_C=threshold_C, threshold_eps=eps)
    return SpeedBounds(lower, upper, w_infinity=w_inf, k_star=k_star, **kwargs)


def bounds_for_two_value(mu_plus: float, mu_minus: float,
                         K1: float | None = None,
                         K2: float | None = None) -> SpeedBounds:
    """SpeedBounds for a two-value medium; K1 = lim y_n/x_n feeds the lower
    bound on the maximal speed, K2 = lim x_{n+1}/y_n the upper bound on the
    minimal speed."""
    lower = 2.0 * math.sqrt(mu_minus)
    upper = 2.0 * math.sqrt(mu_plus)
    kwargs = {}
    if K1 is not None:
        kwargs["two_value_lower"] = two_value_lower_bound_wstar(mu_plus, mu_minus, K1)
        kwargs["two_value_lower_K"] = K1
    if K2 is not None:
        kwargs["two_value_upper"] = two_value_upper_bound_wlow(mu_plus, mu_minus, K2)
        kwargs["two_value_upper_K"] = K2
    return SpeedBounds(lower, upper, **kwargs)
