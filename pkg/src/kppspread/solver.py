"""IMEX finite-difference solver for u_t = u_xx + mu(x) u (1 - u) on a
truncated half-line, plus numerical verifiers for the traveling-bump
subsolution and the two exponential supersolution constructions.

Scheme: explicit reaction followed by Crank-Nicolson diffusion (tridiagonal
solve, Neumann ends).  The first few steps of a run replace Crank-Nicolson
with two backward-Euler half-steps (Rannacher smoothing) so the ringing a
trapezoidal scheme produces on the sharp initial datum never breaks the
[0, 1] range invariant down at the 1e-12 level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from .corrector import ApproxEigenfunction, build_corrector, eigen_residual_profile
from .errors import CoverageError, ParameterError, SchemeError
from .fronttrack import FrontTrace, front_position
from .media import Medium, PeriodicProfile, PhaseMap, evaluate_mu
from .theory import j_of_k, min_radius_subsolution

_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform vertex-centered grid on [0, x_max] with n_cells cells."""

    x_max: float
    n_cells: int

    def __post_init__(self):
        if self.x_max <= 0:
            raise ParameterError("grid needs x_max > 0")
        if self.n_cells < 256:
            raise ParameterError("grid needs at least 256 cells")

    @property
    def h(self) -> float:
        return self.x_max / self.n_cells

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.n_cells + 1)


@dataclass(eq=False)
class Field:
    """Solution snapshot u(t, .) on a grid."""

    grid: Grid
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != (self.grid.n_cells + 1,):
            raise ParameterError("field values must match the grid nodes")
        if self.u.min() < -_RANGE_TOL or self.u.max() > 1.0 + _RANGE_TOL:
            raise SchemeError("field values outside [0, 1]")
        self.u = np.clip(self.u, 0.0, 1.0)

    def mass(self) -> float:
        """Trapezoid mass; conserved exactly by the diffusion half of a step."""
        h = self.grid.h
        return h * (0.5 * self.u[0] + np.sum(self.u[1:-1]) + 0.5 * self.u[-1])


@dataclass(frozen=True)
class SolverConfig:
    """IMEX stepping parameters.

    ``dt * max(mu)`` must stay at or below 0.2 (explicit-reaction accuracy);
    ``stop_margin`` is the front-to-boundary distance that triggers an early
    stop (default ``20 / sqrt(min mu)``).  ``startup_be_steps`` counts the
    Rannacher-smoothed steps at the start of a run.
    """

    dt: float
    stop_margin: float = float("nan")
    startup_be_steps: int = 12

    def __post_init__(self):
        if self.dt <= 0:
            raise ParameterError("needs dt > 0")


class Stepper:
    """Prefactored stepping workspace for one (grid, medium, config)."""

    def __init__(self, grid: Grid, medium: Medium, cfg: SolverConfig):
        if cfg.dt * medium.mu_max > 0.2 + 1e-12:
            raise ParameterError("needs dt * max(mu) <= 0.2")
        self.grid, self.cfg = grid, cfg
        self.mu = np.asarray(evaluate_mu(medium, grid.nodes()), dtype=float)
        n = grid.n_cells + 1
        h2 = grid.h ** 2
        main = np.full(n, -2.0 / h2)
        off = np.full(n - 1, 1.0 / h2)
        lap = diags([off, main, off], [-1, 0, 1], format="lil")
        lap[0, 1] = 2.0 / h2
        lap[-1, -2] = 2.0 / h2
        lap = lap.tocsc()
        ident = diags([np.ones(n)], [0], format="csc")
        self._lu_cn = splu((ident - 0.5 * cfg.dt * lap).tocsc())
        self._lu_be_half = self._lu_cn   # same matrix: (I - (dt/2) L)
        self._h2 = h2
        # exact logistic half-flow factor: u -> u E / (1 + u (E - 1))
        self._growth = np.expm1(0.5 * cfg.dt * self.mu)

    def _laplacian(self, u: np.ndarray) -> np.ndarray:
        out = np.empty_like(u)
        out[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
        out[0] = 2.0 * (u[1] - u[0])
        out[-1] = 2.0 * (u[-2] - u[-1])
        return out / self._h2

    def _react_half(self, u: np.ndarray) -> np.ndarray:
        # exact flow of u' = mu u (1 - u) over dt/2: maps [0, 1] into itself,
        # monotone in u, so range and comparison survive the reaction exactly
        g = self._growth
        return u * (1.0 + g) / (1.0 + u * g)

    def _checked(self, u: np.ndarray, t: float) -> Field:
        if u.min() < -_RANGE_TOL or u.max() > 1.0 + _RANGE_TOL:
            raise SchemeError(f"range violation beyond {_RANGE_TOL} at t={t}")
        return Field(self.grid, np.clip(u, 0.0, 1.0), t)

    def step(self, fld: Field) -> Field:
        """One IMEX step: explicit reaction Strang-wrapped around a
        Crank-Nicolson diffusion solve (second order overall)."""
        r = self._react_half(fld.u)
        rhs = r + 0.5 * self.cfg.dt * self._laplacian(r)
        u = self._react_half(self._lu_cn.solve(rhs))
        return self._checked(u, fld.t + self.cfg.dt)

    def step_startup(self, fld: Field) -> Field:
        """Same Strang wrap, with two backward-Euler diffusion half-steps in
        the middle (damps the ringing of a trapezoidal start)."""
        r = self._react_half(fld.u)
        u = self._react_half(self._lu_be_half.solve(self._lu_be_half.solve(r)))
        return self._checked(u, fld.t + self.cfg.dt)


def step(fld: Field, medium: Medium, cfg: SolverConfig) -> Field:
    """Single-step convenience wrapper; runs build a Stepper once instead."""
    return Stepper(fld.grid, medium, cfg).step(fld)


def default_initial(grid: Grid, width: float = 2.0) -> np.ndarray:
    """u0 = 1 on [0, width], ramped to 0 over one cell."""
    x = grid.nodes()
    return np.clip((width - x) / grid.h, 0.0, 1.0)


@dataclass(eq=False)
class RunResult:
    field: Field
    trace: FrontTrace
    early_stopped: bool


def run(medium: Medium, grid: Grid, cfg: SolverConfig, t_end: float,
        init: np.ndarray | None = None, level: float = 0.5,
        obs_interval: float = 0.5, observers=()) -> RunResult:
    """Advance to t_end (or until the front nears the right boundary),
    sampling the front position every ``obs_interval``.

    The initial datum must be supported in [0, x_max/10].  Early stopping is
    flagged, not an error: the Neumann boundary must never influence the
    front.
    """
    if abs(grid.x_max - medium.x_max) > 1e-9 * medium.x_max:
        raise ParameterError("grid and medium domains disagree")
    u0 = default_initial(grid) if init is None else np.asarray(init, dtype=float)
    x = grid.nodes()
    support = x[u0 > 0]
    if support.size == 0 or support.max() > grid.x_max / 10.0 + grid.h:
        raise ParameterError("initial datum must be supported in [0, x_max/10]")
    margin_min = 20.0 / math.sqrt(medium.mu_min)
    margin = cfg.stop_margin if math.isfinite(cfg.stop_margin) else margin_min
    if margin < margin_min - 1e-9:
        raise ParameterError(f"stop_margin must be at least {margin_min:.3f}")

    stepper = Stepper(grid, medium, cfg)
    fld = Field(grid, u0, 0.0)
    times, positions = [], []

    def observe(f: Field) -> float | None:
        pos = front_position(f, level)
        if pos is not None:
            times.append(f.t)
            positions.append(pos)
        for obs in observers:
            obs(f)
        return pos

    observe(fld)
    next_obs = obs_interval
    early = False
    k = 0
    while fld.t < t_end - 1e-9:
        fld = (stepper.step_startup(fld) if k < cfg.startup_be_steps
               else stepper.step(fld))
        k += 1
        if fld.t + 1e-9 >= next_obs:
            pos = observe(fld)
            next_obs += obs_interval
            if pos is not None and pos >= grid.x_max - margin:
                early = True
                break
    trace = FrontTrace(level, tuple(times), tuple(positions))
    return RunResult(fld, trace, early)


def write_snapshot(fld: Field, path) -> None:
    """Dump a solution snapshot as CSV: a t header line, then x,u rows."""
    x = fld.grid.nodes()
    with open(path, "w") as fh:
        fh.write(f"t,{float(fld.t)!r}\n")
        fh.write("x,u\n")
        for xi, ui in zip(x, fld.u):
            fh.write(f"{float(xi)!r},{float(ui)!r}\n")


# ---------------------------------------------------------------------------
# sub/supersolution verifiers
# ---------------------------------------------------------------------------

@dataclass
class SignReport:
    """Outcome of a sign check: ``worst_residual`` must stay on the right
    side of zero (up to the stated tolerance) for ``passed``."""

    kind: str
    passed: bool
    worst_residual: float
    details: dict


def verify_subsolution(mu_minus: float, c: float, R: float, kappa: float,
                       n_points: int = 2001) -> SignReport:
    """Traveling-bump subsolution w = kappa * e^{-cx/2} cos(pi x / (2R)) on
    (-R, R): checks N[w] = w_t - w_xx - mu_minus w(1-w) <= 0 at t = 0.

    Requires c < 2 sqrt(mu_minus) and R strictly above the minimal radius;
    reports the largest kappa (by bisection) for which the sign holds.
    """
    r_min = min_radius_subsolution(mu_minus, c)   # also validates c
    if R <= r_min:
        raise ParameterError(f"radius {R} is not above the minimal radius {r_min:.4f}")
    if kappa <= 0:
        raise ParameterError("needs kappa > 0")
    a = 0.5 * c
    b = math.pi / (2.0 * R)
    xs = np.linspace(-R, R, n_points)
    bump = np.exp(-a * xs) * np.cos(b * xs)
    d1 = np.exp(-a * xs) * (-a * np.cos(b * xs) - b * np.sin(b * xs))
    d2 = np.exp(-a * xs) * ((a * a - b * b) * np.cos(b * xs)
                            + 2.0 * a * b * np.sin(b * xs))

    def residual(kap):
        w = kap * bump
        return kap * (-c * d1 - d2) - mu_minus * w * (1.0 - w)

    res = residual(kappa)
    worst = float(np.max(res))
    tol = 1e-10
    passed = worst <= tol
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(np.max(residual(mid))) <= tol:
            lo = mid
        else:
            hi = mid
    kappa_star = lo
    margin = mu_minus - 0.25 * c * c - b * b
    return SignReport("subsolution", passed, worst,
                      {"kappa_star": kappa_star, "margin": margin,
                       "n_positive": int(np.sum(res > tol))})


def verify_supersolution_exp(mu_plus: float, kappa: float,
                             n_points: int = 2001) -> SignReport:
    """Exponential supersolution v = min(1, kappa e^{-sqrt(mu+)(x - 2 sqrt(mu+) t)}):
    N[v] = v_t - v_xx - mu_plus v(1-v) equals mu_plus v^2 > 0 where v < 1.

    Reports the worst (minimum) residual and the least-squares slope of
    N/v against v, which must match mu_plus.
    """
    if mu_plus <= 0 or kappa <= 0:
        raise ParameterError("needs mu_plus > 0 and kappa > 0")
    lam = math.sqrt(mu_plus)
    x_lo = math.log(kappa) / lam          # v = 1 boundary at t = 0
    xs = np.linspace(x_lo + 1e-6, x_lo + 40.0 / lam, n_points)
    v = kappa * np.exp(-lam * xs)
    vt = 2.0 * mu_plus * v                # lam * 2 sqrt(mu+) = 2 mu+
    vxx = mu_plus * v
    res = vt - vxx - mu_plus * v * (1.0 - v)
    worst = float(np.min(res))
    ratio = res / v
    slope, intercept = np.polyfit(v, ratio, 1)
    passed = worst >= -1e-12
    return SignReport("supersolution_exp", passed, worst,
                      {"slope": float(slope), "intercept": float(intercept)})


def verify_supersolution_ubar(profile: PeriodicProfile, phase: PhaseMap,
                              k: float, c1: float, h_shift: float,
                              x_max: float, n_points: int = 2000) -> SignReport:
    """Supersolution ubar = min(1, phi_p(x) e^{-j(k)(x - h - c1 t)}) built
    from the approximate eigenfunction at p = j(k).

    Checked at t = 0 on the covered region: points beyond the first probe
    from which the eigen-residual stays within the slack c1 j(k) - k, where
    ubar < 1, kink preimages excluded.  Requires c1 above k/j(k) (which
    dominates the limiting speed), so the slack is positive.
    """
    if k < profile.max_val - 1e-12 and not profile.is_constant:
        raise ParameterError("needs level k >= max(mu0)")
    if profile.is_constant:
        m = profile.min_val
        jk = math.sqrt(max(k - m, 0.0))
        if jk <= 0:
            raise ParameterError("needs k > m for a constant profile")
        slack = c1 * jk - k
        if slack <= 0:
            raise ParameterError("needs c1 > k/j(k)")
        xs = np.linspace(0.0, x_max, n_points)
        log_ubar = -jk * (xs - h_shift)
        inside = log_ubar < 0.0
        if not np.any(inside):
            raise CoverageError("ubar < 1 nowhere on the domain")
        ubar = np.exp(log_ubar[inside])
        res = (jk * c1 - jk * jk - m) * ubar + m * ubar ** 2
        worst = float(np.min(res))
        return SignReport("supersolution_ubar", worst >= -1e-8, worst,
                          {"slack": slack, "x_cover": 0.0,
                           "n_checked": int(np.sum(inside))})

    jk = j_of_k(profile, k)
    slack = c1 * jk - k
    if slack <= 0:
        raise ParameterError("needs c1 > k/j(k)")
    cor = build_corrector(profile, jk)
    aef = ApproxEigenfunction(cor, phase)
    x_lo = max(2.0 * phase.x_left, 1.0)
    if x_lo >= x_max:
        raise CoverageError("x_max below the phase validity range")
    probes = np.geomspace(x_lo, x_max, 200)
    prof = eigen_residual_profile(aef, probes)
    r = np.asarray(prof.r)
    ok = ~np.asarray(prof.skipped)
    cover_idx = None
    for i in range(r.size):
        tail = r[i:][ok[i:]]
        if tail.size and np.all(np.abs(tail) <= slack):
            cover_idx = i
            break
    if cover_idx is None:
        raise CoverageError("eigen-residual never settles within the slack; "
                            "extend the domain")
    x_cover = float(probes[cover_idx])

    xs = np.linspace(x_cover, x_max, n_points)
    d1 = phase.d1(xs)
    d2 = phase.d2(xs)
    d3 = phase.d3(xs)
    y = phase.value(xs)
    v = cor.value(y)
    vp = cor.derivative(y)
    with np.errstate(invalid="ignore"):
        vpp = cor.second_derivative(y)
    log_phi = v / d1
    g1 = vp - (d2 / d1 ** 2) * v                       # (log phi_p)'
    g2 = d1 * vpp - (d3 / d1 ** 2 - 2.0 * d2 ** 2 / d1 ** 3) * v \
        - (d2 / d1) * vp                               # (log phi_p)''
    log_ubar = log_phi - jk * (xs - h_shift)
    mu = profile.evaluate(y)
    keep = (log_ubar < 0.0) & np.isfinite(vpp)
    if not np.any(keep):
        raise CoverageError("ubar < 1 nowhere on the covered region; "
                            "reduce h_shift or extend the domain")
    ubar = np.exp(log_ubar[keep])
    gp = g1[keep] - jk
    gpp = g2[keep]
    res = (jk * c1 - (gpp + gp ** 2) - mu[keep] * (1.0 - ubar)) * ubar
    worst = float(np.min(res))
    return SignReport("supersolution_ubar", worst >= -1e-8, worst,
                      {"slack": slack, "x_cover": x_cover,
                       "n_checked": int(np.sum(keep))})
