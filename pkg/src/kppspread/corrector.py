"""Periodic correctors of the cell Hamilton-Jacobi equation and the
approximate eigenfunctions they generate on slowly varying media.

The corrector ``v_p`` is the 1-periodic viscosity solution of

    (v'(y) - p)^2 + mu0(y) = H(p),

smooth (up to sqrt-corners of the integrand) when |p| >= j(M) and carrying a
single kink per period at the root of ``F`` otherwise.  Composing with a
phase map gives ``phi_p(x) = exp(v_p(phi(x)) / phi'(x))``, an approximate
eigenfunction whose relative residual under the drifted periodic operator
decays as x grows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProfileError, ParameterError
from .media import PeriodicProfile, PhaseMap
from .theory import H_of_p, j_at_max, sqrt_cumulative, sqrt_partial

_KINK_EXCLUSION = 1e-4     # phase-units half-width around the kink
_SINGULAR_FLOOR = 1e-10    # skip points where H - mu0 is below this
_FD_STEP = 1e-6


@dataclass(eq=False, frozen=True)
class Corrector:
    """Evaluators for one corrector v_p; immutable after construction."""

    profile: PeriodicProfile
    p: float
    H_p: float
    kink: float | None
    _nodes: np.ndarray = field(repr=False)
    _cum: np.ndarray = field(repr=False)

    def _cumulative(self, yw):
        """Integral of sqrt(H_p - mu0) from 0 to yw, yw in [0, 1]."""
        idx = np.minimum(np.searchsorted(self._nodes, yw, side="right") - 1,
                         self._nodes.size - 2)
        idx = np.maximum(idx, 0)
        return self._cum[idx] + sqrt_partial(self.profile, self.H_p,
                                             self._nodes[idx], yw)

    def value(self, y):
        """v_p at phase y (1-periodic, v_p(0) = 0)."""
        y = np.asarray(y, dtype=float)
        yw = y - np.floor(y)
        cum = self._cumulative(yw)
        if self.kink is None:
            signed = -cum if self.p >= 0 else cum
        else:
            c_kink = float(self._cumulative(np.asarray(self.kink)))
            signed = np.where(yw <= self.kink, -cum, cum - 2.0 * c_kink)
        out = self.p * yw + signed
        return out if out.ndim else float(out)

    def derivative(self, y, side: int = 1):
        """v_p' at phase y; one-sided at the kink (side=-1 for the left)."""
        y = np.asarray(y, dtype=float)
        yw = y - np.floor(y)
        s = np.sqrt(np.maximum(self.H_p - self.profile.evaluate(yw), 0.0))
        if self.kink is None:
            out = self.p - s if self.p >= 0 else self.p + s
        else:
            before = yw < self.kink if side > 0 else yw <= self.kink
            out = np.where(before, self.p - s, self.p + s)
        return out if out.ndim else float(out)

    def periodicity_defect(self) -> float:
        """v_p(1^-) - v_p(0): zero up to quadrature/root-finding tolerance."""
        full = float(self._cum[-1])
        if self.kink is None:
            return self.p - full if self.p >= 0 else self.p + full
        c_kink = float(self._cumulative(np.asarray(self.kink)))
        return self.p + full - 2.0 * c_kink

    def second_derivative(self, y):
        """v_p'' away from the kink; closed form for smooth profiles, else a
        one-sided finite difference of v_p'.  NaN where H - mu0 vanishes."""
        y = np.asarray(y, dtype=float)
        yw = y - np.floor(y)
        gap = self.H_p - self.profile.evaluate(yw)
        if self.profile.is_smooth:
            with np.errstate(divide="ignore", invalid="ignore"):
                base = self.profile.derivative(yw) / (2.0 * np.sqrt(gap))
            if self.kink is None:
                out = base if self.p >= 0 else -base
            else:
                out = np.where(yw <= self.kink, base, -base)
        else:
            step = _FD_STEP
            forward = yw + step
            if self.kink is not None:
                crosses = (yw <= self.kink) & (forward > self.kink)
            else:
                crosses = np.zeros_like(yw, dtype=bool)
            crosses |= forward >= 1.0
            lo = np.where(crosses, yw - step, yw)
            hi = np.where(crosses, yw, yw + step)
            out = (self.derivative(hi, side=-1 if self.kink is not None else 1)
                   - self.derivative(lo)) / step
        out = np.where(gap < _SINGULAR_FLOOR, np.nan, out)
        return out if out.ndim else float(out)


def build_corrector(profile: PeriodicProfile, p: float,
                    n_cells: int = 2048) -> Corrector:
    """Assemble v_p.  For |p| >= j(M) the explicit antiderivative formula
    applies (sign-mirrored for negative p); otherwise the eigenvalue is
    pinned at M and the kink X solves F(X) = 0 by bisection to 1e-12."""
    if profile.is_constant:
        raise DegenerateProfileError(
            "constant profiles have j(M) = 0; the corrector degenerates to 0")
    jM = j_at_max(profile)
    q = abs(float(p))
    if q >= jM:
        H = H_of_p(profile, p)
        nodes, cum = sqrt_cumulative(profile, H, n_cells)
        return Corrector(profile, float(p), H, None, nodes, cum)
    H = profile.max_val
    nodes, cum = sqrt_cumulative(profile, H, n_cells)
    target = 0.5 * (p + jM)   # F(Y) = p + j(M) - 2*C(Y)

    def c_at(y):
        idx = min(max(int(np.searchsorted(nodes, y, side="right")) - 1, 0),
                  nodes.size - 2)
        return cum[idx] + float(sqrt_partial(profile, H, nodes[idx], y))

    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if c_at(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14:
            break
    kink = 0.5 * (lo + hi)
    return Corrector(profile, float(p), H, kink, nodes, cum)


def hj_residual(corrector: Corrector, samples: int = 1000) -> float:
    """Max of |(v' - p)^2 + mu0 - H(p)| on a uniform phase grid, excluding a
    1e-6 neighborhood of the kink."""
    if samples < 100:
        raise ParameterError("need at least 100 samples")
    y = (np.arange(samples) + 0.5) / samples
    if corrector.kink is not None:
        y = y[np.abs(y - corrector.kink) > 1e-6]
    vp = corrector.derivative(y)
    res = (vp - corrector.p) ** 2 + corrector.profile.evaluate(y) - corrector.H_p
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# approximate eigenfunctions
# ---------------------------------------------------------------------------

@dataclass(eq=False, frozen=True)
class ApproxEigenfunction:
    """phi_p(x) = exp(v_p(phi(x)) / phi'(x)) for a phase map phi."""

    corrector: Corrector
    phase: PhaseMap

    def log_value(self, x):
        x = np.asarray(x, dtype=float)
        out = self.corrector.value(self.phase.value(x)) / self.phase.d1(x)
        return out if out.ndim else float(out)

    def value(self, x):
        return np.exp(self.log_value(x))

    def log_growth(self, x):
        """log(phi_p(x)) / x, which must decay along probes."""
        x = np.asarray(x, dtype=float)
        out = self.log_value(x) / x
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ResidualProfile:
    """Relative eigen-residual r(x) sampled on probes; NaN where skipped."""

    x: tuple[float, ...]
    r: tuple[float, ...]
    log_growth: tuple[float, ...]
    skipped: tuple[bool, ...]


def _kink_distance(yw: np.ndarray, kink: float) -> np.ndarray:
    d = np.abs(yw - kink)
    return np.minimum(d, 1.0 - d)


def eigen_residual_profile(aef: ApproxEigenfunction, probes) -> ResidualProfile:
    """(L_p phi_p - H(p) phi_p) / phi_p from the expanded derivative formula,
    with analytic phase derivatives and corrector derivatives.

    Probes landing within 1e-4 phase units of the kink, or where H - mu0
    falls below 1e-10 (v'' singular), are skipped with a flag.
    """
    x = np.asarray(probes, dtype=float)
    if np.any(x < max(aef.phase.x_left, 1e-12)):
        raise ParameterError("probes must lie within the phase validity range")
    cor = aef.corrector
    y = aef.phase.value(x)
    yw = y - np.floor(y)
    skip = cor.H_p - cor.profile.evaluate(yw) < _SINGULAR_FLOOR
    if cor.kink is not None:
        skip |= _kink_distance(yw, cor.kink) < _KINK_EXCLUSION
    v = cor.value(y)
    vp = cor.derivative(y)
    with np.errstate(invalid="ignore"):
        vpp = cor.second_derivative(y)
    d1 = aef.phase.d1(x)
    d2 = aef.phase.d2(x)
    d3 = aef.phase.d3(x)
    ratio = d2 / d1 ** 2
    r = (d1 * vpp
         - (d2 / d1) * vp
         + (2.0 * d2 ** 2 / d1 ** 3 - d3 / d1 ** 2) * v
         - 2.0 * ratio * v * vp
         + (ratio * v) ** 2
         + 2.0 * cor.p * ratio * v)
    r = np.where(skip, np.nan, r)
    skip |= np.isnan(r)
    lg = cor.value(y) / (d1 * x)
    return ResidualProfile(tuple(x), tuple(r), tuple(lg), tuple(bool(s) for s in skip))


def log_growth_check(aef: ApproxEigenfunction, probes):
    """Values of log(phi_p(x))/x at the probes and a monotone-trend flag
    (True when the last magnitude is below half the first)."""
    x = np.asarray(probes, dtype=float)
    if np.any(np.diff(x) <= 0) or np.any(x <= 0):
        raise ParameterError("probes must be positive and increasing")
    vals = aef.log_growth(x)
    decayed = bool(abs(vals[-1]) < 0.5 * abs(vals[0]))
    return x, vals, decayed
