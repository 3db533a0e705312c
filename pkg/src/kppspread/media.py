"""Heterogeneous growth rates on the half-line.

Two families of media are supported:

* composed media ``mu(x) = mu0(phi(x))`` built from a 1-periodic profile
  ``mu0`` and a strictly increasing phase map ``phi`` with ``phi' -> 0``,
* two-value media alternating between ``mu_plus`` and ``mu_minus`` on
  interval sequences ``(x_n, y_n)``.

All types are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProfileError, DomainError, ParameterError

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# periodic profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicProfile:
    """A 1-periodic growth rate with cached extrema.

    Kinds: ``constant`` (value ``a``), ``two_value`` (``a`` on [0, theta),
    ``b`` on [theta, 1)), ``cosine`` (``a + b*cos(2 pi y)``) and ``sampled``
    (piecewise-linear interpolation of ``samples`` on a uniform grid of
    [0, 1), wrapped periodically).
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    theta: float = 0.5
    samples: tuple[float, ...] = ()
    min_val: float = field(init=False)
    max_val: float = field(init=False)

    def __post_init__(self):
        if self.kind == "constant":
            lo = hi = float(self.a)
        elif self.kind == "two_value":
            if not 0.0 < self.theta < 1.0:
                raise ParameterError("two_value profile needs theta in (0, 1)")
            lo, hi = sorted((float(self.a), float(self.b)))
        elif self.kind == "cosine":
            if self.b == 0.0:
                raise ParameterError("cosine profile needs a nonzero amplitude; "
                                     "use a constant profile instead")
            lo, hi = self.a - abs(self.b), self.a + abs(self.b)
        elif self.kind == "sampled":
            if len(self.samples) < 2:
                raise ParameterError("sampled profile needs at least 2 samples")
            lo, hi = float(min(self.samples)), float(max(self.samples))
        else:
            raise ParameterError(f"unknown profile kind {self.kind!r}")
        if lo <= 0.0:
            raise ParameterError("growth rate must be strictly positive")
        if self.kind != "constant" and not lo < hi:
            raise ParameterError("nonconstant profile needs min < max")
        object.__setattr__(self, "min_val", lo)
        object.__setattr__(self, "max_val", hi)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    @property
    def is_smooth(self) -> bool:
        """True when an analytic derivative is available."""
        return self.kind in ("constant", "cosine")

    def evaluate(self, y):
        """mu0 at phase y, wrapped to one period."""
        y = np.asarray(y, dtype=float)
        frac = y - np.floor(y)
        if self.kind == "constant":
            out = np.full_like(frac, self.a)
        elif self.kind == "two_value":
            out = np.where(frac < self.theta, self.a, self.b)
        elif self.kind == "cosine":
            out = self.a + self.b * np.cos(_TWO_PI * frac)
        else:
            vals = np.asarray(self.samples + (self.samples[0],))
            nodes = np.linspace(0.0, 1.0, len(vals))
            out = np.interp(frac, nodes, vals)
        return out if out.ndim else float(out)

    def derivative(self, y):
        """Analytic mu0' at phase y; only defined for smooth kinds."""
        if not self.is_smooth:
            raise ParameterError(f"profile kind {self.kind!r} has no analytic derivative")
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            out = np.zeros_like(y)
        else:
            out = -_TWO_PI * self.b * np.sin(_TWO_PI * (y - np.floor(y)))
        return out if out.ndim else float(out)


def constant_profile(m: float) -> PeriodicProfile:
    return PeriodicProfile("constant", a=m)


def two_value_profile(a: float, b: float, theta: float = 0.5) -> PeriodicProfile:
    """a on [0, theta), b on [theta, 1)."""
    return PeriodicProfile("two_value", a=a, b=b, theta=theta)


def cosine_profile(m: float, amp: float = 1.0) -> PeriodicProfile:
    return PeriodicProfile("cosine", a=m, b=amp)


def sampled_profile(values) -> PeriodicProfile:
    return PeriodicProfile("sampled", samples=tuple(float(v) for v in values))


# ---------------------------------------------------------------------------
# phase maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseMap:
    """Strictly increasing change of variable with analytic derivatives.

    Kinds and their left edge of validity:

    * ``log_power``:  beta * (ln x)^alpha,  x_left = e
    * ``power``:      x^alpha with alpha in (0, 1),  x_left = 0
    * ``x_over_log``: x / (ln x)^alpha,  x_left = e^(alpha+1)
    * ``affine``:     x / L (finite-period comparison map),  x_left = 0
    """

    kind: str
    alpha: float = 1.0
    beta: float = 1.0
    period: float = 1.0
    x_left: float = field(init=False)

    def __post_init__(self):
        if self.kind == "log_power":
            if self.alpha <= 0 or self.beta <= 0:
                raise ParameterError("log_power phase needs alpha > 0 and beta > 0")
            left = math.e
        elif self.kind == "power":
            if not 0.0 < self.alpha < 1.0:
                raise ParameterError("power phase needs alpha in (0, 1)")
            left = 0.0
        elif self.kind == "x_over_log":
            if self.alpha <= 0:
                raise ParameterError("x_over_log phase needs alpha > 0")
            left = math.exp(self.alpha + 1.0)
        elif self.kind == "affine":
            if self.period <= 0:
                raise ParameterError("affine phase needs L > 0")
            left = 0.0
        else:
            raise ParameterError(f"unknown phase kind {self.kind!r}")
        object.__setattr__(self, "x_left", left)
        if self.kind != "affine":
            self._check_asymptotics()

    def _check_asymptotics(self):
        # phi increasing to +inf with phi' > 0 decaying, probed on a log grid
        # reaching far out: (ln x)^alpha kinds grow glacially.
        probes = np.geomspace(max(self.x_left, 1.0) + 1.0, 1e200, 33)
        d1 = self.d1(probes)
        v = self.value(probes)
        if not (np.all(d1 > 0) and np.all(np.diff(v) > 0)):
            raise ParameterError("phase map is not strictly increasing on probes")
        if not (d1[-1] < 0.1 * d1[0] and v[-1] > 5.0 * v[0]):
            raise ParameterError("phase map does not satisfy phi -> inf, phi' -> 0")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "log_power":
            out = self.beta * np.log(x) ** self.alpha
        elif self.kind == "power":
            out = x ** self.alpha
        elif self.kind == "x_over_log":
            out = x / np.log(x) ** self.alpha
        else:
            out = x / self.period
        return out if out.ndim else float(out)

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        al, be = self.alpha, self.beta
        if self.kind == "log_power":
            out = al * be * np.log(x) ** (al - 1.0) / x
        elif self.kind == "power":
            out = al * x ** (al - 1.0)
        elif self.kind == "x_over_log":
            lg = np.log(x)
            out = lg ** (-al) - al * lg ** (-al - 1.0)
        else:
            out = np.full_like(x, 1.0 / self.period)
        return out if out.ndim else float(out)

    def d2(self, x):
        x = np.asarray(x, dtype=float)
        al, be = self.alpha, self.beta
        if self.kind == "log_power":
            lg = np.log(x)
            out = al * be * ((al - 1.0) * lg ** (al - 2.0) - lg ** (al - 1.0)) / x ** 2
        elif self.kind == "power":
            out = al * (al - 1.0) * x ** (al - 2.0)
        elif self.kind == "x_over_log":
            lg = np.log(x)
            out = (-al * lg ** (-al - 1.0) + al * (al + 1.0) * lg ** (-al - 2.0)) / x
        else:
            out = np.zeros_like(x)
        return out if out.ndim else float(out)

    def d3(self, x):
        x = np.asarray(x, dtype=float)
        al, be = self.alpha, self.beta
        if self.kind == "log_power":
            lg = np.log(x)
            out = al * be * (2.0 * lg ** (al - 1.0)
                             - 3.0 * (al - 1.0) * lg ** (al - 2.0)
                             + (al - 1.0) * (al - 2.0) * lg ** (al - 3.0)) / x ** 3
        elif self.kind == "power":
            out = al * (al - 1.0) * (al - 2.0) * x ** (al - 3.0)
        elif self.kind == "x_over_log":
            lg = np.log(x)
            out = (al * lg ** (-al - 1.0)
                   - al * (al + 1.0) * (al + 2.0) * lg ** (-al - 3.0)) / x ** 2
        else:
            out = np.zeros_like(x)
        return out if out.ndim else float(out)

    def invert(self, target: float, rel_tol: float = 1e-12) -> float:
        """x with phi(x) = target, by bisection on [x_left, inf)."""
        lo = max(self.x_left, 0.0)
        if self.value(max(lo, 1e-12)) > target and self.kind != "power":
            raise ParameterError(f"target {target} below phi(x_left)")
        hi = max(lo, 1.0)
        while self.value(hi) < target:
            hi *= 2.0
            if hi > 1e300:
                raise ParameterError("phase inversion bracket overflow")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.value(mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= rel_tol * max(1.0, hi):
                break
        return 0.5 * (lo + hi)


def log_power_phase(alpha: float, beta: float = 1.0) -> PhaseMap:
    return PhaseMap("log_power", alpha=alpha, beta=beta)


def power_phase(alpha: float) -> PhaseMap:
    return PhaseMap("power", alpha=alpha)


def x_over_log_phase(alpha: float) -> PhaseMap:
    return PhaseMap("x_over_log", alpha=alpha)


def affine_phase(period: float) -> PhaseMap:
    return PhaseMap("affine", period=period)


# ---------------------------------------------------------------------------
# regime classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Regime:
    label: str                 # "oscillating" | "threshold" | "unique" | "inconclusive"
    C: float | None = None     # limit of 1/(x phi'(x)) in the threshold case


def classify_regime(phase: PhaseMap, probes=None) -> Regime:
    """Heuristic trend classifier for the propagation regime of a phase map.

    Advisory metadata only; never used inside numerics. The decisive
    quantities are 1/(x phi') (growth -> oscillating spreading speeds,
    stabilization -> threshold case with constant C) and phi''/phi'^2,
    phi'''/phi'^2 (decay of both -> unique spreading speed).
    """
    if probes is None:
        # far enough out that (ln x)^alpha kinds show their trend, but inside
        # the range where phi'^2 and x^3 stay representable
        probes = np.geomspace(max(8.0, 1.05 * phase.x_left + 1.0), 1e100, 64)
    probes = np.asarray(probes, dtype=float)
    if probes[-1] < 1e4 * probes[0]:
        raise ParameterError("probe set must span at least 4 decades")
    d1 = phase.d1(probes)
    q = 1.0 / (probes * d1)
    a = phase.d2(probes) / d1 ** 2
    b = phase.d3(probes) / d1 ** 2

    def decayed(v):
        return np.max(np.abs(v)) <= 1e-12 or abs(v[-1]) <= 0.1 * abs(v[0])

    if decayed(a) and decayed(b):
        return Regime("unique")
    if q[-1] >= 10.0 * q[0]:
        return Regime("oscillating")
    tail = q[len(q) // 2:]
    if np.max(np.abs(tail / q[-1] - 1.0)) <= 0.05:
        return Regime("threshold", C=float(q[-1]))
    return Regime("inconclusive")


# ---------------------------------------------------------------------------
# two-value interval sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoValueSequences:
    """Interval endpoints for a medium equal to mu_plus on (x_n, y_n) and
    mu_minus on (y_n, x_{n+1}).

    ``y_seq`` may be one element shorter than ``x_seq`` when the last fast
    interval was truncated by the domain bound.
    """

    mu_plus: float
    mu_minus: float
    x_seq: tuple[float, ...]
    y_seq: tuple[float, ...]

    def __post_init__(self):
        if not 0.0 < self.mu_minus < self.mu_plus:
            raise ParameterError("needs 0 < mu_minus < mu_plus")
        nx, ny = len(self.x_seq), len(self.y_seq)
        if nx == 0 or ny not in (nx, nx - 1):
            raise ParameterError("x_seq and y_seq lengths must interleave")
        merged = []
        for i, x in enumerate(self.x_seq):
            merged.append(x)
            if i < ny:
                merged.append(self.y_seq[i])
        if not all(u < v for u, v in zip(merged, merged[1:])):
            raise ParameterError("sequences must satisfy x_n < y_n < x_{n+1} strictly")


def geometric_sequences(mu_plus: float, mu_minus: float, K1: float, K2: float,
                        x0: float, x_max: float) -> TwoValueSequences:
    """Sequences with constant ratios y_n / x_n = K1 and x_{n+1} / y_n = K2,
    truncated at x_max."""
    if K1 <= 1.0 or K2 <= 1.0:
        raise ParameterError("geometric sequences need K1 > 1 and K2 > 1")
    if x0 <= 0.0:
        raise ParameterError("geometric sequences need x0 > 0")
    xs, ys = [], []
    x = float(x0)
    while x <= x_max:
        xs.append(x)
        y = K1 * x
        if y > x_max:
            break
        ys.append(y)
        x = K2 * y
    if not xs:
        raise ParameterError("x0 exceeds x_max; no intervals generated")
    return TwoValueSequences(mu_plus, mu_minus, tuple(xs), tuple(ys))


def _plateau_above(profile: PeriodicProfile, level: float, n_scan: int = 10_000):
    """Largest circular interval of [0, 1) where mu0 > level.

    Returns (start, length) with start in [0, 1); endpoints refined by
    bisection and inset by 1e-9 so the strict inequality holds throughout.
    """
    ys = np.arange(n_scan) / n_scan
    mask = profile.evaluate(ys) > level
    if np.all(mask):
        raise DegenerateProfileError("profile exceeds the level everywhere")
    if not np.any(mask):
        raise DegenerateProfileError("profile never exceeds the level")
    # longest circular run of True: scan the doubled array, runs must start
    # inside the first copy
    ext = np.concatenate([mask, mask])
    best_len, best_start, run, start = 0, 0, 0, 0
    for i, flag in enumerate(ext):
        if flag:
            if run == 0:
                start = i
            run += 1
            if start < n_scan and run > best_len:
                best_len, best_start = run, start
        else:
            run = 0
    if best_len >= n_scan:
        raise DegenerateProfileError("plateau covers the whole period")

    def refine(lo, hi):
        # root of mu0 - level between a False and a True sample
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if profile.evaluate(mid) > level:
                hi = mid
            else:
                lo = mid
        return hi

    step = 1.0 / n_scan
    left = refine((best_start - 1) * step, best_start * step)
    i_end = best_start + best_len - 1
    right_lo, right_hi = i_end * step, (i_end + 1) * step

    def refine_right(lo, hi):
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if profile.evaluate(mid) > level:
                lo = mid
            else:
                hi = mid
        return lo

    right = refine_right(right_lo, right_hi)
    left += 1e-9
    right -= 1e-9
    if right <= left:
        raise DegenerateProfileError("plateau degenerates after refinement")
    return left % 1.0, right - left


def sequences_from_phase(profile: PeriodicProfile, phase: PhaseMap, eps: float,
                         x_max: float) -> TwoValueSequences:
    """Two-value sequences realizing the lower-bounding medium for a composed
    medium: mu0(phi(x)) >= max(mu0) - eps on every (x_n, y_n).

    Finds a phase-interval (x_{-1}, x_{-1} + delta) on which mu0 exceeds
    max(mu0) - eps, then inverts phi(x_n) = x_{-1} + n and
    phi(y_n) = x_{-1} + n + delta by bisection.
    """
    if profile.is_constant:
        raise DegenerateProfileError("constant profile has no plateau distinct "
                                     "from its complement")
    if not 0.0 < eps < profile.max_val - profile.min_val:
        raise ParameterError("eps must lie in (0, max mu0 - min mu0)")
    start, delta = _plateau_above(profile, profile.max_val - eps)
    phase_left = phase.value(max(phase.x_left, 1e-9))
    n0 = 0
    while start + n0 < phase_left:
        n0 += 1
    xs, ys = [], []
    n = n0
    while True:
        xn = phase.invert(start + n)
        if xn > x_max:
            break
        xs.append(xn)
        yn = phase.invert(start + n + delta)
        if yn > x_max:
            break
        ys.append(yn)
        n += 1
    if not xs:
        raise ParameterError("x_max too small: no intervals fit the domain")
    return TwoValueSequences(profile.max_val - eps, profile.min_val,
                             tuple(xs), tuple(ys))


# ---------------------------------------------------------------------------
# media
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Medium:
    """Spatial growth rate mu(x) on [0, x_max].

    Either composed (profile + phase, frozen at the left edge value for
    x < x_left) or two-value over interval sequences.
    """

    x_max: float
    profile: PeriodicProfile | None = None
    phase: PhaseMap | None = None
    sequences: TwoValueSequences | None = None
    left_value: float = field(default=float("nan"))

    def __post_init__(self):
        if self.x_max <= 0:
            raise ParameterError("medium needs x_max > 0")
        composed = self.profile is not None and self.phase is not None
        if composed == (self.sequences is not None):
            raise ParameterError("medium is either composed or two-value")
        if math.isnan(self.left_value):
            if composed:
                edge = max(self.phase.x_left, 0.0)
                val = float(self.profile.evaluate(self.phase.value(max(edge, 1e-12))))
            else:
                val = self.sequences.mu_minus
            object.__setattr__(self, "left_value", val)

    @property
    def is_composed(self) -> bool:
        return self.sequences is None

    @property
    def mu_min(self) -> float:
        if self.is_composed:
            return min(self.profile.min_val, self.left_value)
        return min(self.sequences.mu_minus, self.left_value)

    @property
    def mu_max(self) -> float:
        if self.is_composed:
            return max(self.profile.max_val, self.left_value)
        return max(self.sequences.mu_plus, self.left_value)


def composed_medium(profile: PeriodicProfile, phase: PhaseMap, x_max: float,
                    left_value: float = float("nan")) -> Medium:
    return Medium(x_max=x_max, profile=profile, phase=phase, left_value=left_value)


def two_value_medium(sequences: TwoValueSequences, x_max: float,
                     left_value: float = float("nan")) -> Medium:
    return Medium(x_max=x_max, sequences=sequences, left_value=left_value)


def evaluate_mu(medium: Medium, x):
    """Growth rate mu at position x (scalar or array), 0 <= x <= x_max."""
    xa = np.asarray(x, dtype=float)
    tol = 1e-9 * max(1.0, medium.x_max)
    if np.any(xa < -tol) or np.any(xa > medium.x_max + tol):
        raise DomainError(f"position outside [0, {medium.x_max}]")
    if medium.is_composed:
        out = np.full(xa.shape, medium.left_value)
        sel = xa >= medium.phase.x_left
        if np.any(sel):
            out[sel] = medium.profile.evaluate(medium.phase.value(xa[sel]))
    else:
        seq = medium.sequences
        breaks = []
        for i, xv in enumerate(seq.x_seq):
            breaks.append(xv)
            if i < len(seq.y_seq):
                breaks.append(seq.y_seq[i])
        idx = np.searchsorted(np.asarray(breaks), xa, side="right")
        out = np.where(idx % 2 == 1, seq.mu_plus, seq.mu_minus)
        out = np.where(idx == 0, medium.left_value, out)
    return out if xa.ndim else float(out)


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------

def profile_to_dict(profile: PeriodicProfile) -> dict:
    if profile.kind == "constant":
        return {"kind": "constant", "m": profile.a}
    if profile.kind == "two_value":
        return {"kind": "two_value", "a": profile.a, "b": profile.b,
                "theta": profile.theta}
    if profile.kind == "cosine":
        return {"kind": "cosine", "m": profile.a, "amp": profile.b}
    return {"kind": "sampled", "values": list(profile.samples)}


def profile_from_dict(d: dict) -> PeriodicProfile:
    kind = d.get("kind")
    if kind == "constant":
        return constant_profile(d["m"])
    if kind == "two_value":
        return two_value_profile(d["a"], d["b"], d.get("theta", 0.5))
    if kind == "cosine":
        return cosine_profile(d["m"], d.get("amp", 1.0))
    if kind == "sampled":
        return sampled_profile(d["values"])
    raise ParameterError(f"unknown profile kind {kind!r}")


def phase_to_dict(phase: PhaseMap) -> dict:
    if phase.kind == "log_power":
        return {"kind": "log_power", "alpha": phase.alpha, "beta": phase.beta}
    if phase.kind == "power":
        return {"kind": "power", "alpha": phase.alpha}
    if phase.kind == "x_over_log":
        return {"kind": "x_over_log", "alpha": phase.alpha}
    return {"kind": "affine", "L": phase.period}


def phase_from_dict(d: dict) -> PhaseMap:
    kind = d.get("kind")
    if kind == "log_power":
        return log_power_phase(d["alpha"], d.get("beta", 1.0))
    if kind == "power":
        return power_phase(d["alpha"])
    if kind == "x_over_log":
        return x_over_log_phase(d["alpha"])
    if kind == "affine":
        return affine_phase(d["L"])
    raise ParameterError(f"unknown phase kind {kind!r}")


def medium_to_dict(medium: Medium) -> dict:
    if medium.is_composed:
        return {"profile": profile_to_dict(medium.profile),
                "phase": phase_to_dict(medium.phase)}
    seq = medium.sequences
    return {"two_value": {"mu_plus": seq.mu_plus, "mu_minus": seq.mu_minus,
                          "x_seq": list(seq.x_seq), "y_seq": list(seq.y_seq)}}


def medium_from_dict(d: dict, x_max: float) -> Medium:
    if "two_value" in d:
        tv = d["two_value"]
        seq = TwoValueSequences(tv["mu_plus"], tv["mu_minus"],
                                tuple(tv["x_seq"]), tuple(tv["y_seq"]))
        return two_value_medium(seq, x_max, tv.get("left_value", float("nan")))
    if "profile" not in d or "phase" not in d:
        raise ParameterError("medium descriptor needs profile+phase or two_value")
    return composed_medium(profile_from_dict(d["profile"]),
                           phase_from_dict(d["phase"]), x_max,
                           d.get("left_value", float("nan")))
