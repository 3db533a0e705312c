"""Front positions and windowed speeds extracted from solution snapshots.

The estimators are finite-time proxies for the asymptotic minimal/maximal
spreading speeds: the true definitions are liminf/limsup statements as
t -> infinity, so tolerances in tests are set accordingly.  In the
unique-speed regime the two estimates should coincide; in the oscillating
regime they separate toward the theoretical bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ParameterError

DEFAULT_LEVEL = 0.5
DEFAULT_WINDOW = 10.0
DEFAULT_TRANSIENT = 0.3


@dataclass(frozen=True)
class FrontTrace:
    """Sampled front path x_level(t); samples exist only while the level is
    attained."""

    level: float
    times: tuple[float, ...]
    positions: tuple[float, ...]

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ParameterError("front level must lie in (0, 1)")
        t = np.asarray(self.times)
        if t.size >= 2 and np.any(np.diff(t) <= 0):
            raise ParameterError("trace times must be strictly increasing")

    @property
    def span(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return self.times[-1] - self.times[0]


def front_position(field, level: float):
    """Largest x with u(x) >= level, linearly interpolated; None when the
    level is not attained anywhere."""
    u = np.asarray(field.u)
    if float(np.max(u)) < level:
        return None
    x = field.grid.nodes()
    i = int(np.nonzero(u >= level)[0][-1])
    if i == u.size - 1:
        return float(x[-1])
    # u[i] >= level > u[i+1]
    frac = (u[i] - level) / (u[i] - u[i + 1])
    return float(x[i] + frac * (x[i + 1] - x[i]))


def windowed_speeds(trace: FrontTrace, window: float = DEFAULT_WINDOW):
    """Least-squares slopes of x(t) over sliding windows [t - W, t], stepped
    by W/4.  Returns (window_end_times, slopes)."""
    if window <= 0:
        raise ParameterError("window length must be positive")
    t = np.asarray(trace.times)
    x = np.asarray(trace.positions)
    if trace.span < 2.0 * window:
        raise InsufficientDataError(
            f"trace spans {trace.span:.3g}, need at least 2 windows of {window}")
    ends = np.arange(t[0] + window, t[-1] + 1e-9, 0.25 * window)
    out_t, out_s = [], []
    for e in ends:
        sel = (t >= e - window - 1e-9) & (t <= e + 1e-9)
        if np.sum(sel) < 2:
            continue
        tw = t[sel]
        xw = x[sel]
        tm = tw - tw.mean()
        denom = float(tm @ tm)
        if denom == 0.0:
            continue
        out_t.append(float(e))
        out_s.append(float(tm @ (xw - xw.mean()) / denom))
    if not out_s:
        raise InsufficientDataError("no window had enough samples")
    return np.asarray(out_t), np.asarray(out_s)


def estimate_spreading_speeds(trace: FrontTrace,
                              transient_fraction: float = DEFAULT_TRANSIENT,
                              window: float = DEFAULT_WINDOW):
    """Finite-time (w_low_est, w_up_est): min and max windowed speed after
    discarding the first ``transient_fraction`` of windows."""
    if not 0.0 <= transient_fraction <= 0.9:
        raise ParameterError("transient_fraction must lie in [0, 0.9]")
    _, speeds = windowed_speeds(trace, window)
    skip = int(np.floor(speeds.size * transient_fraction))
    rest = speeds[skip:]
    if rest.size == 0:
        raise InsufficientDataError("transient cut discarded every window")
    return float(np.min(rest)), float(np.max(rest))
