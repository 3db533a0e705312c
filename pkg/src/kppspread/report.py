"""Speed reports: JSON assembly plus the delimited outputs of a scenario."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np


@dataclass
class SpeedReport:
    """Everything a scenario run produced: regime classification, empirical
    speed estimates, theoretical values, eigen convergence rows, residual
    diagnostics and the pass/fail outcome of each configured check.

    Serializes losslessly to/from JSON; the config is embedded verbatim so a
    report fully reproduces its run.  Timestamps live in a separate metadata
    file, keeping report.json byte-identical across reruns.
    """

    scenario: str
    config: dict
    regime: str
    regime_C: float | None = None
    empirical: dict = field(default_factory=dict)
    theory: dict = field(default_factory=dict)
    eigen_rows: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    passed: bool = True

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SpeedReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def write_report(report: SpeedReport, path) -> None:
    Path(path).write_text(report.to_json())


def load_report(path) -> SpeedReport:
    return SpeedReport.from_dict(json.loads(Path(path).read_text()))


def write_trace_csv(trace, speed_times, speeds, path) -> None:
    """Columns t, x_front, speed_windowed; the speed column is populated on
    the rows closest to each window end."""
    t = np.asarray(trace.times)
    x = np.asarray(trace.positions)
    speed_at = {}
    if speeds is not None and len(speeds):
        idx = np.searchsorted(t, np.asarray(speed_times))
        for i, s in zip(np.clip(idx, 0, t.size - 1), speeds):
            speed_at[int(i)] = float(s)
    with open(path, "w") as fh:
        fh.write("t,x_front,speed_windowed\n")
        for i, (ti, xi) in enumerate(zip(t, x)):
            s = speed_at.get(i)
            fh.write(f"{float(ti)!r},{float(xi)!r},"
                     f"{'' if s is None else repr(float(s))}\n")


def write_residuals_csv(residuals: dict, path) -> None:
    """Columns x, r, log_growth (empty file with header when no composed
    corrector applies)."""
    xs = residuals.get("x", [])
    rs = residuals.get("r", [])
    lg = residuals.get("log_growth", [])
    with open(path, "w") as fh:
        fh.write("x,r,log_growth\n")
        for row in zip(xs, rs, lg):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_wl_csv(rows, w_infinity: float | None, path) -> None:
    """Columns L, w_L, w_infinity, gap for convergence studies."""
    with open(path, "w") as fh:
        fh.write("L,w_L,w_infinity,gap\n")
        for L, wl, gap in rows:
            wi = "" if w_infinity is None else repr(float(w_infinity))
            fh.write(f"{float(L)!r},{float(wl)!r},{wi},{float(gap)!r}\n")
