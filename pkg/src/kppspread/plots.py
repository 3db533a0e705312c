"""Matplotlib figure rendering for scenario reports (SVG files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "kppspread"     # deterministic element ids

_GUIDE_STYLE = {"lower_homog": ("2*sqrt(min mu)", "tab:blue"),
                "upper_homog": ("2*sqrt(max mu)", "tab:red"),
                "w_infinity": ("w_inf", "tab:green"),
                "two_value_lower": ("two-value lower (w*)", "tab:orange"),
                "two_value_upper": ("two-value upper (w_*)", "tab:purple")}


def _savefig(fig, path):
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def plot_scenario(trace, speed_times, speeds, guides: dict, path) -> None:
    """Front position and windowed speed vs time, with horizontal guide
    lines at every available theoretical value."""
    fig, (ax_pos, ax_spd) = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    t = np.asarray(trace.times)
    x = np.asarray(trace.positions)
    ax_pos.plot(t, x, lw=1.2, color="k")
    ax_pos.set_ylabel(f"front position (level {trace.level})")
    if speeds is not None and len(speeds):
        ax_spd.plot(speed_times, speeds, lw=1.2, color="k", label="windowed speed")
    for key, value in guides.items():
        if value is None or key not in _GUIDE_STYLE:
            continue
        label, color = _GUIDE_STYLE[key]
        ax_spd.axhline(value, color=color, ls="--", lw=1.0, label=label)
    ax_spd.set_xlabel("t")
    ax_spd.set_ylabel("speed")
    ax_spd.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _savefig(fig, path)


def plot_convergence(rows, w_infinity: float | None, path) -> None:
    """|w_L - w_inf| against L on log-log axes, plus the w_L values."""
    rows = list(rows)
    Ls = [r[0] for r in rows]
    wls = [r[1] for r in rows]
    gaps = [max(r[2], 1e-16) for r in rows]
    fig, (ax_w, ax_gap) = plt.subplots(1, 2, figsize=(8.0, 3.4))
    ax_w.plot(Ls, wls, "o-", color="k", label="w_L")
    if w_infinity is not None:
        ax_w.axhline(w_infinity, color="tab:green", ls="--", label="w_inf")
    ax_w.set_xlabel("L")
    ax_w.set_ylabel("speed")
    ax_w.legend(fontsize=8)
    ax_gap.loglog(Ls, gaps, "o-", color="k")
    ax_gap.set_xlabel("L")
    ax_gap.set_ylabel("|w_L - w_inf|")
    fig.tight_layout()
    _savefig(fig, path)
