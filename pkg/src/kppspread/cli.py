"""Scenario runner: parse a JSON config, execute theory computations and the
PDE simulation, and emit report.json, CSV series and SVG figures.

    kpp-spread run <config.json> [--out DIR] [--check] [--jobs N]
    kpp-spread preset <name> --emit [--out FILE]          (or --list)
    kpp-spread wL <profile.json> --L 5,20,80 [--out DIR]

Exit codes: 0 success, 2 config error, 3 numeric failure, 4 when configured
checks fail under --check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .corrector import ApproxEigenfunction, build_corrector, eigen_residual_profile
from .eigen import w_L
from .errors import ConfigError, KppSpreadError
from .fronttrack import estimate_spreading_speeds, windowed_speeds
from .media import (classify_regime, medium_from_dict, profile_from_dict)
from .plots import plot_convergence, plot_scenario
from .presets import list_presets, preset_config
from .report import (SpeedReport, write_report, write_residuals_csv,
                     write_trace_csv, write_wl_csv)
from .solver import Grid, SolverConfig, run
from .theory import bounds_for_profile, bounds_for_two_value, j_of_k

_TRACKER_DEFAULTS = {"level": 0.5, "window": 10.0, "transient": 0.3}
_THEORY_DEFAULTS = {"w_infinity": True, "wL": [], "bounds": True}


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _num(d: dict, key: str, where: str, positive: bool = True) -> float:
    _require(key in d, f"{where}.{key}: missing")
    v = d[key]
    _require(isinstance(v, (int, float)) and not isinstance(v, bool),
             f"{where}.{key}: expected a number, got {v!r}")
    if positive:
        _require(v > 0, f"{where}.{key}: must be positive, got {v!r}")
    return float(v)


def validate_config(cfg: dict) -> dict:
    """Normalize and validate a scenario config; raises ConfigError with a
    field-level message on the first violation."""
    _require(isinstance(cfg, dict), "config: expected a JSON object")
    _require(isinstance(cfg.get("scenario"), str) and cfg["scenario"],
             "scenario: expected a nonempty string")
    _require(isinstance(cfg.get("medium"), dict), "medium: expected an object")
    med = cfg["medium"]
    _require("two_value" in med or ("profile" in med and "phase" in med),
             "medium: needs either profile+phase or two_value")

    solver = cfg.get("solver")
    if solver is not None:
        _require(isinstance(solver, dict), "solver: expected an object or null")
        _num(solver, "X_max", "solver")
        _require(isinstance(solver.get("n_cells"), int),
                 "solver.n_cells: expected an integer")
        _require(solver["n_cells"] >= 256, "solver.n_cells: must be at least 256")
        _num(solver, "dt", "solver")
        _num(solver, "t_end", "solver")

    tracker = dict(_TRACKER_DEFAULTS, **cfg.get("tracker", {}))
    _require(0.0 < tracker["level"] < 1.0, "tracker.level: must lie in (0, 1)")
    _require(tracker["window"] > 0, "tracker.window: must be positive")
    _require(0.0 <= tracker["transient"] <= 0.9,
             "tracker.transient: must lie in [0, 0.9]")

    theory = dict(_THEORY_DEFAULTS, **cfg.get("theory", {}))
    _require(isinstance(theory["wL"], list), "theory.wL: expected a list")
    for v in theory["wL"]:
        _require(isinstance(v, (int, float)) and v > 0,
                 "theory.wL: entries must be positive numbers")
    _require(list(theory["wL"]) == sorted(theory["wL"]),
             "theory.wL: entries must be increasing")

    expect = cfg.get("expect", {})
    _require(isinstance(expect, dict), "expect: expected an object")

    out = dict(cfg)
    out["tracker"] = tracker
    out["theory"] = theory
    out["expect"] = expect
    return out


# ---------------------------------------------------------------------------
# scenario pipeline
# ---------------------------------------------------------------------------

def _finite_or_none(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _expect_checks(expect: dict, empirical: dict, eigen_rows: list, add):
    w_lo = empirical.get("w_low_est")
    w_hi = empirical.get("w_up_est")
    gap = empirical.get("gap")
    if "w_low_in" in expect:
        a, b = expect["w_low_in"]
        add("w_low_in", w_lo is not None and a <= w_lo <= b,
            f"w_low={w_lo} expected in [{a}, {b}]")
    if "w_up_in" in expect:
        a, b = expect["w_up_in"]
        add("w_up_in", w_hi is not None and a <= w_hi <= b,
            f"w_up={w_hi} expected in [{a}, {b}]")
    if "w_up_min" in expect:
        add("w_up_min", w_hi is not None and w_hi >= expect["w_up_min"],
            f"w_up={w_hi} expected >= {expect['w_up_min']}")
    if "w_low_max" in expect:
        add("w_low_max", w_lo is not None and w_lo <= expect["w_low_max"],
            f"w_low={w_lo} expected <= {expect['w_low_max']}")
    if "gap_min" in expect:
        add("gap_min", gap is not None and gap >= expect["gap_min"],
            f"gap={gap} expected >= {expect['gap_min']}")
    if "gap_max" in expect:
        add("gap_max", gap is not None and gap <= expect["gap_max"],
            f"gap={gap} expected <= {expect['gap_max']}")
    if expect.get("wL_gaps_decreasing"):
        gaps = [row[2] for row in eigen_rows]
        ok = len(gaps) >= 2 and all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
        add("wL_gaps_decreasing", ok, f"gaps={gaps}")


def run_scenario(config: dict, out_dir, check: bool = False) -> SpeedReport:
    """Execute one scenario end to end and write its artifacts into out_dir:
    report.json, trace.csv, residuals.csv, plot.svg (and wL.csv + wL.svg for
    eigen sweeps)."""
    cfg = validate_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = cfg["scenario"]
    solver_cfg = cfg.get("solver")
    tracker = cfg["tracker"]
    theory_cfg = cfg["theory"]

    x_max = solver_cfg["X_max"] if solver_cfg else 1e4
    medium = medium_from_dict(cfg["medium"], x_max)
    two_value = not medium.is_composed

    if two_value:
        regime_label, regime_C = "two-value", None
    elif medium.profile.is_constant:
        regime_label, regime_C = "homogeneous", None
    elif medium.phase.kind == "affine":
        regime_label, regime_C = "periodic", None
    else:
        regime = classify_regime(medium.phase)
        regime_label, regime_C = regime.label, regime.C

    bounds = None
    if theory_cfg["bounds"] or theory_cfg["w_infinity"]:
        if two_value:
            tv = cfg["medium"]["two_value"]
            seq = medium.sequences
            K1, K2 = tv.get("K1"), tv.get("K2")
            if K1 is None and len(seq.y_seq) >= 1:
                K1 = seq.y_seq[0] / seq.x_seq[0]
            if K2 is None and len(seq.x_seq) >= 2:
                K2 = seq.x_seq[1] / seq.y_seq[0]
            bounds = bounds_for_two_value(seq.mu_plus, seq.mu_minus, K1, K2)
        else:
            thr_C = regime_C if regime_label == "threshold" else None
            bounds = bounds_for_profile(medium.profile, threshold_C=thr_C)

    eigen_rows = []
    if theory_cfg["wL"] and not two_value:
        w_ref = bounds.w_infinity if bounds else None
        for L in theory_cfg["wL"]:
            wl = w_L(medium.profile, float(L))
            gap = abs(wl - w_ref) if w_ref is not None else float("nan")
            eigen_rows.append([float(L), wl, gap])
        write_wl_csv(eigen_rows, w_ref, out / "wL.csv")
        plot_convergence(eigen_rows, w_ref, out / "wL.svg")

    empirical = {}
    trace = None
    sp_t = sp_v = None
    if solver_cfg is not None:
        grid = Grid(solver_cfg["X_max"], solver_cfg["n_cells"])
        run_cfg = SolverConfig(dt=solver_cfg["dt"],
                               stop_margin=solver_cfg.get("stop_margin",
                                                          float("nan")))
        result = run(medium, grid, run_cfg, t_end=solver_cfg["t_end"],
                     level=tracker["level"],
                     obs_interval=solver_cfg.get("obs_interval", 0.5))
        trace = result.trace
        sp_t, sp_v = windowed_speeds(trace, tracker["window"])
        w_lo, w_hi = estimate_spreading_speeds(trace, tracker["transient"],
                                               tracker["window"])
        empirical = {"w_low_est": w_lo, "w_up_est": w_hi, "gap": w_hi - w_lo,
                     "n_windows": int(sp_v.size),
                     "early_stopped": result.early_stopped,
                     "t_final": result.field.t,
                     "front_final": trace.positions[-1] if trace.positions else None}

    residuals = {}
    if (not two_value and not medium.profile.is_constant
            and medium.phase.kind != "affine" and bounds is not None
            and bounds.k_star is not None):
        p_star = j_of_k(medium.profile, bounds.k_star)
        cor = build_corrector(medium.profile, p_star)
        aef = ApproxEigenfunction(cor, medium.phase)
        lo = max(10.0, 2.0 * medium.phase.x_left)
        profres = eigen_residual_profile(aef, np.geomspace(lo, x_max, 33))
        residuals = {"p": p_star,
                     "x": [float(v) for v in profres.x],
                     "r": [_finite_or_none(v) for v in profres.r],
                     "log_growth": [_finite_or_none(v) for v in profres.log_growth]}

    checks = []

    def add(name, ok, detail):
        checks.append({"name": name, "passed": bool(ok), "detail": detail})

    if empirical:
        add("ordering", empirical["w_low_est"] <= empirical["w_up_est"],
            f"w_low={empirical['w_low_est']:.4f} w_up={empirical['w_up_est']:.4f}")
    if bounds is not None and bounds.w_infinity is not None and not bounds.homogeneous:
        add("w_infinity_sandwich",
            bounds.lower_homog - 1e-9 <= bounds.w_infinity <= bounds.upper_homog + 1e-9,
            f"{bounds.lower_homog:.4f} <= {bounds.w_infinity:.4f} <= "
            f"{bounds.upper_homog:.4f}")
    if eigen_rows and bounds is not None:
        ok = all(bounds.lower_homog - 1e-6 <= row[1] <= bounds.upper_homog + 1e-6
                 for row in eigen_rows)
        add("wL_within_homogeneous_bounds", ok, f"rows={eigen_rows}")
    _expect_checks(cfg["expect"], empirical, eigen_rows, add)

    passed = all(c["passed"] for c in checks)
    report = SpeedReport(
        scenario=scenario, config=cfg, regime=regime_label, regime_C=regime_C,
        empirical=empirical, theory=bounds.to_dict() if bounds else {},
        eigen_rows=eigen_rows, residuals=residuals, checks=checks, passed=passed)

    write_report(report, out / "report.json")
    write_residuals_csv(residuals, out / "residuals.csv")
    if trace is not None:
        write_trace_csv(trace, sp_t, sp_v, out / "trace.csv")
        guides = {}
        if bounds is not None:
            guides = {k: getattr(bounds, k) for k in
                      ("lower_homog", "upper_homog", "w_infinity",
                       "two_value_lower", "two_value_upper")}
        plot_scenario(trace, sp_t, sp_v, guides, out / "plot.svg")
    else:
        write_trace_csv_empty(out / "trace.csv")
    return report


def write_trace_csv_empty(path) -> None:
    Path(path).write_text("t,x_front,speed_windowed\n")


def convergence_study(profile, L_list):
    """Rows (L, w_L, |w_L - w_inf|) plus the limiting speed itself."""
    L_list = [float(L) for L in L_list]
    if L_list != sorted(L_list):
        raise ConfigError("L list must be increasing")
    b = bounds_for_profile(profile)
    w_ref = b.w_infinity
    rows = []
    for L in L_list:
        wl = w_L(profile, L)
        rows.append([L, wl, abs(wl - w_ref)])
    return rows, w_ref


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _run_one(args_tuple):
    config, out_dir, check = args_tuple
    name = config.get("scenario", "scenario")
    try:
        report = run_scenario(config, out_dir, check)
        return name, report.passed, None
    except ConfigError as exc:
        return name, False, ("config", str(exc))
    except KppSpreadError as exc:
        return name, False, ("numeric", str(exc))


def _cmd_run(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if isinstance(raw, dict) and "scenarios" in raw:
        batch = raw["scenarios"]
        if not isinstance(batch, list) or not batch:
            print("config error: scenarios: expected a nonempty list",
                  file=sys.stderr)
            return 2
        jobs = [(cfg, Path(args.out) / str(cfg.get("scenario", f"s{i}")), args.check)
                for i, cfg in enumerate(batch)]
    else:
        jobs = [(raw, Path(args.out), args.check)]

    t0 = time.perf_counter()
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]

    code = 0
    for name, passed, err in results:
        if err is not None:
            kind, msg = err
            print(f"{name}: {kind} error: {msg}", file=sys.stderr)
            code = max(code, 2 if kind == "config" else 3)
        else:
            status = "ok" if passed else "checks FAILED"
            print(f"{name}: {status}")
            if args.check and not passed:
                code = max(code, 4)
    elapsed = time.perf_counter() - t0
    for _, out_dir, _ in jobs:
        meta = {"elapsed_seconds": elapsed, "timestamp": time.time()}
        try:
            (Path(out_dir) / "run_meta.json").write_text(json.dumps(meta) + "\n")
        except OSError:
            pass
    return code


def _cmd_preset(args) -> int:
    if args.list or args.name is None:
        for name in list_presets():
            print(name)
        return 0
    try:
        cfg = preset_config(args.name)
    except KppSpreadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.emit:
        print(f"{args.name}: use --emit to dump the config", file=sys.stderr)
        return 2
    text = json.dumps(cfg, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_wl(args) -> int:
    try:
        profile = profile_from_dict(json.loads(Path(args.profile).read_text()))
        L_list = [float(v) for v in args.L.split(",") if v]
        if not L_list:
            raise ConfigError("--L: expected a comma-separated list of periods")
        rows, w_ref = convergence_study(profile, L_list)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KppSpreadError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_wl_csv(rows, w_ref, out / "wL.csv")
    plot_convergence(rows, w_ref, out / "wL.svg")
    print(f"w_infinity = {w_ref:.9f}")
    for L, wl, gap in rows:
        print(f"L={L:g}: w_L={wl:.9f}  gap={gap:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpp-spread",
        description="Spreading speeds for KPP fronts in slowly varying media")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config (or batch)")
    p_run.add_argument("config", help="path to scenario JSON")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--check", action="store_true",
                       help="exit 4 when configured checks fail")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel scenarios for batch configs")
    p_run.set_defaults(func=_cmd_run)

    p_pre = sub.add_parser("preset", help="list or emit built-in scenarios")
    p_pre.add_argument("name", nargs="?", help="preset name")
    p_pre.add_argument("--list", action="store_true", help="list preset names")
    p_pre.add_argument("--emit", action="store_true", help="dump config JSON")
    p_pre.add_argument("--out", default=None, help="write config to a file")
    p_pre.set_defaults(func=_cmd_preset)

    p_wl = sub.add_parser("wL", help="finite-period speed convergence study")
    p_wl.add_argument("profile", help="path to a profile descriptor JSON")
    p_wl.add_argument("--L", default="5,20,80", help="comma-separated periods")
    p_wl.add_argument("--out", default="out", help="output directory")
    p_wl.set_defaults(func=_cmd_wl)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
