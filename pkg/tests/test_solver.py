import math

import numpy as np
import pytest

from kppspread import (Field, Grid, ParameterError, SchemeError,
                       SolverConfig, Stepper, affine_phase, composed_medium,
                       constant_profile, cosine_profile, default_initial,
                       power_phase, run, step, verify_subsolution,
                       verify_supersolution_exp, verify_supersolution_ubar,
                       write_snapshot)
from kppspread.theory import w_infinity

HOMOG = composed_medium(constant_profile(1.0), affine_phase(1.0), 100.0)
HET = composed_medium(cosine_profile(2.0, 1.0), power_phase(0.5), 100.0)
GRID = Grid(100.0, 500)


def test_grid_and_config_validation():
    with pytest.raises(ParameterError):
        Grid(100.0, 100)                      # too few cells
    with pytest.raises(ParameterError):
        SolverConfig(dt=-0.01)
    with pytest.raises(ParameterError):
        Stepper(GRID, composed_medium(constant_profile(4.0), affine_phase(1.0),
                                      100.0), SolverConfig(dt=0.1))  # dt*mu > 0.2


def test_field_range_enforced():
    u = np.zeros(GRID.n_cells + 1)
    u[3] = 1.5
    with pytest.raises(SchemeError):
        Field(GRID, u)


def test_equilibria_are_fixed_points():
    cfg = SolverConfig(dt=0.05)
    zero = Field(GRID, np.zeros(GRID.n_cells + 1))
    one = Field(GRID, np.ones(GRID.n_cells + 1))
    stepper = Stepper(GRID, HOMOG, cfg)
    assert np.array_equal(stepper.step(zero).u, zero.u)
    assert np.allclose(stepper.step(one).u, one.u, atol=1e-14)


def test_mass_increases_below_one():
    cfg = SolverConfig(dt=0.05)
    x = GRID.nodes()
    fld = Field(GRID, 0.5 * np.exp(-((x - 8.0) ** 2) / 4.0))
    stepper = Stepper(GRID, HOMOG, cfg)
    for _ in range(40):
        nxt = stepper.step(fld)
        assert nxt.mass() > fld.mass()
        assert nxt.u.max() < 1.0
        fld = nxt


def test_step_convenience_matches_stepper():
    cfg = SolverConfig(dt=0.05)
    fld = Field(GRID, default_initial(GRID))
    a = step(fld, HOMOG, cfg)
    b = Stepper(GRID, HOMOG, cfg).step(fld)
    assert np.array_equal(a.u, b.u)


def test_comparison_principle_ordered_pairs():
    # nu = dt/h^2 <= 1 keeps both stencil factors entrywise monotone, so
    # ordering must survive every step to rounding
    rng = np.random.default_rng(21)
    grid = Grid(120.0, 600)                   # h = 0.2
    cfg = SolverConfig(dt=0.04)               # nu = 1
    het = composed_medium(cosine_profile(2.0, 1.0), power_phase(0.5), 120.0)
    for medium in (composed_medium(constant_profile(1.0), affine_phase(1.0),
                                   120.0), het):
        stepper = Stepper(grid, medium, cfg)
        x = grid.nodes()
        for _ in range(5):
            u0 = np.clip(rng.uniform(0.0, 0.7) *
                         np.exp(-((x - rng.uniform(10, 60)) ** 2)
                                / rng.uniform(4, 40)), 0.0, 1.0)
            v0 = np.clip(u0 + rng.uniform(0.0, 0.3, x.size) * 0.0
                         + rng.uniform(0.05, 0.3) *
                         np.exp(-((x - rng.uniform(10, 60)) ** 2) / 9.0), 0.0, 1.0)
            fu, fv = Field(grid, u0), Field(grid, np.maximum(u0, v0))
            for _ in range(60):
                fu = stepper.step(fu)
                fv = stepper.step(fv)
                assert float(np.max(fu.u - fv.u)) <= 1e-10


def test_run_returns_trace_and_respects_support():
    med = composed_medium(constant_profile(1.0), affine_phase(1.0), 150.0)
    grid = Grid(150.0, 600)
    res = run(med, grid, SolverConfig(dt=0.05), t_end=20.0)
    assert not res.early_stopped
    assert res.trace.times[0] == 0.0
    assert res.trace.positions[-1] > res.trace.positions[0]
    bad = np.zeros(grid.n_cells + 1)
    bad[-10:] = 1.0                           # supported far right
    with pytest.raises(ParameterError):
        run(med, grid, SolverConfig(dt=0.05), t_end=5.0, init=bad)


def test_run_rescaled_homogeneous_speed():
    # mu = 4 rescales the classical speed to 4
    med4 = composed_medium(constant_profile(4.0), affine_phase(1.0), 500.0)
    res = run(med4, Grid(500.0, 5000), SolverConfig(dt=0.05), t_end=100.0)
    from kppspread import estimate_spreading_speeds
    lo, hi = estimate_spreading_speeds(res.trace, 0.3, 10.0)
    assert abs(lo - 4.0) <= 0.12 and abs(hi - 4.0) <= 0.12


def test_windowed_speeds_within_a_priori_bounds():
    # after the transient, windowed speeds stay within the homogeneous
    # comparison bounds (window wide enough to average local plateaus)
    from kppspread import estimate_spreading_speeds
    med = composed_medium(cosine_profile(2.0, 1.0), power_phase(0.5), 300.0)
    res = run(med, Grid(300.0, 1500), SolverConfig(dt=0.05), t_end=90.0)
    lo, hi = estimate_spreading_speeds(res.trace, 0.3, 40.0)
    assert lo >= 2.0 * math.sqrt(1.0) - 0.15
    assert hi <= 2.0 * math.sqrt(3.0) + 0.15


def test_run_early_stop_flag():
    med = composed_medium(constant_profile(1.0), affine_phase(1.0), 80.0)
    grid = Grid(80.0, 400)
    res = run(med, grid, SolverConfig(dt=0.05), t_end=80.0)
    assert res.early_stopped
    assert res.trace.positions[-1] >= 80.0 - 20.0 - 1.0


def test_run_stop_margin_validation():
    med = composed_medium(constant_profile(1.0), affine_phase(1.0), 100.0)
    with pytest.raises(ParameterError):
        run(med, GRID, SolverConfig(dt=0.05, stop_margin=5.0), t_end=5.0)


def test_snapshot_csv(tmp_path):
    fld = Field(GRID, default_initial(GRID), t=2.5)
    path = tmp_path / "snap.csv"
    write_snapshot(fld, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,2.5"
    assert lines[1] == "x,u"
    assert len(lines) == GRID.n_cells + 3
    x0, u0 = lines[2].split(",")
    assert float(x0) == 0.0 and float(u0) == 1.0


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------

def test_subsolution_passes_small_kappa():
    rep = verify_subsolution(1.0, 1.8, 5.0, 1e-3)
    assert rep.passed
    assert rep.worst_residual <= 1e-10
    assert rep.details["margin"] == pytest.approx(1.0 - 0.81 - (math.pi / 10) ** 2,
                                                  abs=1e-12)
    assert 0.0 < rep.details["kappa_star"] < 1.0


def test_subsolution_fails_large_kappa():
    rep = verify_subsolution(1.0, 1.8, 5.0, 1.0)
    assert not rep.passed
    assert rep.details["n_positive"] > 0


def test_subsolution_parameter_errors():
    with pytest.raises(ParameterError):
        verify_subsolution(1.0, 1.8, 3.5, 1e-3)      # below minimal radius
    with pytest.raises(ParameterError):
        verify_subsolution(1.0, 2.0, 5.0, 1e-3)      # c >= 2 sqrt(mu-)


def test_supersolution_exp_identity():
    rep = verify_supersolution_exp(4.0, 1.0)
    assert rep.passed
    assert rep.worst_residual >= -1e-12
    assert rep.details["slope"] == pytest.approx(4.0, abs=1e-8)
    assert abs(rep.details["intercept"]) <= 1e-8
    rep2 = verify_supersolution_exp(2.25, 0.3)
    assert rep2.details["slope"] == pytest.approx(2.25, abs=1e-8)


def test_supersolution_ubar_composed():
    w_inf, k_star = w_infinity(cosine_profile(2.0, 1.0))
    rep = verify_supersolution_ubar(cosine_profile(2.0, 1.0), power_phase(0.5),
                                    k_star, 1.1 * w_inf, 0.0, 2e4)
    assert rep.passed
    assert rep.worst_residual >= -1e-8
    assert rep.details["n_checked"] > 100


def test_supersolution_ubar_needs_slack():
    w_inf, k_star = w_infinity(cosine_profile(2.0, 1.0))
    with pytest.raises(ParameterError):
        verify_supersolution_ubar(cosine_profile(2.0, 1.0), power_phase(0.5),
                                  k_star, 0.9 * w_inf, 0.0, 2e4)


def test_supersolution_ubar_homogeneous_reduction():
    rep = verify_supersolution_ubar(constant_profile(1.0), affine_phase(1.0),
                                    2.0, 2.2, 10.0, 500.0)
    assert rep.passed
    assert rep.worst_residual >= -1e-12
