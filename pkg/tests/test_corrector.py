import math

import numpy as np
import pytest

from kppspread import (ApproxEigenfunction, DegenerateProfileError,
                       ParameterError, affine_phase, build_corrector,
                       constant_profile, cosine_profile, eigen_residual_profile,
                       hj_residual, log_growth_check, log_power_phase,
                       power_phase, two_value_profile, x_over_log_phase)
from kppspread.theory import j_at_max, sqrt_cumulative, sqrt_partial

TV = two_value_profile(4.0, 1.0, 0.5)
COS = cosine_profile(2.0, 1.0)


def test_constant_profile_degenerate():
    with pytest.raises(DegenerateProfileError):
        build_corrector(constant_profile(1.0), 1.0)


def test_two_value_kink_closed_form():
    # F(Y) = sqrt(3) (3/2 - 2Y) on [1/2, 1]: root at 3/4
    cor = build_corrector(TV, 0.0)
    assert cor.kink == pytest.approx(0.75, abs=1e-10)
    assert cor.H_p == 4.0


def test_two_value_residual_exact():
    cor = build_corrector(TV, 0.0)
    assert hj_residual(cor) <= 1e-10


def test_explicit_branch_periodicity_identity():
    # for p >= j(M): v(1) - v(0) = p - j(H(p)) = 0
    jM = j_at_max(COS)
    for p in [jM, jM + 0.5, 2.7]:
        cor = build_corrector(COS, p)
        assert cor.kink is None
        assert abs(cor.periodicity_defect()) <= 1e-9


def test_periodicity_random_p_both_branches():
    rng = np.random.default_rng(4)
    for prof in [TV, COS]:
        jM = j_at_max(prof)
        for _ in range(12):
            p = rng.uniform(-3.0 * jM, 3.0 * jM)
            cor = build_corrector(prof, p)
            assert abs(cor.periodicity_defect()) <= 1e-9


def test_hj_residual_bound_random_p():
    rng = np.random.default_rng(9)
    for prof in [TV, COS]:
        jM = j_at_max(prof)
        for _ in range(8):
            p = rng.uniform(-3.0 * jM, 3.0 * jM)
            assert hj_residual(build_corrector(prof, p)) <= 1e-8


def test_residual_symmetric_under_p_reflection():
    jM = j_at_max(COS)
    for p in [0.4, jM + 1.0]:
        r_pos = hj_residual(build_corrector(COS, p))
        r_neg = hj_residual(build_corrector(COS, -p))
        assert r_pos == pytest.approx(r_neg, abs=1e-12)


def test_hj_residual_sample_precondition():
    with pytest.raises(ParameterError):
        hj_residual(build_corrector(COS, 2.0), samples=50)


def test_homogeneous_limit_tiny_amplitude():
    # nearly constant profile: the corrector collapses to ~0
    tiny = cosine_profile(2.0, 1e-8)
    cor = build_corrector(tiny, 1.0)
    ys = np.linspace(0.0, 1.0, 1001)
    assert float(np.max(np.abs(cor.value(ys)))) <= 1e-4


def test_F_monotone_decreasing():
    # F(Y) = p + j(M) - 2 C(Y) with C the sqrt cumulative: nonincreasing
    nodes, cum = sqrt_cumulative(COS, COS.max_val)
    rng = np.random.default_rng(12)
    for _ in range(30):
        y1, y2 = sorted(rng.uniform(0.0, 1.0, 2))
        c1 = cum[np.searchsorted(nodes, y1) - 1]
        c2 = cum[np.searchsorted(nodes, y2) - 1]
        assert c1 <= c2 + 1e-15


def test_kink_one_sided_derivatives():
    # left/right slopes at the kink are p -+ sqrt(M - mu0(X))
    cor = build_corrector(COS, 0.3)
    X = cor.kink
    s = math.sqrt(cor.H_p - COS.evaluate(X))
    assert cor.derivative(X, side=-1) == pytest.approx(0.3 - s, abs=1e-12)
    assert cor.derivative(X + 1e-15, side=1) == pytest.approx(0.3 + s, abs=1e-9)


def test_sqrt_partial_matches_cumulative():
    nodes, cum = sqrt_cumulative(COS, 5.0)
    for y in [0.1234, 0.5, 0.987]:
        i = np.searchsorted(nodes, y) - 1
        val = cum[i] + float(sqrt_partial(COS, 5.0, nodes[i], y))
        # straight adaptive integral from 0 to y
        whole = float(sqrt_partial(COS, 5.0, 0.0, y))   # GL5 over a long span
        assert val == pytest.approx(whole, abs=5e-4)    # GL5 tail is only short-span accurate


# ---------------------------------------------------------------------------
# approximate eigenfunctions
# ---------------------------------------------------------------------------

def test_eigen_residual_affine_formula_collapse():
    # affine phase: phi'' = phi''' = 0, so r(x) = v''(x/L) / L exactly
    cor = build_corrector(COS, j_at_max(COS) + 1.0)
    L = 40.0
    aef = ApproxEigenfunction(cor, affine_phase(L))
    xs = np.array([37.0, 53.0, 71.0])
    prof = eigen_residual_profile(aef, xs)
    direct = cor.second_derivative(xs / L) / L
    assert np.allclose(np.asarray(prof.r), direct, atol=1e-12)


def test_eigen_residual_affine_decays_with_L():
    cor = build_corrector(COS, j_at_max(COS) + 1.0)
    x = np.array([133.7])
    vals = []
    for L in [5.0, 20.0, 80.0]:
        prof = eigen_residual_profile(ApproxEigenfunction(cor, affine_phase(L)), x)
        vals.append(abs(prof.r[0]))
    assert vals[0] > vals[1] > vals[2]


@pytest.mark.parametrize("phase", [power_phase(0.5), x_over_log_phase(1.0),
                                   log_power_phase(2.0, 1.0)])
def test_eigen_residual_decay_unique_regime_phases(phase):
    cor = build_corrector(COS, 7.0)
    aef = ApproxEigenfunction(cor, phase)
    lo = max(100.0, 2.0 * phase.x_left)
    prof = eigen_residual_profile(aef, np.array([lo, 100.0 * lo]))
    r = np.abs(np.asarray(prof.r))
    assert not any(prof.skipped)
    assert r[1] < r[0]


def test_eigen_residual_homogeneous_limit():
    tiny = cosine_profile(2.0, 1e-8)
    cor = build_corrector(tiny, 1.0)
    aef = ApproxEigenfunction(cor, power_phase(0.5))
    prof = eigen_residual_profile(aef, np.geomspace(10.0, 1e4, 9))
    r = np.asarray(prof.r)
    assert np.nanmax(np.abs(r)) <= 1e-6


def test_eigen_residual_probe_validation():
    cor = build_corrector(COS, 2.0)
    aef = ApproxEigenfunction(cor, log_power_phase(0.5, 1.0))
    with pytest.raises(ParameterError):
        eigen_residual_profile(aef, np.array([1.0, 10.0]))   # below x_left = e


def test_log_growth_power_envelope():
    # |log phi_p(x) / x| <= ||v|| / (phi'(x) x) ~ const / sqrt(x): batches two
    # decades apart must drop by well over the sampling scatter
    cor = build_corrector(COS, j_at_max(COS) + 1.0)
    aef = ApproxEigenfunction(cor, power_phase(0.5))
    near = np.max(np.abs(aef.log_growth(np.linspace(1e2, 2e2, 64))))
    far = np.max(np.abs(aef.log_growth(np.linspace(1e4, 2e4, 64))))
    assert far < near / 5.0


def test_log_growth_affine_identity():
    cor = build_corrector(COS, j_at_max(COS) + 1.0)
    L = 12.0
    aef = ApproxEigenfunction(cor, affine_phase(L))
    x = np.array([97.0, 554.0])
    expected = cor.value(x / L) * L / x
    assert np.allclose(aef.log_growth(x), expected, atol=1e-14)
    v_sup = float(np.max(np.abs(cor.value(np.linspace(0, 1, 2001)))))
    assert np.all(np.abs(aef.log_growth(x)) <= v_sup * L / x + 1e-12)


def test_log_growth_check_flag():
    cor = build_corrector(COS, j_at_max(COS) + 1.0)
    aef = ApproxEigenfunction(cor, power_phase(0.5))
    x, vals, decayed = log_growth_check(aef, np.linspace(150.0, 17000.0, 12))
    assert x.size == 12
    assert decayed
    with pytest.raises(ParameterError):
        log_growth_check(aef, np.array([10.0, 5.0]))
