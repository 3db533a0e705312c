import math

import numpy as np
import pytest

from kppspread import (ParameterError, constant_profile, cosine_profile,
                       two_value_profile)
from kppspread.eigen import (PeriodicOperator, operator_for,
                             principal_eigenvalue, w_L)
from kppspread.theory import w_infinity

COS = cosine_profile(2.0, 1.0)


def test_constant_medium_exact():
    # constant eigenvector kills the derivative terms: lambda = p^2 + m
    for m, p in [(1.0, 1.0), (0.25, 0.3), (4.0, 2.0)]:
        op = operator_for(constant_profile(m), 5.0, p)
        lam, vec = principal_eigenvalue(op)
        assert lam == pytest.approx(p * p + m, abs=1e-9)
        assert np.all(vec > 0)
        assert vec.max() == pytest.approx(1.0)


def test_p0_cosine_between_extrema():
    op = operator_for(COS, 10.0, 0.0)
    lam, vec = principal_eigenvalue(op)
    assert COS.min_val <= lam <= COS.max_val
    assert lam >= float(np.mean(op.mu)) - 1e-6
    assert np.all(vec > 0)


def test_second_order_self_convergence():
    L, p = 7.0, 1.3
    lams = []
    for n in [128, 256, 512]:
        x = np.arange(n) * (L / n)
        mu = np.asarray(COS.evaluate(x / L))
        lam, _ = principal_eigenvalue(PeriodicOperator(p, L, mu))
        lams.append(lam)
    ratio = abs(lams[0] - lams[1]) / abs(lams[1] - lams[2])
    assert 3.5 <= ratio <= 4.5


def test_grid_step_restriction():
    mu = np.full(32, 1.0)
    with pytest.raises(ParameterError):
        PeriodicOperator(10.0, 32.0, mu)       # h = 1, h(2p+1) = 21 > 1
    with pytest.raises(ParameterError):
        PeriodicOperator(0.5, 1.0, np.full(8, 1.0))   # too few points


def test_wL_constant_is_homogeneous_speed():
    for L in [5.0, 20.0, 80.0]:
        assert w_L(constant_profile(1.0), L) == pytest.approx(2.0, abs=1e-6)
    assert w_L(constant_profile(0.25), 10.0) == pytest.approx(1.0, abs=1e-6)


def test_wL_gap_decreases_cosine():
    w_inf, _ = w_infinity(COS)
    gaps = [abs(w_L(COS, L) - w_inf) for L in (5.0, 20.0)]
    assert gaps[0] > gaps[1]


def test_wL_gap_nonincreasing_two_value_smoothed():
    prof = two_value_profile(4.0, 1.0, 0.5)
    w_inf, _ = w_infinity(prof)
    gaps = [abs(w_L(prof, L) - w_inf) for L in (5.0, 20.0)]
    assert gaps[1] <= gaps[0] + 1e-9


def test_wL_above_mean_speed():
    # comparison with the averaged medium: w_L >= 2 sqrt(mean mu0)
    mean_speed = 2.0 * math.sqrt(2.0)
    for L in [5.0, 20.0]:
        assert w_L(COS, L) >= mean_speed - 1e-3


def test_wL_parameter_error():
    with pytest.raises(ParameterError):
        w_L(COS, -1.0)
