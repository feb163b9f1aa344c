import math

import numpy as np
import pytest

from bootperc.scaling import ScalingPoint, compare_models, exp_iter, lambda_, log_iter, scaling_fit


def test_lambda_examples():
    assert lambda_(0.1, 1, 1, 1) == pytest.approx(10)
    assert lambda_(math.exp(-1), 1, 1, 2) == pytest.approx(math.e)
    with pytest.raises(ValueError):
        lambda_(1.0, 1, 1, 1)
    with pytest.raises(ValueError):
        lambda_(0.5, 0, 1, 1)


def test_iterated_exp_log():
    assert exp_iter(2, 1) == pytest.approx(math.e**math.e)
    assert exp_iter(2, 1) == pytest.approx(15.154, abs=1e-3)
    assert log_iter(2, math.e**math.e) == pytest.approx(1)
    assert exp_iter(0, 3.5) == 3.5
    assert exp_iter(4, 5) == math.inf
    with pytest.raises(ValueError):
        log_iter(3, 2.0)


def test_pure_power_exact():
    ps = [0.05, 0.08, 0.1, 0.2]
    pts = [ScalingPoint(p, 2, 1.0, log_lc=7 * p**-2) for p in ps]
    fit = scaling_fit(pts, "pure_power")
    assert fit.exponent == pytest.approx(2.0, abs=1e-6)
    assert fit.rss == pytest.approx(0, abs=1e-9)


def test_power_log2_exact():
    ps = [0.05, 0.08, 0.1, 0.2]
    pts = [ScalingPoint(p, 2, lambda_(p, 1, 1, 2), log_lc=3 * lambda_(p, 1, 1, 2)) for p in ps]
    fit = scaling_fit(pts, "power_log2")
    assert fit.spread == pytest.approx(1.0, abs=1e-6)
    assert fit.coef == pytest.approx(3)
    np.testing.assert_allclose(fit.predict_log_lc(ps, [pt.lam for pt in pts]), [pt.log_length for pt in pts])


def test_compare_models_prefers_generator():
    ps = [0.05, 0.08, 0.1, 0.15, 0.2]
    pts = [ScalingPoint(p, 2, lambda_(p, 1, 1, 2), log_lc=0.5 * lambda_(p, 1, 1, 2)) for p in ps]
    best, fits = compare_models(pts)
    assert best == "power_log2"
    assert set(fits) == {"pure_power", "power_log2"}


def test_fit_rejects_degenerate():
    pts = [ScalingPoint(0.1, 5, 10), ScalingPoint(0.2, 4, 5)]
    with pytest.raises(ValueError):
        scaling_fit(pts, "pure_power")
    pts = [ScalingPoint(0.1, 5, 10)] * 3
    with pytest.raises(ValueError):
        scaling_fit(pts, "pure_power")
    with pytest.raises(ValueError):
        scaling_fit([ScalingPoint(p, 1, 1) for p in (0.1, 0.2, 0.3)], "pure_power")
    with pytest.raises(ValueError):
        scaling_fit([ScalingPoint(p, 3, 1) for p in (0.1, 0.2, 0.3)], "linear")


def test_point_validation():
    with pytest.raises(ValueError):
        ScalingPoint(0.1, 0, 1)
    with pytest.raises(ValueError):
        ScalingPoint(0.1, 3, -1)


def test_as_record_keys():
    pts = [ScalingPoint(p, 10 / p, 1 / p) for p in (0.1, 0.2, 0.3)]
    assert {"model", "n", "rss", "exponent", "intercept"} <= set(scaling_fit(pts, "pure_power").as_record())
    assert {"coef", "spread", "ratio_min", "ratio_max"} <= set(scaling_fit(pts, "power_log2").as_record())
