import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charwave.curves import BoundaryFn as B
from charwave.curves import CurvePair, MonotoneMap, eval_pm, parse_curve
from charwave.errors import DomainError, HorizonExceeded, RangeError, ValidationFailure
from oracles import bisect


def test_eval_pm_values():
    assert eval_pm(B.constant(0), 1, 1.5) == 1.5
    assert eval_pm(B.affine(0.5, 1), -1, 2.0) == 0.0
    assert math.isclose(eval_pm(B.constant(1), 1, 0.3), 1.3)
    with pytest.raises(ValueError):
        eval_pm(B.constant(0), 0, 1.0)


def test_tabulated_range_is_enforced():
    t = np.linspace(0, 2, 21)
    curve = B.tabulated(t, 0.1 * t)
    with pytest.raises(DomainError):
        eval_pm(curve, 1, 3.0)
    with pytest.raises(ValidationFailure):
        B.tabulated(t + 1, t)


def test_inverse_examples():
    assert MonotoneMap(B.constant(0), 1, 10).inverse_scalar(1.0) == 1.0
    m = MonotoneMap(B.affine(0.5, 1), -1, 10)
    assert math.isclose(m.inverse_scalar(0.0), 2.0, abs_tol=1e-12)
    assert math.isclose(m.inverse_scalar(0.0), bisect(lambda t: t - (0.5 * t + 1), 0.0, 0.0, 10.0), abs_tol=1e-12)
    assert math.isclose(MonotoneMap(B.constant(1), -1, 10).inverse_scalar(0.0), 1.0)


def test_inverse_range_and_horizon_errors():
    m = MonotoneMap(B.sinusoidal(0.3, 1.0, 1.0), -1, 5.0)
    with pytest.raises(RangeError):
        m.inverse_scalar(-5.0)
    with pytest.raises(HorizonExceeded):
        m.inverse_scalar(50.0)


CURVES = st.sampled_from(
    [
        B.constant(0.0),
        B.affine(0.4, 0.0),
        B.affine(-0.6, 1.0),
        B.sinusoidal(0.3, 1.7, 0.5),
        B.sinusoidal(-0.45, 2.0, 1.0),
        B.tabulated(np.linspace(0, 30, 301), 0.2 * np.sin(np.linspace(0, 30, 301))),
    ]
)


@settings(max_examples=200, deadline=None)
@given(CURVES, st.sampled_from([1, -1]), st.floats(0.0, 20.0))
def test_inverse_round_trip_against_bisection(curve, sign, t):
    m = MonotoneMap(curve, sign, 30.0)
    s = float(m.forward(t))
    back = m.inverse_scalar(s)
    assert abs(back - t) <= 1e-10
    ref = bisect(lambda u: u + sign * curve.scalar(max(u, 0.0)), s, 0.0, 30.0)
    assert abs(back - ref) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(CURVES, st.sampled_from([1, -1]), st.lists(st.floats(0.0, 20.0), min_size=2, max_size=20))
def test_inverse_preserves_order(curve, sign, ts):
    m = MonotoneMap(curve, sign, 30.0)
    s = np.sort(np.asarray(m.forward(np.asarray(ts))))
    inv = m.inverse(s)
    assert np.all(np.diff(inv) >= -1e-12)


def test_validation_examples():
    ok = CurvePair(B.constant(0), B.sinusoidal(0.5, 1.0, 1.0), 10).report
    assert ok.ok and math.isclose(ok.derivative_bound, 0.5)
    steep = CurvePair(B.constant(0), B.tabulated(np.linspace(0, 10, 201), 1 + np.linspace(0, 10, 201) ** 2), 10)
    assert not steep.report.ok and steep.report.derivative_bound > 1
    crossing = CurvePair(B.affine(0.9, 0), B.affine(0.1, 1), 20).report
    assert not crossing.ok
    assert not crossing.checks["no_intersection"]
    assert math.isclose(crossing.intersection_time, 1.25, abs_tol=1e-9)


def test_validation_flags_start_and_slope():
    rep = CurvePair(B.constant(0.5), B.affine(1.2, 1), 5).report
    assert not rep.ok
    assert not rep.checks["alpha_at_0"]
    assert not rep.checks["derivative_bound"]
    assert any("1.2" in m for m in rep.messages)
    with pytest.raises(ValidationFailure):
        CurvePair(B.constant(0), B.affine(1.2, 1), 5).require_valid()


def test_parse_curve_forms():
    assert parse_curve("constant(1)") == B.constant(1)
    assert parse_curve(0) == B.constant(0)
    assert parse_curve("affine(0.5, 1)") == B.affine(0.5, 1)
    tab = parse_curve({"tabulated": {"t": [0, 1, 2], "x": [0, 0.1, 0.2]}})
    assert tab.family == "tabulated"
    for bad in ["spline(1)", "affine(a, b)", "affine(1)", {"tabulated": {"t": [0]}}]:
        with pytest.raises(ValidationFailure):
            parse_curve(bad)
