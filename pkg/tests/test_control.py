import numpy as np
import pytest

from charwave.catalog import Const, Poly, Sine
from charwave.control import (
    TargetState,
    controlled,
    null_control_u,
    null_control_v,
    target_control_v,
    verify_null,
    verify_target,
)
from charwave.curves import BoundaryFn as B
from charwave.curves import CurvePair
from charwave.errors import PreconditionError
from charwave.feedback import FeedbackSpec
from charwave.oracle import trace
from charwave.riemann import InitialData
from conftest import cylinder, sine_data, system

ZERO = InitialData(Const(0), Const(0))
UNIT_VELOCITY = InitialData(Const(0), Const(1))

GEOMETRIES = {
    "cylinder": CurvePair(B.constant(0), B.constant(1), 4),
    "affine": CurvePair(B.affine(0.2, 0), B.affine(0.1, 1), 4),
    "wobble+": CurvePair(B.sinusoidal(0.3, 1, 0), B.constant(1), 4),
    "wobble-": CurvePair(B.sinusoidal(-0.3, 1, 0), B.constant(1), 4),
}


def test_null_control_v_cylinder_sine():
    v = null_control_v(system(cylinder(), sine_data()))
    assert v.breakpoints == (0.0, 1.0, 2.0)
    t = np.linspace(0, 1.999, 400)
    assert np.max(np.abs(v(t) - np.pi * np.cos(np.pi * t))) < 1e-12
    # second piece: -p~(2 - t) = pi cos(pi (2 - t))
    t2 = t[t >= 1]
    assert np.max(np.abs(v(t2) - np.pi * np.cos(np.pi * (2 - t2)))) < 1e-12
    assert np.all(v(np.array([2.0, 3.0])) == 0.0)


def test_null_control_trivial_cases():
    assert np.all(null_control_v(system(GEOMETRIES["wobble+"], ZERO))(np.linspace(0, 4, 50)) == 0)
    v = null_control_v(system(cylinder(), UNIT_VELOCITY))
    assert np.all(v(np.linspace(0, 0.99, 20)) == 1.0)
    assert np.all(v(np.linspace(1.0, 1.99, 20)) == -1.0)


def test_null_control_u():
    u = null_control_u(system(cylinder(), UNIT_VELOCITY))
    t = np.array([0.0, 0.25, 0.9, 1.0, 1.5, 1.99])
    assert np.allclose(u(t), np.where(t < 1, t, 2 - t), atol=1e-10)
    # u' = v forces sin(pi t) on both pieces for sine data
    u = null_control_u(system(cylinder(), sine_data()))
    t = np.linspace(0, 1.99, 41)
    assert np.allclose(u(t), np.sin(np.pi * t), atol=1e-9)
    assert np.all(null_control_u(system(cylinder(), ZERO))(t) == 0.0)


@pytest.mark.parametrize("name", list(GEOMETRIES))
def test_u_derivative_is_v(name):
    sys_ = system(GEOMETRIES[name], InitialData(Sine(1.0), Poly((0.0, 1.0))))
    u, v = null_control_u(sys_), null_control_v(sys_)
    bps = np.asarray(v.breakpoints)
    t = np.linspace(0.01, bps[-1] - 0.01, 60)
    t = t[np.min(np.abs(t[:, None] - bps[None, :]), axis=1) > 1e-3]
    h = 1e-5
    assert np.max(np.abs((u(t + h) - u(t - h)) / (2 * h) - v(t))) < 1e-6


@pytest.mark.parametrize("name", list(GEOMETRIES))
def test_null_control_reaches_rest(name):
    sys_ = system(GEOMETRIES[name], InitialData(Sine(1.0), Poly((0.0, 1.0))))
    chk = verify_null(sys_, null_control_v(sys_), 512)
    assert chk.terminal_energy <= 1e-9 * chk.initial_energy
    assert chk.max_abs_yt < 1e-6


@pytest.mark.parametrize("eps", [0.05, 0.1])
def test_minimality(eps):
    sys_ = system(cylinder(), sine_data())
    v = null_control_v(sys_)
    assert verify_null(sys_, v, 1024, at=2.0 - eps).relative >= 1e-3


def test_truncated_control_leaves_energy():
    sys_ = system(cylinder(), sine_data())
    chk = verify_null(sys_, null_control_v(sys_).truncated(1.5))
    assert chk.relative > 0.01


def test_zero_data_zero_control():
    sys_ = system(cylinder(), ZERO)
    assert verify_null(sys_, null_control_v(sys_)).terminal_energy == 0.0


def test_target_zero_equals_null():
    sys_ = system(cylinder(), sine_data())
    a, b = null_control_v(sys_), target_control_v(sys_, TargetState())
    t = np.linspace(0, 2.5, 300)
    assert np.max(np.abs(a(t) - b(t))) < 1e-13


def test_target_velocity_from_rest():
    sys_ = system(cylinder(), ZERO)
    target = TargetState(Const(0), Const(1))
    v = target_control_v(sys_, target)
    assert np.all(v(np.linspace(0, 0.99, 20)) == -1.0)
    # simulation (and the ray oracle) demand +1 on [1, 2)
    assert np.all(v(np.linspace(1.0, 1.99, 20)) == 1.0)
    run = controlled(sys_, v)
    for x in (0.2, 0.5, 0.8):
        p = trace(run, 2.0, x, "p").value
        q = trace(run, 2.0, x, "q").value
        assert 0.5 * (p + q) == pytest.approx(1.0, abs=1e-12)
    assert verify_target(sys_, v, target) < 1e-12


@pytest.mark.parametrize(
    "name,case",
    [("cylinder", "case1"), ("affine", "case1"), ("wobble+", "case2"), ("wobble-", "case3")],
)
def test_target_cases(name, case):
    sys_ = system(GEOMETRIES[name], InitialData(Sine(1.0), Poly((0.0, 1.0))))
    for target in (TargetState(), TargetState(Const(0), Const(1)), TargetState(Sine(1.0, 0.3), Poly((0.0, 2.0)))):
        if abs(float(target.h(GEOMETRIES[name].beta.scalar(2.0)))) > 1e-10 and name != "cylinder":
            continue
        v = target_control_v(sys_, target)
        assert v.case == case
        assert len(v.pieces) == (2 if case == "case1" else 3)
        assert verify_target(sys_, v, target) < 1e-9


def test_affine_pairs_are_case_one():
    # T** equals T* for every affine pair; a three-piece layout needs curved boundaries
    sys_ = system(CurvePair(B.affine(0.2, 0), B.constant(1), 4), sine_data())
    assert target_control_v(sys_, TargetState()).case == "case1"


def test_preconditions():
    with pytest.raises(PreconditionError):
        null_control_v(system(cylinder(), sine_data(), FeedbackSpec.constant(0.5)))
    with pytest.raises(PreconditionError):
        target_control_v(system(cylinder(), sine_data()), TargetState(Const(1.0), Const(0.0)))
