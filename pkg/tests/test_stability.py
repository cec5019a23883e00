import math

import numpy as np
import pytest

from charwave.catalog import Const, ExpRate, LogRate, Mobius, Poly, PowerRate, Sine
from charwave.curves import BoundaryFn as B
from charwave.curves import CurvePair
from charwave.errors import IncreasingConditionError, PreconditionError
from charwave.feedback import FeedbackSpec
from charwave.riemann import energy
from charwave.stability import analyze, design_feedback, growth_bound, psi_table
from conftest import cylinder, sine_data, system
from oracles import constant_feedback_omega, example1_sine_psi, polynomial_design_psi

SINE_FEEDBACK = FeedbackSpec.from_reflection(Sine(1.0, 0.5))


def test_example1_psi_values():
    rep = psi_table(system(cylinder(), sine_data(), SINE_FEEDBACK), N=40, n_tau=256)
    j = int(np.argmin(np.abs(rep.tau_grid - 0.5)))
    assert rep.tau_grid[j] == 0.5
    assert rep.psi[3, j] == pytest.approx(0.0625, rel=1e-12)
    off_zero = rep.tau_grid % 1.0 != 0.0  # sin(pi tau) vanishes at tau = 0 and 1
    ref = np.array([[abs(example1_sine_psi(t, n)) for t in rep.tau_grid[off_zero]] for n in range(rep.N + 1)])
    assert np.max(np.abs(rep.ln_psi[:, off_zero] - np.log(ref))) < 1e-9
    assert np.all(rep.psi[:, ~off_zero] == 0.0)


def test_sine_feedback_is_the_stated_law():
    """F = sin(pi t)/2 is the reflection of f = (2 - sin pi t)/(2 + sin pi t)."""
    t = np.linspace(0, 5, 101)
    f = (2 - np.sin(np.pi * t)) / (2 + np.sin(np.pi * t))
    assert np.allclose(SINE_FEEDBACK.feedback(t), f, atol=1e-14)


@pytest.mark.parametrize("f", [0.3, 2.0, -3.0])
def test_constant_psi_is_power(f):
    pair = CurvePair(B.affine(0.1, 0), B.affine(0.2, 1), 30)
    rep = psi_table(system(pair, sine_data(), FeedbackSpec.constant(f)), N=20, n_tau=16)
    c = abs((1 - f) / (1 + f))
    n = np.arange(rep.N + 1)[:, None]
    assert np.allclose(rep.psi, c ** (n + 1), rtol=1e-12)


def test_polynomial_design_closed_form():
    sys_ = system(cylinder(2000), sine_data())
    fb = design_feedback(sys_, PowerRate(1.0))
    rep = psi_table(sys_.with_feedback(fb), N=60, n_tau=64)
    assert rep.psi[5, 0] == pytest.approx(1 / 13, rel=1e-12)
    ref = np.array([[polynomial_design_psi(t, n, 1.0) for t in rep.tau_grid] for n in range(rep.N + 1)])
    assert np.max(np.abs(rep.psi / ref - 1)) < 1e-12


def test_designed_feedback_laws():
    sys_ = system(cylinder(50), sine_data())
    t = np.linspace(0, 40, 81)
    fb = design_feedback(sys_, ExpRate(0.7))
    assert np.allclose(fb.feedback(t), math.tanh(0.7), rtol=1e-12)
    fb = design_feedback(sys_, PowerRate(2.0))
    g = lambda u: (u + 1) ** -2.0
    assert np.allclose(fb.feedback(t), (g(t) - g(t + 2)) / (g(t) + g(t + 2)), rtol=1e-12)
    fb = design_feedback(sys_, Const(1.0))
    assert np.allclose(fb.feedback(t), 0.0, atol=1e-15)
    with pytest.raises(PreconditionError):
        design_feedback(sys_, Poly((-3.0, 1.0)))


def test_growth_bounds():
    _, v = analyze(system(cylinder(2000), sine_data(), SINE_FEEDBACK))
    assert v.kind == "exponential"
    assert v.omega == pytest.approx(math.log(2) / 2, rel=1e-6)
    _, v = analyze(system(cylinder(2000), sine_data(), FeedbackSpec.constant(3.0)))
    assert v.omega == pytest.approx(0.5 * math.log(2), abs=1e-6)
    _, v = analyze(system(cylinder(2000), sine_data()))
    assert v.kind == "no-decay" and v.omega == 0.0


@pytest.mark.parametrize("f", [2.0, 3.0, 5.0, 0.25])
def test_constant_feedback_omega(f):
    rep = psi_table(system(cylinder(2000), sine_data(), FeedbackSpec.constant(f)), N=200, n_tau=32)
    assert growth_bound(rep).omega == pytest.approx(constant_feedback_omega(f), rel=1e-6)


def test_finite_time():
    rep, v = analyze(system(cylinder(100), sine_data(), FeedbackSpec.constant(1.0)), N=20, n_tau=32)
    assert v.kind == "finite-time" and v.extinction_time == 2.0


@pytest.mark.parametrize("g", [ExpRate(0.5), PowerRate(1.0), PowerRate(2.0), LogRate(1.0)])
def test_design_round_trip(g):
    sys_ = system(cylinder(5000), sine_data())
    designed = sys_.with_feedback(design_feedback(sys_, g))
    _, v = analyze(designed, N=1000, n_tau=64, rate_candidates=[g])
    assert v.kind == "fits-rate" and v.rate == g.spec
    assert np.all(np.isfinite(v.constants[1:])) and np.all(v.constants[1:] > 0)


def test_polynomial_constant_is_tau_plus_one():
    sys_ = system(cylinder(5000), sine_data())
    designed = sys_.with_feedback(design_feedback(sys_, PowerRate(1.0)))
    rep, v = analyze(designed, N=1000, n_tau=64, rate_candidates=[PowerRate(1.0)])
    assert np.allclose(v.constants, rep.tau_grid + 1, rtol=1e-3)


def test_example2_is_not_exponential():
    pair = CurvePair(B.affine(0.1, 0), B.affine(0.5, 1), 1e6)
    rep, v = analyze(system(pair, sine_data(), FeedbackSpec.from_f(Mobius(0, 1, 2, 1))), N=1000, n_tau=64)
    assert v.kind == "decays" and v.omega == 0.0
    lp = rep.ln_psi_over_phi[-1]
    assert np.all(np.abs(lp) < 1e-3)


def test_exponential_energy_envelope():
    sys_ = system(cylinder(30), sine_data(), SINE_FEEDBACK)
    omega = math.log(2) / 2
    M = math.exp(2 * omega * 2.0)
    times = np.arange(0.0, 25.0, 1.0) + 0.5
    E = np.array([energy(sys_, t) for t in times])
    for i in range(len(times)):
        for j in range(i + 1, len(times)):
            assert E[j] / E[i] <= M * math.exp(-2 * omega * (times[j] - times[i])) * 1.5


def test_necessity_of_decay():
    sys_ = system(cylinder(110), sine_data(), FeedbackSpec.constant((1 - 0.99) / (1 + 0.99)))
    rep = psi_table(sys_, N=50, n_tau=32)
    assert rep.psi[50].min() > 0.5
    E0 = energy(sys_, 0.0)
    assert all(energy(sys_, t) > 0.1 * E0 for t in np.linspace(0, 100, 11))


def test_refusals():
    shrinking = CurvePair(B.constant(0), B.affine(-0.5, 1), 1.9)
    with pytest.raises(IncreasingConditionError):
        psi_table(system(shrinking, sine_data(), FeedbackSpec.constant(2.0)))
    with pytest.raises(ValueError):
        psi_table(system(cylinder(), sine_data()), N=4)


def test_report_rows_layout():
    rep, _ = analyze(system(cylinder(200), sine_data(), FeedbackSpec.constant(2.0)), N=60, n_tau=8)
    rows = list(rep.rows())
    assert len(rows) == 8 * 61
    assert rows[0][:2] == (0.0, 0) and rows[61][1] == 0
    assert rep.classification.startswith("exponential(")
