import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from charwave.catalog import Const, Poly, Sine
from charwave.curves import BoundaryFn, CurvePair
from charwave.riemann import InitialData, build_system

B = BoundaryFn
SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


def cylinder(horizon: float = 10.0) -> CurvePair:
    return CurvePair(B.constant(0.0), B.constant(1.0), horizon)


def sine_data() -> InitialData:
    return InitialData(Sine(1.0), Const(0.0))


def system(pair=None, initial=None, feedback=None, control=None, **kw):
    return build_system(pair or cylinder(), initial or sine_data(), feedback, control, **kw)


def random_points(pair: CurvePair, n: int, seed: int, t_lo: float = 0.0):
    rng = np.random.default_rng(seed)
    t = rng.uniform(t_lo, pair.horizon, n)
    a, b = pair.alpha.value(t), pair.beta.value(t)
    return t, a + rng.uniform(0.0, 1.0, n) * (b - a)


@pytest.fixture
def cyl():
    return cylinder()


@pytest.fixture
def scenario_dir():
    return SCENARIO_DIR


__all__ = ["B", "cylinder", "sine_data", "system", "random_points", "Const", "Poly", "Sine"]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS, key=lambda k: int(k[2:])):
            terminalreporter.write_line(RESULTS[key])
