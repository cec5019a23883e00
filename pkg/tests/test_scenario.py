import json

import pytest

from charwave.errors import FeedbackSingularity, ValidationFailure
from charwave.scenario import parse_scenario, scenario_from_dict

MINIMAL = {
    "curves": {"alpha": "constant(0)", "beta": "constant(1)"},
    "initial": {"y0": "sine(1)", "y1": "const(0)"},
    "horizon": 10,
}


def with_(**changes):
    data = json.loads(json.dumps(MINIMAL))
    data.update(changes)
    return data


def test_minimal_defaults():
    sc = scenario_from_dict(MINIMAL)
    tol = sc.model.tolerances
    assert (tol.inversion, tol.quadrature, tol.region_snap) == (1e-12, 1e-10, 1e-12)
    assert sc.model.grid.n_x == 512
    assert sc.control_mode == "none" and sc.system.feedback.is_conservative


def test_steep_beta_is_rejected_with_report():
    data = with_(curves={"alpha": "constant(0)", "beta": "affine(1.2, 1)"})
    with pytest.raises(ValidationFailure) as err:
        scenario_from_dict(data)
    assert "1.2" in str(err.value) and err.value.report is not None
    assert not err.value.report.checks["derivative_bound"]


def test_singular_constant_feedback():
    with pytest.raises(FeedbackSingularity):
        scenario_from_dict(with_(feedback={"mode": "constant", "f": -1}))


@pytest.mark.parametrize(
    "changes,fragment",
    [
        ({"horizon": -1}, "horizon"),
        ({"grid": {"n_x": 8}}, "grid.n_x"),
        ({"feedback": {"mode": "designed"}}, "rate"),
        ({"feedback": {"mode": "constant", "f": 2}, "control": {"mode": "null"}}, "both"),
        ({"colour": "blue"}, "colour"),
        ({"initial": {"y0": "sine(x)"}}, "numeric"),
    ],
)
def test_field_diagnostics(changes, fragment):
    with pytest.raises(ValidationFailure) as err:
        scenario_from_dict(with_(**changes))
    assert fragment in str(err.value)


def test_parse_errors_carry_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "curves": {\n    "alpha": "constant(0)",,\n  }\n}\n')
    with pytest.raises(ValidationFailure) as err:
        parse_scenario(bad)
    assert ":3:" in str(err.value)
    with pytest.raises(ValidationFailure):
        parse_scenario(tmp_path / "missing.json")


def test_all_modes_build(scenario_dir):
    for path in sorted(scenario_dir.glob("*.json")):
        if path.name.startswith("invalid"):
            with pytest.raises((ValidationFailure, FeedbackSingularity)):
                parse_scenario(path)
        else:
            assert parse_scenario(path).system is not None


def test_designed_mode_installs_feedback():
    sc = scenario_from_dict(with_(feedback={"mode": "designed", "rate": "tanh_rate(0.5)"}, horizon=50))
    assert sc.system.feedback.label == "designed(tanh_rate(0.5))"
    assert sc.rate.spec == "tanh_rate(0.5)"
