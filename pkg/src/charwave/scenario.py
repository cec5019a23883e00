"""
Scenario files: a JSON document describing geometry, data, feedback and
control, validated with pydantic and turned into a runnable system.

Minimal example::

    {
      "curves": {"alpha": "constant(0)", "beta": "constant(1)"},
      "initial": {"y0": "sine(1)", "y1": "const(0)"},
      "horizon": 10
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .catalog import CatalogFn, parse_expr, tabulated
from .control import TargetState
from .curves import CurvePair, parse_curve
from .errors import ValidationFailure
from .feedback import FeedbackSpec
from .riemann import InitialData, System, build_system
from .stability import design_feedback

__all__ = ["ScenarioModel", "Scenario", "parse_scenario", "scenario_from_dict"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TableSpec(_Strict):
    x: list[float]
    y: list[float]


class TabulatedFn(_Strict):
    tabulated: TableSpec


class CurveTable(_Strict):
    t: list[float]
    x: list[float]


class TabulatedCurve(_Strict):
    tabulated: CurveTable


FnSpec = Union[str, float, TabulatedFn]
CurveSpec = Union[str, float, TabulatedCurve]


class CurvesSection(_Strict):
    alpha: CurveSpec
    beta: CurveSpec


class InitialSection(_Strict):
    y0: FnSpec
    y1: FnSpec = "const(0)"


class FeedbackSection(_Strict):
    mode: Literal["none", "constant", "expression", "reflection", "designed"] = "none"
    f: Union[float, str, None] = None
    F: Union[str, None] = None
    rate: Union[str, None] = None

    @model_validator(mode="after")
    def _fields_for_mode(self):
        need = {"constant": "f", "expression": "f", "reflection": "F", "designed": "rate"}.get(self.mode)
        if need and getattr(self, need) is None:
            raise ValueError(f"feedback mode {self.mode!r} needs field {need!r}")
        if self.mode == "constant" and not isinstance(self.f, (int, float)):
            raise ValueError("feedback mode 'constant' needs a numeric f")
        return self


class ControlSection(_Strict):
    mode: Literal["none", "null", "target"] = "none"
    h: FnSpec = "const(0)"
    k: FnSpec = "const(0)"


class Tolerances(_Strict):
    inversion: float = Field(1e-12, gt=0)
    quadrature: float = Field(1e-10, gt=0)
    region_snap: float = Field(1e-12, ge=0)


class GridSection(_Strict):
    n_x: int = Field(512, ge=16)
    n_t: int = Field(11, ge=1)


class ScenarioModel(_Strict):
    curves: CurvesSection
    initial: InitialSection
    feedback: FeedbackSection = FeedbackSection()
    control: ControlSection = ControlSection()
    horizon: float = Field(gt=0)
    tolerances: Tolerances = Tolerances()
    grid: GridSection = GridSection()

    @field_validator("horizon")
    @classmethod
    def _finite(cls, v: float) -> float:
        if v != v or v == float("inf"):
            raise ValueError("horizon must be finite")
        return v

    @model_validator(mode="after")
    def _one_system(self):
        if self.control.mode != "none" and self.feedback.mode != "none":
            raise ValueError("a scenario is either controlled or fed back, not both")
        return self


def _fn(spec: Any) -> CatalogFn:
    if isinstance(spec, TabulatedFn):
        return tabulated(spec.tabulated.x, spec.tabulated.y)
    if isinstance(spec, (int, float)):
        return parse_expr(f"const({float(spec)!r})")
    return parse_expr(spec)


def _curve(spec: Any):
    if isinstance(spec, TabulatedCurve):
        return parse_curve({"tabulated": {"t": spec.tabulated.t, "x": spec.tabulated.x}})
    return parse_curve(spec)


@dataclass(frozen=True)
class Scenario:
    """A validated scenario with its runnable system."""

    model: ScenarioModel
    pair: CurvePair
    system: System
    target: TargetState | None
    source: str = "<memory>"

    @property
    def control_mode(self) -> str:
        return self.model.control.mode

    @property
    def rate(self) -> CatalogFn | None:
        fb = self.model.feedback
        return parse_expr(fb.rate) if fb.mode == "designed" else None


def _feedback(section: FeedbackSection) -> FeedbackSpec:
    if section.mode == "none" or section.mode == "designed":
        return FeedbackSpec.none()
    if section.mode == "constant":
        return FeedbackSpec.constant(float(section.f))
    if section.mode == "expression":
        f = section.f
        return FeedbackSpec.from_f(parse_expr(f) if isinstance(f, str) else parse_expr(f"const({f!r})"))
    return FeedbackSpec.from_reflection(parse_expr(section.F))


def _format_errors(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def scenario_from_dict(data: dict, source: str = "<memory>") -> Scenario:
    """Validate a decoded scenario document and build its system."""
    try:
        model = ScenarioModel.model_validate(data)
    except ValidationError as exc:
        raise ValidationFailure(f"{source}: {_format_errors(exc)}") from exc
    pair = CurvePair(_curve(model.curves.alpha), _curve(model.curves.beta), float(model.horizon))
    if not pair.report.ok:
        raise ValidationFailure(f"{source}: curve validation failed: {pair.report.summary()}", pair.report)
    initial = InitialData(_fn(model.initial.y0), _fn(model.initial.y1))
    tol = model.tolerances
    system = build_system(pair, initial, _feedback(model.feedback), tol=tol.inversion, snap=tol.region_snap)
    if model.feedback.mode == "designed":
        system = system.with_feedback(design_feedback(system, parse_expr(model.feedback.rate)))
    target = None
    if model.control.mode == "target":
        target = TargetState(_fn(model.control.h), _fn(model.control.k))
    return Scenario(model, pair, system, target, source)


def parse_scenario(path: str | Path) -> Scenario:
    """Read, validate and build a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationFailure(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data, str(path))
