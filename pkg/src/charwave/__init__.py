"""Characteristic-method engine for the 1D wave equation between two moving endpoints."""

from .catalog import parse_expr
from .control import (
    ControlSignal,
    TargetState,
    null_control_u,
    null_control_v,
    target_control_v,
    verify_null,
    verify_target,
)
from .curves import BoundaryFn, CurvePair, parse_curve, validate
from .errors import (
    CharwaveError,
    DomainError,
    FeedbackSingularity,
    HorizonExceeded,
    NonConvergence,
    PreconditionError,
    RangeError,
    ValidationFailure,
)
from .feedback import FeedbackSpec
from .maps import ReflectionMaps, classify, min_control_time, phi_iterate, secondary_time
from .oracle import trace
from .riemann import InitialData, build_system, energy, eval_pq, reconstruct
from .scenario import parse_scenario, scenario_from_dict
from .stability import analyze, classify_decay, design_feedback, growth_bound, psi_table

__all__ = [
    "BoundaryFn", "CurvePair", "parse_curve", "validate", "parse_expr",
    "ReflectionMaps", "classify", "min_control_time", "secondary_time", "phi_iterate",
    "InitialData", "FeedbackSpec", "build_system", "eval_pq", "reconstruct", "energy",
    "ControlSignal", "TargetState", "null_control_v", "null_control_u", "target_control_v",
    "verify_null", "verify_target", "trace",
    "psi_table", "growth_bound", "classify_decay", "design_feedback", "analyze",
    "parse_scenario", "scenario_from_dict",
    "CharwaveError", "DomainError", "RangeError", "HorizonExceeded", "NonConvergence",
    "FeedbackSingularity", "ValidationFailure", "PreconditionError",
]
