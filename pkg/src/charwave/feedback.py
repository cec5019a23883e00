"""Boundary feedback laws y_t = f y_x at alpha and their reflection coefficient."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .catalog import CatalogFn, Const
from .errors import FeedbackSingularity

__all__ = ["FeedbackSpec"]

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class FeedbackSpec:
    """
    Feedback law and its reflection coefficient F = (1 - f) / (1 + f).

    A spec is built either from f (the physical law) or directly from F.
    Designed feedbacks supply F through a callable of the maps, in which
    case ``f`` is recovered as (1 - F) / (1 + F).
    """

    label: str
    f: CatalogFn | None = None
    reflection_fn: Callable | None = None

    @classmethod
    def none(cls) -> "FeedbackSpec":
        return cls("none", f=Const(0.0))

    @classmethod
    def constant(cls, value: float) -> "FeedbackSpec":
        spec = cls(f"constant({value!r})", f=Const(float(value)))
        spec.check_constant()
        return spec

    @classmethod
    def from_f(cls, fn: CatalogFn) -> "FeedbackSpec":
        return cls(f"expression({fn.spec})", f=fn)

    @classmethod
    def from_reflection(cls, fn: Callable, label: str | None = None) -> "FeedbackSpec":
        return cls(label or f"reflection({getattr(fn, 'spec', 'F')})", reflection_fn=fn)

    def check_constant(self) -> None:
        c = self.f.constant_value if self.f is not None else None
        if c is not None and abs(1.0 + c) <= SINGULAR_TOL:
            raise FeedbackSingularity(f"feedback f = {c} makes 1 + f vanish")

    @property
    def constant_reflection(self) -> float | None:
        if self.f is not None:
            c = self.f.constant_value
            return None if c is None else (1.0 - c) / (1.0 + c)
        c = getattr(self.reflection_fn, "constant_value", None)
        return None if c is None else float(c)

    @property
    def is_absorbing(self) -> bool:
        """F identically 0, i.e. f identically 1."""
        return self.constant_reflection == 0.0

    @property
    def is_conservative(self) -> bool:
        """F identically 1, i.e. f identically 0."""
        return self.constant_reflection == 1.0

    def feedback(self, t):
        if self.f is not None:
            return self.f(t)
        F = np.asarray(self.reflection_fn(t), dtype=float)
        return (1.0 - F) / (1.0 + F)

    def reflection(self, t):
        """F(t); raises FeedbackSingularity where 1 + f(t) = 0."""
        if self.f is None:
            return np.asarray(self.reflection_fn(t), dtype=float)
        if hasattr(self.f, "reflection_parts"):
            num, den = self.f.reflection_parts(t)
            scale = np.maximum(np.abs(num), 1.0)
            if np.any(np.abs(den) <= SINGULAR_TOL * scale):
                raise FeedbackSingularity("1 + f(t) = 0 at a needed reflection time")
            return num / den
        fv = np.asarray(self.f(t), dtype=float)
        den = 1.0 + fv
        if np.any(np.abs(den) <= SINGULAR_TOL * np.maximum(1.0, np.abs(fv))):
            raise FeedbackSingularity("1 + f(t) = 0 at a needed reflection time")
        return (1.0 - fv) / den

    def reflection_scalar(self, t: float) -> float:
        return float(self.reflection(np.float64(t)))

    def validate(self, horizon: float, n: int = 10_000) -> None:
        """Sample 1 + f on [0, horizon]; a sign change or near-zero is singular."""
        if self.f is None:
            return
        self.check_constant()
        t = np.linspace(0.0, horizon, n + 1)
        den = 1.0 + np.asarray(self.f(t), dtype=float)
        if np.any(~np.isfinite(den)):
            raise FeedbackSingularity("feedback is not finite on the horizon")
        if np.any(np.abs(den) <= SINGULAR_TOL) or np.any(np.sign(den[1:]) != np.sign(den[:-1])):
            k = int(np.argmin(np.abs(den)))
            raise FeedbackSingularity(f"1 + f(t) vanishes near t = {t[k]:.6g}")
