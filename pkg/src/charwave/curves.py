"""
Moving boundary curves alpha, beta and the monotone maps t -> t +/- z(t).

Curves come from a small catalog (constant, affine, sinusoidal, tabulated)
so that derivatives are known and the slope bound |z'| < 1 can be checked.
Constant and affine curves invert in closed form; everything else uses the
bracketed solver from :mod:`charwave.roots`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from .catalog import Tabulated
from .errors import DomainError, HorizonExceeded, RangeError, ValidationFailure
from .roots import bracketed_root, bracketed_root_array

__all__ = [
    "BoundaryFn",
    "CurvePair",
    "MonotoneMap",
    "ValidationReport",
    "eval_pm",
    "invert_monotone",
    "parse_curve",
    "validate",
]

FAMILIES = ("constant", "affine", "sinusoidal", "tabulated")
VALIDATION_TOL = 1e-12
N_SAMPLES = 10_000


@dataclass(frozen=True)
class BoundaryFn:
    """
    One boundary curve x = z(t).

    Parameters
    ----------
    family : str
        ``constant``, ``affine``, ``sinusoidal`` or ``tabulated``.
    params : tuple of float
        constant: (c,); affine: (slope, intercept);
        sinusoidal: (amplitude, frequency, offset) for offset + A sin(w t).
    table : Tabulated, optional
        Interpolant for the tabulated family.
    """

    family: str
    params: tuple[float, ...] = ()
    table: Tabulated | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationFailure(f"unknown curve family {self.family!r}")
        expected = {"constant": 1, "affine": 2, "sinusoidal": 3, "tabulated": 0}[self.family]
        if len(self.params) != expected:
            raise ValidationFailure(f"{self.family} curve takes {expected} parameters")
        if self.family == "tabulated" and self.table is None:
            raise ValidationFailure("tabulated curve needs samples")

    @classmethod
    def constant(cls, c: float) -> "BoundaryFn":
        return cls("constant", (float(c),))

    @classmethod
    def affine(cls, slope: float, intercept: float) -> "BoundaryFn":
        return cls("affine", (float(slope), float(intercept)))

    @classmethod
    def sinusoidal(cls, amplitude: float, frequency: float, offset: float) -> "BoundaryFn":
        return cls("sinusoidal", (float(amplitude), float(frequency), float(offset)))

    @classmethod
    def tabulated(cls, t, x) -> "BoundaryFn":
        table = Tabulated(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        if table.lo != 0.0:
            raise ValidationFailure("tabulated curve samples must start at t = 0")
        return cls("tabulated", (), table)

    @property
    def analytic(self) -> bool:
        """True for curves whose t +/- z(t) inverts in closed form."""
        return self.family in ("constant", "affine")

    @property
    def slope(self) -> float:
        return self.params[0] if self.family == "affine" else 0.0

    @property
    def intercept(self) -> float:
        return self.params[1] if self.family == "affine" else self.params[0]

    @property
    def t_max(self) -> float:
        return self.table.hi if self.family == "tabulated" else math.inf

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -VALIDATION_TOL):
            raise DomainError("curves are defined for t >= 0 only")
        return np.maximum(t, 0.0)

    def value(self, t):
        t = self._check(t)
        if self.family == "constant":
            return np.full_like(t, self.params[0])
        if self.family == "affine":
            return self.params[0] * t + self.params[1]
        if self.family == "sinusoidal":
            a, w, c = self.params
            return c + a * np.sin(w * t)
        return self.table(t)

    def derivative(self, t):
        t = self._check(t)
        if self.family == "constant":
            return np.zeros_like(t)
        if self.family == "affine":
            return np.full_like(t, self.params[0])
        if self.family == "sinusoidal":
            a, w, _ = self.params
            return a * w * np.cos(w * t)
        return self.table.derivative(t)

    def scalar(self, t: float) -> float:
        """Fast scalar evaluation used by the ray tracer."""
        if t < -VALIDATION_TOL:
            raise DomainError("curves are defined for t >= 0 only")
        if self.family == "constant":
            return self.params[0]
        if self.family == "affine":
            return self.params[0] * t + self.params[1]
        if self.family == "sinusoidal":
            a, w, c = self.params
            return c + a * math.sin(w * t)
        return float(self.table(max(t, 0.0)))

    def describe(self) -> str:
        if self.family == "tabulated":
            return f"tabulated({self.table.xs.size} samples)"
        return f"{self.family}(" + ", ".join(repr(p) for p in self.params) + ")"


_CURVE = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def parse_curve(spec: Any) -> BoundaryFn:
    """
    Build a curve from ``"affine(0.5, 1)"``-style text or a tabulated mapping
    ``{"tabulated": {"t": [...], "x": [...]}}``.
    """
    if isinstance(spec, dict):
        body = spec.get("tabulated")
        if not isinstance(body, dict) or "t" not in body or "x" not in body:
            raise ValidationFailure("tabulated curve needs {'tabulated': {'t': [...], 'x': [...]}}")
        return BoundaryFn.tabulated(body["t"], body["x"])
    if isinstance(spec, (int, float)):
        return BoundaryFn.constant(float(spec))
    m = _CURVE.match(str(spec))
    if m is None:
        raise ValidationFailure(f"malformed curve {spec!r}")
    name = {"const": "constant"}.get(m.group(1), m.group(1))
    try:
        args = tuple(float(a) for a in m.group(2).split(",")) if m.group(2).strip() else ()
    except ValueError as exc:
        raise ValidationFailure(f"curve arguments must be numeric: {spec!r}") from exc
    if name == "tabulated" or name not in FAMILIES:
        raise ValidationFailure(f"unknown curve family in {spec!r}")
    return BoundaryFn(name, args)


def eval_pm(curve: BoundaryFn, sign: int, t):
    """t + z(t) for sign +1, t - z(t) for sign -1."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    t_arr = np.asarray(t, dtype=float)
    if curve.family == "tabulated" and np.any(t_arr > curve.t_max * (1 + 1e-12)):
        raise DomainError(f"t beyond tabulated range {curve.t_max}")
    return t_arr + sign * curve.value(t_arr)


@dataclass(frozen=True)
class MonotoneMap:
    """
    The increasing map m(t) = t + sign * z(t) on [0, limit].

    ``limit`` caps the bracket search for non-analytic curves; closed-form
    inverses of analytic curves are not capped.
    """

    curve: BoundaryFn
    sign: int
    limit: float
    tol: float = 1e-12
    name: str = ""

    @property
    def kind(self) -> str:
        return self.name or ("+" if self.sign > 0 else "-")

    @property
    def range_lo(self) -> float:
        return self.sign * self.curve.scalar(0.0)

    def forward(self, t):
        return eval_pm(self.curve, self.sign, t)

    def forward_scalar(self, t: float) -> float:
        return t + self.sign * self.curve.scalar(t)

    def inverse(self, s):
        """Vectorized inverse; see :func:`invert_monotone`."""
        s_arr = np.asarray(s, dtype=float)
        lo_val = self.range_lo
        if np.any(s_arr < lo_val - self.tol) or np.any(np.isnan(s_arr)):
            raise RangeError(f"{self.kind}: value below range start {lo_val}")
        if self.curve.analytic:
            k, b = self.curve.slope, self.curve.intercept
            out = (s_arr - self.sign * b) / (1.0 + self.sign * k)
            return np.maximum(out, 0.0)
        flat = np.atleast_1d(s_arr).ravel()
        out = np.zeros_like(flat)
        todo = flat > lo_val
        if todo.any():
            out[todo] = self._solve(flat[todo])
        return out.reshape(s_arr.shape) if s_arr.ndim else out[0]

    def _solve(self, s: np.ndarray) -> np.ndarray:
        limit = min(self.limit, self.curve.t_max)
        lo = np.zeros_like(s)
        hi = np.zeros_like(s)
        pending = np.ones(s.shape, dtype=bool)
        step = 1.0
        while pending.any():
            cand = min(step, limit)
            f_c = self.forward(cand)
            reached = pending & (f_c >= s)
            hi[reached] = cand
            lo[pending & ~reached] = cand
            pending &= ~reached
            if cand >= limit:
                break
            step *= 2.0
        if pending.any():
            f_lim = self.forward(limit)
            near = pending & (s <= f_lim + self.tol)
            hi[near] = limit
            lo[near] = np.minimum(lo[near], limit)
            pending &= ~near
            if pending.any():
                raise HorizonExceeded(
                    f"{self.kind}: inverse of {s[pending].max()} lies beyond t = {limit}"
                )
        roots = np.empty_like(s)
        exact_hi = self.forward(hi) <= s
        roots[exact_hi] = hi[exact_hi]
        rest = ~exact_hi
        if rest.any():
            target = s[rest]
            roots[rest] = bracketed_root_array(
                lambda t, i: self.forward(t) - target[i], lo[rest], hi[rest], self.tol
            )
        return roots

    def inverse_scalar(self, s: float) -> float:
        if self.curve.analytic:
            if s < self.range_lo - self.tol:
                raise RangeError(f"{self.kind}: value below range start")
            k, b = self.curve.slope, self.curve.intercept
            return max((s - self.sign * b) / (1.0 + self.sign * k), 0.0)
        return float(self.inverse(s))


def invert_monotone(m: MonotoneMap, s):
    """t with m.forward(t) = s to within the map tolerance."""
    return m.inverse(s)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    checks: dict
    derivative_bound: float
    alpha_bound: float
    beta_bound: float
    min_gap: float
    min_gap_time: float
    intersection_time: float | None
    interpolation: str
    messages: tuple[str, ...] = ()

    def summary(self) -> str:
        return "; ".join(self.messages) if self.messages else "all checks passed"


def _slope_bound(curve: BoundaryFn, horizon: float, grid: np.ndarray) -> float:
    if curve.family == "constant":
        return 0.0
    if curve.family == "affine":
        return abs(curve.slope)
    if curve.family == "sinusoidal":
        # t = 0 is in range and cos(0) = 1, so the sup is attained
        a, w, _ = curve.params
        return abs(a * w)
    hi = min(horizon, curve.t_max)
    pts = grid[grid <= hi]
    table_pts = curve.table.xs[curve.table.xs <= hi]
    vals = np.concatenate([np.abs(curve.derivative(pts)), np.abs(curve.table.sample_slopes()[: table_pts.size])])
    return float(vals.max())


def validate(pair: "CurvePair") -> ValidationReport:
    """Check the standing assumptions on a curve pair; never raises."""
    alpha, beta, horizon = pair.alpha, pair.beta, pair.horizon
    checks: dict[str, bool] = {}
    messages: list[str] = []

    checks["horizon_positive"] = bool(horizon > 0 and math.isfinite(horizon))
    if not checks["horizon_positive"]:
        messages.append("horizon must be positive and finite")
        horizon = 1.0
    t_end = min(alpha.t_max, beta.t_max)
    checks["within_table"] = horizon <= t_end * (1 + 1e-12)
    if not checks["within_table"]:
        messages.append(f"horizon {horizon} exceeds tabulated range {t_end}")
    h = min(horizon, t_end)

    a0, b0 = alpha.scalar(0.0), beta.scalar(0.0)
    checks["alpha_at_0"] = abs(a0) <= VALIDATION_TOL
    checks["beta_at_0"] = abs(b0 - 1.0) <= VALIDATION_TOL
    if not checks["alpha_at_0"]:
        messages.append(f"alpha(0) = {a0}, expected 0")
    if not checks["beta_at_0"]:
        messages.append(f"beta(0) = {b0}, expected 1")

    grid = np.linspace(0.0, h, N_SAMPLES + 1)
    ka = _slope_bound(alpha, h, grid)
    kb = _slope_bound(beta, h, grid)
    bound = max(ka, kb)
    checks["derivative_bound"] = bound < 1.0
    if not checks["derivative_bound"]:
        messages.append(f"derivative bound {bound:.6g} violates |z'| < 1")

    gap_fn = lambda t: float(beta.scalar(t) - alpha.scalar(t))
    gaps = beta.value(grid[1:]) - alpha.value(grid[1:])
    j = int(np.argmin(gaps))
    min_gap, min_time = float(gaps[j]), float(grid[j + 1])
    lo_t, hi_t = float(grid[max(j, 1) - 1]), float(grid[min(j + 2, grid.size - 1)])
    if hi_t > lo_t:
        res = minimize_scalar(gap_fn, bounds=(lo_t, hi_t), method="bounded", options={"xatol": 1e-12})
        if res.success and res.fun < min_gap and res.x > 0:
            min_gap, min_time = float(res.fun), float(res.x)
    checks["no_intersection"] = min_gap > 0
    crossing = None
    if not checks["no_intersection"]:
        k = int(np.argmax(gaps <= 0))
        left = float(grid[k])
        right = float(grid[k + 1])
        if gap_fn(left) > 0:
            crossing = bracketed_root(gap_fn, left, right, 1e-12)
        else:
            crossing = left
        messages.append(f"curves intersect at t = {crossing:.12g} before horizon {horizon}")

    interp = "exact catalog derivative"
    if "tabulated" in (alpha.family, beta.family):
        interp = "piecewise cubic Hermite (monotone), C1; derivatives from second-order differences"
    ok = all(checks.values())
    return ValidationReport(
        ok=ok,
        checks=checks,
        derivative_bound=bound,
        alpha_bound=ka,
        beta_bound=kb,
        min_gap=min_gap,
        min_gap_time=min_time,
        intersection_time=crossing,
        interpolation=interp,
        messages=tuple(messages),
    )


@dataclass(frozen=True)
class CurvePair:
    """The two boundary curves and the horizon up to which they are trusted."""

    alpha: BoundaryFn
    beta: BoundaryFn
    horizon: float

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    @property
    def derivative_bound(self) -> float:
        return self.report.derivative_bound

    @property
    def analytic(self) -> bool:
        return self.alpha.analytic and self.beta.analytic

    def require_valid(self) -> None:
        if not self.report.ok:
            raise ValidationFailure("curve validation failed: " + self.report.summary(), self.report)

    def maps(self, tol: float = 1e-12) -> dict[str, MonotoneMap]:
        lim = self.horizon
        return {
            "alpha+": MonotoneMap(self.alpha, +1, lim, tol, "alpha+"),
            "alpha-": MonotoneMap(self.alpha, -1, lim, tol, "alpha-"),
            "beta+": MonotoneMap(self.beta, +1, lim, tol, "beta+"),
            "beta-": MonotoneMap(self.beta, -1, lim, tol, "beta-"),
        }
