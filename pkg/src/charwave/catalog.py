"""
Closed catalog of scalar functions used for initial data, targets,
feedback laws and decay rates.

Every entry is vectorized and knows its exact derivative, so no symbolic
machinery or finite differencing is needed for catalog expressions. The
trigonometric entries work in degrees so that sin(k pi x) is exactly zero
at integer k x, where reflection coefficients must vanish.
Expressions are written as ``name(arg, arg, ...)`` with numeric arguments:

    const(c)              c
    affine(a, b)          a*x + b
    poly(c0, c1, ...)     c0 + c1*x + c2*x**2 + ...
    sine(k[, amp[, off]]) off + amp*sin(k*pi*x)
    cosine(k[, amp[, off]]) off + amp*cos(k*pi*x)
    mobius(a, b, c, d)    (a + b*x) / (c + d*x)
    tanh_rate(w)          exp(-w*x)
    power_rate(s)         (x + 1)**(-s)
    log_rate(s)           log(x + 1)**(-s)

Tabulated functions are built from samples with :func:`tabulated`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import cosdg, sindg

from .errors import DomainError, ValidationFailure

__all__ = [
    "CatalogFn",
    "Const",
    "Poly",
    "Sine",
    "Cosine",
    "Mobius",
    "ExpRate",
    "PowerRate",
    "LogRate",
    "Tabulated",
    "parse_expr",
    "tabulated",
]


class CatalogFn:
    """Base class: a vectorized real function with an exact derivative."""

    spec: str = "?"

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def log_abs(self, x):
        """ln|g(x)|, overridden where a closed form avoids underflow."""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self(x)))

    @property
    def constant_value(self) -> float | None:
        """The value if the function is identically constant, else None."""
        return None

    def __repr__(self) -> str:
        return self.spec


@dataclass(frozen=True, repr=False)
class Const(CatalogFn):
    c: float

    @property
    def spec(self) -> str:
        return f"const({self.c!r})"

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c)

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    @property
    def constant_value(self) -> float | None:
        return float(self.c)


@dataclass(frozen=True, repr=False)
class Poly(CatalogFn):
    """Polynomial with ascending coefficients."""

    coeffs: tuple[float, ...]

    @property
    def spec(self) -> str:
        return "poly(" + ", ".join(repr(c) for c in self.coeffs) + ")"

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coeffs)

    def derivative(self, x):
        d = np.polynomial.polynomial.polyder(self.coeffs) if len(self.coeffs) > 1 else [0.0]
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), d) + 0.0 * np.asarray(x, dtype=float)

    @property
    def constant_value(self) -> float | None:
        if all(c == 0 for c in self.coeffs[1:]):
            return float(self.coeffs[0]) if self.coeffs else 0.0
        return None


@dataclass(frozen=True, repr=False)
class Sine(CatalogFn):
    k: float
    amp: float = 1.0
    offset: float = 0.0

    @property
    def spec(self) -> str:
        return f"sine({self.k!r}, {self.amp!r}, {self.offset!r})"

    def __call__(self, x):
        return self.offset + self.amp * sindg(180.0 * self.k * np.asarray(x, dtype=float))

    def derivative(self, x):
        return self.amp * self.k * np.pi * cosdg(180.0 * self.k * np.asarray(x, dtype=float))


@dataclass(frozen=True, repr=False)
class Cosine(CatalogFn):
    k: float
    amp: float = 1.0
    offset: float = 0.0

    @property
    def spec(self) -> str:
        return f"cosine({self.k!r}, {self.amp!r}, {self.offset!r})"

    def __call__(self, x):
        return self.offset + self.amp * cosdg(180.0 * self.k * np.asarray(x, dtype=float))

    def derivative(self, x):
        return -self.amp * self.k * np.pi * sindg(180.0 * self.k * np.asarray(x, dtype=float))


@dataclass(frozen=True, repr=False)
class Mobius(CatalogFn):
    """(a + b x) / (c + d x)."""

    a: float
    b: float
    c: float
    d: float

    @property
    def spec(self) -> str:
        return f"mobius({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (self.a + self.b * x) / (self.c + self.d * x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return (self.b * self.c - self.a * self.d) / (self.c + self.d * x) ** 2

    def reflection_parts(self, x):
        """Numerator and denominator of (1 - f) / (1 + f) without cancellation."""
        x = np.asarray(x, dtype=float)
        return (self.c - self.a) + (self.d - self.b) * x, (self.c + self.a) + (self.d + self.b) * x


@dataclass(frozen=True, repr=False)
class ExpRate(CatalogFn):
    """exp(-omega x)."""

    omega: float

    @property
    def spec(self) -> str:
        return f"tanh_rate({self.omega!r})"

    def __call__(self, x):
        return np.exp(-self.omega * np.asarray(x, dtype=float))

    def derivative(self, x):
        return -self.omega * self(x)

    def log_abs(self, x):
        return -self.omega * np.asarray(x, dtype=float)


@dataclass(frozen=True, repr=False)
class PowerRate(CatalogFn):
    """(x + 1)^(-s)."""

    s: float

    @property
    def spec(self) -> str:
        return f"power_rate({self.s!r})"

    def __call__(self, x):
        return (np.asarray(x, dtype=float) + 1.0) ** (-self.s)

    def derivative(self, x):
        return -self.s * (np.asarray(x, dtype=float) + 1.0) ** (-self.s - 1.0)

    def log_abs(self, x):
        return -self.s * np.log1p(np.asarray(x, dtype=float))


@dataclass(frozen=True, repr=False)
class LogRate(CatalogFn):
    """log(x + 1)^(-s); infinite at x = 0."""

    s: float

    @property
    def spec(self) -> str:
        return f"log_rate({self.s!r})"

    def __call__(self, x):
        with np.errstate(divide="ignore"):
            return np.log1p(np.asarray(x, dtype=float)) ** (-self.s)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return -self.s * np.log1p(x) ** (-self.s - 1.0) / (x + 1.0)

    def log_abs(self, x):
        with np.errstate(divide="ignore"):
            return -self.s * np.log(np.log1p(np.asarray(x, dtype=float)))


@dataclass(frozen=True, repr=False, eq=False)
class Tabulated(CatalogFn):
    """
    Monotone-preserving cubic interpolant of samples.

    The derivative interpolates second-order finite differences of the
    samples (central inside, one-sided at the ends).
    """

    xs: np.ndarray
    ys: np.ndarray
    _value: PchipInterpolator = field(init=False, repr=False)
    _slope: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 3:
            raise ValidationFailure("tabulated function needs at least 3 matching samples")
        if np.any(np.diff(xs) <= 0):
            raise ValidationFailure("tabulated abscissae must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "_value", PchipInterpolator(xs, ys, extrapolate=False))
        slopes = np.gradient(ys, xs, edge_order=2)
        object.__setattr__(self, "_slope", PchipInterpolator(xs, slopes, extrapolate=False))

    @property
    def spec(self) -> str:
        return f"tabulated({self.xs.size} samples on [{self.xs[0]!r}, {self.xs[-1]!r}])"

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    def _clip(self, x):
        x = np.asarray(x, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.hi))
        if np.any(x < self.lo - slack) or np.any(x > self.hi + slack):
            raise DomainError(f"argument outside tabulated range [{self.lo}, {self.hi}]")
        return np.clip(x, self.lo, self.hi)

    def __call__(self, x):
        return self._value(self._clip(x))

    def derivative(self, x):
        return self._slope(self._clip(x))

    def sample_slopes(self) -> np.ndarray:
        return self._slope(self.xs)


def tabulated(xs: Sequence[float], ys: Sequence[float]) -> Tabulated:
    return Tabulated(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))


_ARITY = {
    "const": (1, 1),
    "affine": (2, 2),
    "poly": (1, 64),
    "sine": (1, 3),
    "cosine": (1, 3),
    "mobius": (4, 4),
    "tanh_rate": (1, 1),
    "power_rate": (1, 1),
    "log_rate": (1, 1),
}

_EXPR = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def _parse_args(name: str, text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")] if text.strip() else []
    try:
        args = [float(p) for p in parts]
    except ValueError as exc:
        raise ValidationFailure(f"{name}: arguments must be numeric, got {text!r}") from exc
    if not all(np.isfinite(args)):
        raise ValidationFailure(f"{name}: arguments must be finite")
    return args


def parse_expr(text: str) -> CatalogFn:
    """Parse a catalog expression such as ``sine(1)`` or ``poly(0, 1, -1)``."""
    m = _EXPR.match(text)
    if m is None:
        raise ValidationFailure(f"malformed catalog expression {text!r}; expected name(args)")
    name, body = m.group(1), m.group(2)
    if name not in _ARITY:
        raise ValidationFailure(f"unknown catalog function {name!r}; known: {', '.join(sorted(_ARITY))}")
    args = _parse_args(name, body)
    lo, hi = _ARITY[name]
    if not lo <= len(args) <= hi:
        raise ValidationFailure(f"{name} takes {lo}..{hi} arguments, got {len(args)}")
    if name == "const":
        return Const(args[0])
    if name == "affine":
        return Poly((args[1], args[0]))
    if name == "poly":
        return Poly(tuple(args))
    if name == "sine":
        return Sine(*args)
    if name == "cosine":
        return Cosine(*args)
    if name == "mobius":
        if args[2] == 0 and args[3] == 0:
            raise ValidationFailure("mobius: denominator is identically zero")
        return Mobius(*args)
    if name == "tanh_rate":
        return ExpRate(args[0])
    if name == "power_rate":
        return PowerRate(args[0])
    return LogRate(args[0])
