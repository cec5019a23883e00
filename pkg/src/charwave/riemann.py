"""
Closed-form solution of the wave equation in Riemann invariants.

With p = y_t - y_x and q = y_t + y_x the equation becomes two transport
equations: p is constant along t - x = s and q along t + x = c. At the left
boundary p + F q = v and at the right boundary p + q = 0. Following a value
backward through its reflections gives one explicit formula per region;
this module evaluates those formulas over arrays of points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .catalog import CatalogFn
from .curves import CurvePair
from .errors import HorizonExceeded, ValidationFailure
from .feedback import FeedbackSpec
from .maps import ReflectionMaps, classify_arrays

__all__ = [
    "InitialData",
    "RiemannData",
    "System",
    "FieldSample",
    "to_riemann",
    "build_system",
    "eval_pq",
    "reconstruct",
    "energy",
]


@dataclass(frozen=True)
class InitialData:
    """Initial position y0 (with y0(1) = 0) and velocity y1 on [0, 1]."""

    y0: CatalogFn
    y1: CatalogFn

    def __post_init__(self):
        end = float(self.y0(1.0))
        if abs(end) > 1e-10:
            raise ValidationFailure(f"initial position must vanish at x = 1, got y0(1) = {end:.3g}")


@dataclass(frozen=True)
class RiemannData:
    p_tilde: Callable
    q_tilde: Callable


def to_riemann(data: InitialData) -> RiemannData:
    """p~ = y1 - y0', q~ = y1 + y0'."""
    y0, y1 = data.y0, data.y1

    def p_tilde(x):
        return y1(x) - y0.derivative(x)

    def q_tilde(x):
        return y1(x) + y0.derivative(x)

    return RiemannData(p_tilde, q_tilde)


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class System:
    """
    Everything needed to evaluate a solution: geometry, data, feedback at
    alpha and the boundary input v (zero when uncontrolled).
    """

    maps: ReflectionMaps
    initial: InitialData
    riemann: RiemannData
    feedback: FeedbackSpec = field(default_factory=FeedbackSpec.none)
    control: Callable = _zero
    # t - x coordinates where v jumps, used to split quadrature panels
    extra_breaks: tuple[float, ...] = ()

    @property
    def pair(self) -> CurvePair:
        return self.maps.pair

    @property
    def horizon(self) -> float:
        return self.maps.horizon

    def F(self, t):
        return self.feedback.reflection(t)

    def v(self, t):
        return np.asarray(self.control(t), dtype=float)

    def with_control(self, control: Callable, breaks=()) -> "System":
        return System(self.maps, self.initial, self.riemann, self.feedback, control, tuple(breaks))

    def with_feedback(self, feedback: FeedbackSpec) -> "System":
        return System(self.maps, self.initial, self.riemann, feedback, self.control, self.extra_breaks)


def build_system(
    pair: CurvePair,
    initial: InitialData,
    feedback: FeedbackSpec | None = None,
    control: Callable | None = None,
    tol: float = 1e-12,
    snap: float = 1e-12,
) -> System:
    maps = ReflectionMaps(pair, tol, snap)
    fb = feedback or FeedbackSpec.none()
    fb.validate(pair.horizon)
    return System(maps, initial, to_riemann(initial), fb, control or _zero)


def _unit(x):
    """Clip data arguments that rounding pushed just outside [0, 1]."""
    return np.clip(x, 0.0, 1.0)


def _p_values(sys: System, s: np.ndarray, idx: np.ndarray) -> np.ndarray:
    m = sys.maps
    out = np.empty_like(s)
    zero = idx == 0
    out[zero] = sys.riemann.p_tilde(_unit(-s[zero]))
    for region in np.unique(idx[~zero]):
        sel = idx == region
        n, odd = divmod(int(region) - 1, 2)
        odd = odd == 0
        cur = s[sel]
        acc = np.zeros_like(cur)
        weight = np.ones_like(cur)
        for k in range(n + 1):
            tau = m.alpha_minus.inverse(cur)
            acc += weight * sys.v(tau)
            weight = weight * sys.F(tau)
            if k < n or not odd:
                cur = m.phi_inv(cur)
        if odd:
            arg = m.alpha_plus.forward(m.alpha_minus.inverse(s[sel]))
            for _ in range(n):
                arg = m.xi_inv(arg)
            out[sel] = acc - weight * sys.riemann.q_tilde(_unit(arg))
        else:
            out[sel] = acc + weight * sys.riemann.p_tilde(_unit(-cur))
    return out


def _q_values(sys: System, c: np.ndarray, idx: np.ndarray) -> np.ndarray:
    m = sys.maps
    out = np.empty_like(c)
    zero = idx == 0
    out[zero] = sys.riemann.q_tilde(_unit(c[zero]))
    for region in np.unique(idx[~zero]):
        sel = idx == region
        n, odd = divmod(int(region) - 1, 2)
        odd = odd == 0
        terms = n if odd else n + 1
        cur = m.beta_reflect(c[sel])
        acc = np.zeros_like(cur)
        weight = np.ones_like(cur)
        for k in range(terms):
            tau = m.alpha_minus.inverse(cur)
            acc += weight * sys.v(tau)
            weight = weight * sys.F(tau)
            if odd or k < terms - 1:
                cur = m.phi_inv(cur)
        if odd:
            out[sel] = -acc - weight * sys.riemann.p_tilde(_unit(-cur))
        else:
            arg = c[sel]
            for _ in range(n + 1):
                arg = m.xi_inv(arg)
            out[sel] = -acc + weight * sys.riemann.q_tilde(_unit(arg))
    return out


def eval_pq(sys: System, t, x):
    """
    (p, q) at the points (t, x).

    Scalars in give floats out; arrays broadcast.
    """
    t_arr, x_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    shape = t_arr.shape
    tf, xf = t_arr.ravel(), x_arr.ravel()
    ip, iq = classify_arrays(sys.maps, tf, xf)
    p = _p_values(sys, tf - xf, ip).reshape(shape)
    q = _q_values(sys, tf + xf, iq).reshape(shape)
    if not shape:
        return float(p), float(q)
    return p, q


@dataclass(frozen=True)
class FieldSample:
    t: float
    xs: np.ndarray
    p: np.ndarray
    q: np.ndarray
    y: np.ndarray
    y_t: np.ndarray

    def rows(self):
        for i in range(self.xs.size):
            yield (self.t, self.xs[i], self.p[i], self.q[i], self.y[i], self.y_t[i])


def _interval(sys: System, t: float) -> tuple[float, float]:
    return float(sys.pair.alpha.value(t)), float(sys.pair.beta.value(t))


def reconstruct(sys: System, t: float, n_grid: int = 512) -> FieldSample:
    """
    p, q, y, y_t on a uniform grid of n_grid + 1 points over [alpha(t), beta(t)].

    y is integrated from the right end leftward so that y(beta(t)) = 0.
    """
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    a, b = _interval(sys, t)
    xs = np.linspace(a, b, n_grid + 1)
    # end points often sit on region boundaries; use the limit from inside
    probe = xs.copy()
    hair = 1e-11 * max(1.0, b - a)
    probe[0] += hair
    probe[-1] -= hair
    p, q = eval_pq(sys, np.full_like(xs, t), probe)
    y_t = 0.5 * (p + q)
    y_x = 0.5 * (q - p)
    running = cumulative_simpson(y_x, x=xs, initial=0.0)
    y = running - running[-1]
    return FieldSample(float(t), xs, p, q, y, y_t)


def _edges(sys: System, t: float, a: float, b: float) -> np.ndarray:
    """Points of [a, b] where the solution may jump or kink at time t."""
    m = sys.maps
    cand = [t - m.p_breaks, m.q_breaks - t]
    for s in sys.extra_breaks:
        # a jump of v travels along t - x = s, reflects at beta, comes back
        for _ in range(1000):
            if s > t:
                break
            cand.append(np.array([t - s]))
            try:
                c = float(m.beta_plus.forward(m.beta_minus.inverse(s)))
                cand.append(np.array([c - t]))
                s = float(m.alpha_minus.forward(m.alpha_plus.inverse(c)))
            except HorizonExceeded:
                break
    pts = np.concatenate(cand)
    pts = pts[(pts > a) & (pts < b)]
    return np.unique(np.concatenate([[a], pts, [b]]))


def energy(sys: System, t: float, n_grid: int = 1024) -> float:
    """
    E(t) = 1/2 integral of p^2 + q^2 over (alpha(t), beta(t)).

    Composite Simpson on panels split where the solution is only piecewise
    smooth; panel ends are pulled inside by a hair so that one-sided values
    are used.
    """
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    a, b = _interval(sys, t)
    edges = _edges(sys, t, a, b)
    total = 0.0
    length = b - a
    for lo, hi in zip(edges[:-1], edges[1:]):
        w = hi - lo
        if w <= 1e-13 * max(1.0, length):
            continue
        n = max(2, int(np.ceil(n_grid * w / length)))
        n += n % 2
        shrink = min(1e-11 * max(1.0, length), 0.25 * w)
        xs = np.linspace(lo + shrink, hi - shrink, n + 1)
        p, q = eval_pq(sys, np.full_like(xs, t), xs)
        total += 0.5 * simpson(p * p + q * q, x=xs) * (w / (w - 2 * shrink))
    return max(total, 0.0)
