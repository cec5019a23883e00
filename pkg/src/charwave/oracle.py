"""
Independent evaluation of (p, q) by tracing characteristics backward.

A p-value travels along slope +1 lines and only ever meets the left curve
alpha going backward; a q-value travels along slope -1 and only meets beta.
Each boundary hit is located by a bracketed root solve and the boundary
relation is applied:

    at alpha:  p = v - F q      (continue with q)
    at beta:   q = -p           (continue with p)

so one trace is a single chain ending on the initial line t = 0. No region
tables or closed-form maps are used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, RunawayError
from .riemann import System
from .roots import bracketed_root

__all__ = ["RayEvent", "RayTrace", "trace", "trace_value"]

MAX_EVENTS = 100_000


@dataclass(frozen=True)
class RayEvent:
    time: float
    side: str  # "alpha" or "beta"
    x: float
    factor: float  # multiplier applied to the continued trace
    source: float  # additive contribution v(time) (0 at beta)


@dataclass
class RayTrace:
    start: tuple[float, float]
    invariant: str
    events: list[RayEvent] = field(default_factory=list)
    terminal: float | None = None  # coordinate on t = 0, None if absorbed
    terminal_invariant: str | None = None
    value: float = 0.0

    def alpha_events(self) -> int:
        return sum(1 for e in self.events if e.side == "alpha")


def trace(sys: System, t: float, x: float, invariant: str = "p") -> RayTrace:
    """Follow the ``invariant`` ("p" or "q") characteristic through (t, x) backward."""
    if invariant not in ("p", "q"):
        raise ValueError("invariant must be 'p' or 'q'")
    alpha, beta = sys.pair.alpha, sys.pair.beta
    slack = 1e-10
    if not (-slack <= t <= sys.horizon + slack) or not (
        alpha.scalar(max(t, 0.0)) - slack <= x <= beta.scalar(max(t, 0.0)) + slack
    ):
        raise DomainError(f"({t}, {x}) is outside the space-time domain")
    tol = sys.maps.tol
    out = RayTrace((t, x), invariant)
    cur_t, cur_x, kind = float(t), float(x), invariant
    weight = 1.0
    value = 0.0
    while True:
        if len(out.events) > MAX_EVENTS:
            raise RunawayError("more than 1e5 reflections; curves nearly glide on characteristics")
        if kind == "p":
            s0 = cur_t - cur_x  # x(s) = s - s0 along the ray
            g = lambda s: (s - s0) - alpha.scalar(s)
            g0 = -s0 - alpha.scalar(0.0)
            if g0 >= 0.0:
                out.terminal, out.terminal_invariant = min(max(-s0, 0.0), 1.0), "p"
                value += weight * float(sys.riemann.p_tilde(out.terminal))
                break
            g_hi = g(cur_t)
            hit = cur_t if g_hi <= 0.0 else bracketed_root(g, 0.0, cur_t, tol, g_lo=g0, g_hi=g_hi)
            F = sys.feedback.reflection_scalar(hit)
            v = float(sys.v(hit))
            value += weight * v
            weight *= -F
            xa = alpha.scalar(hit)
            out.events.append(RayEvent(hit, "alpha", xa, -F, v))
            cur_t, cur_x, kind = hit, xa, "q"
            if weight == 0.0:
                break
        else:
            c0 = cur_t + cur_x  # x(s) = c0 - s along the ray
            h = lambda s: beta.scalar(s) - (c0 - s)
            h0 = beta.scalar(0.0) - c0
            if h0 >= 0.0:
                out.terminal, out.terminal_invariant = min(max(c0, 0.0), 1.0), "q"
                value += weight * float(sys.riemann.q_tilde(out.terminal))
                break
            h_hi = h(cur_t)
            hit = cur_t if h_hi <= 0.0 else bracketed_root(h, 0.0, cur_t, tol, g_lo=h0, g_hi=h_hi)
            weight = -weight
            xb = beta.scalar(hit)
            out.events.append(RayEvent(hit, "beta", xb, -1.0, 0.0))
            cur_t, cur_x, kind = hit, xb, "p"
    out.value = value
    return out


def trace_value(sys: System, t: float, x: float, invariant: str = "p") -> float:
    return trace(sys, t, x, invariant).value
