"""
Boundary controls acting at alpha that reach a prescribed state at T*.

With F = 1 the left boundary relation reads p = v - q_in, where q_in is the
value arriving at alpha. Choosing v to cancel or shape the outgoing p over
one reflection cycle gives the controls below; every value is read off the
initial data through the boundary maps, so the signals are explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .catalog import CatalogFn, Const
from .errors import PreconditionError
from .maps import min_control_time, secondary_time
from .quadrature import adaptive_simpson
from .riemann import System, energy, reconstruct

__all__ = [
    "ControlSignal",
    "TargetState",
    "NullCheck",
    "null_control_v",
    "null_control_u",
    "target_control_v",
    "verify_null",
    "verify_target",
]

CASE_TOL = 1e-10


@dataclass(frozen=True)
class ControlSignal:
    """
    Piecewise control: ``pieces[i]`` acts on [breakpoints[i], breakpoints[i+1]).

    The last breakpoint is ``support_end``; the signal is zero from there on.
    A level-u signal keeps its derivative (the level-v signal) alongside.
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[Callable, ...]
    level: str
    derivative: "ControlSignal | None" = None
    case: str = ""
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.breakpoints) != len(self.pieces) + 1:
            raise ValueError("need one more breakpoint than pieces")
        if any(b > a for a, b in zip(self.breakpoints[1:], self.breakpoints[:-1])):
            raise ValueError("breakpoints must be non-decreasing")

    @property
    def support_end(self) -> float:
        return self.breakpoints[-1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for lo, hi, piece in zip(self.breakpoints[:-1], self.breakpoints[1:], self.pieces):
            sel = (t >= lo) & (t < hi)
            if np.any(sel):
                out[sel] = piece(t[sel])
        return out

    def as_v(self) -> "ControlSignal":
        if self.level == "v":
            return self
        if self.derivative is None:
            raise ValueError("level-u signal carries no derivative")
        return self.derivative

    def jump_times(self) -> tuple[float, ...]:
        """Breakpoints where the level-v signal may be discontinuous."""
        return tuple(self.as_v().breakpoints)

    def truncated(self, t_end: float) -> "ControlSignal":
        """Same signal set to zero from ``t_end`` on."""
        bps, pcs = [self.breakpoints[0]], []
        for lo, hi, piece in zip(self.breakpoints[:-1], self.breakpoints[1:], self.pieces):
            if lo >= t_end:
                break
            pcs.append(piece)
            bps.append(min(hi, t_end))
        deriv = self.derivative.truncated(t_end) if self.derivative is not None else None
        return ControlSignal(tuple(bps), tuple(pcs), self.level, deriv, self.case, self.diagnostics)


@dataclass(frozen=True)
class TargetState:
    """Target position h and velocity k at time T*; h must vanish at beta(T*)."""

    h: CatalogFn = field(default_factory=lambda: Const(0.0))
    k: CatalogFn = field(default_factory=lambda: Const(0.0))

    def p_target(self, x):
        return self.k(x) - self.h.derivative(x)

    def q_target(self, x):
        return self.k(x) + self.h.derivative(x)


def _require_conservative(sys: System) -> None:
    if not sys.feedback.is_conservative:
        raise PreconditionError("controls are built for the system with F = 1 (no feedback)")


def _incoming_q(sys: System, tau_one: float) -> tuple[Callable, Callable]:
    """q arriving at alpha: before (a+)^-1(1) from q~, afterwards via beta from p~."""
    m, rd = sys.maps, sys.riemann

    def early(tau):
        return rd.q_tilde(np.clip(m.alpha_plus.forward(tau), 0.0, 1.0))

    def late(tau):
        w = m.beta_reflect(m.alpha_plus.forward(tau))
        return -rd.p_tilde(np.clip(-w, 0.0, 1.0))

    return early, late


def null_control_v(sys: System) -> ControlSignal:
    """The control at derivative level steering the state to rest at T*."""
    _require_conservative(sys)
    t_star = min_control_time(sys.maps)
    tau_one = float(sys.maps.alpha_plus.inverse(1.0))
    early, late = _incoming_q(sys, tau_one)
    return ControlSignal((0.0, tau_one, t_star), (early, late), "v", case="null")


def _primitive(v: ControlSignal, start: float, tol: float) -> ControlSignal:
    """Level-u signal u(t) = start + integral of v, piece by piece."""
    values = [start]
    pieces = []
    for lo, hi, piece in zip(v.breakpoints[:-1], v.breakpoints[1:], v.pieces):
        f = lambda s, piece=piece: float(piece(np.float64(s)))
        base = values[-1]

        def u_piece(t, lo=lo, base=base, f=f):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            return np.array([base + adaptive_simpson(f, lo, ti, tol) for ti in t])

        pieces.append(u_piece)
        values.append(base + adaptive_simpson(f, lo, hi, tol))
    return ControlSignal(v.breakpoints, tuple(pieces), "u", v, v.case, v.diagnostics)


def null_control_u(sys: System, tol: float = 1e-10) -> ControlSignal:
    """Primitive of :func:`null_control_v` with u(0) = y0(0)."""
    v = null_control_v(sys)
    return _primitive(v, float(sys.initial.y0(0.0)), tol)


def target_control_v(sys: System, target: TargetState) -> ControlSignal:
    """
    Control at derivative level reaching (h, k) at T*.

    Before tau_s = (a-)^-1 o b-(T*) the outgoing p is shaped so that after
    its reflection at beta it delivers q(T*) = k + h'; from tau_s on it
    delivers p(T*) = k - h' directly. Which of tau_s and (a+)^-1(1) comes
    first is what distinguishes the three cases.
    """
    _require_conservative(sys)
    m = sys.maps
    t_star = min_control_time(m)
    t_two = secondary_time(m)
    x_end = float(sys.pair.beta.value(t_star))
    if abs(float(target.h(x_end))) > 1e-10:
        raise PreconditionError(f"target position must vanish at beta(T*) = {x_end}")
    tau_one = float(m.alpha_plus.inverse(1.0))
    tau_split = float(m.alpha_minus.inverse(m.beta_minus.forward(t_star)))
    early, late = _incoming_q(sys, tau_one)

    def shape_q(tau):
        c = m.beta_plus.forward(m.beta_minus.inverse(m.alpha_minus.forward(tau)))
        return -target.q_target(c - t_star)

    def shape_p(tau):
        return target.p_target(t_star - m.alpha_minus.forward(tau))

    def combine(q_in, shaper):
        return lambda tau: q_in(tau) + shaper(tau)

    diagnostics: list[str] = []
    if abs(t_two - t_star) <= CASE_TOL:
        case = "case1"
        bps = (0.0, tau_one, t_star)
        pcs = (combine(early, shape_q), combine(late, shape_p))
    elif t_two < t_star:
        # shaping switches after the incoming value has changed source
        case = "case2"
        bps = (0.0, tau_one, tau_split, t_star)
        pcs = (combine(early, shape_q), combine(late, shape_q), combine(late, shape_p))
    else:
        case = "case3"
        bps = (0.0, tau_split, tau_one, t_star)
        pcs = (combine(early, shape_q), combine(early, shape_p), combine(late, shape_p))
    for lo, hi in zip(bps[:-1], bps[1:]):
        if hi - lo <= CASE_TOL:
            diagnostics.append(f"empty piece [{lo}, {hi})")
    return ControlSignal(bps, pcs, "v", case=case, diagnostics=tuple(diagnostics))


@dataclass(frozen=True)
class NullCheck:
    terminal_energy: float
    initial_energy: float
    max_abs_y: float
    max_abs_yt: float
    t_star: float

    @property
    def relative(self) -> float:
        if self.initial_energy == 0.0:
            return 0.0 if self.terminal_energy == 0.0 else np.inf
        return self.terminal_energy / self.initial_energy


def controlled(sys: System, control: ControlSignal) -> System:
    """System driven by ``control``, with its jump times registered for quadrature."""
    v = control.as_v()
    jumps = [float(sys.maps.alpha_minus.forward(b)) for b in v.breakpoints]
    return sys.with_control(v, jumps)


def verify_null(sys: System, control: ControlSignal, n_grid: int = 1024, at: float | None = None) -> NullCheck:
    """Simulate with ``control`` and measure the state at T* (or at ``at``)."""
    _require_conservative(sys)
    t_star = min_control_time(sys.maps)
    t_end = t_star if at is None else at
    run = controlled(sys, control)
    sample = reconstruct(run, t_end, n_grid)
    return NullCheck(
        terminal_energy=energy(run, t_end, n_grid),
        initial_energy=energy(run, 0.0, n_grid),
        max_abs_y=float(np.max(np.abs(sample.y))),
        max_abs_yt=float(np.max(np.abs(sample.y_t))),
        t_star=t_star,
    )


def verify_target(sys: System, control: ControlSignal, target: TargetState, n_grid: int = 512) -> float:
    """Max deviation of (p, q) at T* from the target's Riemann invariants."""
    t_star = min_control_time(sys.maps)
    sample = reconstruct(controlled(sys, control), t_star, n_grid)
    inner = slice(1, -1)  # the end points sit on region boundaries
    xs = sample.xs[inner]
    err_p = np.abs(sample.p[inner] - target.p_target(xs))
    err_q = np.abs(sample.q[inner] - target.q_target(xs))
    return float(max(err_p.max(), err_q.max()))
