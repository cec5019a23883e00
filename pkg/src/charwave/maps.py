"""
Reflection maps, region decomposition and the critical times T*, T**.

With z+(t) = t + z(t) and z-(t) = t - z(t):

    phi = a- o (a+)^-1 o b+ o (b-)^-1      advances t - x by one round trip
    xi  = b+ o (b-)^-1 o a- o (a+)^-1      the same for t + x

P-regions are slabs of constant t - x delimited by
    0, a1, phi(0), phi(a1), phi^2(0), ...     with a1 = a- o (a+)^-1 (1),
Q-regions slabs of constant t + x delimited by
    1, b1, xi(1), xi(b1), xi^2(1), ...        with b1 = b+ o (b-)^-1 (0).
Index 0 is everything before the first breakpoint.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .curves import CurvePair
from .errors import DomainError, HorizonExceeded

__all__ = [
    "RegionId",
    "ReflectionMaps",
    "phi_iterate",
    "min_control_time",
    "secondary_time",
    "classify",
    "classify_arrays",
]

MAX_BREAKPOINTS = 100_000


class RegionId(NamedTuple):
    family: str
    index: int


class ReflectionMaps:
    """
    Composed reflection maps of a validated curve pair, with cached region
    breakpoints up to the horizon.
    """

    def __init__(self, pair: CurvePair, tol: float = 1e-12, snap: float = 1e-12):
        pair.require_valid()
        self.pair = pair
        self.tol = tol
        self.snap = snap
        self.horizon = pair.horizon
        m = pair.maps(tol)
        self.alpha_plus = m["alpha+"]
        self.alpha_minus = m["alpha-"]
        self.beta_plus = m["beta+"]
        self.beta_minus = m["beta-"]
        self.analytic = pair.analytic
        self.a1 = float(self.alpha_minus.forward(self.alpha_plus.inverse(1.0)))
        self.b1 = float(self.beta_plus.forward(self.beta_minus.inverse(0.0)))
        self.degenerate: list[RegionId] = []
        self.p_breaks, p_ok = self._breakpoints("P", 0.0, self.a1, self.phi, self._p_time)
        self.q_breaks, q_ok = self._breakpoints("Q", 1.0, self.b1, self.xi, self._q_time)
        self.increasing_ok = p_ok and q_ok

    # -- compositions ------------------------------------------------------
    def phi(self, s):
        return self.alpha_minus.forward(
            self.alpha_plus.inverse(self.beta_plus.forward(self.beta_minus.inverse(s)))
        )

    def phi_inv(self, s):
        return self.beta_minus.forward(
            self.beta_plus.inverse(self.alpha_plus.forward(self.alpha_minus.inverse(s)))
        )

    def xi(self, c):
        return self.beta_plus.forward(
            self.beta_minus.inverse(self.alpha_minus.forward(self.alpha_plus.inverse(c)))
        )

    def xi_inv(self, c):
        return self.alpha_plus.forward(
            self.alpha_minus.inverse(self.beta_minus.forward(self.beta_plus.inverse(c)))
        )

    def beta_reflect(self, c):
        """t - x coordinate leaving beta for an incoming t + x = c."""
        return self.beta_minus.forward(self.beta_plus.inverse(c))

    def alpha_reflect(self, s):
        """t + x coordinate leaving alpha for an incoming t - x = s."""
        return self.alpha_plus.forward(self.alpha_minus.inverse(s))

    def _p_time(self, s: float) -> float:
        return float(self.alpha_minus.inverse(s))

    def _q_time(self, c: float) -> float:
        return float(self.beta_plus.inverse(c))

    def _breakpoints(self, family, first, second, step, when):
        """Sequence first, second, step(first), step(second), ... up to horizon."""
        pts = [first, second]
        ok = second > first
        if second <= first:
            self.degenerate.append(RegionId(family, 1))
        while len(pts) < MAX_BREAKPOINTS:
            try:
                if when(pts[-1]) > self.horizon:
                    break
                nxt = float(step(pts[-2]))
            except HorizonExceeded:
                break
            if not nxt > pts[-1]:
                if nxt == pts[-1]:
                    self.degenerate.append(RegionId(family, len(pts)))
                ok = False
                if nxt <= pts[-2]:
                    break
            elif nxt - pts[-2] < 1e-10:
                # iterates accumulate at a fixed point: the sequence never leaves
                ok = False
                pts.append(nxt)
                break
            pts.append(nxt)
        return np.asarray(pts), ok

    # -- region table ------------------------------------------------------
    def breaks(self, family: str) -> np.ndarray:
        return self.p_breaks if family == "P" else self.q_breaks

    def region_interval(self, region: RegionId) -> tuple[float, float]:
        """Half-open [lo, hi) of the characteristic coordinate; hi may be inf."""
        bp = self.breaks(region.family)
        if region.index == 0:
            return -math.inf, float(bp[0])
        lo = float(bp[region.index - 1])
        hi = float(bp[region.index]) if region.index < bp.size else math.inf
        return lo, hi


def phi_iterate(maps: ReflectionMaps, n: int, tau):
    """phi applied n times; phi^0 is the identity."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = np.asarray(tau, dtype=float)
    for _ in range(n):
        out = maps.phi(out)
    return out


def min_control_time(maps: ReflectionMaps) -> float:
    """T* = (a+)^-1 o b+ o (b-)^-1 (0)."""
    t_star = float(maps.alpha_plus.inverse(maps.b1))
    if t_star > maps.horizon:
        raise HorizonExceeded(f"T* = {t_star} exceeds horizon {maps.horizon}")
    return t_star


def secondary_time(maps: ReflectionMaps) -> float:
    """T** = (b-)^-1 o a- o (a+)^-1 (1)."""
    t2 = float(maps.beta_minus.inverse(maps.a1))
    if t2 > maps.horizon:
        raise HorizonExceeded(f"T** = {t2} exceeds horizon {maps.horizon}")
    return t2


def _check_inside(maps: ReflectionMaps, t: np.ndarray, x: np.ndarray) -> None:
    slack = 1e-10
    if np.any(t < -slack) or np.any(t > maps.horizon * (1 + 1e-12) + slack):
        raise DomainError(f"time outside [0, {maps.horizon}]")
    tc = np.clip(t, 0.0, maps.horizon)
    a = maps.pair.alpha.value(tc)
    b = maps.pair.beta.value(tc)
    if np.any(x < a - slack) or np.any(x > b + slack):
        raise DomainError("point lies outside the space-time domain")


def classify_arrays(maps: ReflectionMaps, t, x) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized region indices (P index, Q index)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_inside(maps, t, x)
    s = t - x
    c = t + x
    ip = np.searchsorted(maps.p_breaks, s + maps.snap, side="right")
    iq = np.searchsorted(maps.q_breaks, c + maps.snap, side="right")
    return ip, iq


def classify(maps: ReflectionMaps, t: float, x: float) -> tuple[RegionId, RegionId]:
    """The P-region of t - x and the Q-region of t + x."""
    ip, iq = classify_arrays(maps, t, x)
    return RegionId("P", int(ip)), RegionId("Q", int(iq))
