"""
Bracketed root finding: Illinois-modified regula falsi with a bisection
safeguard, in a scalar and a vectorized flavor that share one algorithm.

The scalar version serves the ray tracer, the vectorized one serves map
inversion over whole grids.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import GeometryError, NonConvergence

EPS = np.finfo(float).eps
MAX_ITER = 200


def bracketed_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    g_lo: float | None = None,
    g_hi: float | None = None,
) -> float:
    """
    Root of ``g`` on ``[lo, hi]`` given a sign change.

    Stops once the bracket is narrower than ``tol`` or the residual reaches
    rounding level. Raises GeometryError if the endpoints share a sign.
    """
    a, b = float(lo), float(hi)
    ga = g(a) if g_lo is None else g_lo
    gb = g(b) if g_hi is None else g_hi
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if (ga > 0) == (gb > 0):
        raise GeometryError(f"no sign change on [{a}, {b}]: g={ga}, {gb}")
    side = 0
    width = b - a
    stale = 0
    best, g_best = (a, ga) if abs(ga) < abs(gb) else (b, gb)
    for _ in range(MAX_ITER):
        if b - a <= tol:
            return best
        if stale >= 2:
            x = 0.5 * (a + b)
            stale = 0
        else:
            x = b - gb * (b - a) / (gb - ga)
            if not a < x < b:
                x = 0.5 * (a + b)
        gx = g(x)
        if abs(gx) < abs(g_best):
            best, g_best = x, gx
        if gx == 0.0 or abs(gx) <= 4.0 * EPS * (abs(x) + abs(a) + 1.0):
            return x
        if (gx > 0) == (ga > 0):
            a, ga = x, gx
            if side == -1:
                gb *= 0.5
            side = -1
        else:
            b, gb = x, gx
            if side == 1:
                ga *= 0.5
            side = 1
        if b - a > 0.5 * width:
            stale += 1
        else:
            stale = 0
            width = b - a
    if b - a <= 1e3 * tol:
        return best
    raise NonConvergence(f"root solver stalled on [{a}, {b}]")


def bracketed_root_array(
    g: Callable[[np.ndarray, np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-12,
) -> np.ndarray:
    """
    Elementwise version of :func:`bracketed_root`.

    ``g(x, idx)`` evaluates the residual of the problems numbered ``idx``.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    everything = np.arange(a.size)
    ga = np.asarray(g(a, everything), dtype=float).copy()
    gb = np.asarray(g(b, everything), dtype=float).copy()
    if np.any((ga > 0) & (gb > 0)) or np.any((ga < 0) & (gb < 0)):
        raise GeometryError("no sign change in at least one bracket")
    out = np.where(np.abs(ga) <= np.abs(gb), a, b)
    g_best = np.minimum(np.abs(ga), np.abs(gb))
    active = (ga != 0.0) & (gb != 0.0) & (b - a > tol)
    side = np.zeros(a.shape, dtype=int)
    stale = np.zeros(a.shape, dtype=int)
    width = b - a
    for _ in range(MAX_ITER):
        if not active.any():
            return out
        idx = np.flatnonzero(active)
        ai, bi, gai, gbi = a[idx], b[idx], ga[idx], gb[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = bi - gbi * (bi - ai) / (gbi - gai)
        mid = 0.5 * (ai + bi)
        bad = ~((ai < x) & (x < bi)) | (stale[idx] >= 2)
        x = np.where(bad, mid, x)
        stale[idx] = np.where(stale[idx] >= 2, 0, stale[idx])
        gx = np.asarray(g(x, idx), dtype=float)
        better = np.abs(gx) < g_best[idx]
        out[idx] = np.where(better, x, out[idx])
        g_best[idx] = np.where(better, np.abs(gx), g_best[idx])
        hit = (gx == 0.0) | (np.abs(gx) <= 4.0 * EPS * (np.abs(x) + np.abs(ai) + 1.0))
        out[idx[hit]] = x[hit]
        left = (gx > 0) == (gai > 0)
        # Illinois halving of the retained endpoint value
        s = side[idx]
        gbi = np.where(left & (s == -1), 0.5 * gbi, gbi)
        gai = np.where(~left & (s == 1), 0.5 * gai, gai)
        ai = np.where(left, x, ai)
        gai = np.where(left, gx, gai)
        bi = np.where(left, bi, x)
        gbi = np.where(left, gbi, gx)
        side[idx] = np.where(left, -1, 1)
        a[idx], b[idx], ga[idx], gb[idx] = ai, bi, gai, gbi
        w = bi - ai
        shrunk = w <= 0.5 * width[idx]
        stale[idx] = np.where(shrunk, 0, stale[idx] + 1)
        width[idx] = np.where(shrunk, w, width[idx])
        done = hit | (w <= tol)
        active[idx[done]] = False
    if np.all(b[active] - a[active] <= 1e3 * tol):
        return out
    raise NonConvergence("vectorized root solver stalled")


