"""Adaptive Simpson quadrature for smooth scalar integrands."""

from __future__ import annotations

from typing import Callable

MAX_DEPTH = 50
MIN_DEPTH = 4  # always split this many times to avoid lucky agreement


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Integral of ``f`` over [a, b] with Richardson-corrected Simpson panels."""
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)


def _refine(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    diff = left + right - whole
    if depth <= 0 or (depth <= MAX_DEPTH - MIN_DEPTH and abs(diff) <= 15.0 * tol):
        return left + right + diff / 15.0
    return _refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _refine(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )
