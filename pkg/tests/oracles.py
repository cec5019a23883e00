"""
Reference computations that share no code with the package.

Everything here is written from first principles: plain bisection,
d'Alembert's formula on the fixed interval, and closed-form products.
"""

from __future__ import annotations

import math

import numpy as np


def bisect(fun, target: float, lo: float, hi: float, iters: int = 200) -> float:
    """Solve fun(t) = target for increasing fun by plain bisection."""
    flo = fun(lo) - target
    while fun(hi) - target < 0:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (fun(mid) - target) * flo > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def affine_t_star(k: float, r: float) -> float:
    """Minimal control time for alpha = k t, beta = r t + 1."""
    return 2.0 / ((1.0 - r) * (1.0 + k))


def maps_by_bisection(alpha, beta):
    """phi, xi, T*, T** built from bisection inverses of t +- z(t)."""

    def inv(fun, s):
        return bisect(fun, s, 0.0, 1.0)

    ap = lambda t: t + alpha(t)
    am = lambda t: t - alpha(t)
    bp = lambda t: t + beta(t)
    bm = lambda t: t - beta(t)
    phi = lambda s: am(inv(ap, bp(inv(bm, s))))
    b1 = bp(inv(bm, 0.0))
    a1 = am(inv(ap, 1.0))
    return {
        "phi": phi,
        "t_star": inv(ap, b1),
        "t_2star": inv(bm, a1),
        "a1": a1,
        "b1": b1,
    }


def dalembert_cylinder_pq(dy0, y1, t, x):
    """
    p = y_t - y_x and q = y_t + y_x for the fixed-end string on [0, 1].

    The data are extended oddly about both ends with period 2; y0' then
    extends evenly and y1 oddly.
    """

    def ext_dy0(z):
        z = np.mod(z, 2.0)
        return np.where(z <= 1.0, dy0(z), dy0(2.0 - z))

    def ext_y1(z):
        z = np.mod(z, 2.0)
        return np.where(z <= 1.0, y1(z), -y1(2.0 - z))

    # y = (Y0(x-t) + Y0(x+t))/2 + (1/2) int_{x-t}^{x+t} Y1
    p = -ext_dy0(x - t) + ext_y1(x - t)
    q = ext_dy0(x + t) + ext_y1(x + t)
    return p, q


def dalembert_cylinder_y(y0, t, x):
    """Displacement for zero initial velocity and odd-extendable y0."""

    def ext(z):
        z = np.mod(z + 1.0, 2.0) - 1.0
        return np.where(z >= 0, y0(z), -y0(-z))

    return 0.5 * (ext(x - t) + ext(x + t))


def simpson_energy(p, q, a: float, b: float, n: int = 20000) -> float:
    """1/2 int (p^2 + q^2) with a fine composite trapezoid, independent of scipy."""
    xs = np.linspace(a, b, n + 1)
    f = p(xs) ** 2 + q(xs) ** 2
    h = (b - a) / n
    return 0.5 * h * (f.sum() - 0.5 * (f[0] + f[-1]))


def example1_sine_psi(tau: float, n: int) -> float:
    return (math.sin(math.pi * tau) / 2.0) ** (n + 1)


def polynomial_design_psi(tau: float, n: int, s: float) -> float:
    return ((tau + 2 * n + 3) / (tau + 1.0)) ** (-s)


def constant_feedback_omega(f: float) -> float:
    return -0.5 * math.log(abs((f - 1.0) / (f + 1.0)))
