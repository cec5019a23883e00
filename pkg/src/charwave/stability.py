"""
Decay analysis for the feedback system.

A value leaving alpha at t - x = tau returns there after each round trip,
at t - x = phi^n(tau), and picks up the factor |F| each time. The running
product

    psi_n(tau) = prod_{i=0..n} |F((a-)^-1(phi^i(tau)))|

decides decay: the energy tends to zero iff psi_n -> 0, and the
exponential rate is  omega = -sup_tau lim ln psi_n(tau) / phi^n(tau).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .catalog import CatalogFn
from .errors import HorizonExceeded, IncreasingConditionError, PreconditionError
from .feedback import FeedbackSpec
from .maps import ReflectionMaps, min_control_time
from .riemann import System

__all__ = [
    "DecayReport",
    "GrowthBound",
    "DecayVerdict",
    "psi_table",
    "growth_bound",
    "classify_decay",
    "design_feedback",
    "analyze",
]

PHI_CAP = 1e300
FINITE_TIME_THRESHOLD = -1e3
LIMIT_RTOL = 1e-4
RATE_RTOL = 1e-3
NO_DECAY_FLOOR = 1e-8
ZERO_OMEGA = 1e-6


@dataclass(frozen=True)
class DecayReport:
    """
    psi table over a tau grid of [0, phi(0)) and, once analyzed, a summary.

    Rows are indexed by n = 0..N, columns by tau.
    """

    tau_grid: np.ndarray
    phi_iter: np.ndarray
    ln_psi: np.ndarray
    increasing_ok: bool
    absorbing: bool
    t_star: float | None
    n_requested: int
    omega_estimate: float | None = None
    omega_status: str | None = None
    classification: str | None = None
    rate: str | None = None
    constants: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.ln_psi.shape[0] - 1

    @property
    def psi(self) -> np.ndarray:
        return np.exp(self.ln_psi)

    @property
    def ln_psi_over_phi(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.ln_psi / self.phi_iter
        out[self.phi_iter == 0.0] = np.nan
        return out

    def rows(self):
        ratio = self.ln_psi_over_phi
        psi = self.psi
        for j, tau in enumerate(self.tau_grid):
            for n in range(self.N + 1):
                yield (tau, n, psi[n, j], ratio[n, j])


def _reflection_logs(maps: ReflectionMaps, feedback: FeedbackSpec, s: np.ndarray) -> np.ndarray:
    F = np.abs(feedback.reflection(maps.alpha_minus.inverse(s)))
    with np.errstate(divide="ignore"):
        return np.log(F)


def psi_table(sys: System, N: int = 400, n_tau: int = 256) -> DecayReport:
    """
    ln psi_n(tau) for n = 0..N on a uniform half-open tau grid.

    Iteration stops early (with a shorter table) when phi^n overflows or,
    for non-affine curves, leaves the horizon.
    """
    maps = sys.maps
    if N < 8:
        raise ValueError("N must be at least 8")
    if not maps.increasing_ok:
        raise IncreasingConditionError(
            "reflection breakpoints are not strictly increasing; "
            "stability analysis needs phi(tau) > tau"
        )
    phi0 = float(maps.phi(0.0))
    tau = np.linspace(0.0, phi0, n_tau, endpoint=False)
    if np.any(maps.phi(tau) <= tau):
        raise IncreasingConditionError("phi has a fixed point in [0, phi(0))")
    rows = [tau]
    for _ in range(N):
        try:
            nxt = maps.phi(rows[-1])
        except HorizonExceeded:
            break
        if not np.all(np.isfinite(nxt)) or np.any(nxt > PHI_CAP):
            break
        rows.append(nxt)
    if len(rows) < 9:
        raise HorizonExceeded(f"only {len(rows) - 1} reflection cycles fit in the horizon")
    phi_iter = np.vstack(rows)
    first = float(np.min(phi_iter[1] - phi_iter[0]))
    last = float(np.min(phi_iter[-1] - phi_iter[-2]))
    if last < 1e-8 * first:
        raise IncreasingConditionError(
            f"phi iterates accumulate near {phi_iter[-1].max():.6g}; the domain shrinks and decay analysis does not apply"
        )
    logs = _reflection_logs(maps, sys.feedback, phi_iter.ravel()).reshape(phi_iter.shape)
    ln_psi = np.cumsum(logs, axis=0)
    try:
        t_star = min_control_time(maps)
    except HorizonExceeded:
        t_star = None
    return DecayReport(
        tau_grid=tau,
        phi_iter=phi_iter,
        ln_psi=ln_psi,
        increasing_ok=True,
        absorbing=sys.feedback.is_absorbing,
        t_star=t_star,
        n_requested=N,
    )


def _extrapolate(n: np.ndarray, a: np.ndarray) -> float:
    """Limit of a_n by least squares on 1, 1/n, ln(n)/n, 1/n^2."""
    basis = np.column_stack([np.ones_like(n), 1.0 / n, np.log(n) / n, 1.0 / n**2])
    coef, *_ = np.linalg.lstsq(basis, a, rcond=None)
    return float(coef[0])


def _tail_limit(seq: np.ndarray, rtol: float, floor: float = 1e-2) -> tuple[str, float]:
    """
    Classify the tail of seq[1..N]: ("converged", L), ("diverged", -inf)
    or ("undefined", nan).
    """
    N = seq.size - 1
    n = np.arange(N + 1, dtype=float)
    q1, q2, q3 = N // 4, N // 2, (3 * N) // 4
    if not np.isfinite(seq[N]):
        return "diverged", -math.inf
    if seq[N] < FINITE_TIME_THRESHOLD:
        return "diverged", -math.inf
    late = _extrapolate(n[q3:], seq[q3:])
    early = _extrapolate(n[q2 : q3 + 1], seq[q2 : q3 + 1])
    if abs(late - early) <= rtol * max(abs(late), floor):
        return "converged", late
    d1, d2 = seq[N] - seq[q2], seq[q2] - seq[q1]
    if d1 < 0 and d2 < 0 and d1 / d2 > 0.85:
        return "diverged", -math.inf
    return "undefined", math.nan


@dataclass(frozen=True)
class GrowthBound:
    omega: float
    status: str  # converged | diverged | undefined
    limits: np.ndarray


def growth_bound(report: DecayReport) -> GrowthBound:
    """omega = -sup over the tau grid of the extrapolated lim ln psi_n / phi^n."""
    ratio = report.ln_psi_over_phi
    limits = np.empty(report.tau_grid.size)
    undefined = False
    for j in range(report.tau_grid.size):
        status, lim = _tail_limit(ratio[:, j], LIMIT_RTOL)
        limits[j] = lim
        undefined |= status == "undefined"
    if undefined:
        return GrowthBound(math.nan, "undefined", limits)
    finite = limits[np.isfinite(limits)]
    if finite.size == 0:
        return GrowthBound(math.inf, "diverged", limits)
    omega = -float(finite.max())
    if abs(omega) < ZERO_OMEGA:
        omega = 0.0
    return GrowthBound(omega, "converged", limits)


@dataclass(frozen=True)
class DecayVerdict:
    kind: str  # no-decay | decays | exponential | finite-time | fits-rate | inconclusive
    omega: float
    omega_status: str
    rate: str | None = None
    constants: np.ndarray | None = None
    extinction_time: float | None = None

    @property
    def label(self) -> str:
        if self.kind == "exponential":
            return f"exponential({self.omega:.10g})"
        if self.kind == "fits-rate":
            return f"fits-rate({self.rate})"
        return self.kind


def _column_tails(report: DecayReport) -> tuple[np.ndarray, np.ndarray]:
    """Per tau: is psi exactly zero at N, and does ln psi settle to a finite value."""
    lp = report.ln_psi
    N = report.N
    zero = ~np.isfinite(lp[N])
    with np.errstate(invalid="ignore"):
        d1 = lp[N] - lp[N // 2]
        d2 = lp[N // 2] - lp[N // 4]
        settled = (~zero) & ((np.abs(d1) <= 0.75 * np.abs(d2)) | (np.abs(d1) <= 1e-12))
    return zero, settled


def _fit_rate(report: DecayReport, g: CatalogFn, usable: np.ndarray) -> tuple[float, np.ndarray] | None:
    """Spread and limit constants of psi_n / g(phi^n) over usable columns."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = report.ln_psi - g.log_abs(report.phi_iter)
    consts = np.full(report.tau_grid.size, np.nan)
    worst = 0.0
    n = np.arange(report.N + 1, dtype=float)
    q2, q3 = report.N // 2, (3 * report.N) // 4
    for j in np.flatnonzero(usable):
        col = r[:, j]
        if not np.all(np.isfinite(col[q2:])):
            return None
        late = _extrapolate(n[q3:], col[q3:])
        early = _extrapolate(n[q2 : q3 + 1], col[q2 : q3 + 1])
        spread = abs(late - early) / max(1.0, abs(late))
        if spread > RATE_RTOL:
            return None
        worst = max(worst, spread)
        consts[j] = math.exp(late)
    return worst, consts


def classify_decay(report: DecayReport, rate_candidates: Sequence[CatalogFn] = ()) -> DecayVerdict:
    """
    Verdict on the asymptotics of psi_n.

    Checked in order: perfect absorption, no decay, candidate rates,
    exponential decay, generic decay.
    """
    gb = growth_bound(report)
    if report.absorbing:
        return DecayVerdict("finite-time", math.inf, "diverged", extinction_time=report.t_star)
    zero, settled = _column_tails(report)
    psi_N = np.exp(report.ln_psi[report.N])
    if np.any(settled & (psi_N >= NO_DECAY_FLOOR)):
        return DecayVerdict("no-decay", gb.omega, gb.status)
    usable = ~zero
    if usable.sum() >= 0.9 * usable.size:
        best = None
        for g in rate_candidates:
            fit = _fit_rate(report, g, usable)
            if fit is not None and (best is None or fit[0] < best[0]):
                best = (fit[0], g, fit[1])
        if best is not None:
            return DecayVerdict("fits-rate", gb.omega, gb.status, rate=best[1].spec, constants=best[2])
    if gb.status == "converged" and gb.omega > 0:
        return DecayVerdict("exponential", gb.omega, gb.status)
    lp = report.ln_psi
    decreasing = zero | (lp[report.N] < lp[report.N // 2])
    if np.all(decreasing) and gb.status != "undefined":
        return DecayVerdict("decays", gb.omega, gb.status)
    return DecayVerdict("inconclusive", gb.omega, gb.status)


def analyze(
    sys: System, N: int = 400, n_tau: int = 256, rate_candidates: Sequence[CatalogFn] = ()
) -> tuple[DecayReport, DecayVerdict]:
    """psi table plus verdict, with the summary folded into the report."""
    report = psi_table(sys, N, n_tau)
    verdict = classify_decay(report, rate_candidates)
    report = dataclasses.replace(
        report,
        omega_estimate=verdict.omega,
        omega_status=verdict.omega_status,
        classification=verdict.label,
        rate=verdict.rate,
        constants=verdict.constants,
    )
    return report, verdict


class DesignedReflection:
    """F(t) = g(phi(a-(t))) / g(a-(t)), evaluated through ln|g|."""

    def __init__(self, maps: ReflectionMaps, g: CatalogFn):
        self.maps = maps
        self.g = g
        self.spec = f"designed({g.spec})"

    def _sign(self, x, log_abs):
        # a value that underflowed to 0 still has a finite log and keeps sign +1
        with np.errstate(invalid="ignore", over="ignore"):
            s = np.sign(self.g(x))
        return np.where((s == 0) & np.isfinite(log_abs), 1.0, s)

    def __call__(self, t):
        a = self.maps.alpha_minus.forward(np.asarray(t, dtype=float))
        b = self.maps.phi(a)
        la, lb = self.g.log_abs(a), self.g.log_abs(b)
        sign = self._sign(b, lb) * self._sign(a, la)
        with np.errstate(invalid="ignore"):
            out = sign * np.exp(lb - la)
        return np.where(np.isnan(out), 0.0, out)


def design_feedback(sys: System, g: CatalogFn, n_check: int = 2000) -> FeedbackSpec:
    """
    Feedback whose decay is exactly g: F = g(phi o a-) / g(a-), so that
    psi_n(tau) = g(phi^(n+1)(tau)) / g(tau).
    """
    maps = sys.maps
    t = np.linspace(0.0, maps.horizon, n_check + 1)
    a = maps.alpha_minus.forward(t)
    try:
        b = maps.phi(a)
    except HorizonExceeded as exc:
        raise PreconditionError("phi o a- leaves the horizon; design needs it on [0, horizon]") from exc
    for pts in (a, b):
        with np.errstate(divide="ignore"):
            vanishing = np.any(np.asarray(g.log_abs(pts)) == -np.inf)
        if vanishing:
            raise PreconditionError(f"rate {g.spec} vanishes on the needed range")
    return FeedbackSpec.from_reflection(DesignedReflection(maps, g), label=f"designed({g.spec})")
