"""
Command-line front end.

    charwave check      SCENARIO            validation and critical times
    charwave solve      SCENARIO            t,x,p,q,y,y_t on a space-time grid
    charwave control    SCENARIO            t,u,v of the control plus verification
    charwave stability  SCENARIO            tau,n,psi,ln_psi_over_phi_n plus verdict
    charwave trace      SCENARIO --point t,x   event_index,time,side,factor
    charwave regions    SCENARIO            family,index,t,x region boundary segments

Summaries are written as leading ``# key=value`` lines. Exit codes: 0 ok,
2 invalid input, 3 horizon exceeded, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import os
import io
import math
import sys
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import control as ctl
from .catalog import parse_expr
from .errors import CharwaveError, HorizonExceeded, NonConvergence
from .maps import classify_arrays, min_control_time, secondary_time
from .oracle import trace
from .riemann import System, energy, eval_pq, reconstruct
from .scenario import Scenario, parse_scenario
from .stability import analyze

EXIT_OK, EXIT_INVALID, EXIT_HORIZON, EXIT_NONCONVERGENCE = 0, 2, 3, 4


def fmt(value) -> str:
    """Deterministic number formatting: 17 significant digits, '.' separator."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        text = format(v, ".17g")
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    return str(value)


def write_table(out: TextIO, summary: dict, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    for key, value in summary.items():
        out.write(f"# {key}={fmt(value)}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def _critical_times(sys_: System) -> dict:
    out = {}
    for key, fn in (("T*", min_control_time), ("T**", secondary_time)):
        try:
            out[key] = fn(sys_.maps)
        except HorizonExceeded:
            out[key] = "beyond-horizon"
    try:
        out["phi(0)"] = float(sys_.maps.phi(0.0))
    except HorizonExceeded:
        out["phi(0)"] = "beyond-horizon"
    return out


def cmd_check(sc: Scenario, args, out: TextIO) -> int:
    rep = sc.pair.report
    info = {
        "valid": rep.ok,
        "derivative_bound": rep.derivative_bound,
        "alpha_derivative_bound": rep.alpha_bound,
        "beta_derivative_bound": rep.beta_bound,
        "min_gap": rep.min_gap,
        "min_gap_time": rep.min_gap_time,
        "interpolation": rep.interpolation,
        "horizon": sc.pair.horizon,
    }
    info.update(_critical_times(sc.system))
    maps = sc.system.maps
    info["increasing_ok"] = maps.increasing_ok
    info["degenerate_regions"] = ";".join(f"{r.family}{r.index}" for r in maps.degenerate) or "none"
    info["p_regions_cached"] = maps.p_breaks.size
    info["q_regions_cached"] = maps.q_breaks.size
    info["feedback"] = sc.system.feedback.label
    info["control"] = sc.control_mode
    if args.seed is not None:
        info.update(_self_check(sc, args.seed))
    for key, value in info.items():
        out.write(f"{key}={fmt(value)}\n")
    return EXIT_OK


def _self_check(sc: Scenario, seed: int, n: int = 1000) -> dict:
    """Randomized round-trip and tiling checks."""
    rng = np.random.default_rng(seed)
    pair, maps = sc.pair, sc.system.maps
    t = rng.uniform(0.0, pair.horizon, n)
    worst = 0.0
    for m in (maps.alpha_plus, maps.alpha_minus, maps.beta_plus, maps.beta_minus):
        s = m.forward(t)
        worst = max(worst, float(np.max(np.abs(m.forward(m.inverse(s)) - s))))
    a, b = pair.alpha.value(t), pair.beta.value(t)
    x = a + rng.uniform(0.0, 1.0, n) * (b - a)
    ip, iq = classify_arrays(maps, t, x)
    ok = True
    for idx, coord, bp in ((ip, t - x, maps.p_breaks), (iq, t + x, maps.q_breaks)):
        lo = np.where(idx == 0, -np.inf, bp[np.maximum(idx - 1, 0)])
        hi = np.where(idx < bp.size, bp[np.minimum(idx, bp.size - 1)], np.inf)
        ok &= bool(np.all((coord + maps.snap >= lo) & (coord + maps.snap < hi)))
    return {"seed": seed, "roundtrip_max_error": worst, "tiling_ok": ok}


def cmd_solve(sc: Scenario, args, out: TextIO) -> int:
    n_x = args.nx or sc.model.grid.n_x
    n_t = args.nt or sc.model.grid.n_t
    run = sc.system
    if sc.control_mode != "none":
        run = ctl.controlled(run, _control_signal(sc))
    times = np.linspace(0.0, sc.pair.horizon, n_t)
    summary = {"horizon": sc.pair.horizon, "n_x": n_x, "n_t": n_t, "control": sc.control_mode,
               "feedback": run.feedback.label}
    samples = [reconstruct(run, float(t), n_x) for t in times]
    for t, smp in zip(times, samples):
        summary[f"energy(t={fmt(float(t))})"] = energy(run, float(t), max(n_x, 16))
    write_table(out, summary, ("t", "x", "p", "q", "y", "y_t"), (r for s in samples for r in s.rows()))
    return EXIT_OK


def _control_signal(sc: Scenario) -> ctl.ControlSignal:
    if sc.control_mode == "target":
        return ctl.target_control_v(sc.system, sc.target)
    return ctl.null_control_v(sc.system)


def cmd_control(sc: Scenario, args, out: TextIO) -> int:
    sys_ = sc.system
    n_x = args.nx or max(sc.model.grid.n_x, 1024)
    v = _control_signal(sc)
    u = ctl._primitive(v, float(sys_.initial.y0(0.0)), sc.model.tolerances.quadrature)
    summary = {"mode": "target" if sc.control_mode == "target" else "null", "case": v.case}
    summary["T*"] = v.support_end
    summary["breakpoints"] = ";".join(fmt(b) for b in v.breakpoints)
    for i, d in enumerate(v.diagnostics):
        summary[f"diagnostic_{i}"] = d
    if sc.control_mode == "target":
        summary["target_max_error"] = ctl.verify_target(sys_, v, sc.target, n_x)
    else:
        chk = ctl.verify_null(sys_, v, n_x)
        summary["initial_energy"] = chk.initial_energy
        summary["terminal_energy"] = chk.terminal_energy
        summary["relative_energy"] = chk.relative
        summary["max_abs_y"] = chk.max_abs_y
        summary["max_abs_y_t"] = chk.max_abs_yt
    n = args.nt or 201
    times = np.linspace(0.0, sc.pair.horizon, n)
    uu, vv = u(times), v(times)
    write_table(out, summary, ("t", "u", "v"), zip(times, uu, vv))
    return EXIT_OK


def cmd_stability(sc: Scenario, args, out: TextIO) -> int:
    cands = [parse_expr(r) for r in (args.rate or [])]
    if sc.rate is not None:
        cands.insert(0, sc.rate)
    report, verdict = analyze(sc.system, args.nmax, 256, cands)
    summary = {
        "classification": report.classification,
        "omega": report.omega_estimate,
        "omega_status": report.omega_status,
        "increasing_ok": report.increasing_ok,
        "N": report.N,
        "n_tau": report.tau_grid.size,
    }
    if verdict.extinction_time is not None:
        summary["extinction_time"] = verdict.extinction_time
    if verdict.rate is not None:
        c = verdict.constants
        summary["rate"] = verdict.rate
        summary["constant_min"] = float(np.nanmin(c))
        summary["constant_max"] = float(np.nanmax(c))
    write_table(out, summary, ("tau", "n", "psi", "ln_psi_over_phi_n"), report.rows())
    return EXIT_OK


def cmd_trace(sc: Scenario, args, out: TextIO) -> int:
    if not args.point:
        raise ValueError("trace needs --point t,x")
    try:
        t, x = (float(v) for v in args.point.split(","))
    except ValueError as exc:
        raise ValueError(f"--point expects t,x, got {args.point!r}") from exc
    run = sc.system
    if sc.control_mode != "none":
        run = ctl.controlled(run, _control_signal(sc))
    tr = trace(run, t, x, args.invariant)
    p, q = eval_pq(run, t, x)
    summary = {
        "point": f"{fmt(t)};{fmt(x)}",
        "invariant": args.invariant,
        "value": tr.value,
        "closed_form": p if args.invariant == "p" else q,
        "events": len(tr.events),
        "terminal": tr.terminal if tr.terminal is not None else "absorbed",
        "terminal_invariant": tr.terminal_invariant or "none",
    }
    rows = ((i, e.time, e.side, e.factor) for i, e in enumerate(tr.events))
    write_table(out, summary, ("event_index", "time", "side", "factor"), rows)
    return EXIT_OK


def _segment(m_start, m_end, coord: float, sign: int, horizon: float):
    """Endpoints of the line t - sign*x = coord between two boundary curves, clipped at the horizon."""
    t0 = float(m_start.inverse(coord))
    if t0 > horizon:
        return None
    try:
        t1 = float(m_end.inverse(coord))
    except HorizonExceeded:
        t1 = math.inf
    t1 = min(t1, horizon)
    return (t0, sign * (t0 - coord)), (t1, sign * (t1 - coord))


def cmd_regions(sc: Scenario, args, out: TextIO) -> int:
    maps = sc.system.maps
    h = sc.pair.horizon
    rows = []
    # boundary k is the lower edge of region k
    for k, e in enumerate(maps.p_breaks, start=1):
        seg = _segment(maps.alpha_minus, maps.beta_minus, float(e), 1, h)
        if seg is None:
            break
        rows += [("P", k, *seg[0]), ("P", k, *seg[1])]
    for k, c in enumerate(maps.q_breaks, start=1):
        seg = _segment(maps.beta_plus, maps.alpha_plus, float(c), -1, h)
        if seg is None:
            break
        rows += [("Q", k, *seg[0]), ("Q", k, *seg[1])]
    summary = {"horizon": h, "p_boundaries": len([r for r in rows if r[0] == "P"]) // 2,
               "q_boundaries": len([r for r in rows if r[0] == "Q"]) // 2}
    write_table(out, summary, ("family", "index", "t", "x"), rows)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "control": cmd_control,
    "stability": cmd_stability,
    "trace": cmd_trace,
    "regions": cmd_regions,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charwave", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("scenario", help="scenario file (JSON)")
    parser.add_argument("--out", help="write CSV here instead of stdout")
    parser.add_argument("--nx", type=int, help="spatial grid intervals")
    parser.add_argument("--nt", type=int, help="number of output times / control samples")
    parser.add_argument("--nmax", type=int, default=400, help="reflection cycles for stability")
    parser.add_argument("--point", help="t,x for trace")
    parser.add_argument("--invariant", choices=("p", "q"), default="p", help="invariant to trace")
    parser.add_argument("--rate", action="append", help="candidate decay rate (repeatable)")
    parser.add_argument("--seed", type=int, help="seed for randomized self-checks in check")
    return parser


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    if args.nx is not None and args.nx < 16:
        stderr.write("error: --nx must be at least 16\n")
        return EXIT_INVALID
    buffer = io.StringIO()
    try:
        sc = parse_scenario(args.scenario)
        code = COMMANDS[args.command](sc, args, buffer)
    except HorizonExceeded as exc:
        stderr.write(f"horizon exceeded: {exc}\n")
        return EXIT_HORIZON
    except NonConvergence as exc:
        stderr.write(f"no convergence: {exc}\n")
        return EXIT_NONCONVERGENCE
    except (CharwaveError, ValueError) as exc:
        stderr.write(f"invalid: {exc}\n")
        report = getattr(exc, "report", None)
        if report is not None:
            for key, ok in report.checks.items():
                stderr.write(f"check {key}={fmt(ok)}\n")
            stderr.write(f"derivative_bound={fmt(report.derivative_bound)}\n")
            stderr.write(f"min_gap={fmt(report.min_gap)}\n")
        return EXIT_INVALID
    text = buffer.getvalue()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
