"""Command-line front end: ``delaydiff {run,sweep,compare,bode,check-gains}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, DelayDiffError, InvalidInputError
from .frequency import bode_grid
from .gains import verify_hurwitz
from .harness.analysis import compare, run, sweep_delta
from .harness.emit import FIGURE_GROUPS, emit
from .harness.scenario import load_scenario
from .integrator import write_csv


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_run(args) -> int:
    scn = load_scenario(args.scenario)
    result = run(scn)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit(result.trace, out / f"{scn.name}_trace.csv", "csv")
    if result.report.errors:
        emit(result.report, out / f"{scn.name}_report.json", "json")
    group = "noisy" if scn.signal.noise is not None else scn.kind
    for fig in FIGURE_GROUPS[group]:
        emit(result.trace, out / f"{scn.name}_{fig}.csv", fig, scenario=scn)
    for (i, label), stat in sorted(result.report.errors.items()):
        if i < scn.n:
            print(f"x{i} {label:14s} sup={stat.sup:.6g} rms={stat.rms:.6g}")
    return 0


def cmd_sweep(args) -> int:
    base = load_scenario(args.base)
    estimates, table = sweep_delta(base, _floats(args.deltas), workers=args.workers)
    doc = {
        "deltas": sorted(table),
        "sup_errors": {f"x{e.i}_s2": [table[d][e.i - 1] for d in sorted(table)] for e in estimates},
        "orders": [
            {"i": e.i, "slope": e.slope, "r_squared": e.r_squared, "expected": e.expected} for e in estimates
        ],
    }
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_compare(args) -> int:
    table = compare(load_scenario(args.baseline), load_scenario(args.two_step))
    print(json.dumps(table.to_dict(), indent=2))
    return 0


def cmd_bode(args) -> int:
    scn = load_scenario(args.spec)
    d = scn.differentiator
    if not hasattr(d.schedule, "eps"):
        # the transfer functions describe the steady regime after the ramp
        eps = 1.0 / d.schedule.peak_rate
    else:
        eps = d.schedule.eps
    omegas = np.logspace(np.log10(args.wmin), np.log10(args.wmax), args.points)
    header, cols = ["omega"], [omegas]
    for i in (int(v) for v in _floats(args.outputs)):
        mag, phase = bode_grid(i, omegas, d.k, eps, d.delta_eff, delay=d.delta)
        header += [f"mag_{i}", f"phase_deg_{i}"]
        cols += [mag, phase]
    if args.out:
        write_csv(args.out, header, np.column_stack(cols))
    else:
        write_csv(sys.stdout, header, np.column_stack(cols))
    return 0


def cmd_check_gains(args) -> int:
    check = verify_hurwitz(_floats(args.k))
    roots = [[float(r.real), float(r.imag)] for r in check.roots]
    print(json.dumps({"hurwitz": check.stable, "roots": roots}))
    if not check.stable:
        raise ConfigError("characteristic polynomial is not Hurwitz", field="k")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delaydiff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a scenario and write trace, report and figure data")
    p.add_argument("scenario", help="scenario JSON path or golden name (fig1-3, fig4-6, fig7-10, sweep-base)")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="empirical error order of x_{i,2} in the delay")
    p.add_argument("--base", required=True)
    p.add_argument("--deltas", default="0.05,0.1,0.2,0.4")
    p.add_argument("--workers", type=int, default=None, help="defaults to $DELAYDIFF_WORKERS or 1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="baseline versus two-step errors against the present signal")
    p.add_argument("baseline")
    p.add_argument("two_step")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bode", help="frequency response of the second-stage outputs")
    p.add_argument("--spec", required=True)
    p.add_argument("--outputs", default="1,2,3")
    p.add_argument("--wmin", type=float, default=0.01)
    p.add_argument("--wmax", type=float, default=1000.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bode)

    p = sub.add_parser("check-gains", help="Hurwitz test of a gain vector")
    p.add_argument("--k", required=True)
    p.set_defaults(func=cmd_check_gains)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DelayDiffError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "field", None):
            err["field"] = exc.field
        print(json.dumps(err), file=sys.stderr)
        return 2 if isinstance(exc, (ConfigError, InvalidInputError)) else 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
