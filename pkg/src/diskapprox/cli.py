"""Command line entry point (``python -m diskapprox`` or ``diskapprox``).

Exit codes: 0 success, 1 scenario or argument errors, 2 failed verdicts,
3 precision exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .approx import predict_structure
from .errors import EscalationExhausted, PrecisionUnreachable, ScenarioError
from .moments import alpha_table, verify_P_lower_bound
from .runner import (EXIT_OK, EXIT_PARSE, EXIT_PRECISION, EXIT_VERDICT, _annihilator, _clean,
                     _json_default, _witnesses, RunReport, run_scenario, sweep, SWEEP_COLUMNS)
from .scenario import load_scenario

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _globals(parser, suppress):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--precision", type=int, default=d, help="working precision in bits (>= 64)")
    parser.add_argument("--seed", type=int, default=d, help="seed for randomised audits")
    parser.add_argument("--out", default=d, help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS if suppress else "csv",
                        help="format of the summary printed to stdout")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="diskapprox", description="Weighted polynomial approximation experiments.")
    _globals(p, False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        s = sub.add_parser(name, help=help_)
        _globals(s, True)
        s.add_argument("scenario", help="scenario JSON file or bundled scenario name")
        return s

    add("run", "run every stage of a scenario and write its artifacts")
    s = add("sweep", "run a scenario over a parameter grid")
    s.add_argument("--grid", action="append", default=[], metavar="PATH=V1,V2",
                   help="dotted field path and comma-separated values (repeatable)")
    s.add_argument("--jobs", type=int, default=1, help="grid points run concurrently")
    s = add("moments", "radial moments and the P lower-bound check")
    s.add_argument("--N", type=int, default=None, help="largest moment index")
    s.add_argument("--x", type=float, nargs="*", default=None, help="grid for the P lower bound")
    s = add("witness", "build and verify the witness families")
    s.add_argument("--N", type=float, nargs="*", default=None, help="witness parameters")
    s = add("annihilate", "construct the annihilating tuple")
    s.add_argument("--N-max", type=int, default=None, dest="N_max")
    add("predict", "predicted structure of the polynomial closure")
    return p


def _parse_grid(items) -> dict:
    grid = {}
    for item in items:
        if "=" not in item:
            raise ScenarioError(f"grid entry {item!r} is not PATH=V1,V2", field="grid")
        key, vals = item.split("=", 1)
        out = []
        for tok in (v for v in vals.split(",") if v.strip()):
            try:
                out.append(json.loads(tok))
            except json.JSONDecodeError:
                out.append(tok.strip())
        grid[key.strip()] = out
    return grid


def _emit(obj, fmt, rows=None, header=None, stream=None):
    stream = stream or sys.stdout
    if fmt == "json" or rows is None:
        stream.write(json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default) + "\n")
    else:
        wr = csv.writer(stream, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)


def _out_dir(args, sc) -> Path:
    if args.out:
        return Path(args.out)
    return Path(sc.output) if sc.output else Path("runs") / sc.name


def _cmd_run(args, sc):
    rep = run_scenario(sc, _out_dir(args, sc))
    _emit(rep.as_dict(), args.format, [(k, "pass" if v else "fail") for k, v in sorted(rep.checks.items())],
          ["check", "result"])
    return rep.exit_code


def _cmd_sweep(args, sc):
    grid = _parse_grid(args.grid)
    rows = sweep(sc, grid, _out_dir(args, sc), jobs=args.jobs, precision=args.precision, seed=args.seed)
    keys = list(grid)
    _emit(rows, args.format, [[r.get(k) for k in keys + SWEEP_COLUMNS] for r in rows], keys + SWEEP_COLUMNS)
    failed = any(str(r.get("checks", "")).startswith("fail") for r in rows)
    return EXIT_VERDICT if failed else EXIT_OK


def _cmd_moments(args, sc):
    if sc.G is None:
        raise ScenarioError("scenario has no disk part", field="G")
    N = args.N if args.N is not None else ((sc.moments or {}).get("N") or 50)
    tab = alpha_table(sc.G, int(N), sc.precision)
    xs = args.x if args.x is not None else ((sc.moments or {}).get("P_grid") or [])
    pb = verify_P_lower_bound(sc.G, xs, sc.precision) if xs else None
    rows = [(n, float(v), float(e)) for n, v, e in tab.rows()]
    obj = {"G": sc.G.key(), "alpha": [{"n": n, "alpha": v, "error": e} for n, v, e in rows],
           "decreasing": tab.is_decreasing()}
    if pb is not None:
        obj["P_lower_bound"] = {"rows": pb.rows, "violations": pb.violations, "threshold": pb.threshold}
    if args.out:
        sc = sc.with_overrides()
        sc.moments = {"N": int(N), "P_grid": xs}
        run_scenario(sc, args.out, stages=["moments"])
    _emit(obj, args.format, rows, ["n", "alpha", "error"])
    ok = tab.is_decreasing() and (pb is None or pb.ok)
    return EXIT_OK if ok else EXIT_VERDICT


def _cmd_witness(args, sc):
    if sc.G is None or sc.w is None:
        raise ScenarioError("witness families need both G and w", field="witness")
    sc.witness = dict(sc.witness or {"N": [10, 100, 1000], "refine": 4})
    if args.N:
        sc.witness["N"] = args.N
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(sc.name, sc.precision, sc.seed)
    _witnesses(sc, out, rep)
    rows = [(w["N"], v["name"], v["passed"], v["value"], v["bound"]) for w in rep.witnesses for v in w["verdicts"]]
    rows += [(w["N"], "fidelity", w["fidelity_ok"], w["fidelity_error"], 1e-6) for w in rep.witnesses]
    _emit(rep.witnesses, args.format, rows, ["N", "condition", "passed", "value", "bound"])
    return rep.exit_code


def _cmd_annihilate(args, sc):
    from .sets import FULL_CIRCLE

    if sc.G is None:
        raise ScenarioError("an annihilator needs a disk part", field="G")
    sc.annihilator = dict(sc.annihilator or {"arc": FULL_CIRCLE, "N_max": 200, "boxes": 64, "resolution": 64})
    if args.N_max:
        sc.annihilator["N_max"] = args.N_max
    sc.N_list = []
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(sc.name, sc.precision, sc.seed)
    tup = _annihilator(sc, out, rep)
    if isinstance(tup, str):
        _emit(rep.annihilator, "json")
        return EXIT_OK
    data = json.loads((out / "annihilator.json").read_text())
    rows = [(r["n"], r["abs_h"], r["bound"], r["abs_F"], r["residual"]) for r in data["coefficients"]]
    _emit(data, args.format, rows, ["n", "abs_h", "bound", "abs_F", "residual"])
    return rep.exit_code


def _cmd_predict(args, sc):
    p = predict_structure(sc.measure).as_dict()
    _emit(p, args.format, sorted(p.items()), ["key", "value"])
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "moments": _cmd_moments, "witness": _cmd_witness,
             "annihilate": _cmd_annihilate, "predict": _cmd_predict}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        sc = load_scenario(args.scenario).with_overrides(args.precision, args.seed)
        return _COMMANDS[args.command](args, sc)
    except ScenarioError as e:
        print(f"diskapprox: scenario error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (EscalationExhausted, PrecisionUnreachable) as e:
        print(f"diskapprox: precision exhausted: {e}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
