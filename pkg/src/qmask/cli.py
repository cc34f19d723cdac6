"""Command-line experiment harness.

Exit status: 0 on success, 1 when an inequality or invariant check fails,
2 on configuration errors.  Setting ``QMASK_OUTPUT_DIR`` makes every
command write its artifact there when ``--out`` is not given.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import lemma1_solve, theoretical_bound
from .campaigns import (
    RESIDUAL_COLUMNS,
    WITNESS_COLUMNS,
    exact_masker_report,
    residual_campaign,
    witness_campaign,
)
from .errors import QmaskError
from .optimizer import ProbabilisticWitnessObjective, WitnessObjective, minimize
from .serialization import dumps

OUTPUT_DIR_ENV = "QMASK_OUTPUT_DIR"
EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _record(command: str, config: dict, result: dict, wall_time: float, seed=None) -> dict:
    return {
        "tool": "qmask",
        "tool_version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "wall_time": wall_time,
        "result": result,
    }


def _resolve_out(args, default_name: str) -> Path | None:
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / default_name
    return None


def _write_csv(path: Path, columns, rows, header: dict) -> None:
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_csv(row[c]) for c in columns])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def _fmt_csv(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _emit(args, record: dict, lines: list[tuple[str, object]]) -> None:
    if args.json:
        sys.stdout.write(dumps(record))
    else:
        for key, val in lines:
            print(f"{key}: {_fmt(val)}")


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
    if args.seed < 0 or args.seed >= 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    return args.seed


def _check_dims(*dims: int, minimum: int = 2) -> None:
    if any(d < minimum for d in dims):
        raise ConfigError(f"dimensions must be >= {minimum}")


def cmd_bound(args) -> int:
    _check_dims(args.r, args.s)
    b = theoretical_bound(args.r, args.s)
    result = b.to_dict()
    record = _record("bound", {"r": args.r, "s": args.s}, result, 0.0)
    out = _resolve_out(args, f"bound-r{args.r}-s{args.s}.json")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(dumps(record))
    _emit(
        args,
        record,
        [
            ("t", b.t),
            ("delta_star", b.delta_star),
            ("epsilon_star", b.epsilon_star),
            ("max_fidelity", b.max_fidelity),
            ("epsilon_star_via_fidelity", b.epsilon_star_via_fidelity),
            ("delta_residual", b.delta_residual),
            ("epsilon_residual", b.epsilon_residual),
        ],
    )
    return EXIT_OK


def _campaign_output(args, command, summary, rows, columns, config) -> int:
    record = _record(command, config, summary.to_dict(), summary.wall_time, args.seed)
    out = _resolve_out(args, f"{command}-seed{args.seed}.csv")
    if out:
        _write_csv(out, columns, rows, {"tool": "qmask", "tool_version": __version__, "command": command,
                                        "config": config, "seed": args.seed})
    lines = [("seed", args.seed), ("trials", summary.trials), ("violations", summary.violations)]
    if summary.min_slack is not None:
        lines += [("min_slack", summary.min_slack), ("min_delta", summary.min_delta)]
    lines += sorted(summary.extra.items())
    lines.append(("wall_time", summary.wall_time))
    _emit(args, record, lines)
    failed = summary.violations > 0 or summary.extra.get("chain_violations", 0) > 0
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_witness(args) -> int:
    seed = _seed(args)
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    _check_dims(*args.r, *args.s)
    dims = list(itertools.product(args.r, args.s))
    tol = 1e-9 if args.tol is None else args.tol
    summary, rows = witness_campaign(dims, args.trials, seed, args.mode, tol, args.workers)
    config = {"dims": [list(d) for d in dims], "trials": args.trials, "mode": args.mode, "tol": tol}
    return _campaign_output(args, f"witness-{args.mode}", summary, rows, WITNESS_COLUMNS, config)


def cmd_residual(args) -> int:
    seed = _seed(args)
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    tol = 1e-10 if args.tol is None else args.tol
    summary, rows = residual_campaign(args.trials, seed, tol=tol, workers=args.workers)
    config = {"trials": args.trials, "tol": tol, "collinear_tol": 1e-6}
    return _campaign_output(args, "residual", summary, rows, RESIDUAL_COLUMNS, config)


def cmd_exact_masker(args) -> int:
    seed = _seed(args)
    _check_dims(args.d)
    if args.samples < 2:
        raise ConfigError("--samples must be >= 2")
    tol = 1e-10 if args.tol is None else args.tol
    start = time.perf_counter()
    rep = exact_masker_report(args.d, args.samples, seed, tol)
    wall = time.perf_counter() - start
    record = _record("exact-masker", {"d": args.d, "samples": args.samples, "tol": tol}, rep, wall, seed)
    out = _resolve_out(args, f"exact-masker-d{args.d}-seed{seed}.json")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(dumps(record))
    keys = ["seed", "max_deviation_a", "max_deviation_b", "min_fidelity_a", "min_fidelity_b", "exact",
            "probe_deviation_a", "probe_deviation_b"]
    _emit(args, record, [(k, rep[k]) for k in keys])
    return EXIT_OK if rep["exact"] else EXIT_VIOLATION


def cmd_lemma1(args) -> int:
    try:
        sol = lemma1_solve(args.overlap, args.theta, args.p1, args.p2)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = {
        "x": sol.x,
        "y": sol.y,
        "overlap_r": sol.overlap_r,
        "theta": sol.theta,
        "p1": sol.p1,
        "p2": sol.p2,
        "ellipse_residual": sol.ellipse_residual,
        "line_residual": sol.line_residual,
    }
    record = _record("lemma1", {k: result[k] for k in ("overlap_r", "theta", "p1", "p2")}, result, 0.0)
    out = _resolve_out(args, "lemma1.json")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(dumps(record))
    _emit(args, record, [(k, result[k]) for k in ("x", "y", "ellipse_residual", "line_residual")])
    ok = sol.ellipse_residual <= 1e-12 and sol.line_residual <= 1e-12
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_optimize(args) -> int:
    seed = _seed(args)
    _check_dims(args.r, args.s)
    if args.restarts < 1:
        raise ConfigError("--restarts must be >= 1")
    objective = (WitnessObjective if args.mode == "unitary" else ProbabilisticWitnessObjective)(args.r, args.s)
    if args.evals < 10 * objective.n_params:
        raise ConfigError(f"--evals must be >= {10 * objective.n_params} for these dims")
    tol = 1e-12 if args.tol is None else args.tol
    run = minimize(
        objective,
        restarts=args.restarts,
        evals_cap=args.evals,
        seed=seed,
        tolerance=tol,
        start_at_identity=args.mode == "unitary",
        workers=args.workers,
    )
    config = {"r": args.r, "s": args.s, "restarts": args.restarts, "evals": args.evals, "mode": args.mode, "tol": tol}
    record = _record("optimize", config, run.to_dict(include_timing=False), run.wall_time, seed)
    out = _resolve_out(args, f"optimize-r{args.r}-s{args.s}-seed{seed}.json")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(dumps(record))
    if args.trace_csv:
        _write_csv(Path(args.trace_csv), ("restart", "eval_index", "best_so_far"),
                   [dict(zip(("restart", "eval_index", "best_so_far"), row)) for row in run.trace_rows()],
                   {"tool": "qmask", "tool_version": __version__, "command": "optimize", "config": config,
                    "seed": seed})
    _emit(args, record, [("seed", seed), ("best_delta", run.best_delta), ("delta_star", run.delta_star),
                         ("gap_to_bound", run.gap_to_bound), ("best_restart", run.best_restart),
                         ("wall_time", run.wall_time)])
    return EXIT_VIOLATION if run.gap_to_bound < -1e-9 else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (drawn from entropy if omitted)")
    common.add_argument("--json", action="store_true", help="print the full JSON record")
    common.add_argument("--out", default=None, help="write the artifact to this path")
    common.add_argument("--tol", type=float, default=None, help="override the command's tolerance")

    parser = argparse.ArgumentParser(prog="qmask", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qmask {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common], help="theoretical epsilon/delta lower bound")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("witness", parents=[common], help="Monte Carlo check of the witness inequality")
    p.add_argument("--r", type=int, nargs="+", default=[2])
    p.add_argument("--s", type=int, nargs="+", default=[2])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mode", choices=("unitary", "probabilistic"), default="unitary")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("residual", parents=[common], help="probabilistic-masking residuals on co-purifying pairs")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("exact-masker", parents=[common], help="check the generalized-CNOT phase masker")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_exact_masker)

    p = sub.add_parser("lemma1", parents=[common], help="intersect the ellipse with the balancing line")
    p.add_argument("--overlap", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("optimize", parents=[common], help="search for a masker with small witness delta")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--evals", type=int, default=20000)
    p.add_argument("--mode", choices=("unitary", "probabilistic"), default="unitary")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trace-csv", default=None, help="write (restart, eval_index, best_so_far) rows here")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, QmaskError, ValueError) as exc:
        print(f"qmask {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
