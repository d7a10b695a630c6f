"""Command-line front end: ``trilab {run,sweep,fit,verify,oracle}``.

Exit codes: 0 success, 1 invariant failure / envelope violation / incomplete
data, 2 invalid arguments.  Values come from built-in defaults, then a JSON
config file (``--config``, flat keys named like the flags; a checkpoint CSV
whose first line is ``# {json}`` also works), then explicit flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import comb
from pathlib import Path

from . import __version__
from . import harness
from . import process_engine as pe
from .analytics.checkpoint import SamplingPlan
from .analytics.formulas import KINDS, PAPER_PARAMS, ParamSet
from .graph_core import recount_codegrees
from .triangle_index import IndexCorruption, total_triangles

DEFAULTS = {
    "n": None,
    "seed": 0,
    "dp": 0.01,
    "alpha": float(PAPER_PARAMS.alpha),
    "beta": float(PAPER_PARAMS.beta),
    "kappa": float(PAPER_PARAMS.kappa),
    "mu": float(PAPER_PARAMS.mu),
    "gamma": float(PAPER_PARAMS.gamma),
    "pairs": 2000,
    "triples": 2000,
    "t_vertices": None,
    "out": None,
    "jobs": 1,
    "seeds": 5,
    "seed_offset": 0,
    "p_floor": "desk",
}
SWEEP_N = [250, 500, 1000, 2000, 4000]


class UsageError(Exception):
    pass


def _load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if text.startswith("# "):
        text = text.splitlines()[0][2:]
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return cfg


def _effective(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_config(args.config))
    for k, v in vars(args).items():
        if v is not None and k not in ("cmd", "config", "func"):
            cfg[k] = v
    return cfg


def _params(cfg) -> ParamSet:
    try:
        return ParamSet(*(float(cfg[k]) for k in ("alpha", "beta", "kappa", "mu", "gamma")))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _plan(cfg) -> SamplingPlan:
    if int(cfg["pairs"]) < 0 or int(cfg["triples"]) < 0:
        raise UsageError("--pairs/--triples must be >= 0")
    tv = cfg.get("t_vertices")
    return SamplingPlan(int(cfg["pairs"]), int(cfg["triples"]), None if tv is None else int(tv))


def _dp(cfg) -> float:
    dp = float(cfg["dp"])
    if not 0 < dp < 1:
        raise UsageError("--dp must lie in (0, 1)")
    return dp


def _policy(value):
    if value in ("desk", "auto", "paper"):
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"--p-floor must be desk, auto, paper or a number, got {value!r}")


def _dir(cfg, positional=None) -> Path:
    d = positional or cfg.get("out") or os.environ.get("TRILAB_OUT")
    if not d:
        raise UsageError("no directory given (pass one, use --out, or set TRILAB_OUT)")
    return Path(d)


def cmd_run(args) -> int:
    cfg = _effective(args)
    n = cfg["n"]
    if isinstance(n, list) or n is None or int(n) < 3:
        raise UsageError("run needs a single --n >= 3")
    n, seed = int(n), int(cfg["seed"])
    params, plan, dp = _params(cfg), _plan(cfg), _dp(cfg)
    want_csv = args.out is not None or args.csv is not None
    try:
        if want_csv:
            summary, text = harness.run_one(n, seed, dp, params, plan)
            path = Path(args.csv) if args.csv else Path(args.out) / harness.csv_name(n, seed)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            state = None
        else:
            state = pe.new_state(n, seed)
            summary = pe.run_to_completion(state)
    except IndexCorruption as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 1
    ok = 3 * summary.M + summary.final_edges == comb(n, 2)
    if summary.checkpoints:
        ok = ok and summary.checkpoints[-1].Q == 0
    if state is not None:
        g = state.graph
        ok = ok and total_triangles(state.index) == 0 and (recount_codegrees(g) == g.cd).all()
        ok = ok and not (g.cd[g.present.astype(bool)] > 0).any()
    print(f"n={n} seed={seed}")
    print(f"M={summary.M}")
    print(f"final_edges={summary.final_edges}")
    print(f"wall_ms={summary.wall_ms:.1f}", file=sys.stderr)
    if not ok:
        print("invariant failure: terminal state inconsistent", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    cfg = _effective(args)
    n_list = cfg["n"] if cfg["n"] is not None else SWEEP_N
    if not isinstance(n_list, list):
        n_list = [n_list]
    try:
        config = harness.SweepConfig(
            n_list=tuple(sorted(int(n) for n in n_list)), seeds_per_n=int(cfg["seeds"]),
            params=_params(cfg), dp=_dp(cfg), plan=_plan(cfg), p_floor=_policy(cfg["p_floor"]),
            out=_dir(cfg), jobs=int(cfg["jobs"]), seed_offset=int(cfg["seed_offset"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = harness.run_sweep(config)
    for r in report["runs"]:
        print(f"n={r['n']:>6} seed={r['seed']:>3} M={r['M']:>9} final_edges={r['final_edges']:>7}")
    for r in report["failures"]:
        print(f"FAILED n={r['n']} seed={r['seed']}: {r['error']}")
    print(f"wrote {len(report['runs'])} run(s) to {config.out}")
    return 1 if report["failures"] else 0


def _check_complete(d: Path) -> int:
    if not d.is_dir():
        raise UsageError(f"{d} is not a directory")
    problems = harness.find_incomplete(d)
    for p in problems:
        print(f"incomplete: {p}")
    return 1 if problems else 0


def cmd_fit(args) -> int:
    d = _dir(_effective(args), args.dir)
    if _check_complete(d):
        return 1
    try:
        fit = harness.fit_exponent(harness.load_summaries(d))
    except ValueError as exc:
        print(f"fit failed: {exc}")
        return 1
    for n, (mean, std) in fit.per_n.items():
        print(f"n={n:>6}  mean ln(final_edges)={mean:.6f}  std={std:.6f}")
    print(f"slope={fit.slope:.6f}")
    print(f"intercept={fit.intercept:.6f}")
    print(f"r2={fit.r2:.6f}")
    return 0


def cmd_verify(args) -> int:
    cfg = _effective(args)
    d = _dir(cfg, args.dir)
    if _check_complete(d):
        return 1
    files = sorted(d.glob("checkpoints_n*_s*.csv"))
    if not files:
        print(f"no checkpoint files in {d}")
        return 1
    try:
        report = harness.violation_report(files, _params(cfg), _policy(cfg["p_floor"]))
    except harness.SchemaError as exc:
        print(f"schema error: {exc}")
        return 1
    print("n seed window " + " ".join(f"viol_{k}" for k in KINDS) + " "
          + " ".join(f"max_{k}" for k in KINDS))
    for r in report.runs:
        tag = "  VACUOUS" if r.vacuous else ""
        print(f"{r.n} {r.seed} {r.window} " + " ".join(str(r.counts[k]) for k in KINDS) + " "
              + " ".join(f"{r.max_dev[k]:.4f}" for k in KINDS) + tag)
    print(f"violations={report.total_violations} vacuous_runs={len(report.vacuous_runs)}")
    return 0 if report.passed else 1


def cmd_oracle(args) -> int:
    from .analytics.oracles import oracle_sweep

    if args.max_n < 3 or args.depth < 0:
        raise UsageError("--max-n must be >= 3 and --depth >= 0")
    checked, failures = oracle_sweep(args.max_n, args.depth, min_n=min(4, args.max_n))
    for f in failures[:50]:
        print(f"MISMATCH {f}")
    print(f"checked {checked} graph(s)")
    if failures:
        print(f"{len(failures)} mismatch(es)")
        return 1
    print("all identities exact")
    return 0


def _add_common(p, *, n_multi=False):
    if n_multi:
        p.add_argument("--n", type=int, nargs="+", help="vertex counts (ascending)")
    else:
        p.add_argument("--n", type=int, help="number of vertices")
    p.add_argument("--dp", type=float, help="checkpoint spacing in p (default 0.01)")
    for name in ("alpha", "beta", "kappa", "mu", "gamma"):
        p.add_argument(f"--{name}", type=float, help=f"envelope constant {name}")
    p.add_argument("--pairs", type=int, help="sampled ordered pairs for R (default 2000)")
    p.add_argument("--triples", type=int, help="sampled triples for Y_uvw (default 2000)")
    p.add_argument("--out", help="output directory (fallback: $TRILAB_OUT)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--config", help="JSON config file with flat keys named like the flags")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trilab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"trilab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="one run from K_n to a triangle-free graph")
    _add_common(p)
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--csv", help="write the checkpoint CSV to this path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="seed sweep over a grid of n")
    _add_common(p, n_multi=True)
    p.add_argument("--seeds", type=int, help="seeds per n (default 5)")
    p.add_argument("--seed-offset", type=int, help="first seed (default 0)")
    p.add_argument("--p-floor", help="desk | auto | paper | number (default desk)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="terminal edge-count exponent of a finished sweep")
    p.add_argument("dir", nargs="?", help="sweep directory")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="envelope violation report of a finished sweep")
    p.add_argument("dir", nargs="?", help="sweep directory")
    _add_common(p)
    p.add_argument("--p-floor", help="desk | auto | paper | number (default desk)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact drift oracles and identities on small graphs")
    p.add_argument("--max-n", type=int, default=6, help="largest n (default 6)")
    p.add_argument("--depth", type=int, default=3, help="process steps explored (default 3)")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"trilab {args.cmd}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
