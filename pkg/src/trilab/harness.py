"""Seed sweeps over a grid of ``n``, persistence, exponent fits and violation reports.

Output layout under the sweep directory::

    checkpoints_n{n}_s{seed}.csv   one row per checkpoint, columns CSV_COLUMNS
    sweep_summary.json             {"version", "config", "runs", "failures"}

Every CSV starts with a ``# {json}`` line echoing the flat run config, so the
file can be fed back to ``trilab run --config``.  Files are written under a
``.partial`` name and renamed when complete; leftovers of that kind, or
checkpoint files without a summary, mark an interrupted sweep.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import __version__
from . import process_engine as pe
from .analytics.checkpoint import CheckpointRecord, SamplingPlan, make_checkpoint_hook
from .analytics.formulas import KINDS, PAPER_PARAMS, ParamSet, p_floor

log = logging.getLogger(__name__)

__all__ = [
    "CSV_COLUMNS",
    "SUMMARY_NAME",
    "SweepConfig",
    "FitResult",
    "RunViolations",
    "ViolationReport",
    "SchemaError",
    "csv_name",
    "run_config",
    "run_one",
    "run_sweep",
    "fit_exponent",
    "load_summaries",
    "read_checkpoints",
    "violation_report",
    "find_incomplete",
]

CSV_COLUMNS = ("n", "seed", "i", "p", "Q", "dev_Q", "dev_Yu", "dev_Yuv", "dev_Tu", "dev_Ruv",
               "dev_Yuvw", "viol_mask", "gamma_hat", "phi")
_INT_COLUMNS = {"n", "seed", "i", "Q", "viol_mask"}
SUMMARY_NAME = "sweep_summary.json"
PARTIAL = ".partial"


class SchemaError(ValueError):
    """A checkpoint file does not have the expected layout."""


def csv_name(n: int, seed: int) -> str:
    return f"checkpoints_n{n}_s{seed}.csv"


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple[int, ...] = (250, 500, 1000, 2000, 4000)
    seeds_per_n: int = 5
    params: ParamSet = PAPER_PARAMS
    dp: float = 0.01
    plan: SamplingPlan = SamplingPlan()
    p_floor: object = "desk"
    out: Path = Path("sweep_out")
    jobs: int = 1
    seed_offset: int = 0

    def __post_init__(self):
        n_list = tuple(int(n) for n in self.n_list)
        object.__setattr__(self, "n_list", n_list)
        object.__setattr__(self, "out", Path(self.out))
        if not n_list or any(n < 3 for n in n_list):
            raise ValueError("n_list must be non-empty with every n >= 3")
        if list(n_list) != sorted(set(n_list)):
            raise ValueError("n_list must be strictly ascending")
        if self.seeds_per_n < 1:
            raise ValueError("seeds_per_n must be >= 1")
        if not 0 < self.dp < 1:
            raise ValueError("dp must lie in (0, 1)")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def seeds(self) -> range:
        return range(self.seed_offset, self.seed_offset + self.seeds_per_n)

    def echo(self) -> dict:
        """Flat, JSON-ready view using the CLI flag names."""
        return {
            "n": list(self.n_list),
            "seeds": self.seeds_per_n,
            "seed_offset": self.seed_offset,
            "dp": self.dp,
            **self.params.as_dict(),
            "pairs": self.plan.pairs,
            "triples": self.plan.triples,
            "t_vertices": self.plan.t_vertices,
            "p_floor": self.p_floor,
            "jobs": self.jobs,
        }


def run_config(n: int, seed: int, dp, params: ParamSet, plan: SamplingPlan) -> dict:
    """Flat config echoed in the header of a run's checkpoint file."""
    return {"n": n, "seed": seed, "dp": float(dp), **params.as_dict(), "pairs": plan.pairs,
            "triples": plan.triples, "t_vertices": plan.t_vertices, "version": __version__}


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _row(n: int, seed: int, rec: CheckpointRecord) -> list[str]:
    return [str(n), str(seed), str(rec.i), _fmt(rec.p), str(rec.Q),
            *(_fmt(rec.dev(k)) for k in KINDS), str(rec.viol_mask),
            _fmt(rec.gamma_hat), _fmt(rec.phi)]


def checkpoints_csv(n: int, seed: int, records: Iterable[CheckpointRecord], header: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(_row(n, seed, rec))
    return buf.getvalue()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + PARTIAL)
    tmp.write_text(text)
    os.replace(tmp, path)


def run_one(n: int, seed: int, dp=0.01, params: ParamSet = PAPER_PARAMS,
            plan: SamplingPlan = SamplingPlan(), out: Path | None = None,
            extra=None) -> tuple[pe.RunSummary, str]:
    """One full run with checkpoint measurements; returns the summary and the CSV text.

    If ``out`` is given the CSV is also written to ``out / csv_name(n, seed)``.
    """
    state = pe.new_state(n, seed)
    _, meas = pe.streams(seed)
    hook = make_checkpoint_hook(params, plan, meas, extra=extra)
    summary = pe.run_to_completion(state, pe.CheckpointGrid(dp), hook)
    text = checkpoints_csv(n, seed, summary.checkpoints, run_config(n, seed, dp, params, plan))
    if out is not None:
        _atomic_write(Path(out) / csv_name(n, seed), text)
    return summary, text


def _sweep_task(args):
    n, seed, dp, params, plan, out = args
    try:
        summary, _ = run_one(n, seed, dp, params, plan, out)
    except OSError as exc:
        return {"n": n, "seed": seed, "error": f"{type(exc).__name__}: {exc}"}
    return {"n": n, "seed": seed, "M": summary.M, "final_edges": summary.final_edges,
            "wall_ms": round(summary.wall_ms, 3)}


def run_sweep(config: SweepConfig) -> dict:
    """Run every ``(n, seed)`` in the config and persist CSVs plus the summary JSON.

    Runs are independent; with ``jobs > 1`` they go to a process pool,
    largest ``n`` first.  A run whose files cannot be written is listed under
    ``failures`` and the sweep continues.  Apart from ``wall_ms`` the outputs
    depend only on the config.
    """
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / SUMMARY_NAME
    if summary_path.exists():
        summary_path.unlink()
    tasks = [(n, s, config.dp, config.params, config.plan, out)
             for n in sorted(config.n_list, reverse=True) for s in config.seeds()]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = []
        for t in tasks:
            results.append(_sweep_task(t))
            log.info("finished n=%d seed=%d", t[0], t[1])
    results.sort(key=lambda r: (r["n"], r["seed"]))
    report = {
        "version": __version__,
        "config": config.echo(),
        "runs": [r for r in results if "error" not in r],
        "failures": [r for r in results if "error" in r],
    }
    _atomic_write(summary_path, json.dumps(report, indent=1, sort_keys=True) + "\n")
    return report


def find_incomplete(directory) -> list[str]:
    """Problems that mark ``directory`` as an interrupted or partial sweep (empty if complete)."""
    d = Path(directory)
    problems = [f"unfinished file {p.name}" for p in sorted(d.glob("*" + PARTIAL))]
    csvs = {p.name for p in d.glob("checkpoints_n*_s*.csv")}
    summary_path = d / SUMMARY_NAME
    if not summary_path.exists():
        if csvs:
            problems.append(f"{len(csvs)} checkpoint file(s) but no {SUMMARY_NAME}")
        return problems
    try:
        summary = json.loads(summary_path.read_text())
    except json.JSONDecodeError as exc:
        return problems + [f"unreadable {SUMMARY_NAME}: {exc}"]
    for r in summary.get("runs", []):
        if csv_name(r["n"], r["seed"]) not in csvs:
            problems.append(f"missing {csv_name(r['n'], r['seed'])}")
    for r in summary.get("failures", []):
        problems.append(f"run n={r['n']} seed={r['seed']} failed: {r.get('error')}")
    return problems


def load_summaries(directory) -> list[dict]:
    return json.loads((Path(directory) / SUMMARY_NAME).read_text())["runs"]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    per_n: dict  # n -> (mean, std) of ln final_edges
    excluded: int = 0


def _get(s, name):
    return s[name] if isinstance(s, dict) else getattr(s, name)


def fit_exponent(summaries) -> FitResult:
    """Least-squares fit of mean ``ln(final_edges)`` per ``n`` against ``ln n``.

    Runs ending with no edges are dropped with a warning.  Each ``n`` gets
    equal weight regardless of how many seeds it has.
    """
    by_n: dict[int, list[float]] = {}
    excluded = 0
    for s in summaries:
        n, e = int(_get(s, "n")), float(_get(s, "final_edges"))
        if e <= 0:
            excluded += 1
            continue
        by_n.setdefault(n, []).append(math.log(e))
    if excluded:
        warnings.warn(f"excluded {excluded} run(s) with final_edges = 0", stacklevel=2)
    if len(by_n) < 3:
        raise ValueError(f"need at least 3 distinct n with final_edges > 0, got {len(by_n)}")
    ns = np.array(sorted(by_n), dtype=float)
    per_n = {int(n): (float(np.mean(by_n[n])), float(np.std(by_n[n]))) for n in sorted(by_n)}
    x = np.log(ns)
    y = np.array([per_n[int(n)][0] for n in ns])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(slope), float(intercept), r2, per_n, excluded)


def read_checkpoints(path) -> tuple[dict, list[dict]]:
    """``(header config, rows)`` of a checkpoint CSV; raises SchemaError on a bad layout."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise SchemaError(f"{path}: missing '# {{config}}' header line")
    try:
        header = json.loads(lines[0][2:])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: bad header: {exc}") from exc
    reader = csv.reader(lines[1:])
    cols = tuple(next(reader, ()))
    if cols != CSV_COLUMNS:
        raise SchemaError(f"{path}: columns {cols} != {CSV_COLUMNS}")
    rows = []
    for rec in reader:
        if len(rec) != len(CSV_COLUMNS):
            raise SchemaError(f"{path}: row has {len(rec)} fields")
        try:
            rows.append({c: int(v) if c in _INT_COLUMNS else float(v)
                         for c, v in zip(CSV_COLUMNS, rec)})
        except ValueError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    return header, rows


@dataclass
class RunViolations:
    n: int
    seed: int
    p_floor: float
    window: int  # checkpoints with p >= p_floor
    counts: dict
    max_dev: dict  # kind -> max deviation inside the window
    trajectory: list  # (p, {kind: dev}) for every checkpoint

    @property
    def vacuous(self) -> bool:
        return self.window == 0

    @property
    def violations(self) -> int:
        return sum(self.counts.values())


@dataclass
class ViolationReport:
    runs: list = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return sum(r.violations for r in self.runs if not r.vacuous)

    @property
    def vacuous_runs(self) -> list:
        return [r for r in self.runs if r.vacuous]

    @property
    def passed(self) -> bool:
        return bool(self.runs) and self.total_violations == 0 and not self.vacuous_runs

    def max_dev(self, kind: str) -> float:
        return max((r.max_dev[kind] for r in self.runs if not r.vacuous), default=0.0)


def violation_report(files, params: ParamSet = PAPER_PARAMS, policy="desk") -> ViolationReport:
    """Per run and kind, count checkpoints in the window ``p >= p_floor`` that leave their envelope.

    A checkpoint counts as violated for a kind if its deviation exceeds 1 or
    the recorded mask says so.  Runs with no checkpoint in the window are
    marked vacuous.  The result does not depend on the order of ``files``.
    """
    report = ViolationReport()
    for path in files:
        _, rows = read_checkpoints(path)
        if not rows:
            raise SchemaError(f"{path}: no checkpoint rows")
        n, seed = rows[0]["n"], rows[0]["seed"]
        floor = p_floor(n, params, policy)
        counts = dict.fromkeys(KINDS, 0)
        max_dev = dict.fromkeys(KINDS, 0.0)
        window = 0
        traj = []
        for row in rows:
            devs = {k: row["dev_" + k] for k in KINDS}
            traj.append((row["p"], devs))
            if row["p"] < floor:
                continue
            window += 1
            for bit, k in enumerate(KINDS):
                if devs[k] > 1 or row["viol_mask"] >> bit & 1:
                    counts[k] += 1
                max_dev[k] = max(max_dev[k], devs[k])
        report.runs.append(RunViolations(n, seed, floor, window, counts, max_dev, traj))
    report.runs.sort(key=lambda r: (r.n, r.seed))
    return report
