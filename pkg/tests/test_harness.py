import json
import math
import random
from math import comb

import numpy as np
import pytest

from trilab import harness as hs
from trilab.analytics.checkpoint import SamplingPlan
from trilab.analytics.formulas import KINDS, ParamSet

SMALL_PLAN = SamplingPlan(pairs=200, triples=200)


def _strip_wall(summary_text):
    data = json.loads(summary_text)
    for r in data["runs"]:
        r.pop("wall_ms")
    return data


def test_sweep_outputs_and_determinism(tmp_path):
    cfg = hs.SweepConfig(n_list=(50,), seeds_per_n=2, plan=SMALL_PLAN, out=tmp_path / "a")
    report = hs.run_sweep(cfg)
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == ["checkpoints_n50_s0.csv", "checkpoints_n50_s1.csv", hs.SUMMARY_NAME]
    hs.run_sweep(hs.SweepConfig(n_list=(50,), seeds_per_n=2, plan=SMALL_PLAN, out=tmp_path / "b"))
    for name in files[:2]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    a = _strip_wall((tmp_path / "a" / hs.SUMMARY_NAME).read_text())
    b = _strip_wall((tmp_path / "b" / hs.SUMMARY_NAME).read_text())
    assert a["runs"] == b["runs"] and a["config"]["n"] == [50]
    assert report["version"] and report["failures"] == []
    assert hs.find_incomplete(tmp_path / "a") == []


def test_parallel_matches_serial(tmp_path):
    base = dict(n_list=(30, 40), seeds_per_n=2, plan=SMALL_PLAN)
    hs.run_sweep(hs.SweepConfig(**base, out=tmp_path / "s", jobs=1))
    hs.run_sweep(hs.SweepConfig(**base, out=tmp_path / "p", jobs=2))
    for f in (tmp_path / "s").glob("*.csv"):
        assert f.read_bytes() == (tmp_path / "p" / f.name).read_bytes()


def test_edge_identity_in_summary(tmp_path):
    report = hs.run_sweep(hs.SweepConfig(n_list=(100, 200), seeds_per_n=1, plan=SMALL_PLAN, out=tmp_path))
    assert len(report["runs"]) == 2
    for r in report["runs"]:
        assert r["final_edges"] >= 0
        assert 3 * r["M"] + r["final_edges"] == comb(r["n"], 2)
        assert set(r) == {"n", "seed", "M", "final_edges", "wall_ms"}


def test_csv_schema(tmp_path):
    hs.run_sweep(hs.SweepConfig(n_list=(40,), seeds_per_n=1, plan=SMALL_PLAN, out=tmp_path))
    header, rows = hs.read_checkpoints(tmp_path / "checkpoints_n40_s0.csv")
    assert header["n"] == 40 and header["seed"] == 0 and header["pairs"] == 200
    lines = (tmp_path / "checkpoints_n40_s0.csv").read_text().splitlines()
    assert lines[1] == ",".join(hs.CSV_COLUMNS)
    assert rows[0]["i"] == 0 and rows[0]["p"] == 1.0
    assert rows[-1]["Q"] == 0
    for r in rows:
        assert float(repr(r["phi"])) == r["phi"]


def test_interrupted_directory(tmp_path):
    hs.run_sweep(hs.SweepConfig(n_list=(30,), seeds_per_n=2, plan=SMALL_PLAN, out=tmp_path))
    (tmp_path / "checkpoints_n30_s1.csv").unlink()
    assert any("missing" in p for p in hs.find_incomplete(tmp_path))
    (tmp_path / hs.SUMMARY_NAME).unlink()
    assert hs.find_incomplete(tmp_path)
    (tmp_path / "checkpoints_n30_s9.csv.partial").write_text("# {}\n")
    assert any("unfinished" in p for p in hs.find_incomplete(tmp_path))


def test_io_failure_is_per_run(tmp_path):
    out = tmp_path / "o"
    out.mkdir()
    # a directory where the file should go makes the final rename fail
    (out / "checkpoints_n30_s0.csv").mkdir()
    report = hs.run_sweep(hs.SweepConfig(n_list=(30,), seeds_per_n=2, plan=SMALL_PLAN, out=out))
    assert [r["seed"] for r in report["runs"]] == [1]
    assert [r["seed"] for r in report["failures"]] == [0]
    assert hs.find_incomplete(out)


@pytest.mark.parametrize("kwargs", [dict(n_list=()), dict(n_list=(100, 50)), dict(n_list=(2,)),
                                    dict(seeds_per_n=0), dict(dp=1.0), dict(jobs=0)])
def test_sweep_config_validation(kwargs):
    with pytest.raises(ValueError):
        hs.SweepConfig(**kwargs)


def _synthetic(ns, fn, seeds=3):
    return [{"n": n, "seed": s, "final_edges": fn(n, s)} for n in ns for s in range(seeds)]


def test_fit_exact_power_law():
    ns = [250, 500, 1000, 2000, 4000]
    fit = hs.fit_exponent(_synthetic(ns, lambda n, s: n**1.5))
    assert fit.slope == pytest.approx(1.5, abs=1e-9)
    fit = hs.fit_exponent(_synthetic(ns, lambda n, s: 7 * n ** (5 / 3)))
    assert fit.slope == pytest.approx(5 / 3, abs=1e-9)
    assert fit.intercept == pytest.approx(math.log(7), abs=1e-9)
    assert fit.r2 == pytest.approx(1)


def test_fit_per_n_weighting():
    rows = _synthetic([10, 20, 40], lambda n, s: n**2, seeds=1)
    rows += [{"n": 40, "final_edges": 1600} for _ in range(20)]
    assert hs.fit_exponent(rows).slope == pytest.approx(2, abs=1e-12)


def test_fit_needs_three_n_and_excludes_zero():
    with pytest.raises(ValueError):
        hs.fit_exponent(_synthetic([10, 20], lambda n, s: n))
    rows = _synthetic([10, 20, 40], lambda n, s: n * n) + [{"n": 10, "final_edges": 0}]
    with pytest.warns(UserWarning):
        fit = hs.fit_exponent(rows)
    assert fit.excluded == 1 and fit.slope == pytest.approx(2)


def test_fit_scale_equivariant_exact():
    rng = np.random.default_rng(0)
    rows = [{"n": n, "final_edges": int(n**1.5 * rng.uniform(0.5, 2))}
            for n in (100, 200, 400, 800) for _ in range(3)]
    for c in (2, 17, 1000):
        scaled = [dict(r, final_edges=r["final_edges"] * c) for r in rows]
        a, b = hs.fit_exponent(rows), hs.fit_exponent(scaled)
        assert abs(a.slope - b.slope) <= 1e-12
        assert b.intercept - a.intercept == pytest.approx(math.log(c), abs=1e-9)


def _write_fixture(path, n, seed, rows):
    lines = ["# " + json.dumps({"n": n, "seed": seed}), ",".join(hs.CSV_COLUMNS)]
    for p, devs, mask in rows:
        vals = [n, seed, 0, p, 1, *[devs.get(k, 0.1) for k in KINDS], mask, 0.0, 1.0]
        lines.append(",".join(str(v) for v in vals))
    path.write_text("\n".join(lines) + "\n")


def test_violation_report_counts(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _write_fixture(a, 1000, 0, [(1.0, {}, 0), (0.5, {"Yuv": 1.5}, 0), (0.05, {"Q": 9.0}, 1)])
    _write_fixture(b, 1000, 1, [(1.0, {}, 0), (0.2, {}, 0)])
    rep = hs.violation_report([b, a])
    assert [(r.n, r.seed) for r in rep.runs] == [(1000, 0), (1000, 1)]
    run = rep.runs[0]
    assert run.counts["Yuv"] == 1 and run.counts["Q"] == 0
    assert run.window == 2 and run.max_dev["Yuv"] == 1.5
    assert len(run.trajectory) == 3
    assert rep.total_violations == 1 and not rep.passed


def test_violation_report_permutation_invariant(tmp_path):
    paths = []
    rng = random.Random(5)
    for s in range(6):
        p = tmp_path / f"f{s}.csv"
        _write_fixture(p, 500, s, [(1 - k / 10, {"Tu": rng.random() * 1.2}, 0) for k in range(10)])
        paths.append(p)
    base = hs.violation_report(paths)
    for _ in range(5):
        rng.shuffle(paths)
        other = hs.violation_report(paths)
        assert [(r.seed, r.counts, r.max_dev) for r in other.runs] == \
               [(r.seed, r.counts, r.max_dev) for r in base.runs]


def test_violation_report_vacuous(tmp_path):
    p = tmp_path / "v.csv"
    _write_fixture(p, 2000, 0, [(1.0, {}, 0), (0.5, {}, 0)])
    rep = hs.violation_report([p], policy="paper")
    assert rep.runs[0].vacuous and rep.total_violations == 0 and not rep.passed


def test_violation_report_shrunken_alpha(tmp_path):
    hs.run_sweep(hs.SweepConfig(n_list=(60,), seeds_per_n=1, plan=SMALL_PLAN,
                                params=ParamSet(alpha=1e-3), out=tmp_path))
    rep = hs.violation_report(sorted(tmp_path.glob("*.csv")), ParamSet(alpha=1e-3))
    assert rep.runs[0].counts["Yuv"] > 0
    assert rep.runs[0].trajectory[0][1]["Yuv"] > 1


def test_schema_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("n,seed\n1,2\n")
    with pytest.raises(hs.SchemaError):
        hs.violation_report([p])
    p.write_text("# {}\nn,seed,i\n1,2,3\n")
    with pytest.raises(hs.SchemaError):
        hs.read_checkpoints(p)
    p.write_text("# {}\n" + ",".join(hs.CSV_COLUMNS) + "\n")
    with pytest.raises(hs.SchemaError):
        hs.violation_report([p])
