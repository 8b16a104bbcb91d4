from __future__ import annotations

import csv
import json
import random

import pytest
from factories import smax_wmin_conflict, three_patient

from pra.bench import CURVE_COLUMNS, ITERATION_COLUMNS, REPORT_COLUMNS, RunConfig, load_configs, run_bench
from pra.errors import ConfigError
from pra.generate import GeneratorParams, generate_instance


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_two_instances_two_scorers(tmp_path):
    instances = [("three", three_patient()), ("conflict", smax_wmin_conflict(random.Random(0)))]
    configs = [RunConfig("abs", scorer="abs-age", variant="S"), RunConfig("bounded", scorer="bounded-age:k=10",
                                                                          variant="S")]
    report = run_bench(instances, configs)
    assert len(report.rows) == 4
    status = {(r["instance"], r["config"]): r["status"] for r in report.rows}
    assert status["conflict", "abs"] == "infeasible" and status["three", "abs"] == "optimal"
    report.write(tmp_path)
    rows = _read(tmp_path / "report.csv")
    assert list(rows[0]) == list(REPORT_COLUMNS) and len(rows) == 4
    curve = _read(tmp_path / "curve.csv")
    assert list(curve[0]) == list(CURVE_COLUMNS)
    for name in ("abs", "bounded"):
        samples = [r for r in curve if r["config"] == name]
        solved = [int(r["solved"]) for r in samples]
        times = [float(r["time"]) for r in samples]
        assert solved == sorted(solved) and times == sorted(times)
        assert solved[-1] == sum(1 for r in report.rows if r["config"] == name and r["status"] in ("optimal",
                                                                                                    "infeasible"))


def test_dynamic_rows_and_iterations(tmp_path):
    inst = generate_instance(GeneratorParams(horizon=10, n_rooms=5), 1)
    configs = [RunConfig("dyn", mode="dynamic", scorer="abs-age", time_limit=0.2)]
    report = run_bench([("g", inst)], configs)
    row = report.rows[0]
    assert row["status"] == "complete" and row["n_iterations"] == 10
    assert sum(int(part.split(":")[1]) for part in row["stages"].split(";")) == 10
    report.write(tmp_path)
    its = _read(tmp_path / "iterations.csv")
    assert len(its) == 10 and list(its[0]) == list(ITERATION_COLUMNS)
    assert all(float(r["solver_time"]) <= float(r["wall_time"]) + 1e-9 for r in its)


def test_failures_become_rows():
    bad = RunConfig("bad", scorer="age-class-count:k=10", variant="Q")
    report = run_bench([("three", three_patient())], [bad, RunConfig("ok")])
    assert report.rows[0]["status"] == "error" and "ConfigError" in report.rows[0]["error"]
    assert report.rows[1]["status"] == "optimal"


def test_repeat_gives_same_objectives():
    configs = [RunConfig("q", variant="Q", scorer="weighted-age")]
    inst = generate_instance(GeneratorParams(horizon=5, n_rooms=4, occupancy=0.7), 2)
    a = run_bench([("g", inst)], configs).rows[0]
    b = run_bench([("g", inst)], configs).rows[0]
    keys = ("status", "f_trans", "f_priv", "f_pref", "wmin_total")
    assert [a[k] for k in keys] == [b[k] for k in keys]


def test_parallel_matches_serial():
    instances = [("three", three_patient()), ("conflict", smax_wmin_conflict(random.Random(2)))]
    configs = [RunConfig("t", variant="T"), RunConfig("q", variant="Q")]
    serial = run_bench(instances, configs, workers=1).rows
    parallel = run_bench(instances, configs, workers=2).rows
    drop = ("runtime", "solver_time")
    assert [{k: v for k, v in r.items() if k not in drop} for r in serial] == \
           [{k: v for k, v in r.items() if k not in drop} for r in parallel]


def test_config_loading():
    configs = load_configs(json.dumps({"runs": [{"name": "a", "variant": "T"},
                                                {"name": "b", "mode": "dynamic", "first_ip": "U", "lam": 2}]}))
    assert [c.name for c in configs] == ["a", "b"] and configs[1].lam == 2
    for text in ('{"runs": []}', '{"runs": [{"name": "a"}, {"name": "a"}]}', '{"runs": [{"name": "a", "x": 1}]}',
                 '{"runs": [{"name": "a", "mode": "batch"}]}', '{"runs": [{"name": "a", "scorer": "no"}]}', "{"):
        with pytest.raises(ConfigError):
            load_configs(text)
