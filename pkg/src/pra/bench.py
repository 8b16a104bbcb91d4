"""Batch runs over instances and solver configurations.

Outputs (all CSV, written atomically):

``report.csv``
    one row per (instance, config): ``instance, config, mode, variant, scorer,
    status, runtime, solver_time, f_trans, f_priv, f_pref, wmin_total,
    stages, n_iterations, error``. ``stages`` is the per-iteration stage
    histogram of rolling runs (``V:12;U*:353``).
``curve.csv``
    ``config, scorer, time, solved``: for static runs, the number of
    instances solved to optimality or proven infeasible within ``time``
    seconds; the last sample of each config sits at its time limit.
``iterations.csv``
    ``instance, config, scorer, period, stage, status, wall_time,
    solver_time`` for every iteration of every rolling run.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from pra.dynamic import DynamicConfig, run_dynamic
from pra.errors import ConfigError, InfeasibleError, PraError
from pra.io import write_atomic
from pra.ip import NEEDS_SMAX, NEEDS_WMIN, VARIANTS, build_model, compute_smax, solve_lexicographic
from pra.matching import wmin
from pra.model import Instance, evaluate_objectives
from pra.scoring import parse_scorer

REPORT_COLUMNS = ("instance", "config", "mode", "variant", "scorer", "status", "runtime", "solver_time",
                  "f_trans", "f_priv", "f_pref", "wmin_total", "stages", "n_iterations", "error")
CURVE_COLUMNS = ("config", "scorer", "time", "solved")
ITERATION_COLUMNS = ("instance", "config", "scorer", "period", "stage", "status", "wall_time", "solver_time")
SOLVED = ("optimal", "infeasible")


@dataclass(frozen=True)
class RunConfig:
    """One solver configuration.

    ``mode`` is ``static`` (one lexicographic IP solve of ``variant``) or
    ``dynamic`` (rolling run starting with ``first_ip``).
    """

    name: str
    mode: str = "static"
    scorer: str = "abs-age"
    variant: str = "Q"
    time_limit: float | None = 60.0
    first_ip: str = "V"
    lam: int = 1
    backend: str = "bnb"

    def __post_init__(self):
        if self.mode not in ("static", "dynamic"):
            raise ConfigError(f"{self.name}: mode must be 'static' or 'dynamic'")
        if self.mode == "static" and self.variant not in VARIANTS:
            raise ConfigError(f"{self.name}: unknown variant {self.variant!r}")
        parse_scorer(self.scorer)

    @classmethod
    def from_dict(cls, doc: dict) -> RunConfig:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**doc)


def load_configs(text: str) -> list[RunConfig]:
    """Parse ``{"runs": [{...}, ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config line {exc.lineno}: {exc.msg}") from None
    runs = doc.get("runs") if isinstance(doc, dict) else None
    if not isinstance(runs, list) or not runs:
        raise ConfigError("config needs a non-empty 'runs' list")
    configs = [RunConfig.from_dict(r) for r in runs]
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("config names must be unique")
    return configs


@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)
    iterations: list[dict] = field(default_factory=list)
    limits: dict[str, float | None] = field(default_factory=dict)

    def curve(self) -> list[dict]:
        out = []
        groups: dict[tuple[str, str], list[dict]] = {}
        for row in self.rows:
            if row["mode"] == "static":
                groups.setdefault((row["config"], row["scorer"]), []).append(row)
        for (name, scorer), rows in groups.items():
            times = sorted(r["runtime"] for r in rows if r["status"] in SOLVED)
            solved = 0
            out.append({"config": name, "scorer": scorer, "time": 0.0, "solved": 0})
            for t in times:
                solved += 1
                out.append({"config": name, "scorer": scorer, "time": round(t, 6), "solved": solved})
            last = times[-1] if times else 0.0
            limit = self.limits.get(name)
            end = last if limit is None else max(limit, last)
            out.append({"config": name, "scorer": scorer, "time": round(end, 6), "solved": solved})
        return out

    def write(self, directory) -> None:
        os.makedirs(directory, exist_ok=True)
        write_atomic(os.path.join(directory, "report.csv"), _csv(REPORT_COLUMNS, self.rows))
        write_atomic(os.path.join(directory, "curve.csv"), _csv(CURVE_COLUMNS, self.curve()))
        write_atomic(os.path.join(directory, "iterations.csv"), _csv(ITERATION_COLUMNS, self.iterations))


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: ("" if row.get(c) is None else row.get(c)) for c in columns})
    return buf.getvalue()


def _wmin_total(instance, scorer):
    try:
        return wmin(instance, scorer)[1]
    except PraError:
        return None


def _static(name: str, instance: Instance, cfg: RunConfig) -> tuple[dict, list]:
    scorer = parse_scorer(cfg.scorer)
    row = {"instance": name, "config": cfg.name, "mode": "static", "variant": cfg.variant, "scorer": cfg.scorer}
    t0 = time.perf_counter()
    fixings = {}
    try:
        if cfg.variant in NEEDS_SMAX:
            fixings["smax"] = compute_smax(instance)
        if cfg.variant in NEEDS_WMIN:
            fixings["wmin"] = wmin(instance, scorer)[0]
    except InfeasibleError:
        row.update(status="infeasible", runtime=time.perf_counter() - t0, solver_time=0.0)
        return row, []
    model = build_model(cfg.variant, instance, scorer, fixings)
    sol = solve_lexicographic(model, cfg.time_limit, cfg.backend)
    row.update(status=sol.status, runtime=time.perf_counter() - t0, solver_time=sol.runtime)
    if sol.assignment is not None:
        obj = evaluate_objectives(sol.assignment, instance, scorer)
        row.update(f_trans=obj.transfers, f_priv=obj.singles_fulfilled, f_pref=obj.roommate_fit)
    row["wmin_total"] = _wmin_total(instance, scorer)
    return row, []


def _dynamic(name: str, instance: Instance, cfg: RunConfig) -> tuple[dict, list]:
    scorer = parse_scorer(cfg.scorer)
    row = {"instance": name, "config": cfg.name, "mode": "dynamic", "variant": cfg.first_ip, "scorer": cfg.scorer}
    t0 = time.perf_counter()
    res = run_dynamic(instance, DynamicConfig(scorer, lam=cfg.lam, first=cfg.first_ip,
                                              time_limit=cfg.time_limit, backend=cfg.backend))
    row.update(status=res.status, runtime=time.perf_counter() - t0,
               solver_time=sum(r.solver_time for r in res.records),
               stages=";".join(f"{k}:{v}" for k, v in sorted(res.stage_counts().items())),
               n_iterations=len(res.records), wmin_total=res.wmin_reference)
    if res.objectives is not None:
        row.update(f_trans=res.objectives.transfers, f_priv=res.objectives.singles_fulfilled,
                   f_pref=res.objectives.roommate_fit)
    its = [{"instance": name, "config": cfg.name, "scorer": cfg.scorer, "period": r.period, "stage": r.stage,
            "status": r.status, "wall_time": r.wall_time, "solver_time": r.solver_time} for r in res.records]
    return row, its


def _job(args) -> tuple[dict, list]:
    name, instance, cfg = args
    try:
        return (_static if cfg.mode == "static" else _dynamic)(name, instance, cfg)
    except Exception as exc:  # a failing run becomes a row, the batch goes on
        return ({"instance": name, "config": cfg.name, "mode": cfg.mode, "variant": cfg.variant,
                 "scorer": cfg.scorer, "status": "error", "error": f"{type(exc).__name__}: {exc}"}, [])


def default_workers() -> int:
    value = os.environ.get("PRA_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ConfigError(f"PRA_THREADS must be an integer, got {value!r}") from None
    return 1


def run_bench(instances, configs, workers: int | None = None) -> BenchReport:
    """Run every config on every ``(name, instance)`` pair.

    Jobs are independent; with ``workers > 1`` they run in separate
    processes and the report is assembled in submission order.
    """
    jobs = [(name, inst, cfg) for name, inst in instances for cfg in configs]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    report = BenchReport(limits={c.name: c.time_limit for c in configs})
    for row, its in results:
        report.rows.append(row)
        report.iterations.extend(its)
    return report

