"""Rolling-horizon assignment with a cascade of IP variants.

In every period ``t`` the planner sees the patients registered by ``t``
and still in hospital (or yet to arrive), plans them over ``[t, end]``,
and commits the rooms of period ``t`` only. Patients already in hospital
keep their room where possible:

1. ``V`` (or ``U``) with the previous rooms fixed as a prefix;
2. ``Ustar``, then ``Tstar``: previous rooms only rewarded, last priority;
3. ``Q``: transfers allowed and minimised first.

A stage that is infeasible, or hits its time limit without a solution,
hands over to the next one. A time-limited stage with a solution is
accepted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from pra.errors import ConfigError, InfeasibleError
from pra.ip import INFEASIBLE, OPTIMAL, build_model, compute_smax, solve_lexicographic
from pra.matching import solve_rmp
from pra.model import FEMALE, Assignment, Instance, evaluate_objectives, sex_split_feasible

STAGE_LABELS = {"V": "V", "U": "U", "Ustar": "U*", "Tstar": "T*", "Q": "Q"}
FEASIBILITY_FAIL = "feasibility-fail"
FAILED = "failed"


@dataclass(frozen=True)
class DynamicConfig:
    """Settings of a rolling run.

    ``lam`` scales the per-period roommate caps of ``V`` (``lam * w^min_t``);
    ``first`` picks ``V`` or ``U`` as the first stage; ``time_limit`` bounds
    each IP solve in seconds.
    """

    scorer: object
    lam: int = 1
    first: str = "V"
    time_limit: float | None = 0.25
    backend: str = "bnb"
    cascade: tuple[str, ...] = ("Ustar", "Tstar", "Q")

    def __post_init__(self):
        if self.first not in ("V", "U"):
            raise ConfigError("first stage must be 'V' or 'U'")
        if self.lam < 1:
            raise ConfigError("lam must be >= 1")
        if any(v not in ("Ustar", "Tstar", "Q") for v in self.cascade):
            raise ConfigError("cascade stages must be among Ustar, Tstar, Q")


@dataclass
class IterationRecord:
    period: int
    stage: str
    status: str
    wall_time: float
    solver_time: float
    n_view: int
    window_end: int
    attempts: tuple[str, ...] = ()
    objective: dict[str, int] = field(default_factory=dict)


@dataclass
class DynamicResult:
    status: str  # "complete", "feasibility-fail" or "failed"
    assignment: Assignment
    records: list[IterationRecord]
    failed_period: int | None = None
    objectives: object = None
    wmin_reference: int | None = None

    def stage_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            out[r.stage] = out.get(r.stage, 0) + 1
        return out

    @property
    def wall_times(self) -> list[float]:
        return [r.wall_time for r in self.records]


class WminCache:
    """Single-period roommate optima keyed by the set of present patient ids."""

    def __init__(self, instance: Instance, scorer):
        self.instance = instance
        self.scorer = scorer
        self.values: dict[frozenset, int] = {}

    def get(self, ids) -> int:
        key = frozenset(ids)
        if key not in self.values:
            females, males = [], []
            for pid in sorted(key):
                p = self.instance.patient(pid)
                (females if p.sex == FEMALE else males).append(p)
            _, value = solve_rmp(females, males, self.instance.rooms, self.scorer)
            self.values[key] = value
        return self.values[key]


def view_at(instance: Instance, t: int) -> list:
    """Patients known in period ``t`` that still need a bed from ``t`` on."""
    return [p for p in instance.patients if p.registered <= t and p.discharge > t]


def update_fixings(assignment, instance: Instance, t: int) -> dict[str, str]:
    """Rooms of the patients in hospital in both ``t`` and ``t + 1``."""
    out = {}
    for pid in instance.present_ids(t):
        p = instance.patient(pid)
        if p.present(t + 1):
            out[pid] = assignment[pid, t]
    return out


def _sub_instance(instance: Instance, patients) -> Instance:
    return Instance(instance.horizon, instance.rooms, tuple(patients))


def run_dynamic(instance: Instance, config: DynamicConfig, *, progress=None) -> DynamicResult:
    """Run the rolling planner over the whole horizon."""
    scorer = config.scorer
    caps = [r.capacity for r in instance.rooms]
    cache = WminCache(instance, scorer)
    fixed = {pid: rid for pid, rid in instance.preassigned}
    committed: dict[tuple[str, int], str] = {}
    records: list[IterationRecord] = []
    status = "complete"
    failed_period = None
    for t in instance.periods():
        t_iter = time.perf_counter()
        view = view_at(instance, t)
        if not view:
            records.append(IterationRecord(t, "idle", OPTIMAL, time.perf_counter() - t_iter, 0.0, 0, t))
            fixed = {}
            continue
        end = max([p.discharge - 1 for p in view] + [t])
        sub = _sub_instance(instance, view)
        window = range(t, end + 1)
        bad = None
        for s in window:
            present = sub.present_ids(s)
            n_f = sum(1 for pid in present if sub.patient(pid).sex == FEMALE)
            if not sex_split_feasible(n_f, len(present) - n_f, caps):
                bad = s
                break
        if bad is not None:
            records.append(IterationRecord(t, FEASIBILITY_FAIL, INFEASIBLE, time.perf_counter() - t_iter, 0.0,
                                           len(view), end))
            status, failed_period = FEASIBILITY_FAIL, t
            break
        smax = compute_smax(sub, window)
        wmin = {s: cache.get(sub.present_ids(s)) for s in window}
        caps_v = {s: config.lam * v for s, v in wmin.items()}
        fixings = {"smax": smax, "wmin": caps_v}
        solver_time = 0.0
        attempts = []
        chosen = None
        for variant in (config.first,) + tuple(config.cascade):
            model = build_model(variant, sub, scorer, fixings, start=t, end=end, fixed=fixed)
            sol = solve_lexicographic(model, config.time_limit, config.backend, pref_lb=wmin)
            solver_time += sol.runtime
            attempts.append(STAGE_LABELS[variant])
            if sol.assignment is not None:
                chosen = (variant, sol)
                break
        wall = time.perf_counter() - t_iter
        if chosen is None:
            records.append(IterationRecord(t, FAILED, INFEASIBLE, wall, solver_time, len(view), end,
                                           tuple(attempts)))
            status, failed_period = FAILED, t
            break
        variant, sol = chosen
        for pid in sub.present_ids(t):
            committed[pid, t] = sol.assignment[pid, t]
        records.append(IterationRecord(t, STAGE_LABELS[variant], sol.status, wall, solver_time, len(view), end,
                                       tuple(attempts), dict(sol.objective)))
        fixed = update_fixings(committed, instance, t)
        if progress is not None:
            progress(records[-1])
    assignment = Assignment(committed)
    objectives = None
    if status == "complete":
        objectives = evaluate_objectives(assignment, instance, scorer)
    try:
        reference = sum(cache.get(instance.present_ids(s)) for s in instance.periods())
    except InfeasibleError:
        reference = None
    return DynamicResult(status, assignment, records, failed_period, objectives, reference)
