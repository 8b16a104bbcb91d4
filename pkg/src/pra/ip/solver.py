"""Lexicographic optimisation of an :class:`IpModel`.

Objectives are optimised one at a time; after stage ``k`` its optimum is
pinned (``value <= optimum`` in minimisation form) and the next stage is
warm-started from the previous incumbent.

Backends: ``"bnb"`` (the compiled branch and bound in :mod:`pra.ip.kernel`)
and ``"highs"`` (scipy's HiGHS MILP interface on the explicit rows).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from pra._accel import HAVE_NUMBA
from pra.errors import ConfigError, PraError
from pra.ip import kernel as K
from pra.ip.model import PREFIX, STARRED, IpModel
from pra.model import FEMALE, Assignment

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIME_LIMIT = "time-limit"

_CODES = {"trans": K.TRANS, "priv": K.NEGPRIV, "pref": K.PREF, "fix": K.NEGFIX, "zero": K.ZERO}


@dataclass
class IpSolution:
    """Outcome of a lexicographic solve.

    ``optima`` holds the proven optimum of each finished stage in the
    objective's own sense; ``objective`` the values of the returned
    assignment for every objective of the variant. On a time limit,
    ``stage`` is the index of the first interrupted stage and ``assignment``
    the best one found (``None`` if none was found); the time budget is
    shared among the stages, and an interrupted stage is pinned at its
    incumbent value before the next one runs.
    """

    status: str
    assignment: Assignment | None
    objective: dict[str, int] = field(default_factory=dict)
    optima: tuple[int, ...] = ()
    stage: int | None = None
    nodes: int = 0
    runtime: float = 0.0
    backend: str = "bnb"

    @property
    def has_solution(self) -> bool:
        return self.assignment is not None


class CompiledModel:
    """Array form of a model for the kernel."""

    def __init__(self, model: IpModel, pref_lb: dict[int, int] | None = None):
        self.model = model
        pats = model.patients
        rooms = model.rooms
        self.t0 = model.start
        n_t = len(model.periods)
        n_p = len(pats)
        n_r = len(rooms)
        pidx = {p.id: i for i, p in enumerate(pats)}
        ridx = {r.id: i for i, r in enumerate(rooms)}
        self.pat_ids = [p.id for p in pats]
        self.room_ids = [r.id for r in rooms]
        self.pat_sex = np.array([0 if p.sex == FEMALE else 1 for p in pats], np.int64)
        self.pat_req = np.array([int(p.single_request) for p in pats], np.int64)
        self.W = np.zeros((max(n_p, 1), max(n_p, 1)), np.int64)
        for (a, b), w in model.weights.items():
            self.W[pidx[a], pidx[b]] = self.W[pidx[b], pidx[a]] = w
        self.cap = np.array([r.capacity for r in rooms], np.int64)

        special = set()
        item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom = [], [], [], [], [], []
        forced = []
        if model.time_indexed:
            boundary = model.boundary_rooms()
            last = {}
            for t in model.periods:
                present = [p for p in pats if p.present(t)]
                # continuing patients first, longest remaining stay first
                present.sort(key=lambda p: (p.id not in last, -p.discharge, pidx[p.id]))
                for p in present:
                    a = pidx[p.id]
                    item_pat.append(a)
                    item_start.append(t - self.t0)
                    item_end.append(t - self.t0 + 1)
                    item_prev.append(last.get(p.id, -1))
                    pr = -1
                    if t == model.start and p.id in boundary:
                        pr = ridx[boundary[p.id]]
                        special.add(pr)
                    item_prevroom.append(pr)
                    item_fixroom.append(-1)
                    forced.append(-1)
                    last[p.id] = len(item_pat) - 1
        else:
            for p in pats:
                a = pidx[p.id]
                span = model.window_periods(p)
                item_pat.append(a)
                item_start.append(span.start - self.t0)
                item_end.append(span.stop - self.t0)
                item_prev.append(-1)
                item_prevroom.append(-1)
                fr = -1
                fx = -1
                if p.id in model.fixed:
                    r = ridx[model.fixed[p.id]]
                    special.add(r)
                    if model.variant in PREFIX:
                        fx = r
                    elif model.variant in STARRED:
                        fr = r
                item_fixroom.append(fr)
                forced.append(fx)
        n_items = len(item_pat)
        self.n_items = n_items
        self.item_pat = np.array(item_pat, np.int64)
        self.item_start = np.array(item_start, np.int64)
        self.item_end = np.array(item_end, np.int64)
        self.item_prev = np.array(item_prev, np.int64)
        self.item_prevroom = np.array(item_prevroom, np.int64)
        self.item_fixroom = np.array(item_fixroom, np.int64)
        self.allowed = np.ones((max(n_items, 1), n_r), np.bool_)
        for i, fx in enumerate(forced):
            if fx >= 0:
                self.allowed[i, :] = False
                self.allowed[i, fx] = True
        classes: dict[int, int] = {}
        symcls = []
        for j, r in enumerate(rooms):
            if j in special:
                symcls.append(-1)
            else:
                symcls.append(classes.setdefault(r.capacity, len(classes)))
        self.symcls = np.array(symcls, np.int64)
        self.n_classes = max(len(classes), 1)
        if model.time_indexed:
            self.order = np.arange(n_items, dtype=np.int64)
        else:
            idx = sorted(range(n_items), key=lambda i: (forced[i] < 0, item_start[i],
                                                         item_start[i] - item_end[i], i))
            self.order = np.array(idx, np.int64)
        self.maxspan = max([e - s for s, e in zip(item_start, item_end)] + [1])
        self.n_t = n_t

        self.smax = np.full(max(n_t, 1), -1, np.int64)
        if model.smax is not None:
            for t, v in model.smax.items():
                self.smax[t - self.t0] = v
        self.pcap = np.full(max(n_t, 1), -1, np.int64)
        if model.wmin is not None:
            for t, v in model.wmin.items():
                self.pcap[t - self.t0] = v
        self.wlb = np.zeros(max(n_t, 1), np.int64)
        if pref_lb:
            for t, v in pref_lb.items():
                if model.start <= t <= model.end:
                    self.wlb[t - self.t0] = v
        self.n_fixed_items = int((self.item_fixroom >= 0).sum())
        # unplaced patient-periods per (period, sex, request flag)
        self.rem0 = np.zeros((max(n_t, 1), 2, 2), np.int64)
        if n_items:
            lengths = self.item_end - self.item_start
            periods = np.repeat(self.item_start, lengths) + (
                np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths))
            pats_rep = np.repeat(self.item_pat, lengths)
            np.add.at(self.rem0, (periods, self.pat_sex[pats_rep], self.pat_req[pats_rep]), 1)

    def fresh_state(self) -> dict:
        n_r = len(self.cap)
        n_t = max(self.n_t, 1)
        n_items = max(self.n_items, 1)
        st = dict(
            occ_n=np.zeros((n_r, n_t), np.int64),
            occ_p=np.full((n_r, n_t, 2), -1, np.int64),
            room_used=np.zeros(n_r, np.int64),
            item_room=np.full(n_items, -1, np.int64),
            e1=np.zeros(n_t, np.int64),
            e2=np.zeros(n_t, np.int64),
            hcnt=np.zeros((n_t, 2, 2), np.int64),
            sa=np.zeros(n_t, np.int64),
            rem=np.zeros((n_t, 2, 2), np.int64),
            cur_pref=np.zeros(n_t, np.int64),
            ub=np.zeros(n_t, np.int64),
            sc=np.zeros(K.NSLOTS, np.int64),
            ubsave=np.zeros((n_items, self.maxspan), np.int64),
            cls_mark=np.zeros(self.n_classes, np.int64),
            cands=np.zeros((n_items, n_r), np.int64),
            keys=np.zeros((n_items, n_r), np.int64),
            ncand=np.zeros(n_items, np.int64),
            ptr=np.zeros(n_items, np.int64),
            chosen=np.zeros(n_items, np.int64),
            best_rooms=np.full(n_items, -1, np.int64),
            best_vals=np.zeros(K.NOBJ, np.int64),
        )
        n1 = int((self.cap == 1).sum())
        st["e1"][: self.n_t] = n1
        st["e2"][: self.n_t] = len(self.cap) - n1
        st["rem"][:] = self.rem0
        sc = st["sc"]
        sc[K.S_REMFIX] = self.n_fixed_items
        if self.n_t:
            total = K.init_bounds(st["e1"], st["e2"], st["hcnt"], st["sa"], st["rem"], st["ub"])
        else:
            total = 0
        sc[K.S_UBSUM] = total
        sc[K.S_LBSUM] = int(self.wlb[: self.n_t].sum())
        st["feasible_root"] = total >= 0 and bool((st["ub"][: self.n_t] >= self.smax[: self.n_t]).all())
        return st

    def evaluate(self, st: dict, rooms: np.ndarray) -> np.ndarray | None:
        vals = np.zeros(K.NOBJ, np.int64)
        ok = K.evaluate(rooms, self.order, self.item_pat, self.item_start, self.item_end, self.item_prev,
                        self.item_prevroom, self.item_fixroom, self.allowed, self.pat_sex, self.pat_req,
                        self.W, self.cap, st["occ_n"], st["occ_p"], st["room_used"], st["item_room"],
                        st["e1"], st["e2"], st["hcnt"], st["sa"], st["rem"], st["cur_pref"], self.wlb,
                        st["ub"], self.smax, self.pcap, st["sc"], st["ubsave"], vals)
        return vals if ok else None

    def rooms_from_assignment(self, assignment) -> np.ndarray:
        ridx = {r: j for j, r in enumerate(self.room_ids)}
        out = np.full(max(self.n_items, 1), -1, np.int64)
        for i in range(self.n_items):
            pid = self.pat_ids[self.item_pat[i]]
            rid = assignment.get((pid, int(self.item_start[i]) + self.t0))
            if rid is not None:
                out[i] = ridx[rid]
        return out

    def assignment(self, rooms: np.ndarray) -> Assignment:
        out = {}
        for i in range(self.n_items):
            pid = self.pat_ids[self.item_pat[i]]
            rid = self.room_ids[rooms[i]]
            for t in range(self.item_start[i], self.item_end[i]):
                out[pid, t + self.t0] = rid
        return Assignment(out)


def _natural(name: str, value: int) -> int:
    return -value if name in ("priv", "fix") else value


def _values(vals: np.ndarray) -> dict[str, int]:
    return {"trans": int(vals[K.TRANS]), "priv": int(-vals[K.NEGPRIV]), "pref": int(vals[K.PREF]),
            "fix": int(-vals[K.NEGFIX])}


def _heuristic_order(codes: list[int], k: int) -> np.ndarray:
    order = [codes[k]] + [c for c in codes[k + 1:]] + [c for c in codes[:k]]
    for c in (K.PREF, K.NEGPRIV, K.TRANS):
        if c not in order:
            order.append(c)
    order = [c for c in order if c != K.ZERO]
    return np.array(order[:3], np.int64)


def _default_pref_lb(model: IpModel) -> dict[int, int]:
    from pra.matching import wmin

    if not any(name == "pref" for name, _ in model.objective_spec):
        return {}
    try:
        per, _ = wmin(model.instance, model.scorer, model.periods)
    except PraError:
        # the root bounds detect infeasibility on their own
        return {}
    return per


def solve_lexicographic(model: IpModel, time_limit: float | None = None, backend: str = "bnb", *,
                        pref_lb: dict[int, int] | None = None, warm_start=None,
                        verify: bool = False, node_chunk: int = 4000) -> IpSolution:
    """Solve ``model`` lexicographically.

    ``pref_lb`` gives per-period lower bounds on the roommate score (the
    single-period optima); they are computed when omitted. ``warm_start``
    is an optional window assignment used as the first incumbent when it
    is feasible. ``verify`` checks the result against the explicit rows.
    """
    if backend == "highs":
        from pra.ip.highs import solve_highs

        sol = solve_highs(model, time_limit)
    elif backend == "bnb":
        sol = _solve_bnb(model, time_limit, pref_lb, warm_start, node_chunk)
    else:
        raise ConfigError(f"unknown backend {backend!r}")
    if verify and sol.assignment is not None:
        values = model.values_from_assignment(sol.assignment)
        bad = model.violated(values)
        if bad:
            raise AssertionError(f"solution violates {bad[0].name}")
    return sol


def _run(cm, st, code, obj_order, pin_on, pin_val, deadline, node_chunk, max_nodes=None) -> bool:
    """Search until done, past ``deadline`` or over ``max_nodes``; True when the search finished."""
    sc = st["sc"]
    if not sc[K.S_DONE]:
        K.start(cm.order, cm.item_pat, cm.item_start, cm.item_end, cm.item_prev, cm.item_prevroom,
                cm.item_fixroom, cm.allowed, cm.symcls, st["cls_mark"], cm.pat_sex, cm.pat_req, cm.W,
                cm.cap, st["occ_n"], st["occ_p"], st["room_used"], st["item_room"], obj_order,
                st["cands"], st["keys"], st["ncand"], st["ptr"], sc)
    while not sc[K.S_DONE]:
        if deadline is not None and time.perf_counter() >= deadline:
            return False
        if max_nodes is not None and sc[K.S_NODES] >= max_nodes:
            return False
        K.search(node_chunk, code, cm.order, cm.item_pat, cm.item_start, cm.item_end, cm.item_prev,
                 cm.item_prevroom, cm.item_fixroom, cm.allowed, cm.symcls, st["cls_mark"], cm.pat_sex,
                 cm.pat_req, cm.W, cm.cap, st["occ_n"], st["occ_p"], st["room_used"], st["item_room"],
                 st["e1"], st["e2"], st["hcnt"], st["sa"], st["rem"], st["cur_pref"], cm.wlb, st["ub"],
                 cm.smax, cm.pcap, sc, st["ubsave"], obj_order, pin_on, pin_val, st["cands"], st["keys"],
                 st["ncand"], st["ptr"], st["chosen"], st["best_rooms"], st["best_vals"])
    return True


def _feasibility_dive(cm, deadline, node_chunk, max_nodes):
    """First feasible placement found by a privacy-first dive.

    Returns ``(rooms, nodes)``; ``rooms`` is ``None`` with ``finished`` set
    when the dive proved that no placement exists.
    """
    st = cm.fresh_state()
    st["sc"][K.S_ROOTLB] = 0
    order = np.array([K.NEGPRIV, K.PREF, K.TRANS], np.int64)
    none = np.zeros(K.NOBJ, np.int64)
    finished = _run(cm, st, K.ZERO, order, none, none, deadline, node_chunk, max_nodes)
    rooms = st["best_rooms"].copy() if st["sc"][K.S_HASBEST] else None
    return rooms, finished, int(st["sc"][K.S_NODES])


_WARM = False


def warm_up() -> None:
    """Compile (or load from cache) every kernel on a tiny model.

    Called before the first timed solve so that JIT compilation is not
    charged to a time limit.
    """
    global _WARM
    if _WARM:
        return
    _WARM = True
    from pra.ip.model import build_model
    from pra.model import Instance, Patient, Room
    from pra.scoring import parse_scorer

    inst = Instance(3, [Room("a", 2), Room("b", 1)],
                    [Patient("p", "F", 1, 3, 30, True), Patient("q", "F", 1, 2, 40), Patient("m", "M", 2, 3, 50)],
                    frozenset({("p", "b")}))
    scorer = parse_scorer("abs-age")
    _solve_bnb(build_model("Q", inst, scorer), None, None, None, 4000)
    _solve_bnb(build_model("V", inst, scorer, {"smax": {1: 1, 2: 1, 3: 0}, "wmin": {1: 0, 2: 0, 3: 0}}), 60.0, None, None, 4000)


def _solve_bnb(model, time_limit, pref_lb, warm_start, node_chunk) -> IpSolution:
    if not _WARM and HAVE_NUMBA:
        warm_up()
    t_start = time.perf_counter()
    deadline = None if time_limit is None else t_start + time_limit
    if pref_lb is None:
        pref_lb = _default_pref_lb(model)
    cm = CompiledModel(model, pref_lb)
    names = [name for name, _ in model.objective_spec]
    codes = [_CODES[n] for n in names]
    pin_on = np.zeros(K.NOBJ, np.int64)
    pin_val = np.zeros(K.NOBJ, np.int64)
    optima: list[int] = []
    incumbent = None
    nodes = 0
    if warm_start is not None:
        incumbent = cm.rooms_from_assignment(warm_start)
    elif cm.n_items and (cm.smax[: cm.n_t] > 0).any():
        # s^max rows make pref-first dives stall; find any feasible point first
        dive_deadline = None if deadline is None else t_start + 0.5 * time_limit
        incumbent, finished, n = _feasibility_dive(cm, dive_deadline, node_chunk, 200_000)
        nodes += n
        if incumbent is None and finished:
            return IpSolution(INFEASIBLE, None, nodes=nodes, runtime=time.perf_counter() - t_start)
    best_vals = None
    first_timeout = None
    for k, code in enumerate(codes):
        stage_deadline = deadline
        if deadline is not None:
            now = time.perf_counter()
            stage_deadline = now + max(deadline - now, 0.0) / (len(codes) - k)
        st = cm.fresh_state()
        sc = st["sc"]
        if not st["feasible_root"]:
            return IpSolution(INFEASIBLE, None, nodes=nodes, runtime=time.perf_counter() - t_start)
        lbv = np.zeros(K.NOBJ, np.int64)
        K._lower_bounds(sc, lbv)
        if any(pin_on[c] and lbv[c] > pin_val[c] for c in range(K.NOBJ)):
            raise AssertionError("pinned stage optimum below the root bound")
        sc[K.S_ROOTLB] = lbv[code]
        if incumbent is not None:
            vals = cm.evaluate(st, incumbent)
            if vals is not None and all(not pin_on[c] or vals[c] <= pin_val[c] for c in range(K.NOBJ)):
                sc[K.S_HASBEST] = 1
                sc[K.S_BEST] = vals[code]
                st["best_rooms"][:] = incumbent
                st["best_vals"][:] = vals
                if vals[code] <= lbv[code]:
                    sc[K.S_DONE] = 1
        if cm.n_items == 0:
            vals = np.zeros(K.NOBJ, np.int64)
            vals[K.NEGPRIV] = -sc[K.S_UBSUM]
            sc[K.S_HASBEST], sc[K.S_BEST], sc[K.S_DONE] = 1, vals[code], 1
            st["best_vals"][:] = vals
        finished = _run(cm, st, code, _heuristic_order(codes, k), pin_on, pin_val, stage_deadline, node_chunk)
        nodes += int(sc[K.S_NODES])
        if not sc[K.S_HASBEST]:
            if not finished:
                return IpSolution(TIME_LIMIT, None, stage=k, nodes=nodes, runtime=time.perf_counter() - t_start)
            if k > 0:
                raise AssertionError("later stage lost the previous incumbent")
            return IpSolution(INFEASIBLE, None, nodes=nodes, runtime=time.perf_counter() - t_start)
        incumbent = st["best_rooms"].copy()
        best_vals = st["best_vals"].copy()
        if not finished and first_timeout is None:
            first_timeout = k
        if first_timeout is None:
            optima.append(_natural(names[k], int(sc[K.S_BEST])))
        # an interrupted stage is pinned at its incumbent so later stages still improve the tie-breaks
        pin_on[code] = 1
        pin_val[code] = sc[K.S_BEST]
    if first_timeout is not None:
        return _finish(cm, model, TIME_LIMIT, incumbent, best_vals, optima, first_timeout, nodes, t_start)
    return _finish(cm, model, OPTIMAL, incumbent, best_vals, optima, None, nodes, t_start)


def _finish(cm, model, status, rooms, vals, optima, stage, nodes, t_start) -> IpSolution:
    assignment = cm.assignment(rooms) if cm.n_items else Assignment()
    allv = _values(vals)
    objective = {name: allv.get(name, 0) for name, _ in model.objective_spec}
    return IpSolution(status, assignment, objective, tuple(optima), stage, nodes,
                      time.perf_counter() - t_start, "bnb")
