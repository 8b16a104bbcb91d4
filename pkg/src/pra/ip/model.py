"""Integer programs for multi-period patient-to-room assignment.

Two families share one builder:

* time-indexed (``Q``, ``R``, ``S``): ``x_prt``, ``y_pqt``, ``d_prt`` (transfer
  after ``t``), ``g_rt`` (room female in ``t``), ``s_prt`` (requester alone);
* stay-indexed (``T``, ``U``, ``V``, ``Tstar``, ``Ustar``): one room per stay,
  ``x_pr``, ``y_pq``, ``g_rt``, ``s_prt``; transfers are impossible.

Models live on a planning window ``[start, end]`` of the horizon. ``fixed``
holds the previous room of patients already in hospital: prefix equalities
for ``T``/``U``/``V``, a last-priority objective for the starred variants,
and the reference room for transfer counting at ``start`` in the
time-indexed family (only for patients that arrived before ``start``).

Constraint rows and variables are built lazily; the branch-and-bound
solver works from the compiled arrays and only needs rows for
verification and export.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from pra.errors import ConfigError, UnsupportedCapacityError
from pra.model import FEMALE, Assignment, Instance, Patient
from pra.scoring import common_stay

TIME_INDEXED = ("Q", "R", "S")
STAY_INDEXED = ("T", "U", "V", "Tstar", "Ustar")
VARIANTS = TIME_INDEXED + STAY_INDEXED
NEEDS_SMAX = frozenset({"R", "S", "U", "V", "Ustar"})
NEEDS_WMIN = frozenset({"S", "V"})
PREFIX = frozenset({"T", "U", "V"})
STARRED = frozenset({"Tstar", "Ustar"})

# (objective, sense) in priority order
OBJECTIVES = {
    "Q": (("trans", "min"), ("priv", "max"), ("pref", "min")),
    "R": (("pref", "min"), ("trans", "min")),
    "S": (("trans", "min"),),
    "T": (("priv", "max"), ("pref", "min")),
    "U": (("pref", "min"),),
    "V": (("zero", "min"),),
    "Tstar": (("priv", "max"), ("pref", "min"), ("fix", "max")),
    "Ustar": (("pref", "min"), ("fix", "max")),
}

FAMILY_ORDER = ("assign", "prefix", "cap_female", "cap_male", "single", "pair", "transfer", "smax", "wmin")


@dataclass(frozen=True)
class LinearConstraint:
    family: str
    name: str
    terms: tuple[tuple[str, int], ...]
    sense: str  # "<=", ">=", "="
    rhs: int

    def holds(self, values: Mapping[str, int]) -> bool:
        lhs = sum(c * values.get(v, 0) for v, c in self.terms)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class Objective:
    name: str
    sense: str  # "min" or "max"
    terms: tuple[tuple[str, int], ...]

    def value(self, values: Mapping[str, int]) -> int:
        return sum(c * values.get(v, 0) for v, c in self.terms)


class IpModel:
    """One of the IP variants on a window of an instance.

    Parameters
    ----------
    variant : str
        ``Q``, ``R``, ``S``, ``T``, ``U``, ``V``, ``Tstar`` or ``Ustar``.
    instance, scorer
        Data and roommate-fit scorer (its singletons must score 0).
    smax, wmin : mapping period -> int, optional
        Right-hand sides of the single-room and roommate-score fixings;
        required by the variants that use them.
    start, end : int
        Planning window; defaults to the whole horizon.
    fixed : mapping patient id -> room id, optional
        Previous rooms (defaults to the instance's preassigned pairs).
    """

    def __init__(self, variant: str, instance: Instance, scorer, *, smax=None, wmin=None,
                 start: int = 1, end: int | None = None, fixed: Mapping[str, str] | None = None):
        if variant not in VARIANTS:
            raise ConfigError(f"unknown IP variant {variant!r}")
        end = instance.horizon if end is None else end
        if not 1 <= start <= instance.horizon or not start - 1 <= end <= instance.horizon:
            raise ConfigError(f"bad planning window [{start}, {end}]")
        for r in instance.rooms:
            if r.capacity > 2:
                raise UnsupportedCapacityError(f"room {r.id!r}: the IPs model rooms with at most two beds")
        if not scorer.singletons_free:
            raise ConfigError(f"scorer {scorer.spec()!r} scores lone patients; the pairwise IPs cannot express it")
        self.variant = variant
        self.instance = instance
        self.scorer = scorer
        self.start = start
        self.end = end
        self.periods = tuple(range(start, end + 1))
        self.fixed = dict(instance.preassigned if fixed is None else fixed)
        for pid, rid in self.fixed.items():
            if pid not in instance.patient_index or rid not in instance.room_index:
                raise ConfigError(f"fixed pair ({pid}, {rid}) references unknown ids")
        if variant in NEEDS_SMAX:
            if smax is None:
                raise ConfigError(f"variant {variant} needs s^max fixings")
            self.smax = {t: int(smax[t]) for t in self.periods}
        else:
            self.smax = None
        if variant in NEEDS_WMIN:
            if wmin is None:
                raise ConfigError(f"variant {variant} needs w^min fixings")
            self.wmin = {t: int(wmin[t]) for t in self.periods}
        else:
            self.wmin = None
        self.patients: tuple[Patient, ...] = tuple(
            p for p in instance.patients if max(p.arrival, start) < min(p.discharge, end + 1))
        self.weights: dict[tuple[str, str], int] = {}
        self.overlap: dict[tuple[str, str], int] = {}
        pats = self.patients
        for i, p in enumerate(pats):
            for q in pats[i + 1:]:
                if p.sex != q.sex:
                    continue
                common = common_stay(p, q, start, end)
                if common <= 0:
                    continue
                w = scorer.score((p, q))
                if w < 0:
                    raise ConfigError(f"negative weight for ({p.id}, {q.id})")
                self.weights[p.id, q.id] = w
                self.overlap[p.id, q.id] = common

    # -- structure -----------------------------------------------------

    @property
    def time_indexed(self) -> bool:
        return self.variant in TIME_INDEXED

    @property
    def objective_spec(self) -> tuple[tuple[str, str], ...]:
        return OBJECTIVES[self.variant]

    @property
    def rooms(self):
        return self.instance.rooms

    def window_periods(self, p: Patient) -> range:
        return range(max(p.arrival, self.start), min(p.discharge, self.end + 1))

    def present(self, t: int) -> list[Patient]:
        return [p for p in self.patients if p.arrival <= t < p.discharge]

    def boundary_rooms(self) -> dict[str, str]:
        """Rooms held at ``start - 1`` by fixed patients (time-indexed transfer reference)."""
        out = {}
        for p in self.patients:
            if p.id in self.fixed and p.arrival < self.start and p.present(self.start):
                out[p.id] = self.fixed[p.id]
        return out

    # -- variable names ------------------------------------------------

    @staticmethod
    def xname(p: str, r: str, t: int | None = None) -> str:
        return f"x_p{p}_r{r}" if t is None else f"x_p{p}_r{r}_t{t}"

    @staticmethod
    def yname(p: str, q: str, t: int | None = None) -> str:
        return f"y_p{p}_q{q}" if t is None else f"y_p{p}_q{q}_t{t}"

    @staticmethod
    def gname(r: str, t: int) -> str:
        return f"g_r{r}_t{t}"

    @staticmethod
    def sname(p: str, r: str, t: int) -> str:
        return f"s_p{p}_r{r}_t{t}"

    @staticmethod
    def dname(p: str, r: str, t: int) -> str:
        return f"d_p{p}_r{r}_t{t}"

    def _pairs_at(self, t: int) -> list[tuple[str, str]]:
        ids = {p.id for p in self.present(t)}
        return [pq for pq in self.weights if pq[0] in ids and pq[1] in ids]

    def _transfer_steps(self) -> list[tuple[str, int]]:
        """``(p, t)`` such that a move between ``t`` and ``t + 1`` counts as a transfer."""
        steps = []
        boundary = self.boundary_rooms()
        for p in self.patients:
            if p.id in boundary:
                steps.append((p.id, self.start - 1))
            ts = list(self.window_periods(p))
            steps += [(p.id, t) for t in ts[:-1]]
        return steps

    @cached_property
    def variables(self) -> tuple[str, ...]:
        names: list[str] = []
        rooms = [r.id for r in self.rooms]
        if self.time_indexed:
            for p in self.patients:
                names += [self.xname(p.id, r, t) for t in self.window_periods(p) for r in rooms]
            for t in self.periods:
                names += [self.yname(p, q, t) for p, q in self._pairs_at(t)]
            boundary = self.boundary_rooms()
            for pid, t in self._transfer_steps():
                if t < self.start:
                    names.append(self.dname(pid, boundary[pid], t))
                else:
                    names += [self.dname(pid, r, t) for r in rooms]
        else:
            for p in self.patients:
                names += [self.xname(p.id, r) for r in rooms]
            names += [self.yname(p, q) for p, q in self.weights]
        names += [self.gname(r, t) for t in self.periods for r in rooms]
        for t in self.periods:
            for p in self.present(t):
                if p.single_request:
                    names += [self.sname(p.id, r, t) for r in rooms]
        return tuple(names)

    def _x(self, p: str, r: str, t: int) -> str:
        return self.xname(p, r, t) if self.time_indexed else self.xname(p, r)

    @cached_property
    def constraints(self) -> tuple[LinearConstraint, ...]:
        rows: dict[str, list[LinearConstraint]] = {f: [] for f in FAMILY_ORDER}
        rooms = self.rooms
        ti = self.time_indexed
        if ti:
            for p in self.patients:
                for t in self.window_periods(p):
                    rows["assign"].append(LinearConstraint(
                        "assign", f"assign_p{p.id}_t{t}", tuple((self.xname(p.id, r.id, t), 1) for r in rooms), "=", 1))
        else:
            for p in self.patients:
                rows["assign"].append(LinearConstraint(
                    "assign", f"assign_p{p.id}", tuple((self.xname(p.id, r.id), 1) for r in rooms), "=", 1))
            if self.variant in PREFIX:
                for p in self.patients:
                    if p.id in self.fixed:
                        r = self.fixed[p.id]
                        rows["prefix"].append(LinearConstraint(
                            "prefix", f"prefix_p{p.id}_r{r}", ((self.xname(p.id, r), 1),), "=", 1))
        for t in self.periods:
            present = self.present(t)
            for r in rooms:
                c = r.capacity
                for sex, family in ((FEMALE, "cap_female"), ("M", "cap_male")):
                    terms = [(self._x(p.id, r.id, t), 1) for p in present if p.sex == sex]
                    if c > 1:
                        terms += [(self.sname(p.id, r.id, t), c - 1) for p in present
                                  if p.sex == sex and p.single_request]
                    g = self.gname(r.id, t)
                    if sex == FEMALE:
                        rows[family].append(LinearConstraint(family, f"capf_r{r.id}_t{t}",
                                                             tuple(terms) + ((g, -c),), "<=", 0))
                    else:
                        rows[family].append(LinearConstraint(family, f"capm_r{r.id}_t{t}",
                                                             tuple(terms) + ((g, c),), "<=", c))
            for p in present:
                if p.single_request:
                    for r in rooms:
                        rows["single"].append(LinearConstraint(
                            "single", f"single_p{p.id}_r{r.id}_t{t}",
                            ((self.sname(p.id, r.id, t), 1), (self._x(p.id, r.id, t), -1)), "<=", 0))
            if self.smax is not None:
                terms = tuple((self.sname(p.id, r.id, t), 1) for p in present if p.single_request for r in rooms)
                rows["smax"].append(LinearConstraint("smax", f"smax_t{t}", terms, ">=", self.smax[t]))
            if self.wmin is not None:
                terms = tuple((self.yname(p, q, t if ti else None), self.weights[p, q])
                              for p, q in self._pairs_at(t) if self.weights[p, q])
                rows["wmin"].append(LinearConstraint("wmin", f"wmin_t{t}", terms, "<=", self.wmin[t]))
        if ti:
            for t in self.periods:
                for p, q in self._pairs_at(t):
                    for r in rooms:
                        rows["pair"].append(LinearConstraint(
                            "pair", f"pair_p{p}_q{q}_r{r.id}_t{t}",
                            ((self.yname(p, q, t), 1), (self.xname(p, r.id, t), -1), (self.xname(q, r.id, t), -1)),
                            ">=", -1))
            boundary = self.boundary_rooms()
            for pid, t in self._transfer_steps():
                if t < self.start:
                    r = boundary[pid]
                    rows["transfer"].append(LinearConstraint(
                        "transfer", f"transfer_p{pid}_r{r}_t{t}",
                        ((self.dname(pid, r, t), 1), (self.xname(pid, r, t + 1), 1)), ">=", 1))
                    continue
                for r in rooms:
                    rows["transfer"].append(LinearConstraint(
                        "transfer", f"transfer_p{pid}_r{r.id}_t{t}",
                        ((self.dname(pid, r.id, t), 1), (self.xname(pid, r.id, t), -1),
                         (self.xname(pid, r.id, t + 1), 1)), ">=", 0))
        else:
            for p, q in self.weights:
                for r in rooms:
                    rows["pair"].append(LinearConstraint(
                        "pair", f"pair_p{p}_q{q}_r{r.id}",
                        ((self.yname(p, q), 1), (self.xname(p, r.id), -1), (self.xname(q, r.id), -1)), ">=", -1))
        return tuple(c for f in FAMILY_ORDER for c in rows[f])

    def expression(self, name: str) -> tuple[tuple[str, int], ...]:
        """Linear expression of ``trans``, ``priv``, ``pref``, ``fix`` or ``zero``."""
        if name == "zero":
            return ()
        if name == "trans":
            if not self.time_indexed:
                return ()
            return tuple((v, 1) for v in self.variables if v.startswith("d_"))
        if name == "priv":
            return tuple((v, 1) for v in self.variables if v.startswith("s_"))
        if name == "pref":
            if self.time_indexed:
                return tuple((self.yname(p, q, t), self.weights[p, q])
                             for t in self.periods for p, q in self._pairs_at(t) if self.weights[p, q])
            return tuple((self.yname(p, q), self.overlap[p, q] * w) for (p, q), w in self.weights.items() if w)
        if name == "fix":
            if self.time_indexed:
                return ()
            return tuple((self.xname(pid, rid), 1) for pid, rid in sorted(self.fixed.items())
                         if any(p.id == pid for p in self.patients))
        raise ConfigError(f"unknown objective {name!r}")

    @cached_property
    def objectives(self) -> tuple[Objective, ...]:
        return tuple(Objective(name, sense, self.expression(name)) for name, sense in self.objective_spec)

    # -- solutions -----------------------------------------------------

    def values_from_assignment(self, assignment: Mapping[tuple[str, int], str]) -> dict[str, int]:
        """0/1 value of every variable induced by a window assignment."""
        vals = dict.fromkeys(self.variables, 0)
        occ: dict[tuple[str, int], list[str]] = {}
        for p in self.patients:
            for t in self.window_periods(p):
                occ.setdefault((assignment[p.id, t], t), []).append(p.id)
        if self.time_indexed:
            for p in self.patients:
                for t in self.window_periods(p):
                    vals[self.xname(p.id, assignment[p.id, t], t)] = 1
            for t in self.periods:
                for p, q in self._pairs_at(t):
                    if assignment[p, t] == assignment[q, t]:
                        vals[self.yname(p, q, t)] = 1
            boundary = self.boundary_rooms()
            for pid, t in self._transfer_steps():
                if t < self.start:
                    if assignment[pid, t + 1] != boundary[pid]:
                        vals[self.dname(pid, boundary[pid], t)] = 1
                elif assignment[pid, t] != assignment[pid, t + 1]:
                    vals[self.dname(pid, assignment[pid, t], t)] = 1
        else:
            stay = {}
            for p in self.patients:
                rooms = {assignment[p.id, t] for t in self.window_periods(p)}
                if len(rooms) != 1:
                    raise ConfigError(f"patient {p.id!r} changes rooms inside a stay-indexed model")
                stay[p.id] = rooms.pop()
                vals[self.xname(p.id, stay[p.id])] = 1
            for p, q in self.weights:
                if stay[p] == stay[q]:
                    vals[self.yname(p, q)] = 1
        pats = {p.id: p for p in self.patients}
        for (rid, t), ids in occ.items():
            if any(pats[pid].sex == FEMALE for pid in ids):
                vals[self.gname(rid, t)] = 1
            if len(ids) == 1 and pats[ids[0]].single_request:
                vals[self.sname(ids[0], rid, t)] = 1
        return vals

    def assignment_from_values(self, values: Mapping[str, float]) -> Assignment:
        rooms = [r.id for r in self.rooms]
        out = {}
        for p in self.patients:
            for t in self.window_periods(p):
                for r in rooms:
                    name = self.xname(p.id, r, t) if self.time_indexed else self.xname(p.id, r)
                    if values.get(name, 0) > 0.5:
                        out[p.id, t] = r
                        break
        return Assignment(out)

    def violated(self, values: Mapping[str, int]) -> list[LinearConstraint]:
        return [c for c in self.constraints if not c.holds(values)]

    def objective_values(self, values: Mapping[str, int]) -> dict[str, int]:
        return {name: Objective(name, "min", self.expression(name)).value(values)
                for name in ("trans", "priv", "pref", "fix")}


def build_model(variant: str, instance: Instance, scorer, fixings: Mapping | None = None, **kwargs) -> IpModel:
    """Build a variant; ``fixings`` may carry ``smax`` and ``wmin`` period maps."""
    fixings = dict(fixings or {})
    unknown = set(fixings) - {"smax", "wmin"}
    if unknown:
        raise ConfigError(f"unknown fixings {sorted(unknown)}")
    return IpModel(variant, instance, scorer, smax=fixings.get("smax"), wmin=fixings.get("wmin"), **kwargs)
