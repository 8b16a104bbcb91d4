"""Problem data, assignment feasibility and the three objective evaluators.

Periods are 1-based. A patient occupies a bed in the periods
``arrival <= t < discharge``; the discharge period itself is free.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from pra.errors import (
    IncompleteAssignmentError,
    InfeasibleAssignmentError,
    InstanceError,
    PeriodRangeError,
)

FEMALE = "F"
MALE = "M"
SEXES = (FEMALE, MALE)

_ID_RE = re.compile(r"^[A-Za-z0-9_.]+$")


@dataclass(frozen=True)
class Patient:
    id: str
    sex: str
    arrival: int
    discharge: int
    age: int | None = None
    single_request: bool = False
    registration: int | None = None

    def __post_init__(self):
        if self.sex not in SEXES:
            raise InstanceError(f"patient {self.id!r}: sex must be 'F' or 'M', got {self.sex!r}")
        if self.arrival > self.discharge:
            raise InstanceError(f"patient {self.id!r}: arrival {self.arrival} after discharge {self.discharge}")
        if self.age is not None and self.age < 0:
            raise InstanceError(f"patient {self.id!r}: negative age")
        if self.registration is not None and self.registration > self.arrival:
            raise InstanceError(f"patient {self.id!r}: registration after arrival")

    @property
    def registered(self) -> int:
        """Registration period, defaulting to the arrival period."""
        return self.arrival if self.registration is None else self.registration

    @property
    def periods(self) -> range:
        return range(self.arrival, self.discharge)

    @property
    def length_of_stay(self) -> int:
        return self.discharge - self.arrival

    def present(self, t: int) -> bool:
        return self.arrival <= t < self.discharge


@dataclass(frozen=True)
class Room:
    id: str
    capacity: int

    def __post_init__(self):
        if self.capacity < 1:
            raise InstanceError(f"room {self.id!r}: capacity must be >= 1")


@dataclass(frozen=True)
class Instance:
    horizon: int
    rooms: tuple[Room, ...]
    patients: tuple[Patient, ...]
    preassigned: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "rooms", tuple(self.rooms))
        object.__setattr__(self, "patients", tuple(self.patients))
        object.__setattr__(self, "preassigned", frozenset(tuple(x) for x in self.preassigned))
        if self.horizon < 1:
            raise InstanceError("horizon must be >= 1")
        seen: set[str] = set()
        for r in self.rooms:
            if r.id in seen:
                raise InstanceError(f"duplicate room id {r.id!r}")
            if not _ID_RE.match(r.id):
                raise InstanceError(f"room id {r.id!r} must match [A-Za-z0-9_.]+")
            seen.add(r.id)
        seen = set()
        for p in self.patients:
            if p.id in seen:
                raise InstanceError(f"duplicate patient id {p.id!r}")
            if not _ID_RE.match(p.id):
                raise InstanceError(f"patient id {p.id!r} must match [A-Za-z0-9_.]+")
            seen.add(p.id)
            for t in (p.arrival, p.discharge, p.registered):
                if not 1 <= t <= self.horizon:
                    raise InstanceError(f"patient {p.id!r}: period {t} outside 1..{self.horizon}")
        rooms = self.room_index
        pats = self.patient_index
        fixed_patients: set[str] = set()
        for pid, rid in self.preassigned:
            if pid not in pats:
                raise InstanceError(f"preassigned patient {pid!r} does not exist")
            if rid not in rooms:
                raise InstanceError(f"preassigned room {rid!r} does not exist")
            if pid in fixed_patients:
                raise InstanceError(f"patient {pid!r} preassigned twice")
            fixed_patients.add(pid)
            if self.patients[pats[pid]].arrival != 1:
                raise InstanceError(f"preassigned patient {pid!r} must have arrived in period 1")

    def __getstate__(self):
        # cached lookups are rebuilt on demand; mapping proxies do not pickle
        return {k: getattr(self, k) for k in ("horizon", "rooms", "patients", "preassigned")}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)

    @cached_property
    def patient_index(self) -> Mapping[str, int]:
        return MappingProxyType({p.id: i for i, p in enumerate(self.patients)})

    @cached_property
    def room_index(self) -> Mapping[str, int]:
        return MappingProxyType({r.id: i for i, r in enumerate(self.rooms)})

    @cached_property
    def _present(self) -> tuple[tuple[str, ...], ...]:
        table: list[list[str]] = [[] for _ in range(self.horizon + 1)]
        for p in self.patients:
            for t in p.periods:
                table[t].append(p.id)
        return tuple(tuple(x) for x in table)

    def patient(self, pid: str) -> Patient:
        return self.patients[self.patient_index[pid]]

    def room(self, rid: str) -> Room:
        return self.rooms[self.room_index[rid]]

    def periods(self) -> range:
        return range(1, self.horizon + 1)

    def present_ids(self, t: int) -> tuple[str, ...]:
        """Ids of patients needing a bed in period ``t`` (instance order)."""
        _check_period(self, t)
        return self._present[t]

    def rooms_by_capacity(self) -> dict[int, int]:
        counts: dict[int, int] = defaultdict(int)
        for r in self.rooms:
            counts[r.capacity] += 1
        return dict(counts)

    def beds(self) -> int:
        return sum(r.capacity for r in self.rooms)

    def replace(self, **changes) -> Instance:
        data = dict(horizon=self.horizon, rooms=self.rooms, patients=self.patients,
                    preassigned=self.preassigned)
        data.update(changes)
        return Instance(**data)


def _check_period(instance: Instance, t: int) -> None:
    if not 1 <= t <= instance.horizon:
        raise PeriodRangeError(f"period {t} outside 1..{instance.horizon}")


def patients_present(instance: Instance, t: int, sex: str | None = None,
                     single_request: bool | None = None) -> set[str]:
    """Patients in hospital during period ``t``, optionally filtered by sex or request."""
    ids = instance.present_ids(t)
    out = set()
    for pid in ids:
        p = instance.patient(pid)
        if sex is not None and p.sex != sex:
            continue
        if single_request is not None and p.single_request != single_request:
            continue
        out.add(pid)
    return out


class Assignment(Mapping):
    """Immutable map ``(patient id, period) -> room id``."""

    __slots__ = ("_rooms",)

    def __init__(self, rooms: Mapping[tuple[str, int], str] | Iterable[tuple[tuple[str, int], str]] = ()):
        self._rooms = MappingProxyType(dict(rooms))

    @classmethod
    def from_stays(cls, instance: Instance, stays: Mapping[str, str]) -> Assignment:
        """One room per patient for the whole stay (no transfers)."""
        return cls({(pid, t): rid for pid, rid in stays.items() for t in instance.patient(pid).periods})

    def __getitem__(self, key):
        return self._rooms[key]

    def __iter__(self):
        return iter(self._rooms)

    def __len__(self):
        return len(self._rooms)

    def __repr__(self):
        return f"Assignment({dict(self._rooms)!r})"

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return dict(self._rooms) == dict(other._rooms)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._rooms.items()))

    def __reduce__(self):
        return (Assignment, (dict(self._rooms),))

    def occupancy(self) -> dict[tuple[str, int], list[str]]:
        """``(room, period) -> occupant ids``; only non-empty cells."""
        occ: dict[tuple[str, int], list[str]] = defaultdict(list)
        for (pid, t), rid in self._rooms.items():
            occ[rid, t].append(pid)
        return dict(occ)

    def occupants(self, room: str, t: int) -> set[str]:
        return {pid for (pid, s), rid in self._rooms.items() if s == t and rid == room}

    def restrict(self, periods: Iterable[int]) -> Assignment:
        keep = set(periods)
        return Assignment({k: v for k, v in self._rooms.items() if k[1] in keep})

    def merged(self, other: Mapping[tuple[str, int], str]) -> Assignment:
        data = dict(self._rooms)
        data.update(other)
        return Assignment(data)


@dataclass(frozen=True)
class ObjectiveValues:
    transfers: int
    roommate_fit: int
    singles_fulfilled: int
    scale: int = 1

    def __post_init__(self):
        if min(self.transfers, self.roommate_fit, self.singles_fulfilled) < 0:
            raise ValueError("objective values must be nonnegative")

    def as_dict(self) -> dict[str, int]:
        return {"transfers": self.transfers, "roommate_fit": self.roommate_fit,
                "singles_fulfilled": self.singles_fulfilled, "scale": self.scale}


@dataclass(frozen=True)
class Violation:
    constraint: str
    period: int | None = None
    room: str | None = None
    patient: str | None = None
    detail: str = field(default="", compare=False)

    def __str__(self):
        where = ", ".join(f"{k}={v}" for k, v in
                          (("room", self.room), ("patient", self.patient), ("t", self.period)) if v is not None)
        return f"{self.constraint}({where}): {self.detail}"


def _require_total(assignment: Mapping, instance: Instance) -> None:
    for p in instance.patients:
        for t in p.periods:
            if (p.id, t) not in assignment:
                raise IncompleteAssignmentError(f"no room for patient {p.id!r} in period {t}")


def evaluate_transfers(assignment: Mapping, instance: Instance) -> int:
    """Number of room changes between consecutive periods of each stay."""
    _require_total(assignment, instance)
    total = 0
    for p in instance.patients:
        for t in range(p.arrival + 1, p.discharge):
            if assignment[p.id, t] != assignment[p.id, t - 1]:
                total += 1
    return total


def evaluate_roommate_fit(assignment: Mapping, instance: Instance, scorer) -> int:
    """Sum of ``scorer`` over the occupant set of every room and period."""
    occ = _occupancy(assignment)
    total = 0
    empty = scorer.score(())
    for t in instance.periods():
        for r in instance.rooms:
            ids = occ.get((r.id, t))
            if not ids:
                total += empty
                continue
            if len(ids) > r.capacity:
                raise InfeasibleAssignmentError(
                    f"room {r.id!r} holds {len(ids)} patients in period {t} (capacity {r.capacity})")
            total += scorer.score([instance.patient(pid) for pid in ids])
    return total


def evaluate_singles(assignment: Mapping, instance: Instance) -> int:
    """Periods in which a single-room requester is the only occupant of its room."""
    occ = _occupancy(assignment)
    total = 0
    for (rid, t), ids in occ.items():
        if len(ids) == 1 and instance.patient(ids[0]).single_request:
            total += 1
    return total


def evaluate_objectives(assignment: Mapping, instance: Instance, scorer) -> ObjectiveValues:
    return ObjectiveValues(
        transfers=evaluate_transfers(assignment, instance),
        roommate_fit=evaluate_roommate_fit(assignment, instance, scorer),
        singles_fulfilled=evaluate_singles(assignment, instance),
        scale=scorer.scale,
    )


def _occupancy(assignment: Mapping) -> dict[tuple[str, int], list[str]]:
    if isinstance(assignment, Assignment):
        return assignment.occupancy()
    occ: dict[tuple[str, int], list[str]] = defaultdict(list)
    for (pid, t), rid in assignment.items():
        occ[rid, t].append(pid)
    return occ


def check_assignment(assignment: Mapping, instance: Instance) -> list[Violation]:
    """All violations of totality, capacity and sex separation; empty when feasible."""
    out: list[Violation] = []
    for p in instance.patients:
        for t in p.periods:
            if (p.id, t) not in assignment:
                out.append(Violation("totality", t, None, p.id, "no room assigned"))
    pats = instance.patient_index
    rooms = instance.room_index
    for (pid, t), rid in assignment.items():
        if pid not in pats:
            out.append(Violation("totality", t, rid, pid, "unknown patient"))
        elif not instance.patient(pid).present(t):
            out.append(Violation("totality", t, rid, pid, "period outside the stay"))
        if rid not in rooms:
            out.append(Violation("totality", t, rid, pid, "unknown room"))
    for (rid, t), ids in sorted(_occupancy(assignment).items()):
        if rid not in rooms:
            continue
        cap = instance.room(rid).capacity
        if len(ids) > cap:
            out.append(Violation("capacity", t, rid, None, f"{len(ids)} patients, {cap} beds"))
        sexes = {instance.patient(pid).sex for pid in ids if pid in pats}
        if len(sexes) > 1:
            out.append(Violation("sex_separation", t, rid, None, "female and male patients share the room"))
    return out


def sex_split_feasible(n_female: int, n_male: int, capacities: Sequence[int]) -> bool:
    """Whether rooms can be labelled female/male so that each sex gets enough beds.

    Capacities ``{1, 2}`` use a closed count over (singles, doubles) splits;
    anything else falls back to a subset-sum table over the capacities.
    """
    if n_female < 0 or n_male < 0:
        raise ValueError("negative patient count")
    caps = list(capacities)
    if sum(caps) < n_female + n_male:
        return False
    if all(c in (1, 2) for c in caps):
        r1 = caps.count(1)
        r2 = caps.count(2)
        for d in range(r2 + 1):
            s_needed = max(0, n_female - 2 * d)
            if s_needed > r1:
                continue
            if n_male <= 2 * (r2 - d) + (r1 - s_needed):
                return True
        return False
    total = sum(caps)
    # reachable[b]: some subset of rooms offers exactly b female beds
    reachable = 1
    for c in caps:
        reachable |= reachable << c
    for b in range(n_female, total + 1):
        if (reachable >> b) & 1 and total - b >= n_male:
            return True
    return False


def check_period_feasibility(instance: Instance, t: int) -> bool:
    """Whether the patients present in ``t`` admit a capacity- and sex-feasible packing."""
    _check_period(instance, t)
    n_f = n_m = 0
    for pid in instance.present_ids(t):
        if instance.patient(pid).sex == FEMALE:
            n_f += 1
        else:
            n_m += 1
    return sex_split_feasible(n_f, n_m, [r.capacity for r in instance.rooms])
