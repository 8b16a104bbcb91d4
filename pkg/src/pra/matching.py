"""Single-period roommate problem (RMP) solved as a minimum-weight perfect matching.

For rooms of capacity 1 or 2 the optimal partition of the present patients
into rooms is read off a minimum-weight perfect matching of an auxiliary
graph: patient vertices, plus ``k = 2R - n`` auxiliary vertices standing
for single occupancy and empty beds. The first ``alpha`` auxiliary vertices
(``X1``) are not joined to each other, which forces at least ``alpha``
patients to sleep alone whenever there are too few double beds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from pra.blossom import min_weight_perfect_matching as _mwpm
from pra.errors import InfeasibleError, UnsupportedCapacityError
from pra.model import FEMALE, Instance, Patient, Room, sex_split_feasible

PATIENT = "patient"
AUX_FORCED = "x1"
AUX_FREE = "x2"


@dataclass(frozen=True)
class RmpGraph:
    """Auxiliary graph; vertex order is females, males, X1, X2."""

    females: tuple[Patient, ...]
    males: tuple[Patient, ...]
    alpha: int
    k: int
    edges: tuple[tuple[int, int, int], ...]

    @property
    def n_patients(self) -> int:
        return len(self.females) + len(self.males)

    @property
    def n_vertices(self) -> int:
        return self.n_patients + self.k

    def vertex_kind(self, v: int) -> str:
        if v < self.n_patients:
            return PATIENT
        return AUX_FORCED if v < self.n_patients + self.alpha else AUX_FREE

    def patient(self, v: int) -> Patient:
        nf = len(self.females)
        return self.females[v] if v < nf else self.males[v - nf]

    def to_edge_list(self) -> str:
        """Plain-text dump: ``n m`` header, then ``u v cost`` per edge."""
        lines = [f"{self.n_vertices} {len(self.edges)}"]
        lines += [f"{u} {v} {c}" for u, v, c in self.edges]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]
    cost: int
    n_vertices: int = 0

    @property
    def perfect(self) -> bool:
        covered = {v for e in self.pairs for v in e}
        return len(covered) == self.n_vertices == 2 * len(self.pairs)


@dataclass(frozen=True)
class RoomPartition:
    """Occupant sets per room id (empty tuple for an empty room)."""

    sets: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def occupied(self) -> dict[str, tuple[str, ...]]:
        return {r: s for r, s in self.sets.items() if s}

    def room_of(self) -> dict[str, str]:
        return {pid: rid for rid, s in self.sets.items() for pid in s}

    def value(self, scorer, patients: Mapping[str, Patient]) -> int:
        return sum(scorer.score([patients[pid] for pid in s]) for s in self.sets.values())


def _check_rooms(rooms: Sequence[Room]) -> tuple[int, int]:
    r1 = r2 = 0
    for r in rooms:
        if r.capacity == 1:
            r1 += 1
        elif r.capacity == 2:
            r2 += 1
        else:
            raise UnsupportedCapacityError(
                f"room {r.id!r} has capacity {r.capacity}; the matching bound handles capacities 1 and 2 only")
    return r1, r2


def build_rmp_graph(females: Sequence[Patient], males: Sequence[Patient],
                    rooms: Sequence[Room], scorer) -> RmpGraph:
    females = tuple(females)
    males = tuple(males)
    r1, r2 = _check_rooms(rooms)
    n_f, n_m = len(females), len(males)
    n_rooms = r1 + r2
    if 2 * n_rooms < n_f + n_m or not sex_split_feasible(n_f, n_m, [r.capacity for r in rooms]):
        raise InfeasibleError(f"{n_f} female and {n_m} male patients do not fit into the rooms")
    if r2 < 1:
        raise UnsupportedCapacityError("the matching graph needs at least one double room")
    k = 2 * n_rooms - n_f - n_m
    alpha = max(n_f + n_m - 2 * r2, 0)
    pats = females + males
    n_p = len(pats)
    empty = scorer.score(())
    edges: list[tuple[int, int, int]] = []
    for group, offset in ((females, 0), (males, n_f)):
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                edges.append((offset + i, offset + j, scorer.score((group[i], group[j]))))
    for v, p in enumerate(pats):
        alone = scorer.score((p,))
        for x in range(k):
            edges.append((v, n_p + x, alone))
    for x in range(alpha, k):
        for y in range(x + 1, k):
            edges.append((n_p + x, n_p + y, empty))
    return RmpGraph(females, males, alpha, k, tuple(edges))


def min_weight_perfect_matching(n_vertices: int, edges: Iterable[tuple[int, int, int]]) -> Matching | None:
    """Minimum-cost perfect matching of a general graph; ``None`` if none exists."""
    result = _mwpm(n_vertices, list(edges))
    if result is None:
        return None
    pairs, cost = result
    return Matching(tuple(pairs), cost, n_vertices)


def decode_partition(matching: Matching, graph: RmpGraph, rooms: Sequence[Room]) -> RoomPartition:
    """Turn matching edges into occupant sets and place them into concrete rooms."""
    doubles = [r.id for r in rooms if r.capacity == 2]
    singles = [r.id for r in rooms if r.capacity == 1]
    pairs: list[tuple[str, str]] = []
    alone: list[str] = []
    for u, v in matching.pairs:
        ku, kv = graph.vertex_kind(u), graph.vertex_kind(v)
        if ku == PATIENT and kv == PATIENT:
            pairs.append((graph.patient(u).id, graph.patient(v).id))
        elif ku == PATIENT:
            alone.append(graph.patient(u).id)
        elif kv == PATIENT:
            alone.append(graph.patient(v).id)
    if len(pairs) > len(doubles):
        raise AssertionError("matching uses more roommate pairs than there are double rooms")
    sets: dict[str, tuple[str, ...]] = {}
    free_doubles = list(doubles)
    for pair in pairs:
        sets[free_doubles.pop(0)] = pair
    spare = singles + free_doubles
    if len(alone) > len(spare):
        raise AssertionError("matching leaves more lone patients than free rooms")
    for pid in alone:
        sets[spare.pop(0)] = (pid,)
    for rid in spare:
        sets[rid] = ()
    return RoomPartition({r.id: sets[r.id] for r in rooms})


def solve_rmp(females: Sequence[Patient], males: Sequence[Patient], rooms: Sequence[Room],
              scorer) -> tuple[RoomPartition, int]:
    """Optimal single-period partition and its total score."""
    females, males = tuple(females), tuple(males)
    r1, r2 = _check_rooms(rooms)
    n = len(females) + len(males)
    if r2 == 0:
        if n > r1:
            raise InfeasibleError(f"{n} patients but only {r1} single rooms")
        ids = [p.id for p in females + males]
        sets = {r.id: ((ids[i],) if i < n else ()) for i, r in enumerate(rooms)}
        value = sum(scorer.score((p,)) for p in females + males) + (r1 - n) * scorer.score(())
        return RoomPartition(sets), value
    graph = build_rmp_graph(females, males, rooms, scorer)
    matching = min_weight_perfect_matching(graph.n_vertices, graph.edges)
    if matching is None:
        raise AssertionError("feasible RMP instance without perfect matching")
    # w(empty) == 0 for every scorer, so aux-aux edges and empty rooms cost nothing
    return decode_partition(matching, graph, rooms), matching.cost


def period_groups(instance: Instance, t: int, patient_ids: Iterable[str] | None = None):
    ids = instance.present_ids(t) if patient_ids is None else patient_ids
    females, males = [], []
    for pid in ids:
        p = instance.patient(pid)
        (females if p.sex == FEMALE else males).append(p)
    return females, males


def wmin(instance: Instance, scorer, periods: Iterable[int] | None = None,
         cache: dict | None = None) -> tuple[dict[int, int], int]:
    """Per-period RMP optima and their sum, a lower bound on the total roommate score.

    ``cache`` (optional) maps the tuple of present patient ids to a value and
    is shared across calls on instances with the same rooms and scorer.
    """
    per: dict[int, int] = {}
    for t in (instance.periods() if periods is None else periods):
        ids = instance.present_ids(t)
        if cache is not None and ids in cache:
            per[t] = cache[ids]
            continue
        females, males = period_groups(instance, t)
        try:
            _, value = solve_rmp(females, males, instance.rooms, scorer)
        except InfeasibleError as exc:
            raise InfeasibleError(f"period {t}: {exc}", period=t) from None
        per[t] = value
        if cache is not None:
            cache[ids] = value
    return per, sum(per.values())
