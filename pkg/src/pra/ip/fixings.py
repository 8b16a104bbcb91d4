"""Per-period right-hand sides used to fix earlier lexicographic stages."""

from __future__ import annotations

from typing import Iterable

from pra.errors import InfeasibleError, UnsupportedCapacityError
from pra.model import FEMALE, Instance


def alone_capacity(n: int, singles: int, doubles: int) -> int:
    """Most of ``n`` patients of one sex that can sleep alone in the given rooms; -1 if they do not fit."""
    if n <= singles + doubles:
        return n
    if n <= singles + 2 * doubles:
        # every extra patient beyond one-per-room fills a double
        return 2 * (singles + doubles) - n
    return -1


def period_smax(n_female: int, req_female: int, n_male: int, req_male: int,
                singles: int, doubles: int) -> int:
    """Maximum number of requesters that can be alone in one period; -1 if infeasible."""
    best = -1
    for a in range(singles + 1):
        for b in range(doubles + 1):
            fa = alone_capacity(n_female, a, b)
            ma = alone_capacity(n_male, singles - a, doubles - b)
            if fa < 0 or ma < 0:
                continue
            best = max(best, min(req_female, fa) + min(req_male, ma))
    return best


def compute_smax(instance: Instance, periods: Iterable[int] | None = None,
                 patient_ids: Iterable[str] | None = None) -> dict[int, int]:
    """``s^max_t``: most fulfilled single-room requests possible in each period on its own.

    ``patient_ids`` restricts the population (the dynamic view); by default
    every patient present in ``t`` counts.
    """
    singles = doubles = 0
    for r in instance.rooms:
        if r.capacity == 1:
            singles += 1
        elif r.capacity == 2:
            doubles += 1
        else:
            raise UnsupportedCapacityError(f"room {r.id!r}: capacity {r.capacity} not supported")
    allowed = None if patient_ids is None else set(patient_ids)
    out = {}
    for t in (instance.periods() if periods is None else periods):
        counts = {FEMALE: [0, 0], "M": [0, 0]}
        for pid in instance.present_ids(t):
            if allowed is not None and pid not in allowed:
                continue
            p = instance.patient(pid)
            counts[p.sex][0] += 1
            counts[p.sex][1] += int(p.single_request)
        value = period_smax(counts[FEMALE][0], counts[FEMALE][1], counts["M"][0], counts["M"][1],
                            singles, doubles)
        if value < 0:
            raise InfeasibleError(f"period {t}: patients do not fit into the rooms", period=t)
        out[t] = value
    return out
