"""Random and hand-built instances shared by the tests."""

from __future__ import annotations

import random

from oracles import lexicographic_optimum

from pra.dynamic import view_at
from pra.errors import InfeasibleError
from pra.ip import compute_smax
from pra.matching import wmin
from pra.model import Instance, Patient, Room, sex_split_feasible
from pra.scoring import builtin_scorers


def ip_scorers():
    """Built-in scorers usable in the IPs (singletons score 0)."""
    return [s for s in builtin_scorers() if s.singletons_free]


def three_patient():
    """Two females aged 30 and 40, one male aged 50, one double and one single room."""
    rooms = [Room("d", 2), Room("s", 1)]
    pats = [Patient("a", "F", 1, 2, 30), Patient("b", "F", 1, 2, 40), Patient("c", "M", 1, 2, 50)]
    return Instance(1 + 1, rooms, pats)


def random_ward(rng: random.Random, max_patients: int = 8, max_rooms: int = 5):
    """One-period ``(females, males, rooms)`` that fits, capacities in {1, 2}."""
    while True:
        n_rooms = rng.randint(1, max_rooms)
        rooms = [Room(f"r{i}", rng.choice((1, 2))) for i in range(n_rooms)]
        n = rng.randint(0, max_patients)
        pats = [Patient(f"p{i}", rng.choice("FM"), 1, 2, rng.randint(18, 90), rng.random() < 0.3) for i in range(n)]
        females = [p for p in pats if p.sex == "F"]
        males = [p for p in pats if p.sex == "M"]
        if sex_split_feasible(len(females), len(males), [r.capacity for r in rooms]):
            return females, males, rooms


def random_instance(rng: random.Random, max_patients: int = 6, max_rooms: int = 4, max_periods: int = 4,
                    preassign: float = 0.3) -> Instance:
    """Multi-period instance; stays end by ``max_periods + 1`` so at most ``max_periods`` periods are occupied."""
    horizon = rng.randint(2, max_periods) + 1
    rooms = [Room(f"r{i}", rng.choice((1, 2, 2))) for i in range(rng.randint(1, max_rooms))]
    pats = []
    for i in range(rng.randint(1, max_patients)):
        a = rng.randint(1, horizon - 1)
        d = rng.randint(a + 1, horizon)
        pats.append(Patient(f"p{i}", rng.choice("FM"), a, d, rng.randint(18, 90), rng.random() < 0.4))
    pre = {(p.id, rng.choice(rooms).id) for p in pats if p.arrival == 1 and rng.random() < preassign}
    return Instance(horizon, rooms, pats, pre)


def feasible_instances(seed: int, count: int, **kwargs):
    """``count`` random instances whose every period fits, with their ``s^max``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng, **kwargs)
        try:
            smax = compute_smax(inst)
        except InfeasibleError:
            continue
        out.append((inst, smax))
    return out


def wmin_or_none(inst, scorer):
    try:
        return wmin(inst, scorer)[0]
    except InfeasibleError:
        return None


def cascade_trigger(extra_days: int = 0, single_age: int = 40) -> Instance:
    """Requester ``f1`` preassigned to the single room; on day 2 a female and a male register.

    With ``f1`` fixed to the single room the day-2 arrivals cannot be
    placed, so a zero-transfer plan does not exist from day 2 on.
    ``extra_days`` extends all stays.
    """
    end = 4 + extra_days
    rooms = [Room("d", 2), Room("s", 1)]
    pats = [Patient("f1", "F", 1, end, single_age, True, 1),
            Patient("f2", "F", 2, end, 45, False, 2),
            Patient("m1", "M", 2, end, 60, False, 2)]
    return Instance(end, rooms, pats, {("f1", "s")})


def smax_wmin_conflict(rng: random.Random) -> Instance:
    """The single-request count and the roommate bound cannot both be met.

    Period 2 holds requester ``a``, ``c`` and ``d``; ``d`` is close in age to
    ``a`` and far from ``c``. The period-2 roommate optimum pairs ``a`` with
    ``d``, while keeping ``a`` alone forces the costly pair ``c``, ``d``.
    Under ``abs-age`` or ``bounded-age:k=10`` no plan reaches both bounds.
    """
    base = rng.randint(20, 60)
    gap = rng.randint(15, 25)
    rooms = [Room("d", 2), Room("s", 1)]
    pats = [Patient("a", "F", 1, 3, base + gap, True),
            Patient("b", "F", 1, 2, base + rng.randint(0, 3)),
            Patient("c", "F", 1, 3, base),
            Patient("d", "F", 2, 3, base + gap + rng.randint(0, 3))]
    return Instance(3, rooms, pats)


def first_stage_feasible(inst, result, t, config):
    """Oracle verdict on the first IP of iteration ``t``, rebuilt from the committed rooms."""
    view = view_at(inst, t)
    sub = Instance(inst.horizon, inst.rooms, view)
    end = max(p.discharge - 1 for p in view)
    window = range(t, end + 1)
    if t == 1:
        fixed = dict(inst.preassigned)
    else:
        fixed = {p.id: result.assignment[p.id, t - 1] for p in view if p.present(t - 1) and p.present(t)}
    smax = compute_smax(sub, window)
    caps = {s: config.lam * v for s, v in wmin(sub, config.scorer, window)[0].items()}
    return lexicographic_optimum(config.first, sub, config.scorer, smax, caps, fixed, start=t, end=end) is not None
