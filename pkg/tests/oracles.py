"""Independent reference solvers used by the tests.

Nothing here imports the code under test beyond the data classes and
scorers: room packings are enumerated directly and the multi-period
lexicographic optima come from exhaustive enumeration (stay-indexed) or a
dynamic program over per-period configurations (time-indexed).
"""

from __future__ import annotations

import itertools

import numpy as np

BIG = 1 << 20


def set_partitions(items):
    """All partitions of ``items`` into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def best_room_partition(patients, rooms, scorer):
    """Minimum total score over all packings of ``patients`` into ``rooms``; ``None`` if none fits.

    Blocks must be single-sex; block sizes are matched to room capacities by
    trying every injective block-to-room map. Empty rooms add ``w(())``.
    """
    caps = [r.capacity for r in rooms]
    best = None
    for part in set_partitions(patients):
        if len(part) > len(rooms):
            continue
        if any(len({p.sex for p in block}) > 1 for block in part):
            continue
        sizes = sorted((len(b) for b in part), reverse=True)
        cap_sorted = sorted(caps, reverse=True)
        if any(s > c for s, c in zip(sizes, cap_sorted)):
            continue
        value = sum(scorer.score(block) for block in part) + (len(rooms) - len(part)) * scorer.score(())
        if best is None or value < best:
            best = value
    return best


# -- multi-period lexicographic oracle ------------------------------------

def _window(inst, start, end):
    end = inst.horizon if end is None else end
    return start, end


def _period_configs(pats, rooms):
    """All feasible room tuples (one per patient in ``pats``) for one period."""
    caps = [r.capacity for r in rooms]
    out = []
    for combo in itertools.product(range(len(rooms)), repeat=len(pats)):
        load = [0] * len(rooms)
        sex = [None] * len(rooms)
        ok = True
        for p, r in zip(pats, combo):
            load[r] += 1
            if load[r] > caps[r] or (sex[r] is not None and sex[r] != p.sex):
                ok = False
                break
            sex[r] = p.sex
        if ok:
            out.append(combo)
    return out


def _local(pats, combo, scorer):
    """(fulfilled single requests, roommate score) of one period configuration."""
    by_room = {}
    for p, r in zip(pats, combo):
        by_room.setdefault(r, []).append(p)
    priv = sum(1 for g in by_room.values() if len(g) == 1 and g[0].single_request)
    pref = sum(scorer.score(g) for g in by_room.values() if len(g) > 1)
    return priv, pref


OBJECTIVE_ORDER = {
    "Q": (("trans", 1), ("priv", -1), ("pref", 1)),
    "R": (("pref", 1), ("trans", 1)),
    "S": (("trans", 1),),
    "T": (("priv", -1), ("pref", 1)),
    "U": (("pref", 1),),
    "V": (("zero", 1),),
    "Tstar": (("priv", -1), ("pref", 1), ("fix", -1)),
    "Ustar": (("pref", 1), ("fix", -1)),
}


def lexicographic_optimum(variant, inst, scorer, smax=None, wmin=None, fixed=None, start=1, end=None):
    """Optimal objective tuple (natural signs) of a variant, or ``None`` if infeasible.

    ``V`` only has the constant objective: it returns ``(0,)`` when feasible.
    """
    start, end = _window(inst, start, end)
    fixed = dict(inst.preassigned if fixed is None else fixed)
    rooms = list(inst.rooms)
    objs = OBJECTIVE_ORDER[variant]
    if variant not in ("R", "S", "U", "V", "Ustar"):
        smax = None
    if variant not in ("S", "V"):
        wmin = None
    if variant in ("Q", "R", "S"):
        best = _time_indexed(inst, scorer, rooms, objs, smax, wmin, fixed, start, end)
    else:
        best = _stay_indexed(variant, inst, scorer, rooms, objs, smax, wmin, fixed, start, end)
    if best is None:
        return None
    return tuple(sign * v for (name, sign), v in zip(objs, best))


def _stay_indexed(variant, inst, scorer, rooms, objs, smax, wmin, fixed, start, end):
    pats = [p for p in inst.patients if max(p.arrival, start) < min(p.discharge, end + 1)]
    ridx = {r.id: i for i, r in enumerate(rooms)}
    best = None
    choices = []
    for p in pats:
        if variant in ("T", "U", "V") and p.id in fixed:
            choices.append([ridx[fixed[p.id]]])
        else:
            choices.append(range(len(rooms)))
    for combo in itertools.product(*choices):
        priv = pref = 0
        ok = True
        for t in range(start, end + 1):
            sub = [(p, r) for p, r in zip(pats, combo) if p.present(t)]
            by_room = {}
            for p, r in sub:
                by_room.setdefault(r, []).append(p)
            for r, g in by_room.items():
                if len(g) > rooms[r].capacity or len({p.sex for p in g}) > 1:
                    ok = False
            if not ok:
                break
            pv = sum(1 for g in by_room.values() if len(g) == 1 and g[0].single_request)
            pf = sum(scorer.score(g) for g in by_room.values() if len(g) > 1)
            if smax is not None and pv < smax[t]:
                ok = False
                break
            if wmin is not None and pf > wmin[t]:
                ok = False
                break
            priv += pv
            pref += pf
        if not ok:
            continue
        fix = sum(1 for p, r in zip(pats, combo) if p.id in fixed and ridx[fixed[p.id]] == r)
        vals = {"trans": 0, "priv": priv, "pref": pref, "fix": fix, "zero": 0}
        vec = tuple(sign * vals[name] for name, sign in objs)
        if best is None or vec < best:
            best = vec
    return best


def _time_indexed(inst, scorer, rooms, objs, smax, wmin, fixed, start, end):
    """Dynamic program over periods; costs are encoded lexicographic vectors."""
    names = [n for n, _ in objs]
    signs = dict(objs)
    ridx = {r.id: i for i, r in enumerate(rooms)}

    def weight(name):
        if name not in names:
            return 0
        k = names.index(name)
        return signs[name] * BIG ** (len(names) - 1 - k)

    w_trans, w_priv, w_pref = weight("trans"), weight("priv"), weight("pref")
    prev_pats = None
    prev_cfg = None
    cost = None
    for t in range(start, end + 1):
        pats = [p for p in inst.patients if p.present(t)]
        cfgs = _period_configs(pats, rooms)
        local = np.zeros(len(cfgs), dtype=object)
        keep = []
        for j, combo in enumerate(cfgs):
            pv, pf = _local(pats, combo, scorer)
            if smax is not None and pv < smax[t]:
                continue
            if wmin is not None and pf > wmin[t]:
                continue
            keep.append(j)
            local[j] = w_priv * pv + w_pref * pf
        if not keep:
            return None
        cfg = np.array([cfgs[j] for j in keep], dtype=np.int64).reshape(len(keep), len(pats))
        loc = np.array([local[j] for j in keep], dtype=object)
        if cost is None:
            trans0 = np.zeros(len(keep), dtype=np.int64)
            for a, p in enumerate(pats):
                if p.id in fixed and p.arrival < start:
                    trans0 += cfg[:, a] != ridx[fixed[p.id]]
            cost = loc + trans0.astype(object) * w_trans
        else:
            shared = [(a, b) for a, p in enumerate(prev_pats) for b, q in enumerate(pats) if p.id == q.id]
            moves = np.zeros((len(prev_cfg), len(cfg)), dtype=np.int64)
            for a, b in shared:
                moves += prev_cfg[:, a][:, None] != cfg[:, b][None, :]
            total = cost[:, None] + moves.astype(object) * w_trans
            cost = total.min(axis=0) + loc
        prev_pats, prev_cfg = pats, cfg
    best = cost.min()
    out = []
    for k in range(len(names)):
        scale = BIG ** (len(names) - 1 - k)
        q, best = divmod(best + scale // 2, scale)
        best -= scale // 2
        out.append(q)
    return tuple(out)
