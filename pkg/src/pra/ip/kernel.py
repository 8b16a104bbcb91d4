"""Depth-first branch and bound over room choices, compiled with numba when available.

An *item* is one decision: a whole stay (stay-indexed models) or one
patient-period (time-indexed models). Items are placed in a fixed order;
the search state lives in numpy arrays so a search can be suspended after
a node budget and resumed, which lets the caller enforce wall-clock limits.

Bounds per period ``t``:

* ``ub[t]``: most requesters that can still be alone given the partial
  placement (exact once every item is placed), -1 if the remaining
  patients no longer fit. Summed it bounds the privacy objective and it
  drives the ``s^max`` fixings;
* ``max(cur_pref[t], wlb[t])``: a lower bound on the roommate score of
  ``t`` (``wlb`` is the single-period optimum).
"""

from __future__ import annotations

import numpy as np

from pra._accel import njit

TRANS, NEGPRIV, PREF, NEGFIX, ZERO = 0, 1, 2, 3, 4
NOBJ = 5

# slots of the int64 scalar state vector
S_DEPTH = 0
S_TRANS = 1
S_FIX = 2
S_REMFIX = 3
S_UBSUM = 4
S_LBSUM = 5
S_PREFSUM = 6
S_NODES = 7
S_HASBEST = 8
S_BEST = 9
S_DONE = 10
S_ROOTLB = 11
S_STAMP = 12
S_LEAVES = 13
NSLOTS = 14

_DIGIT = 1 << 15
_HALF = 1 << 14


@njit
def sex_best(n, r, h0, h1, a, b):
    """Most lone requesters among ``n`` patients (``r`` requesters) of one sex.

    ``a``/``b`` empty singles/doubles given to this sex, ``h0``/``h1`` half
    full doubles whose occupant is a non-requester/requester. Returns -1 when
    the patients do not fit. Pairing two newcomers in a double costs at
    most one lone slot, while joining a lone requester always costs one, so
    pairs are used first.
    """
    free = a + b
    if n <= free + h0:
        u = n if n < free else free
        return (r if r < u else u) + h1
    extra = n - free - h0
    p = b if b < extra else extra
    j1 = extra - p
    if j1 > h1:
        return -1
    u = free - p
    return (r if r < u else u) + h1 - j1


@njit
def period_ub(t, e1, e2, hcnt, sa, rem):
    nf = rem[t, 0, 0] + rem[t, 0, 1]
    rf = rem[t, 0, 1]
    nm = rem[t, 1, 0] + rem[t, 1, 1]
    rm = rem[t, 1, 1]
    E1 = e1[t]
    E2 = e2[t]
    best = -1
    if nf == 0 or nm == 0:
        # only one sex still to place: give it every empty room
        vf = sex_best(nf, rf, hcnt[t, 0, 0], hcnt[t, 0, 1], E1 if nm == 0 else 0, E2 if nm == 0 else 0)
        vm = sex_best(nm, rm, hcnt[t, 1, 0], hcnt[t, 1, 1], E1 if nm > 0 else 0, E2 if nm > 0 else 0)
        if vf >= 0 and vm >= 0:
            best = vf + vm
    else:
        for af in range(E1 + 1):
            for bf in range(E2 + 1):
                vf = sex_best(nf, rf, hcnt[t, 0, 0], hcnt[t, 0, 1], af, bf)
                if vf < 0:
                    continue
                vm = sex_best(nm, rm, hcnt[t, 1, 0], hcnt[t, 1, 1], E1 - af, E2 - bf)
                if vm < 0:
                    continue
                if vf + vm > best:
                    best = vf + vm
    if best < 0:
        return -1
    return best + sa[t]


@njit
def _room_cat(r, t, occ_n, occ_p, cap, pat_sex, pat_req, e1, e2, hcnt, sa, sign):
    n = occ_n[r, t]
    if n == 0:
        if cap[r] == 1:
            e1[t] += sign
        else:
            e2[t] += sign
    elif n == 1:
        q = occ_p[r, t, 0]
        if cap[r] == 2:
            hcnt[t, pat_sex[q], pat_req[q]] += sign
        elif pat_req[q] == 1:
            sa[t] += sign


@njit
def _apply(d, i, r, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
           pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
           e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, smax, pcap, sc, ubsave):
    """Place item ``i`` in room ``r``; returns False when a period becomes infeasible."""
    p = item_pat[i]
    sx = pat_sex[p]
    rq = pat_req[p]
    ok = True
    s0 = item_start[i]
    for t in range(s0, item_end[i]):
        old_lb = max(cur_pref[t], wlb[t])
        _room_cat(r, t, occ_n, occ_p, cap, pat_sex, pat_req, e1, e2, hcnt, sa, -1)
        n = occ_n[r, t]
        if n == 1:
            w = W[p, occ_p[r, t, 0]]
            cur_pref[t] += w
            sc[S_PREFSUM] += w
        occ_p[r, t, n] = p
        occ_n[r, t] = n + 1
        _room_cat(r, t, occ_n, occ_p, cap, pat_sex, pat_req, e1, e2, hcnt, sa, 1)
        rem[t, sx, rq] -= 1
        sc[S_LBSUM] += max(cur_pref[t], wlb[t]) - old_lb
        ubsave[d, t - s0] = ub[t]
        u = period_ub(t, e1, e2, hcnt, sa, rem)
        sc[S_UBSUM] += u - ub[t]
        ub[t] = u
        if u < 0 or u < smax[t]:
            ok = False
        if pcap[t] >= 0 and cur_pref[t] > pcap[t]:
            ok = False
    prev = item_prev[i]
    if prev >= 0:
        if item_room[prev] != r:
            sc[S_TRANS] += 1
    elif item_prevroom[i] >= 0 and item_prevroom[i] != r:
        sc[S_TRANS] += 1
    fr = item_fixroom[i]
    if fr >= 0:
        sc[S_REMFIX] -= 1
        if fr == r:
            sc[S_FIX] += 1
    room_used[r] += 1
    item_room[i] = r
    return ok


@njit
def _undo(d, i, r, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
          pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
          e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, sc, ubsave):
    p = item_pat[i]
    sx = pat_sex[p]
    rq = pat_req[p]
    s0 = item_start[i]
    for t in range(s0, item_end[i]):
        old_lb = max(cur_pref[t], wlb[t])
        _room_cat(r, t, occ_n, occ_p, cap, pat_sex, pat_req, e1, e2, hcnt, sa, -1)
        n = occ_n[r, t] - 1
        occ_n[r, t] = n
        if n == 1:
            w = W[p, occ_p[r, t, 0]]
            cur_pref[t] -= w
            sc[S_PREFSUM] -= w
        _room_cat(r, t, occ_n, occ_p, cap, pat_sex, pat_req, e1, e2, hcnt, sa, 1)
        rem[t, sx, rq] += 1
        sc[S_LBSUM] += max(cur_pref[t], wlb[t]) - old_lb
        u = ubsave[d, t - s0]
        sc[S_UBSUM] += u - ub[t]
        ub[t] = u
    prev = item_prev[i]
    if prev >= 0:
        if item_room[prev] != r:
            sc[S_TRANS] -= 1
    elif item_prevroom[i] >= 0 and item_prevroom[i] != r:
        sc[S_TRANS] -= 1
    fr = item_fixroom[i]
    if fr >= 0:
        sc[S_REMFIX] += 1
        if fr == r:
            sc[S_FIX] -= 1
    room_used[r] -= 1
    item_room[i] = -1


@njit
def _lower_bounds(sc, lbv):
    lbv[TRANS] = sc[S_TRANS]
    lbv[NEGPRIV] = -sc[S_UBSUM]
    lbv[PREF] = sc[S_LBSUM]
    lbv[NEGFIX] = -(sc[S_FIX] + sc[S_REMFIX])
    lbv[ZERO] = 0


@njit
def _prune(sc, lbv, pin_on, pin_val, target):
    _lower_bounds(sc, lbv)
    for c in range(NOBJ):
        if pin_on[c] != 0 and lbv[c] > pin_val[c]:
            return True
    if sc[S_HASBEST] != 0 and lbv[target] >= sc[S_BEST]:
        return True
    return False


@njit
def _generate(d, i, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
              allowed, symcls, cls_mark, pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
              obj_order, cands, keys, ncand, ptr, sc):
    """Fill ``cands[d]`` with feasible rooms for item ``i``, best-looking first."""
    p = item_pat[i]
    sx = pat_sex[p]
    rq = pat_req[p]
    s0 = item_start[i]
    e0 = item_end[i]
    n_rooms = cap.shape[0]
    sc[S_STAMP] += 1
    stamp = sc[S_STAMP]
    cnt = 0
    for r in range(n_rooms):
        if not allowed[i, r]:
            continue
        fits = True
        for t in range(s0, e0):
            n = occ_n[r, t]
            if n >= cap[r] or (n > 0 and pat_sex[occ_p[r, t, 0]] != sx):
                fits = False
                break
        if not fits:
            continue
        if room_used[r] == 0 and symcls[r] >= 0:
            c = symcls[r]
            if cls_mark[c] == stamp:
                continue
            cls_mark[c] = stamp
        dpref = 0
        dpriv = 0
        joined = 0
        for t in range(s0, e0):
            if occ_n[r, t] == 1:
                q = occ_p[r, t, 0]
                dpref += W[p, q]
                joined = 1
                if pat_req[q] == 1:
                    dpriv += 1
            elif rq == 1:
                dpriv -= 1
        dtrans = 0
        prev = item_prev[i]
        if prev >= 0:
            if item_room[prev] != r:
                dtrans = 1
        elif item_prevroom[i] >= 0 and item_prevroom[i] != r:
            dtrans = 1
        dfix = -1 if item_fixroom[i] == r else 0
        key = 0
        for k in range(3):
            dv = 0
            if k < obj_order.shape[0]:
                o = obj_order[k]
                if o == TRANS:
                    dv = dtrans
                elif o == NEGPRIV:
                    dv = dpriv
                elif o == PREF:
                    dv = dpref
                elif o == NEGFIX:
                    dv = dfix
            dv += _HALF
            if dv < 0:
                dv = 0
            elif dv >= _DIGIT:
                dv = _DIGIT - 1
            key = key * _DIGIT + dv
        if rq == 1:
            tie = 2 if joined else (0 if cap[r] == 1 else 1)
        else:
            tie = 0 if joined else (1 if cap[r] == 2 else 2)
        key = (key * 4 + tie) * n_rooms + r
        # insertion sort by key
        j = cnt
        while j > 0 and keys[d, j - 1] > key:
            keys[d, j] = keys[d, j - 1]
            cands[d, j] = cands[d, j - 1]
            j -= 1
        keys[d, j] = key
        cands[d, j] = r
        cnt += 1
    ncand[d] = cnt
    ptr[d] = 0


@njit
def _leaf(sc, lbv, target, pin_on, pin_val, item_room, best_rooms, best_vals):
    vals = np.empty(NOBJ, np.int64)
    vals[TRANS] = sc[S_TRANS]
    vals[NEGPRIV] = -sc[S_UBSUM]
    vals[PREF] = sc[S_PREFSUM]
    vals[NEGFIX] = -sc[S_FIX]
    vals[ZERO] = 0
    for c in range(NOBJ):
        if pin_on[c] != 0 and vals[c] > pin_val[c]:
            return
    sc[S_LEAVES] += 1
    if sc[S_HASBEST] == 0 or vals[target] < sc[S_BEST]:
        sc[S_HASBEST] = 1
        sc[S_BEST] = vals[target]
        best_rooms[:] = item_room
        best_vals[:] = vals
        if vals[target] <= sc[S_ROOTLB]:
            sc[S_DONE] = 1


@njit
def search(budget, target, order, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
           allowed, symcls, cls_mark, pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
           e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, smax, pcap, sc, ubsave,
           obj_order, pin_on, pin_val, cands, keys, ncand, ptr, chosen, best_rooms, best_vals):
    """Run at most ``budget`` nodes. Returns 1 if suspended, 0 when finished."""
    n_items = order.shape[0]
    lbv = np.zeros(NOBJ, np.int64)
    nodes = 0
    d = sc[S_DEPTH]
    while True:
        if sc[S_DONE] != 0 or d < 0:
            sc[S_DONE] = 1
            sc[S_DEPTH] = d
            sc[S_NODES] += nodes
            return 0
        if nodes >= budget:
            sc[S_DEPTH] = d
            sc[S_NODES] += nodes
            return 1
        if ptr[d] < ncand[d]:
            r = cands[d, ptr[d]]
            ptr[d] += 1
            i = order[d]
            nodes += 1
            ok = _apply(d, i, r, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
                        pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
                        e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, smax, pcap, sc, ubsave)
            if ok and not _prune(sc, lbv, pin_on, pin_val, target):
                if d + 1 == n_items:
                    _leaf(sc, lbv, target, pin_on, pin_val, item_room, best_rooms, best_vals)
                else:
                    chosen[d] = r
                    d += 1
                    _generate(d, order[d], item_pat, item_start, item_end, item_prev, item_prevroom,
                              item_fixroom, allowed, symcls, cls_mark, pat_sex, pat_req, W, cap, occ_n,
                              occ_p, room_used, item_room, obj_order, cands, keys, ncand, ptr, sc)
                    continue
            _undo(d, i, r, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
                  pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
                  e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, sc, ubsave)
        else:
            d -= 1
            if d >= 0:
                _undo(d, order[d], chosen[d], item_pat, item_start, item_end, item_prev, item_prevroom,
                      item_fixroom, pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
                      e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, sc, ubsave)


@njit
def start(order, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
          allowed, symcls, cls_mark, pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
          obj_order, cands, keys, ncand, ptr, sc):
    sc[S_DEPTH] = 0
    _generate(0, order[0], item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
              allowed, symcls, cls_mark, pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
              obj_order, cands, keys, ncand, ptr, sc)


@njit
def init_bounds(e1, e2, hcnt, sa, rem, ub):
    """Fill ``ub`` for the empty placement; returns the sum or -1 if a period is infeasible."""
    total = 0
    for t in range(ub.shape[0]):
        u = period_ub(t, e1, e2, hcnt, sa, rem)
        ub[t] = u
        if u < 0:
            return -1
        total += u
    return total


@njit
def evaluate(rooms, order, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
             allowed, pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
             e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, smax, pcap, sc, ubsave, vals):
    """Objective vector of a complete placement ``rooms`` (per item); False if infeasible.

    Applies every item then undoes them, leaving the state untouched.
    """
    n_items = order.shape[0]
    ok = True
    done = 0
    for d in range(n_items):
        i = order[d]
        r = rooms[i]
        if r < 0 or not allowed[i, r]:
            ok = False
            break
        fits = True
        for t in range(item_start[i], item_end[i]):
            n = occ_n[r, t]
            if n >= cap[r] or (n > 0 and pat_sex[occ_p[r, t, 0]] != pat_sex[item_pat[i]]):
                fits = False
        if not fits:
            ok = False
            break
        if not _apply(d, i, r, item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
                      pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
                      e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, smax, pcap, sc, ubsave):
            ok = False
        done = d + 1
        if not ok:
            break
    if ok:
        vals[TRANS] = sc[S_TRANS]
        vals[NEGPRIV] = -sc[S_UBSUM]
        vals[PREF] = sc[S_PREFSUM]
        vals[NEGFIX] = -sc[S_FIX]
        vals[ZERO] = 0
    for d in range(done - 1, -1, -1):
        i = order[d]
        _undo(d, i, rooms[i], item_pat, item_start, item_end, item_prev, item_prevroom, item_fixroom,
              pat_sex, pat_req, W, cap, occ_n, occ_p, room_used, item_room,
              e1, e2, hcnt, sa, rem, cur_pref, wlb, ub, sc, ubsave)
    return ok
