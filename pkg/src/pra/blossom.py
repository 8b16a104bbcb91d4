"""Weighted matching on general graphs (Edmonds' blossom algorithm, O(n^3)).

Primal-dual method with blossom shrinking and expansion in the style of
Galil's "Efficient algorithms for finding maximum matching in graphs"
(1986). All arithmetic is on Python integers: edge weights are doubled
internally so that dual variables and slacks stay integral.

Endpoint convention: edge ``k = (i, j)`` has endpoints ``2k`` (vertex
``i``) and ``2k + 1`` (vertex ``j``); ``p ^ 1`` is the opposite endpoint.
Vertices are ``0..n-1``, blossoms ``n..2n-1``.
"""

from __future__ import annotations

from typing import Sequence


def max_weight_matching(n: int, edges: Sequence[tuple[int, int, int]],
                        maxcardinality: bool = False) -> list[int]:
    """Maximum-weight matching; returns ``mate`` with ``mate[v] == -1`` for unmatched ``v``.

    With ``maxcardinality`` the result is the maximum-weight matching among
    the maximum-cardinality ones. Weights must be integers.
    """
    if not edges:
        return [-1] * n
    for i, j, w in edges:
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"bad edge ({i}, {j})")
        if not isinstance(w, int):
            raise TypeError("edge weights must be integers")
    return _Solver(n, [(i, j, 2 * w) for i, j, w in edges], maxcardinality).run()


class _Solver:
    def __init__(self, n, edges, maxcardinality):
        self.n = n
        self.edges = edges
        self.maxcard = maxcardinality
        nedge = len(edges)
        self.endpoint = [edges[p >> 1][p & 1] for p in range(2 * nedge)]
        self.neighbend = [[] for _ in range(n)]
        for k, (i, j, _) in enumerate(edges):
            self.neighbend[i].append(2 * k + 1)
            self.neighbend[j].append(2 * k)
        maxweight = max(0, max(w for _, _, w in edges))
        # mate[v]: remote endpoint of v's matched edge, or -1
        self.mate = [-1] * n
        # label: 0 free, 1 S (outer), 2 T (inner); bit 4 marks blossom scanning
        self.label = [0] * (2 * n)
        self.labelend = [-1] * (2 * n)
        self.inblossom = list(range(n))
        self.blossomparent = [-1] * (2 * n)
        self.blossomchilds: list = [None] * (2 * n)
        self.blossombase = list(range(n)) + [-1] * n
        self.blossomendps: list = [None] * (2 * n)
        self.bestedge = [-1] * (2 * n)
        self.blossombestedges: list = [None] * (2 * n)
        self.unusedblossoms = list(range(n, 2 * n))
        self.dualvar = [maxweight] * n + [0] * n
        self.allowedge = [False] * nedge
        self.queue: list[int] = []

    def slack(self, k):
        i, j, w = self.edges[k]
        return self.dualvar[i] + self.dualvar[j] - 2 * w

    def leaves(self, b):
        if b < self.n:
            yield b
            return
        stack = [b]
        while stack:
            c = stack.pop()
            for t in self.blossomchilds[c]:
                if t < self.n:
                    yield t
                else:
                    stack.append(t)

    def assign_label(self, w, t, p):
        b = self.inblossom[w]
        self.label[w] = self.label[b] = t
        self.labelend[w] = self.labelend[b] = p
        self.bestedge[w] = self.bestedge[b] = -1
        if t == 1:
            self.queue.extend(self.leaves(b))
        elif t == 2:
            base = self.blossombase[b]
            mb = self.mate[base]
            self.assign_label(self.endpoint[mb], 1, mb ^ 1)

    def scan_blossom(self, v, w):
        """Trace back from v and w; return the base of a new blossom or -1 for an augmenting path."""
        label, inblossom, labelend, endpoint = self.label, self.inblossom, self.labelend, self.endpoint
        path = []
        base = -1
        while v != -1 or w != -1:
            b = inblossom[v]
            if label[b] & 4:
                base = self.blossombase[b]
                break
            path.append(b)
            label[b] = 5
            if labelend[b] == -1:
                v = -1
            else:
                v = endpoint[labelend[b]]
                b = inblossom[v]
                v = endpoint[labelend[b]]
            if w != -1:
                v, w = w, v
        for b in path:
            label[b] = 1
        return base

    def add_blossom(self, base, k):
        v, w, _ = self.edges[k]
        inblossom, endpoint, labelend = self.inblossom, self.endpoint, self.labelend
        bb = inblossom[base]
        bv = inblossom[v]
        bw = inblossom[w]
        b = self.unusedblossoms.pop()
        self.blossombase[b] = base
        self.blossomparent[b] = -1
        self.blossomparent[bb] = b
        path = []
        endps = []
        while bv != bb:
            self.blossomparent[bv] = b
            path.append(bv)
            endps.append(labelend[bv])
            v = endpoint[labelend[bv]]
            bv = inblossom[v]
        path.append(bb)
        path.reverse()
        endps.reverse()
        endps.append(2 * k)
        while bw != bb:
            self.blossomparent[bw] = b
            path.append(bw)
            endps.append(labelend[bw] ^ 1)
            w = endpoint[labelend[bw]]
            bw = inblossom[w]
        self.blossomchilds[b] = path
        self.blossomendps[b] = endps
        self.label[b] = 1
        labelend[b] = labelend[bb]
        self.dualvar[b] = 0
        for leaf in self.leaves(b):
            if self.label[inblossom[leaf]] == 2:
                self.queue.append(leaf)
            inblossom[leaf] = b
        bestedgeto = [-1] * (2 * self.n)
        for sub in path:
            if self.blossombestedges[sub] is None:
                lists = [[p >> 1 for p in self.neighbend[leaf]] for leaf in self.leaves(sub)]
            else:
                lists = [self.blossombestedges[sub]]
            for nblist in lists:
                for kk in nblist:
                    i, j, _ = self.edges[kk]
                    if inblossom[j] == b:
                        i, j = j, i
                    bj = inblossom[j]
                    if (bj != b and self.label[bj] == 1
                            and (bestedgeto[bj] == -1 or self.slack(kk) < self.slack(bestedgeto[bj]))):
                        bestedgeto[bj] = kk
            self.blossombestedges[sub] = None
            self.bestedge[sub] = -1
        best = [kk for kk in bestedgeto if kk != -1]
        self.blossombestedges[b] = best
        self.bestedge[b] = -1
        for kk in best:
            if self.bestedge[b] == -1 or self.slack(kk) < self.slack(self.bestedge[b]):
                self.bestedge[b] = kk

    def expand_blossom(self, b, endstage):
        n = self.n
        label, labelend, endpoint, inblossom = self.label, self.labelend, self.endpoint, self.inblossom
        for s in self.blossomchilds[b]:
            self.blossomparent[s] = -1
            if s < n:
                inblossom[s] = s
            elif endstage and self.dualvar[s] == 0:
                self.expand_blossom(s, endstage)
            else:
                for leaf in self.leaves(s):
                    inblossom[leaf] = s
        if not endstage and label[b] == 2:
            childs = self.blossomchilds[b]
            endps = self.blossomendps[b]
            entrychild = inblossom[endpoint[labelend[b] ^ 1]]
            j = childs.index(entrychild)
            if j & 1:
                j -= len(childs)
                jstep, endptrick = 1, 0
            else:
                jstep, endptrick = -1, 1
            p = labelend[b]
            while j != 0:
                label[endpoint[p ^ 1]] = 0
                label[endpoint[endps[j - endptrick] ^ endptrick ^ 1]] = 0
                self.assign_label(endpoint[p ^ 1], 2, p)
                self.allowedge[endps[j - endptrick] >> 1] = True
                j += jstep
                p = endps[j - endptrick] ^ endptrick
                self.allowedge[p >> 1] = True
                j += jstep
            bv = childs[j]
            label[endpoint[p ^ 1]] = label[bv] = 2
            labelend[endpoint[p ^ 1]] = labelend[bv] = p
            self.bestedge[bv] = -1
            j += jstep
            while childs[j] != entrychild:
                bv = childs[j]
                if label[bv] == 1:
                    j += jstep
                    continue
                found = -1
                for leaf in self.leaves(bv):
                    if label[leaf] != 0:
                        found = leaf
                        break
                if found != -1:
                    label[found] = 0
                    label[endpoint[self.mate[self.blossombase[bv]]]] = 0
                    self.assign_label(found, 2, labelend[found])
                j += jstep
        label[b] = labelend[b] = -1
        self.blossomchilds[b] = self.blossomendps[b] = None
        self.blossombase[b] = -1
        self.blossombestedges[b] = None
        self.bestedge[b] = -1
        self.unusedblossoms.append(b)

    def augment_blossom(self, b, v):
        """Swap matched/unmatched edges along the even path from v to the base of b."""
        endpoint = self.endpoint
        t = v
        while self.blossomparent[t] != b:
            t = self.blossomparent[t]
        if t >= self.n:
            self.augment_blossom(t, v)
        childs = self.blossomchilds[b]
        endps = self.blossomendps[b]
        i = j = childs.index(t)
        if i & 1:
            j -= len(childs)
            jstep, endptrick = 1, 0
        else:
            jstep, endptrick = -1, 1
        while j != 0:
            j += jstep
            t = childs[j]
            p = endps[j - endptrick] ^ endptrick
            if t >= self.n:
                self.augment_blossom(t, endpoint[p])
            j += jstep
            t = childs[j]
            if t >= self.n:
                self.augment_blossom(t, endpoint[p ^ 1])
            self.mate[endpoint[p]] = p ^ 1
            self.mate[endpoint[p ^ 1]] = p
        self.blossomchilds[b] = childs[i:] + childs[:i]
        self.blossomendps[b] = endps[i:] + endps[:i]
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]]

    def augment_matching(self, k):
        v, w, _ = self.edges[k]
        endpoint, inblossom, labelend = self.endpoint, self.inblossom, self.labelend
        for s, p in ((v, 2 * k + 1), (w, 2 * k)):
            while True:
                bs = inblossom[s]
                if bs >= self.n:
                    self.augment_blossom(bs, s)
                self.mate[s] = p
                if labelend[bs] == -1:
                    break
                t = endpoint[labelend[bs]]
                bt = inblossom[t]
                s = endpoint[labelend[bt]]
                j = endpoint[labelend[bt] ^ 1]
                if bt >= self.n:
                    self.augment_blossom(bt, j)
                self.mate[j] = labelend[bt]
                p = labelend[bt] ^ 1

    def run(self):
        n = self.n
        nedge = len(self.edges)
        label, inblossom, endpoint = self.label, self.inblossom, self.endpoint
        for _ in range(n):
            label[:] = [0] * (2 * n)
            self.bestedge[:] = [-1] * (2 * n)
            self.blossombestedges[n:] = [None] * n
            self.allowedge[:] = [False] * nedge
            self.queue[:] = []
            for v in range(n):
                if self.mate[v] == -1 and label[inblossom[v]] == 0:
                    self.assign_label(v, 1, -1)
            augmented = False
            while True:
                while self.queue and not augmented:
                    v = self.queue.pop()
                    for p in self.neighbend[v]:
                        k = p >> 1
                        w = endpoint[p]
                        if inblossom[v] == inblossom[w]:
                            continue
                        kslack = 0
                        if not self.allowedge[k]:
                            kslack = self.slack(k)
                            if kslack <= 0:
                                self.allowedge[k] = True
                        if self.allowedge[k]:
                            if label[inblossom[w]] == 0:
                                self.assign_label(w, 2, p ^ 1)
                            elif label[inblossom[w]] == 1:
                                base = self.scan_blossom(v, w)
                                if base >= 0:
                                    self.add_blossom(base, k)
                                else:
                                    self.augment_matching(k)
                                    augmented = True
                                    break
                            elif label[w] == 0:
                                label[w] = 2
                                self.labelend[w] = p ^ 1
                        elif label[inblossom[w]] == 1:
                            b = inblossom[v]
                            if self.bestedge[b] == -1 or kslack < self.slack(self.bestedge[b]):
                                self.bestedge[b] = k
                        elif label[w] == 0:
                            if self.bestedge[w] == -1 or kslack < self.slack(self.bestedge[w]):
                                self.bestedge[w] = k
                if augmented:
                    break
                # dual adjustment: pick the smallest admissible delta
                deltatype = -1
                delta = deltaedge = deltablossom = None
                if not self.maxcard:
                    deltatype = 1
                    delta = min(self.dualvar[:n])
                for v in range(n):
                    if label[inblossom[v]] == 0 and self.bestedge[v] != -1:
                        d = self.slack(self.bestedge[v])
                        if deltatype == -1 or d < delta:
                            delta, deltatype, deltaedge = d, 2, self.bestedge[v]
                for b in range(2 * n):
                    if self.blossomparent[b] == -1 and label[b] == 1 and self.bestedge[b] != -1:
                        d = self.slack(self.bestedge[b]) // 2
                        if deltatype == -1 or d < delta:
                            delta, deltatype, deltaedge = d, 3, self.bestedge[b]
                for b in range(n, 2 * n):
                    if (self.blossombase[b] >= 0 and self.blossomparent[b] == -1 and label[b] == 2
                            and (deltatype == -1 or self.dualvar[b] < delta)):
                        delta, deltatype, deltablossom = self.dualvar[b], 4, b
                if deltatype == -1:
                    # maxcardinality and no further progress possible
                    deltatype = 1
                    delta = max(0, min(self.dualvar[:n]))
                for v in range(n):
                    lb = label[inblossom[v]]
                    if lb == 1:
                        self.dualvar[v] -= delta
                    elif lb == 2:
                        self.dualvar[v] += delta
                for b in range(n, 2 * n):
                    if self.blossombase[b] >= 0 and self.blossomparent[b] == -1:
                        if label[b] == 1:
                            self.dualvar[b] += delta
                        elif label[b] == 2:
                            self.dualvar[b] -= delta
                if deltatype == 1:
                    break
                if deltatype == 2:
                    self.allowedge[deltaedge] = True
                    i, j, _ = self.edges[deltaedge]
                    if label[inblossom[i]] == 0:
                        i, j = j, i
                    self.queue.append(i)
                elif deltatype == 3:
                    self.allowedge[deltaedge] = True
                    i, _, _ = self.edges[deltaedge]
                    self.queue.append(i)
                else:
                    self.expand_blossom(deltablossom, False)
            if not augmented:
                break
            for b in range(n, 2 * n):
                if (self.blossomparent[b] == -1 and self.blossombase[b] >= 0
                        and label[b] == 1 and self.dualvar[b] == 0):
                    self.expand_blossom(b, True)
        return [endpoint[m] if m >= 0 else -1 for m in self.mate]


def min_weight_perfect_matching(n: int, edges: Sequence[tuple[int, int, int]]):
    """Minimum-cost perfect matching, or ``None`` when the graph has none.

    Returns ``(pairs, cost)`` with pairs ``(u, v)``, ``u < v``, sorted.
    Costs must be integers. Among maximum-cardinality matchings the solver
    maximises ``sum(C - cost)``; all perfect matchings share the cardinality
    ``n / 2``, so this minimises the total cost.
    """
    if n % 2:
        return None
    if n == 0:
        return [], 0
    if not edges:
        return None
    big = max(c for _, _, c in edges) + 1
    cost = {}
    flipped = []
    for u, v, c in edges:
        if u == v:
            raise ValueError("self-loop")
        key = (min(u, v), max(u, v))
        if key in cost:
            if c >= cost[key]:
                continue
        cost[key] = c
    for (u, v), c in cost.items():
        flipped.append((u, v, big - c))
    mate = max_weight_matching(n, flipped, maxcardinality=True)
    if any(m == -1 for m in mate):
        return None
    pairs = sorted((v, m) for v, m in enumerate(mate) if v < m)
    return pairs, sum(cost[p] for p in pairs)
