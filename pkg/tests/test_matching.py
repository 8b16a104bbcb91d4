from __future__ import annotations

import random

import networkx as nx
import pytest
from factories import random_ward, three_patient
from oracles import best_room_partition

from pra.blossom import max_weight_matching
from pra.errors import InfeasibleError, UnsupportedCapacityError
from pra.matching import (
    AUX_FORCED,
    AUX_FREE,
    Matching,
    build_rmp_graph,
    decode_partition,
    min_weight_perfect_matching,
    solve_rmp,
    wmin,
)
from pra.model import Instance, Patient, Room
from pra.scoring import absolute_age, bounded_age, builtin_scorers, zero


def _perfect_matchings(vertices, adj):
    if not vertices:
        yield []
        return
    u, rest = vertices[0], vertices[1:]
    for v in rest:
        if (u, v) in adj:
            remaining = [x for x in rest if x != v]
            for m in _perfect_matchings(remaining, adj):
                yield [(u, v)] + m


def _brute_min(n, edges):
    adj = {}
    for u, v, c in edges:
        adj[u, v] = adj[v, u] = c
    best = None
    for m in _perfect_matchings(list(range(n)), adj):
        cost = sum(adj[e] for e in m)
        best = cost if best is None else min(best, cost)
    return best


def test_single_edge():
    m = min_weight_perfect_matching(2, [(0, 1, 5)])
    assert m.pairs == ((0, 1),) and m.cost == 5 and m.perfect


def test_k4_example():
    edges = [(0, 1, 1), (2, 3, 1), (0, 2, 2), (1, 3, 2), (0, 3, 5), (1, 2, 5)]
    m = min_weight_perfect_matching(4, edges)
    assert sorted(m.pairs) == [(0, 1), (2, 3)] and m.cost == 2


def test_no_perfect_matching():
    assert min_weight_perfect_matching(3, [(0, 1, 1), (1, 2, 1)]) is None
    assert min_weight_perfect_matching(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)]) is None
    assert min_weight_perfect_matching(0, []).cost == 0


def test_blossom_against_enumeration_and_networkx():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.choice((2, 4, 6, 8))
        edges = [(u, v, rng.randint(0, 20)) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6]
        expected = _brute_min(n, edges)
        got = min_weight_perfect_matching(n, edges)
        if expected is None:
            assert got is None
            continue
        assert got is not None and got.perfect and got.cost == expected
        g = nx.Graph()
        g.add_weighted_edges_from(edges)
        ref = nx.min_weight_matching(g)
        assert sum(g[u][v]["weight"] for u, v in ref) == expected


def test_max_weight_matching_against_networkx():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(2, 14)
        edges = [(u, v, rng.randint(1, 30)) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
        mate = max_weight_matching(n, edges)
        weight = {(min(u, v), max(u, v)): c for u, v, c in edges}
        got = sum(weight[v, mate[v]] for v in range(n) if mate[v] > v)
        g = nx.Graph()
        g.add_weighted_edges_from(edges)
        ref = nx.max_weight_matching(g)
        assert got == sum(g[u][v]["weight"] for u, v in ref)


def test_graph_three_patient():
    f = [Patient("f1", "F", 1, 2, 30), Patient("f2", "F", 1, 2, 40)]
    m = [Patient("m1", "M", 1, 2, 50)]
    g = build_rmp_graph(f, m, [Room("d", 2), Room("s", 1)], absolute_age())
    assert (g.k, g.alpha) == (1, 1)
    assert g.vertex_kind(3) == AUX_FORCED
    assert {(u, v) for u, v, _ in g.edges} == {(0, 1), (0, 3), (1, 3), (2, 3)}
    assert g.n_vertices == 4
    assert g.to_edge_list().splitlines()[0] == "4 4"


def test_graph_alpha_formula():
    f = [Patient(f"f{i}", "F", 1, 2, 30 + i) for i in range(3)]
    m = [Patient(f"m{i}", "M", 1, 2, 50 + i) for i in range(2)]
    g = build_rmp_graph(f, m, [Room("d1", 2), Room("d2", 2), Room("s", 1)], absolute_age())
    assert g.alpha == 1 and g.k == 1
    g = build_rmp_graph(f[:2], m, [Room("d1", 2), Room("d2", 2)], absolute_age())
    assert g.alpha == 0 and g.k == 0


def test_graph_invariants_random():
    rng = random.Random(2)
    for _ in range(200):
        females, males, rooms = random_ward(rng)
        if not any(r.capacity == 2 for r in rooms):
            continue
        g = build_rmp_graph(females, males, rooms, absolute_age())
        assert g.n_vertices == 2 * len(rooms)
        nf = len(females)
        for u, v, c in g.edges:
            assert c >= 0
            if u < g.n_patients and v < g.n_patients:
                assert (u < nf) == (v < nf)
            assert not (g.vertex_kind(u) == AUX_FORCED and g.vertex_kind(v) == AUX_FORCED)
            if g.vertex_kind(u) != "patient" and g.vertex_kind(v) != "patient":
                assert g.vertex_kind(u) == g.vertex_kind(v) == AUX_FREE


def test_graph_errors():
    f = [Patient("f", "F", 1, 2, 30)]
    with pytest.raises(UnsupportedCapacityError):
        build_rmp_graph(f, [], [Room("t", 3)], absolute_age())
    with pytest.raises(InfeasibleError):
        build_rmp_graph(f, [Patient("m", "M", 1, 2, 40)], [Room("d", 2)], absolute_age())


def test_decode_three_patient():
    inst = three_patient()
    f = [inst.patient("a"), inst.patient("b")]
    m = [inst.patient("c")]
    g = build_rmp_graph(f, m, inst.rooms, absolute_age())
    part = decode_partition(Matching(((0, 1), (2, 3)), 10, 4), g, inst.rooms)
    assert part.sets == {"d": ("a", "b"), "s": ("c",)}


def test_decode_empty_and_two_pairs():
    rooms = [Room("d1", 2), Room("d2", 2), Room("s", 1)]
    g = build_rmp_graph([], [], rooms, absolute_age())
    m = min_weight_perfect_matching(g.n_vertices, g.edges)
    part = decode_partition(m, g, rooms)
    assert part.occupied() == {} and m.cost == 0
    pats = [Patient(f"f{i}", "F", 1, 2, 30 + i) for i in range(4)]
    part, value = solve_rmp(pats, [], rooms[:2], absolute_age())
    assert sorted(len(s) for s in part.sets.values()) == [2, 2]
    assert value == 2


def test_solve_rmp_examples():
    f = [Patient("a", "F", 1, 2, 30), Patient("b", "F", 1, 2, 40)]
    m = [Patient("c", "M", 1, 2, 50)]
    rooms = [Room("d", 2), Room("s", 1)]
    part, value = solve_rmp(f, m, rooms, absolute_age())
    assert value == 10 and part.room_of() == {"a": "d", "b": "d", "c": "s"}
    singles = [Room(f"s{i}", 1) for i in range(4)]
    assert solve_rmp(f, m, singles, absolute_age())[1] == 0
    three = [Patient("x", "F", 1, 2, 30), Patient("y", "F", 1, 2, 31), Patient("z", "F", 1, 2, 60)]
    part, value = solve_rmp(three, [], rooms, bounded_age(5))
    assert value == 0 and part.room_of()["x"] == part.room_of()["y"]
    with pytest.raises(InfeasibleError):
        solve_rmp(three, m, [Room("s", 1)], absolute_age())


def test_solve_rmp_matches_enumeration():
    rng = random.Random(17)
    for _ in range(60):
        females, males, rooms = random_ward(rng, 7, 4)
        for scorer in builtin_scorers():
            part, value = solve_rmp(females, males, rooms, scorer)
            assert value == best_room_partition(females + males, rooms, scorer)


def test_value_invariant_under_vertex_order():
    rng = random.Random(23)
    for _ in range(50):
        females, males, rooms = random_ward(rng)
        scorer = rng.choice(builtin_scorers())
        _, v1 = solve_rmp(females, males, rooms, scorer)
        rng.shuffle(females)
        rng.shuffle(males)
        rooms = list(rooms)
        rng.shuffle(rooms)
        assert solve_rmp(females, males, rooms, scorer)[1] == v1


def test_wmin():
    inst = three_patient()
    per, total = wmin(inst, absolute_age())
    assert per[1] == 10 and total == 10
    empty = Instance(4, [Room("d", 2)], [])
    assert wmin(empty, absolute_age()) == ({1: 0, 2: 0, 3: 0, 4: 0}, 0)
    twice = Instance(3, inst.rooms, [p.__class__(p.id, p.sex, 1, 3, p.age) for p in inst.patients])
    assert wmin(twice, absolute_age())[1] == 20
    crowded = Instance(2, [Room("s", 1)], [Patient("a", "F", 1, 2, 30), Patient("b", "F", 1, 2, 30)])
    with pytest.raises(InfeasibleError) as exc:
        wmin(crowded, zero())
    assert exc.value.period == 1


def test_wmin_cache_reuse():
    inst = three_patient()
    cache = {}
    first = wmin(inst, absolute_age(), cache=cache)
    assert cache and wmin(inst, absolute_age(), cache=cache) == first
