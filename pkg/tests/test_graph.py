import random

import pytest

from quadlin.graph import (
    CycleDetected,
    Dag,
    GraphError,
    PathExplosion,
    Unreachable,
    basic_arc_order,
    count_st_paths,
    critical_path,
    enumerate_st_paths,
    forbidden_pairs,
    is_corridor,
    non_basic_arcs,
    prune_to_corridor,
    reachable_from,
    reaches,
    topological_sort,
)

from helpers import diamond, diamond_chain, double_diamond, random_corridor_dag


def test_cycle_detected():
    with pytest.raises(CycleDetected):
        Dag(2, [(0, 1), (1, 0)], 0, 1)
    with pytest.raises(CycleDetected):
        Dag(2, [(0, 0)], 0, 1)


def test_bad_endpoints():
    with pytest.raises(GraphError):
        Dag(2, [(0, 5)], 0, 1)
    with pytest.raises(GraphError):
        Dag(2, [(0, 1)], 0, 7)


def test_topological_sort_diamond():
    assert topological_sort(diamond()) == (0, 1, 2, 3)


def test_topological_sort_tie_break():
    g = Dag(3, [(1, 2), (0, 2)], 0, 2)
    assert topological_sort(g) == (0, 1, 2)


def test_reachability():
    g = diamond()
    assert reachable_from(g, 1) == {1, 3}
    assert reaches(g, 2) == {0, 2}


def test_prune_to_corridor_diamond():
    g = diamond()
    sub = prune_to_corridor(g, 1)
    assert sub.n == 2 and sub.m == 1
    assert sub.arcs == ((0, 1),)
    assert sub.parent_arc == (0,)
    assert sub.parent_vertex == (0, 1)
    assert sub.source == 0 and sub.target == 1


def test_prune_to_corridor_trivial():
    g = diamond()
    sub = prune_to_corridor(g, 0)
    assert sub.n == 1 and sub.m == 0


def test_prune_unreachable():
    g = Dag(5, [(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3)
    with pytest.raises(Unreachable):
        prune_to_corridor(g, 4)


def test_prune_drops_off_path_arcs():
    # arc (1, 4) dangles: 4 cannot reach the target
    g = Dag(5, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4)], 0, 3)
    assert not is_corridor(g)
    sub = prune_to_corridor(g, 3)
    assert sub.m == 4 and sub.n == 4
    assert is_corridor(sub)
    assert sub.parent_arc == (0, 1, 2, 3)


def test_enumerate_diamond():
    paths = enumerate_st_paths(diamond())
    assert [p.arcs for p in paths] == [(0, 2), (1, 3)]
    assert [p.vertices for p in paths] == [(0, 1, 3), (0, 2, 3)]
    assert paths[0].incidence(4) == (1, 0, 1, 0)


def test_enumerate_lexicographic_and_count():
    rng = random.Random(7)
    for _ in range(25):
        g = random_corridor_dag(rng)
        paths = enumerate_st_paths(g)
        assert len(paths) == count_st_paths(g)
        seqs = [p.arcs for p in paths]
        assert seqs == sorted(seqs)
        assert len(set(seqs)) == len(seqs)
        for p in paths:
            assert p.vertices[0] == g.source and p.vertices[-1] == g.target
            for a, (u, w) in zip(p.arcs, zip(p.vertices, p.vertices[1:])):
                assert g.arcs[a] == (u, w)


def test_path_explosion():
    g = diamond_chain(5)
    assert count_st_paths(g) == 32
    with pytest.raises(PathExplosion) as exc:
        enumerate_st_paths(g, cap=10)
    assert exc.value.count == 32 and exc.value.cap == 10
    assert len(enumerate_st_paths(g, cap=32)) == 32


def test_non_basic_diamond():
    assert non_basic_arcs(diamond()) == frozenset({2, 3})
    assert basic_arc_order(diamond()) == (0, 1)


def test_non_basic_double_diamond():
    g = double_diamond()
    assert non_basic_arcs(g) == frozenset({2, 3, 4, 6, 7})
    assert basic_arc_order(g) == (0, 1, 5)


def test_non_basic_counts_random():
    rng = random.Random(11)
    for _ in range(30):
        g = random_corridor_dag(rng)
        nb = non_basic_arcs(g)
        assert len(nb) == g.n - 2
        assert len(basic_arc_order(g)) == g.m - g.n + 2
        # one per transshipment vertex, smallest label among its out-arcs
        tails = {g.arcs[e][0] for e in nb}
        assert tails == set(range(g.n)) - {g.source, g.target}
        for e in nb:
            assert e == min(g.out_arcs[g.arcs[e][0]])


def test_non_basic_requires_corridor():
    g = Dag(5, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4)], 0, 3)
    with pytest.raises(GraphError):
        non_basic_arcs(g)


def test_critical_path_double_diamond():
    g = double_diamond()
    p = critical_path(g, 5)
    assert p.arcs == (0, 2, 5, 7)
    assert p.vertices == (0, 1, 3, 5, 6)


def test_critical_path_rejects_non_basic():
    with pytest.raises(GraphError):
        critical_path(diamond(), 2)


def test_critical_path_properties_random():
    rng = random.Random(13)
    for _ in range(25):
        g = random_corridor_dag(rng)
        nb = non_basic_arcs(g)
        all_paths = {p.arcs for p in enumerate_st_paths(g, cap=100000)}
        for e in basic_arc_order(g):
            p = critical_path(g, e)
            assert p.arcs in all_paths
            k = p.arcs.index(e)
            # target side is all non-basic
            assert all(a in nb for a in p.arcs[k + 1:])
            # source side is the lexicographically smallest prefix to tail(e)
            u = g.arcs[e][0]
            sub = prune_to_corridor(g, u)
            if sub.m:
                best = min(tuple(sub.parent_arc[a] for a in q.arcs)
                           for q in enumerate_st_paths(sub, cap=100000))
                assert p.arcs[:k] == best
            else:
                assert k == 0


def test_forbidden_pairs_diamond():
    assert forbidden_pairs(diamond()) == frozenset(
        {(0, 1), (0, 3), (1, 2), (2, 3)})


def test_forbidden_pairs_sound_random():
    rng = random.Random(17)
    for _ in range(25):
        g = random_corridor_dag(rng)
        pairs = forbidden_pairs(g)
        for p in enumerate_st_paths(g, cap=100000):
            on_path = set(p.arcs)
            for i, j in pairs:
                assert not (i in on_path and j in on_path)
        # shared tails / heads are always caught
        for i in range(g.m):
            for j in range(i + 1, g.m):
                if (g.arcs[i][0] == g.arcs[j][0]
                        or g.arcs[i][1] == g.arcs[j][1]):
                    assert (i, j) in pairs
