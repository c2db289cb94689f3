"""Shared instance builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from quadlin.graph import Dag, count_st_paths, prune_to_corridor


def diamond() -> Dag:
    return Dag(4, [(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3)


def double_diamond() -> Dag:
    return Dag(7, [(0, 1), (0, 2), (1, 3), (2, 3),
                   (3, 4), (3, 5), (4, 6), (5, 6)], 0, 6)


def chain(k: int) -> Dag:
    """Single path with k arcs."""
    return Dag(k + 1, [(i, i + 1) for i in range(k)], 0, k)


def diamond_chain(k: int) -> Dag:
    """k diamonds in series: 2**k paths."""
    arcs = []
    base = 0
    for _ in range(k):
        arcs += [(base, base + 1), (base, base + 2),
                 (base + 1, base + 3), (base + 2, base + 3)]
        base += 3
    return Dag(3 * k + 1, arcs, 0, 3 * k)


def random_corridor_dag(rng: random.Random, n_min=3, n_max=8, m_max=16,
                        density=0.45, require_overdetermined=False) -> Dag:
    """Random corridor DAG (every vertex/arc on a source-target path).

    Arc labels are shuffled so nothing accidentally relies on arcs being
    sorted by endpoint.  With ``require_overdetermined`` the graph has more
    source-target paths than basic arcs.
    """
    while True:
        n = rng.randint(n_min, n_max)
        arcset = set()
        v = 0
        while v != n - 1:
            w = rng.randint(v + 1, n - 1)
            arcset.add((v, w))
            v = w
        for i in range(n - 1):
            for j in range(i + 1, n):
                if rng.random() < density:
                    arcset.add((i, j))
        arcs = sorted(arcset)
        rng.shuffle(arcs)
        try:
            g = Dag(n, arcs, 0, n - 1)
        except ValueError:
            continue
        c = prune_to_corridor(g, n - 1)
        if not (1 <= c.m <= m_max and c.n >= n_min):
            continue
        if require_overdetermined:
            if count_st_paths(c) <= c.m - c.n + 2:
                continue
        return c


def rand_rational(rng: random.Random, span=5, denoms=(1, 1, 2)) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice(denoms))


def rand_symmetric_rows(rng: random.Random, m: int, zero_diag=True, **kw):
    rows = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        if not zero_diag:
            rows[i][i] = rand_rational(rng, **kw)
        for j in range(i + 1, m):
            rows[i][j] = rows[j][i] = rand_rational(rng, **kw)
    return rows


def rand_rows(rng: random.Random, r: int, c: int, **kw):
    return [[rand_rational(rng, **kw) for _ in range(c)] for _ in range(r)]
