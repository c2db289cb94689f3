"""Exact linearizability machinery for quadratic shortest-path costs.

Setting: a corridor DAG (every vertex on some source-target path) and an
arc-interaction matrix Q.  Q is *linearizable* when some arc-cost vector c
satisfies c . x == x^T Q x for every source-target path incidence vector x.

The machinery works in *reduced form*: each transshipment vertex nominates
its smallest-label outgoing arc (non-basic); sweeping the vertices in
reverse topological order moves all weight off the non-basic arcs without
changing any path cost.  Every cost vector has exactly one equivalent
reduced vector, so equality of reduced vectors decides equivalence.

For each vertex v the corridor to v gets a *pseudo-linearization* p_v: the
unique reduced vector whose path costs agree with x^T Q x on the canonical
(critical) paths, one per basic arc.  Q is linearizable iff for every arc
e = (u, v) the pseudo-linearization p_v, pushed down to the corridor of u
(interaction with e folded into the arc costs) and reduced, reproduces p_u;
the first failing arc plus the two differing vectors form a refutation
witness that is independently checkable by path enumeration.

All of the above is linear in Q, so stacking the per-arc residual maps and
taking a null-space basis yields a spanning set of the zero-diagonal
linearizable matrices for the graph.

Diagonal entries of Q are linear costs in disguise (x_e^2 == x_e) and are
normalized away on entry and folded back into the output vector; asymmetry
never matters because x^T Q x == x^T sym(Q) x identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from quadlin.exactnum import (
    ONE,
    ZERO,
    RationalMatrix,
    matrix_rank,
    null_space_basis,
    rat,
    solve_lower_triangular,
)
from quadlin.graph import (
    Dag,
    GraphError,
    basic_arc_order,
    critical_path,
    is_corridor,
    non_basic_arcs,
    prune_to_corridor,
)
from quadlin.model import QsppInstance, quadratic_value, require_exact


# ---------------------------------------------------------------------------
# reduced form

def _sweep_order(g: Dag):
    """Transshipment vertices in reverse topological order, with the
    non-basic (smallest-label outgoing) arc of each."""
    order = []
    for v in reversed(g.topo_order):
        if v != g.source and v != g.target:
            order.append((v, min(g.out_arcs[v])))
    return order


def reduce_cost_vector(g: Dag, c) -> tuple:
    """The unique equivalent cost vector that vanishes on non-basic arcs.

    Equivalent means: same total cost on every source-target path.  Each
    sweep step subtracts the non-basic arc's value from all arcs leaving
    its tail vertex and adds it to all arcs entering that vertex; any path
    through the vertex uses exactly one of each, so path costs are kept.
    """
    if len(c) != g.m:
        raise ValueError("cost vector length mismatch")
    if not is_corridor(g):
        raise GraphError("reduced form needs a corridor graph")
    vals = [rat(v) for v in c]
    for v, f in _sweep_order(g):
        cf = vals[f]
        if cf == 0:
            continue
        for e in g.out_arcs[v]:
            vals[e] -= cf
        for e in g.in_arcs[v]:
            vals[e] += cf
    return tuple(vals)


def reduction_matrix(g: Dag) -> RationalMatrix:
    """Matrix R with R c == reduce_cost_vector(g, c) for all c."""
    if not is_corridor(g):
        raise GraphError("reduced form needs a corridor graph")
    rows = _reduce_rows(g, [[ONE if i == j else ZERO for j in range(g.m)]
                            for i in range(g.m)])
    return RationalMatrix.from_rows(rows)


def _reduce_rows(g: Dag, rows):
    """Sweep where each arc entry is itself a vector (list); in place.

    Same steps as reduce_cost_vector, lifted to vector-valued entries.
    rows[f] is rebound before rf is consumed, so rf keeps the old value.
    """
    for v, f in _sweep_order(g):
        rf = rows[f]
        for e in g.out_arcs[v]:
            rows[e] = [a - b for a, b in zip(rows[e], rf)]
        for e in g.in_arcs[v]:
            rows[e] = [a + b for a, b in zip(rows[e], rf)]
    return rows


def equivalent_cost_vectors(g: Dag, c1, c2) -> bool:
    """Same cost on every source-target path?  Decided via reduced forms."""
    return reduce_cost_vector(g, c1) == reduce_cost_vector(g, c2)


# ---------------------------------------------------------------------------
# pseudo-linearization

def pseudo_linearization(g: Dag, q: RationalMatrix) -> tuple:
    """The unique reduced vector matching x^T Q x on every critical path.

    Q must have zero diagonal.  The critical-path/basic-arc incidence
    matrix is unit lower triangular when both are ordered by (topological
    position of the tail vertex, arc label), so one forward substitution
    suffices.
    """
    if q.rows != g.m or q.cols != g.m:
        raise ValueError("cost matrix shape mismatch")
    if any(q.at(i, i) != 0 for i in range(g.m)):
        raise ValueError("cost matrix must have zero diagonal")
    basic = basic_arc_order(g)
    if not basic:
        return (ZERO,) * g.m
    paths = [critical_path(g, e) for e in basic]
    col = {e: k for k, e in enumerate(basic)}
    nb = non_basic_arcs(g)
    rows = []
    rhs = []
    for p in paths:
        row = [ZERO] * len(basic)
        for a in p.arcs:
            if a not in nb:
                row[col[a]] = ONE
        rows.append(row)
        rhs.append(quadratic_value(q, p.incidence(g.m)))
    solution = solve_lower_triangular(RationalMatrix.from_rows(rows), rhs)
    out = [ZERO] * g.m
    for e, val in zip(basic, solution):
        out[e] = val
    return tuple(out)


def critical_incidence_matrix(g: Dag) -> RationalMatrix:
    """Critical-path x basic-arc incidence in canonical order (for tests)."""
    basic = basic_arc_order(g)
    nb = non_basic_arcs(g)
    col = {e: k for k, e in enumerate(basic)}
    rows = []
    for e in basic:
        p = critical_path(g, e)
        row = [ZERO] * len(basic)
        for a in p.arcs:
            if a not in nb:
                row[col[a]] = ONE
        rows.append(row)
    return RationalMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# pushing a cost vector across an arc into the target

def transform_te(parent: Dag, q: RationalMatrix, c, e: int,
                 child: Dag = None):
    """Fold arc e = (v, target) into the costs of the corridor to v.

    Given a cost vector c on the parent graph (target t) and the parent's
    symmetric zero-diagonal interaction matrix q, returns (child, vector)
    where child is the corridor to v and the vector assigns each child arc
    a its parent cost minus the pair interaction q[e][a] + q[a][e], plus
    c[e] on the arcs leaving the source (each s-v path uses exactly one).
    Appending e to any s-v path x then costs c . x + c[e] == x'^T q x' for
    the extended path x', which is what makes the recursion tick.
    """
    if len(c) != parent.m:
        raise ValueError("cost vector length mismatch")
    v, head = parent.arcs[e]
    if head != parent.target:
        raise GraphError("arc must point at the target")
    if child is None:
        child = prune_to_corridor(parent, v)
    c = [rat(x) for x in c]
    out = []
    for a_local in range(child.m):
        a = child.parent_arc[a_local]
        val = c[a] - q.at(e, a) - q.at(a, e)
        if child.arcs[a_local][0] == child.source:
            val += c[e]
        out.append(val)
    return child, tuple(out)


# ---------------------------------------------------------------------------
# the linearizability decision

@dataclass(frozen=True)
class Witness:
    """Refutation: at arc (tail->head), pushing the head corridor's
    pseudo-linearization down disagrees with the tail corridor's own."""

    arc: int
    tail: int
    head: int
    arc_labels: tuple   # tail-corridor arc labels in the parent graph
    expected: tuple     # pseudo-linearization of the tail corridor
    actual: tuple       # pushed-down, reduced vector from the head corridor


@dataclass(frozen=True)
class LinearizationOutcome:
    linearizable: bool
    linearization: tuple = None
    witness: Witness = None


def _symmetrized_offdiag(q: RationalMatrix):
    """(diagonal vector, symmetric zero-diagonal part) of q."""
    m = q.rows
    diag = q.diagonal_vector()
    half = Fraction(1, 2)
    rows = [[ZERO] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j:
                rows[i][j] = (q.at(i, j) + q.at(j, i)) * half
    return diag, RationalMatrix.from_rows(rows)


def _submatrix(q: RationalMatrix, labels):
    return RationalMatrix.from_rows(
        [[q.at(i, j) for j in labels] for i in labels])


def linearize_qspp(inst: QsppInstance) -> LinearizationOutcome:
    """Decide linearizability of the instance's cost matrix exactly.

    Linearizable: returns the unique reduced cost vector c with
    c . x == x^T Q x on every source-target path.  Not linearizable:
    returns a witness arc with the two disagreeing reduced vectors.

    Runs in O(n m^3) exact arithmetic; no path enumeration anywhere.
    """
    require_exact(inst)
    g = inst.graph
    if not is_corridor(g):
        raise GraphError("instance graph must be corridor-pruned")
    if g.source == g.target:
        return LinearizationOutcome(linearizable=True, linearization=())
    diag, qs = _symmetrized_offdiag(inst.Q)

    corridors = {}
    locals_of = {}
    qsubs = {}
    pseudo = {}
    for v in g.topo_order:
        if v == g.source:
            continue  # never consulted: arcs out of the source are not checked
        cor = prune_to_corridor(g, v)
        corridors[v] = cor
        locals_of[v] = {top: i for i, top in enumerate(cor.parent_arc)}
        qsubs[v] = _submatrix(qs, cor.parent_arc)
        pseudo[v] = pseudo_linearization(cor, qsubs[v])

    for e_top, (u, v) in enumerate(g.arcs):
        if u == g.source:
            continue  # the corridor to the source has no arcs
        cor_v = corridors[v]
        loc_v = locals_of[v]
        child, pushed = transform_te(
            cor_v, qsubs[v], pseudo[v], loc_v[e_top])
        reduced = reduce_cost_vector(child, pushed)
        if reduced != pseudo[u]:
            return LinearizationOutcome(
                linearizable=False,
                witness=Witness(
                    arc=e_top, tail=u, head=v,
                    arc_labels=corridors[u].parent_arc,
                    expected=pseudo[u], actual=reduced))

    c = tuple(a + b for a, b in zip(pseudo[g.target],
                                    reduce_cost_vector(g, diag)))
    return LinearizationOutcome(linearizable=True, linearization=c)


# ---------------------------------------------------------------------------
# spanning sets
#
# Everything above is linear in Q.  Working over the coordinates
# s_ij = q_ij + q_ji (i < j) --- every map only ever reads those sums ---
# each per-arc residual becomes an integer matrix row; Q is linearizable
# iff its s-coordinates lie in the common null space.  A null-space basis,
# lifted to symmetric matrices and joined with the canonical skew matrices
# (always linearizable, with zero linearization vector), spans the
# zero-diagonal linearizable matrices.

@dataclass(frozen=True)
class SpanningSet:
    """Basis (Q_i, c_i) of the zero-diagonal linearizable matrices."""

    members: tuple
    dimension: int

    def contains(self, q: RationalMatrix) -> bool:
        """Is q in the span?  Rank test over off-diagonal coordinates.

        Members all have zero diagonal, so anything with a nonzero
        diagonal entry is outside the span by definition.
        """
        if any(q.at(i, i) != 0 for i in range(q.rows)):
            return False
        coords = _offdiag_coords(q)
        if not self.members:
            return all(v == 0 for v in coords)
        rows = [_offdiag_coords(qi) for qi, _ in self.members]
        base = RationalMatrix.from_rows(rows)
        stacked = RationalMatrix.from_rows(rows + [coords])
        return matrix_rank(base) == matrix_rank(stacked)


def _offdiag_coords(q: RationalMatrix):
    m = q.rows
    return [q.at(i, j) for i in range(m) for j in range(m) if i != j]


def _pair_index(m: int):
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    return pairs, {p: k for k, p in enumerate(pairs)}


def _symbolic_pseudo(cor: Dag, pidx, top_of):
    """Rows over pair coordinates: row a gives p[a] as a functional of Q."""
    width = len(pidx)
    basic = basic_arc_order(cor)
    nb = non_basic_arcs(cor)
    col = {e: k for k, e in enumerate(basic)}
    cost_rows = []
    inc_rows = []
    for e in basic:
        p = critical_path(cor, e)
        row = [0] * width
        tops = [top_of[a] for a in p.arcs]
        for x in range(len(tops)):
            for y in range(x + 1, len(tops)):
                a, b = tops[x], tops[y]
                key = (a, b) if a < b else (b, a)
                row[pidx[key]] += 1
        cost_rows.append(row)
        inc = [0] * len(basic)
        for a in p.arcs:
            if a not in nb:
                inc[col[a]] = 1
        inc_rows.append(inc)
    # unit lower triangular forward substitution on vector-valued rhs
    solved = []
    for k in range(len(basic)):
        row = cost_rows[k]
        for j in range(k):
            if inc_rows[k][j]:
                prev = solved[j]
                row = [a - b for a, b in zip(row, prev)]
        solved.append(row)
    out = [[0] * width for _ in range(cor.m)]
    for e, row in zip(basic, solved):
        out[e] = row
    return out


def spanning_set(g: Dag) -> SpanningSet:
    """Spanning set of the zero-diagonal linearizable matrices for g.

    Every member comes with its linearization vector; symmetric members
    carry the reduced vector read off the target pseudo-linearization map,
    skew members carry zero.
    """
    if not is_corridor(g):
        raise GraphError("spanning sets need a corridor graph")
    if g.source == g.target:
        return SpanningSet(members=(), dimension=0)
    m = g.m
    pairs, pidx = _pair_index(m)
    width = len(pairs)

    corridors = {}
    locals_of = {}
    sym_pseudo = {}
    for v in g.topo_order:
        if v == g.source:
            continue
        cor = prune_to_corridor(g, v)
        corridors[v] = cor
        locals_of[v] = {top: i for i, top in enumerate(cor.parent_arc)}
        sym_pseudo[v] = _symbolic_pseudo(cor, pidx, cor.parent_arc)

    residuals = set()
    for e_top, (u, v) in enumerate(g.arcs):
        if u == g.source:
            continue
        cor_v = corridors[v]
        loc_v = locals_of[v]
        p_v = sym_pseudo[v]
        e_local = loc_v[e_top]
        child = prune_to_corridor(cor_v, cor_v.arcs[e_local][0])
        pushed = []
        p_e_row = p_v[e_local]
        for a_local in range(child.m):
            a_in_v = child.parent_arc[a_local]
            a_top = cor_v.parent_arc[a_in_v]
            key = (e_top, a_top) if e_top < a_top else (a_top, e_top)
            row = list(p_v[a_in_v])
            row[pidx[key]] -= 1
            if child.arcs[a_local][0] == child.source:
                row = [x + y for x, y in zip(row, p_e_row)]
            pushed.append(row)
        _reduce_rows(child, pushed)
        for row, prow in zip(pushed, sym_pseudo[u]):
            res = tuple(x - y for x, y in zip(row, prow))
            if any(res):
                residuals.add(res)

    p_t = sym_pseudo[g.target]
    if residuals:
        sym_basis = null_space_basis(RationalMatrix.from_rows(sorted(residuals)))
    else:
        sym_basis = [tuple(ONE if k == j else ZERO for k in range(width))
                     for j in range(width)]

    members = []
    for vec in sym_basis:
        rows = [[ZERO] * m for _ in range(m)]
        for (i, j), val in zip(pairs, vec):
            rows[i][j] = val
            rows[j][i] = val
        q = RationalMatrix.from_rows(rows)
        # s-coordinates of this member are 2*vec
        c = tuple(2 * sum((rv * sv for rv, sv in zip(prow, vec)), ZERO)
                  for prow in p_t)
        members.append((q, c))
    for i, j in pairs:
        rows = [[ZERO] * m for _ in range(m)]
        rows[i][j] = ONE
        rows[j][i] = -ONE
        members.append((RationalMatrix.from_rows(rows), (ZERO,) * m))
    return SpanningSet(members=tuple(members), dimension=len(members))
