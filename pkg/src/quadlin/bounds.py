"""Lower-bound ladder for binary quadratic programs over Bx = b, x >= 0.

Five bounds, ordered v_gl <= v_ggl <= v_lbb_prime == v_rlt1 <= v_lbb_star
<= optimum (the equality is LP duality; the last step needs an integral
polytope and, for lbb_star, a spanning family of linearizable matrices):

  gl          per-column dual fitting: the best Qbar = B^T Ybar + Diag(zbar)
              below Q elementwise, column by column; bound is the cheapest
              polytope point under the fitted linear costs.
  ggl         iterated gl: subtract the fitted part, optionally shuffle the
              residual with a skew matrix (which never changes x^T R x),
              accumulate the linear parts, repeat.
  lbb_prime   one LP over (y, Y, z): max b.y subject to dual feasibility
              and B^T Y + Y^T B + Diag(z) elementwise below sym(Q).
  rlt1        level-1 reformulation-linearization: lift to pair variables
              X with BX = b x^T, diag(X) = x, X >= 0.  Exact LP dual of
              lbb_prime, so their values agree to the last bit in exact
              mode (checked by tests, not assumed).
  lbb_star    family bound: pick A = sum(lam_i Q_i) elementwise below
              sym(Q) from a family of linearizable matrices and use its
              linearization; with a spanning family this dominates
              lbb_prime on integral polytopes.

Every report carries enough certificate data for verify_report to confirm
the bound from first principles without re-running the solver.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction

from quadlin.exactnum import ONE, ZERO, RationalMatrix, rat
from quadlin.lpsolve import (
    EQ,
    LE,
    OPTIMAL,
    EXACT_SIZE_LIMIT,
    MODE_ENV_VAR,
    LinearProgram,
    solve_lp,
)
from quadlin.model import (
    BqpInstance,
    FloatTaggedError,
    QsppInstance,
    brute_force_opt,
    qspp_to_bqp,
)
from quadlin.qspplin import SpanningSet, spanning_set


class BoundComputationError(RuntimeError):
    """A bound's internal LP did not come back optimal."""


class ChainViolation(AssertionError):
    """The computed bound values contradict the proven ordering."""


class SkewStrategy(enum.Enum):
    """How ggl reshuffles the residual R with a skew matrix each round.

    Adding skew S never changes x^T R x, so any choice is sound; it only
    redirects where the remaining weight sits for the next fitting round.
    """

    NONE = "none"
    UPPER_TRIANGULAR = "upper_triangular"
    SYMMETRIZE = "symmetrize"


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: object                  # Fraction (exact) or float
    mode: str
    relaxation_only: bool          # polytope not certified integral
    certificate: dict
    trace: tuple = ()              # ggl: bound value after each iteration
    pivots: int = 0
    sparsity: tuple = None
    canonical_family: bool = False  # lbb_star built from a spanning set


def _bqp(inst) -> BqpInstance:
    if isinstance(inst, QsppInstance):
        return qspp_to_bqp(inst)
    if isinstance(inst, BqpInstance):
        return inst
    raise TypeError(f"expected a problem instance, got {type(inst).__name__}")


def rat_from(v):
    """Fraction from exact data or from a float (exact binary value)."""
    if isinstance(v, float):
        return Fraction(v)
    return rat(v)


def _bound_mode(bqp: BqpInstance, mode: str, nrows: int, nvars: int) -> str:
    if mode == "auto":
        env = os.environ.get(MODE_ENV_VAR, "").strip().lower()
        if env in ("exact", "float"):
            mode = env
        elif env:
            raise ValueError(
                f"{MODE_ENV_VAR} must be 'exact' or 'float', got {env!r}")
        elif bqp.float_tagged:
            mode = "float"
        else:
            mode = "float" if max(nrows, nvars) > EXACT_SIZE_LIMIT \
                else "exact"
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be auto, exact or float, got {mode!r}")
    if mode == "exact" and bqp.float_tagged:
        raise FloatTaggedError(
            "instance carries float data; exact mode refused")
    return mode


def _check_sparsity(sparsity, m):
    if sparsity is None:
        return None
    out = set()
    for i, j in sparsity:
        i, j = int(i), int(j)
        if not (0 <= i < m and 0 <= j < m) or i == j:
            raise ValueError(f"bad sparsity pair ({i}, {j})")
        out.add((min(i, j), max(i, j)))
    return frozenset(out)


def _solve(lp, mode, what):
    res = solve_lp(lp, mode=mode)
    if res.status != OPTIMAL:
        raise BoundComputationError(f"{what}: LP is {res.status}")
    return res


def _polytope_min(bqp: BqpInstance, costs, mode):
    """min costs . x over Bx = b, x >= 0."""
    rows = [(tuple(bqp.B.row(i)), EQ, bqp.b[i]) for i in range(bqp.B.rows)]
    lp = LinearProgram("min", tuple(costs), tuple(rows),
                       tuple((ZERO, None) for _ in range(bqp.m)))
    return _solve(lp, mode, "feasible-set minimum")


def _fit_columns(bqp: BqpInstance, q: RationalMatrix, mode):
    """Best per-column (y_k, z_k): max b.y_k + z_k with
    B^T y_k + e_k z_k <= q[:, k].  Returns (ybar columns, zbar, cbar, pivots).
    """
    n, m = bqp.B.rows, bqp.m
    free = tuple((None, None) for _ in range(n + 1))
    obj = tuple(bqp.b) + (ONE,)
    ycols = []
    zbar = []
    cbar = []
    pivots = 0
    for k in range(m):
        rows = []
        for i in range(m):
            coeffs = tuple(bqp.B.at(r, i) for r in range(n)) \
                + ((ONE,) if i == k else (ZERO,))
            rows.append((coeffs, LE, q.at(i, k)))
        lp = LinearProgram("max", obj, tuple(rows), free)
        res = _solve(lp, mode, f"column {k} fitting program")
        ycols.append(res.x[:n])
        zbar.append(res.x[n])
        cbar.append(res.value)
        pivots += res.pivots
    return ycols, zbar, cbar, pivots


def _fitted_matrix(bqp: BqpInstance, ycols, zbar) -> RationalMatrix:
    """Qbar = B^T Ybar + Diag(zbar) with Ybar's k-th column ycols[k]."""
    n, m = bqp.B.rows, bqp.m
    rows = []
    for i in range(m):
        row = []
        for k in range(m):
            v = sum((bqp.B.at(r, i) * rat_from(ycols[k][r])
                     for r in range(n)), ZERO)
            if i == k:
                v += rat_from(zbar[k])
            row.append(v)
        rows.append(row)
    return RationalMatrix.from_rows(rows)


def gl_bound(inst, mode: str = "auto") -> BoundReport:
    """One-shot column fitting bound."""
    bqp = _bqp(inst)
    n, m = bqp.B.rows, bqp.m
    mode = _bound_mode(bqp, mode, max(m, n), n + 1)
    ycols, zbar, cbar, pivots = _fit_columns(bqp, bqp.Q, mode)
    costs = [rat_from(c) + l for c, l in zip(cbar, bqp.linear)]
    final = _polytope_min(bqp, costs, mode)
    return BoundReport(
        name="gl", value=final.value, mode=mode,
        relaxation_only=not bqp.integral_polytope,
        certificate={
            "ybar_columns": tuple(tuple(v for v in col) for col in ycols),
            "zbar": tuple(zbar), "cbar": tuple(cbar),
            "x": final.x, "duals": final.duals,
        },
        pivots=pivots + final.pivots)


def _skew_update(r: RationalMatrix, strategy: SkewStrategy) -> RationalMatrix:
    m = r.rows
    if strategy == SkewStrategy.NONE:
        return r
    if strategy == SkewStrategy.UPPER_TRIANGULAR:
        rows = [[ZERO] * m for _ in range(m)]
        for i in range(m):
            rows[i][i] = r.at(i, i)
            for j in range(i + 1, m):
                rows[i][j] = r.at(i, j) + r.at(j, i)
        return RationalMatrix.from_rows(rows)
    if strategy == SkewStrategy.SYMMETRIZE:
        half = Fraction(1, 2)
        rows = [[(r.at(i, j) + r.at(j, i)) * half for j in range(m)]
                for i in range(m)]
        return RationalMatrix.from_rows(rows)
    raise ValueError(f"unknown strategy {strategy!r}")


def ggl_bound(inst, strategy: SkewStrategy = SkewStrategy.NONE,
              max_iter: int = 50, tol=None,
              mode: str = "auto") -> BoundReport:
    """Iterated column fitting.

    Each round fits the current matrix, moves its value into the linear
    term, and continues on the residual (reshuffled per the strategy).
    Stops after the round whose fitted linear part vanishes (|entry| <=
    tol; by default exactly zero in exact mode, 1e-9 in float mode), or
    after max_iter rounds.  The trace holds the bound after each round
    and is nondecreasing: the residual of every round is elementwise
    nonnegative, so every fitted part after the first is nonnegative.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    bqp = _bqp(inst)
    n, m = bqp.B.rows, bqp.m
    mode = _bound_mode(bqp, mode, max(m, n), n + 1)
    q_cur = bqp.Q
    c_total = [ZERO] * m
    trace = []
    iterations = []
    pivots = 0
    final = None
    for _ in range(max_iter):
        ycols, zbar, cbar, piv = _fit_columns(bqp, q_cur, mode)
        pivots += piv
        qbar = _fitted_matrix(bqp, ycols, zbar)
        residual = q_cur - qbar
        q_cur = _skew_update(residual, strategy)
        c_total = [a + rat_from(c) for a, c in zip(c_total, cbar)]
        final = _polytope_min(
            bqp, [a + l for a, l in zip(c_total, bqp.linear)], mode)
        trace.append(final.value)
        iterations.append({"ybar_columns": tuple(map(tuple, ycols)),
                           "zbar": tuple(zbar), "cbar": tuple(cbar)})
        pivots += final.pivots
        if tol is None:
            done = all(rat(c) == 0 for c in cbar) if mode == "exact" \
                else max(abs(float(c)) for c in cbar) <= 1e-9
        else:
            done = all(abs(c) <= tol for c in cbar)
        if done:
            break
    return BoundReport(
        name="ggl", value=final.value, mode=mode,
        relaxation_only=not bqp.integral_polytope,
        certificate={
            "strategy": strategy.value,
            "iterations": tuple(iterations),
            "c_total": tuple(c_total),
            "x": final.x, "duals": final.duals,
        },
        trace=tuple(trace), pivots=pivots)


def _sym_matrix(q: RationalMatrix) -> RationalMatrix:
    half = Fraction(1, 2)
    m = q.rows
    return RationalMatrix.from_rows(
        [[(q.at(i, j) + q.at(j, i)) * half for j in range(m)]
         for i in range(m)])


def lbb_prime(inst, sparsity=None, mode: str = "auto") -> BoundReport:
    """Dual-side linearization bound with the symmetrized matrix.

    Variables y (n), Y (n x m), z (m), all free; maximize b . y under
      B^T y <= 2 Y^T b + z + linear
      (B^T Y + Y^T B + Diag(z))_ij <= sym(Q)_ij  for pairs i <= j not in
      the sparsity set (the left side is symmetric, so one row per
      unordered pair suffices).
    """
    bqp = _bqp(inst)
    n, m = bqp.B.rows, bqp.m
    sparsity = _check_sparsity(sparsity, m)
    nvars = n + n * m + m
    npairs = m * (m + 1) // 2 - (len(sparsity) if sparsity else 0)
    mode = _bound_mode(bqp, mode, m + npairs, nvars)
    qs = _sym_matrix(bqp.Q)

    def ycol(r, j):
        return n + r * m + j

    zcol = n + n * m
    obj = [ZERO] * nvars
    for r in range(n):
        obj[r] = bqp.b[r]
    rows = []
    # dual feasibility rows: (B^T y)_j - 2 (Y^T b)_j - z_j <= linear_j
    for j in range(m):
        coeffs = [ZERO] * nvars
        for r in range(n):
            coeffs[r] = bqp.B.at(r, j)
            coeffs[ycol(r, j)] = -2 * bqp.b[r]
        coeffs[zcol + j] = -ONE
        rows.append((tuple(coeffs), LE, bqp.linear[j]))
    # elementwise domination rows over unordered pairs
    pair_rows = []
    for i in range(m):
        for j in range(i, m):
            if sparsity and i != j and (i, j) in sparsity:
                continue
            coeffs = [ZERO] * nvars
            for r in range(n):
                coeffs[ycol(r, j)] += bqp.B.at(r, i)
                coeffs[ycol(r, i)] += bqp.B.at(r, j)
            if i == j:
                coeffs[zcol + i] += ONE
            rows.append((tuple(coeffs), LE, qs.at(i, j)))
            pair_rows.append((i, j))
    lp = LinearProgram("max", tuple(obj), tuple(rows),
                       tuple((None, None) for _ in range(nvars)))
    res = _solve(lp, mode, "linearization dual program")
    y = res.x[:n]
    ymat = tuple(tuple(res.x[ycol(r, j)] for j in range(m))
                 for r in range(n))
    z = res.x[zcol:zcol + m]
    return BoundReport(
        name="lbb_prime", value=res.value, mode=mode,
        relaxation_only=not bqp.integral_polytope,
        certificate={"y": y, "Y": ymat, "z": z},
        pivots=res.pivots,
        sparsity=tuple(sorted(sparsity)) if sparsity else None)


def rlt1(inst, sparsity=None, mode: str = "auto") -> BoundReport:
    """Level-1 lifting bound; exact LP dual of lbb_prime.

    Variables x (m) and one pair variable w_ij per unordered pair (i, j)
    not excluded by sparsity (w_ii always present), all nonnegative;
    minimize <Q, X> + linear . x with X_ij = X_ji = w_ij, subject to
      Bx = b,  B X = b x^T (row by row),  diag(X) = x.
    """
    bqp = _bqp(inst)
    n, m = bqp.B.rows, bqp.m
    sparsity = _check_sparsity(sparsity, m)
    pairs = [(i, j) for i in range(m) for j in range(i, m)
             if not (sparsity and i != j and (i, j) in sparsity)]
    pidx = {p: m + k for k, p in enumerate(pairs)}
    nvars = m + len(pairs)
    nrows = n + n * m + m
    mode = _bound_mode(bqp, mode, nrows, nvars)

    obj = [ZERO] * nvars
    for j in range(m):
        obj[j] = bqp.linear[j]
    for k, (i, j) in enumerate(pairs):
        obj[m + k] = bqp.Q.at(i, i) if i == j \
            else bqp.Q.at(i, j) + bqp.Q.at(j, i)

    rows = []
    for r in range(n):  # Bx = b
        coeffs = [ZERO] * nvars
        for j in range(m):
            coeffs[j] = bqp.B.at(r, j)
        rows.append((tuple(coeffs), EQ, bqp.b[r]))
    for r in range(n):  # (B X)_{r j} - b_r x_j = 0
        for j in range(m):
            coeffs = [ZERO] * nvars
            coeffs[j] = -bqp.b[r]
            for k in range(m):
                key = (k, j) if k <= j else (j, k)
                col = pidx.get(key)
                if col is not None:
                    coeffs[col] += bqp.B.at(r, k)
            rows.append((tuple(coeffs), EQ, ZERO))
    for j in range(m):  # x_j - w_jj = 0
        coeffs = [ZERO] * nvars
        coeffs[j] = ONE
        coeffs[pidx[(j, j)]] = -ONE
        rows.append((tuple(coeffs), EQ, ZERO))

    lp = LinearProgram("min", tuple(obj), tuple(rows),
                       tuple((ZERO, None) for _ in range(nvars)))
    res = _solve(lp, mode, "level-1 lifting program")
    return BoundReport(
        name="rlt1", value=res.value, mode=mode,
        relaxation_only=not bqp.integral_polytope,
        certificate={
            "x": res.x[:m],
            "pairs": tuple(pairs),
            "w": res.x[m:],
            "duals": res.duals,
        },
        pivots=res.pivots,
        sparsity=tuple(sorted(sparsity)) if sparsity else None)


def _family_members(family, m):
    if hasattr(family, "members"):  # LinearizableFamily or SpanningSet
        family = family.members
    members = []
    for q, c in family:
        if not isinstance(q, RationalMatrix):
            q = RationalMatrix.from_rows(q)
        if q.rows != m or q.cols != m or len(c) != m:
            raise ValueError("family member shape mismatch")
        members.append((q, tuple(rat(v) for v in c)))
    return members


def _family_bound(bqp: BqpInstance, target: RationalMatrix, members,
                  mode: str, name: str, dedup_rows: bool):
    """max b.y st B^T y <= linear + sum(lam_i c_i),
    sum(lam_i Q_i) <= target elementwise."""
    n, m = bqp.B.rows, bqp.m
    k = len(members)
    nvars = n + k

    obj = [ZERO] * nvars
    for r in range(n):
        obj[r] = bqp.b[r]
    rows = []
    for j in range(m):
        coeffs = [ZERO] * nvars
        for r in range(n):
            coeffs[r] = bqp.B.at(r, j)
        for t, (_, c) in enumerate(members):
            coeffs[n + t] = -c[j]
        rows.append((tuple(coeffs), LE, bqp.linear[j]))
    for i in range(m):
        for j in range(i if dedup_rows else 0, m):
            coeffs = [ZERO] * nvars
            for t, (q, _) in enumerate(members):
                coeffs[n + t] = q.at(i, j)
            rows.append((tuple(coeffs), LE, target.at(i, j)))
    lp = LinearProgram("max", tuple(obj), tuple(rows),
                       tuple((None, None) for _ in range(nvars)))
    res = _solve(lp, mode, f"{name} family program")
    return res


def lbb_generic(inst, family, mode: str = "auto") -> BoundReport:
    """Family bound against the raw (unsymmetrized) matrix.

    max b.y over (y, alpha) with B^T y <= linear + sum(alpha_i c_i) and
    sum(alpha_i Q_i) <= Q elementwise.  Skew-symmetric additions to Q
    change this bound, because elementwise domination is not invariant
    under them; lbb_star removes that dependence by symmetrizing.
    """
    bqp = _bqp(inst)
    members = _family_members(family, bqp.m)
    n, m = bqp.B.rows, bqp.m
    mode = _bound_mode(bqp, mode, m + m * m, n + len(members))
    res = _family_bound(bqp, bqp.Q, members, mode, "generic family", False)
    return BoundReport(
        name="lbb_generic", value=res.value, mode=mode,
        relaxation_only=not bqp.integral_polytope,
        certificate={
            "y": res.x[:n], "alpha": res.x[n:],
            "members": tuple((q.to_rows(), c) for q, c in members),
        },
        pivots=res.pivots)


def lbb_star(inst, family=None, mode: str = "auto") -> BoundReport:
    """Augmented dual bound: lbb_prime's variables plus family weights.

    LP over (y, Y, z, alpha): max b.y subject to
      B^T y <= 2 Y^T b + z + sum(alpha_i c_i) + linear
      B^T Y + Y^T B + Diag(z) + sum(alpha_i Q_i) <= sym(Q) elementwise.

    Setting alpha = 0 recovers lbb_prime, so the value dominates it for
    any certified family; an empty family collapses to lbb_prime exactly.
    Members are symmetrized internally ((M + M^T)/2 carries the same
    linearization vector, skew parts being linearizable with the zero
    vector); that never changes the optimum and lets one row per
    unordered pair suffice.  With family=None an instance carrying
    shortest-path structure gets its graph's spanning set and the report
    is flagged canonical; passing a SpanningSet directly also counts.
    """
    bqp = _bqp(inst)
    canonical = False
    if family is None:
        if isinstance(inst, QsppInstance):
            graph = inst.graph
        elif bqp.structure and bqp.structure[0] == "qspp":
            graph = bqp.structure[1]
        else:
            raise ValueError(
                "lbb_star needs an explicit family unless the instance "
                "has shortest-path structure")
        family = spanning_set(graph)
        canonical = True
    elif isinstance(family, SpanningSet):
        canonical = True
    members = _family_members(family, bqp.m)
    half = Fraction(1, 2)
    sym_members = []
    for q, c in members:
        if not q.is_symmetric():
            q = (q + q.transpose()).scale(half)
        if all(v == 0 for row in q.to_rows() for v in row) \
                and all(v == 0 for v in c):
            continue  # skew members symmetrize away entirely
        sym_members.append((q, c))
    n, m = bqp.B.rows, bqp.m
    k = len(sym_members)
    nvars = n + n * m + m + k
    nrows = m + m * (m + 1) // 2
    mode = _bound_mode(bqp, mode, nrows, nvars)
    qs = _sym_matrix(bqp.Q)

    def ycol(r, j):
        return n + r * m + j

    zcol = n + n * m
    acol = n + n * m + m
    obj = [ZERO] * nvars
    for r in range(n):
        obj[r] = bqp.b[r]
    rows = []
    for j in range(m):
        coeffs = [ZERO] * nvars
        for r in range(n):
            coeffs[r] = bqp.B.at(r, j)
            coeffs[ycol(r, j)] = -2 * bqp.b[r]
        coeffs[zcol + j] = -ONE
        for t, (_, c) in enumerate(sym_members):
            coeffs[acol + t] = -c[j]
        rows.append((tuple(coeffs), LE, bqp.linear[j]))
    for i in range(m):
        for j in range(i, m):
            coeffs = [ZERO] * nvars
            for r in range(n):
                coeffs[ycol(r, j)] += bqp.B.at(r, i)
                coeffs[ycol(r, i)] += bqp.B.at(r, j)
            if i == j:
                coeffs[zcol + i] += ONE
            for t, (q, _) in enumerate(sym_members):
                coeffs[acol + t] = q.at(i, j)
            rows.append((tuple(coeffs), LE, qs.at(i, j)))
    lp = LinearProgram("max", tuple(obj), tuple(rows),
                       tuple((None, None) for _ in range(nvars)))
    res = _solve(lp, mode, "augmented family program")
    return BoundReport(
        name="lbb_star", value=res.value, mode=mode,
        relaxation_only=not bqp.integral_polytope,
        certificate={
            "y": res.x[:n],
            "Y": tuple(tuple(res.x[ycol(r, j)] for j in range(m))
                       for r in range(n)),
            "z": res.x[zcol:zcol + m],
            "alpha": res.x[acol:],
            "members": tuple((q.to_rows(), c) for q, c in sym_members),
        },
        pivots=res.pivots, canonical_family=canonical)


# ---------------------------------------------------------------------------
# chain checking and report verification

_CHAIN_GROUPS = (("gl",), ("ggl",), ("lbb_prime", "rlt1"), ("lbb_star",))


def verify_chain(reports, opt=None, tol=None):
    """Check the proven ordering among computed bounds.

    reports is an iterable of BoundReport (a mapping name -> value also
    works; a key "opt" inside it supplies the optimum).  Relations, over
    whatever is present: every gl <= every ggl <= lbb_prime == rlt1 <=
    every lbb_star, and, when opt is given, every value <= opt -- the
    soundness check covers names outside the chain (e.g. lbb_generic)
    too.  tol defaults to exact comparison unless a float value is
    involved, then 1e-6.  Raises ChainViolation naming the failing pair;
    returns the tuple of relations checked.
    """
    if hasattr(reports, "items"):
        entries = [(str(k), v) for k, v in reports.items()]
    else:
        entries = [(r.name, r.value) for r in reports]
    stripped = []
    for name, value in entries:
        if name == "opt" and opt is None:
            opt = value
        else:
            stripped.append((name, value))
    entries = stripped
    if tol is None:
        floaty = any(isinstance(v, float) for _, v in entries)
        floaty = floaty or isinstance(opt, float)
        tol = 1e-6 if floaty else 0
    groups = []
    for names in _CHAIN_GROUPS:
        groups.append([(n, v) for n, v in entries if n in names])
    checked = []
    present = [g for g in groups if g]
    for lo, hi in zip(present, present[1:]):
        for na, va in lo:
            for nb, vb in hi:
                if va > vb + tol:
                    raise ChainViolation(
                        f"{na} <= {nb} fails: {va!r} > {vb!r}")
        checked.append(f"{lo[0][0]} <= {hi[0][0]}")
    eq = groups[2]
    if len({n for n, _ in eq}) == 2:
        vals = [v for _, v in eq]
        if max(vals) - min(vals) > tol:
            raise ChainViolation(
                f"lbb_prime == rlt1 fails: {min(vals)!r} vs {max(vals)!r}")
        checked.append("lbb_prime == rlt1")
    if opt is not None:
        for name, value in entries:
            if value > opt + tol:
                raise ChainViolation(
                    f"{name} <= opt fails: {value!r} > {opt!r}")
        checked.append("all <= opt")
    return tuple(checked)


def optimum_report(inst, cap: int = 1_000_000) -> BoundReport:
    """Brute-force optimum packaged like a bound (name 'opt')."""
    bqp = _bqp(inst)
    value, argmin = brute_force_opt(bqp, cap=cap)
    return BoundReport(name="opt", value=value, mode="exact",
                       relaxation_only=False,
                       certificate={"argmin": argmin})


def _leq(a, b, tol):
    return a <= b + tol


def verify_report(inst, report: BoundReport, tol=None):
    """Re-derive the bound's validity from its certificate.

    Returns (ok, messages).  Checks are done in exact arithmetic for
    exact-mode reports and within tol (default 1e-7) for float reports.
    """
    bqp = _bqp(inst)
    n, m = bqp.B.rows, bqp.m
    exact = report.mode == "exact"
    if tol is None:
        tol = 0 if exact else 1e-7
    conv = rat if exact else float
    msgs = []

    def num(v):
        return conv(v)

    def mat_entry(qm, i, j):
        return num(qm.at(i, j))

    sym = _sym_matrix(bqp.Q)

    if report.name in ("gl", "ggl"):
        cert = report.certificate
        if report.name == "gl":
            steps = ({"ybar_columns": cert["ybar_columns"],
                      "zbar": cert["zbar"], "cbar": cert["cbar"]},)
            strategy = SkewStrategy.NONE
        else:
            steps = cert["iterations"]
            strategy = SkewStrategy(cert["strategy"])
        q_cur = bqp.Q
        c_total = [num(0)] * m
        for it, step in enumerate(steps):
            ycols = step["ybar_columns"]
            zbar = step["zbar"]
            cbar = step["cbar"]
            if exact:
                qbar = _fitted_matrix(bqp, ycols, zbar)
            else:
                qbar = _fitted_matrix(
                    bqp, [[rat_from(v) for v in col] for col in ycols],
                    [rat_from(v) for v in zbar])
            for i in range(m):
                for k in range(m):
                    if num(qbar.at(i, k)) > mat_entry(q_cur, i, k) + tol:
                        msgs.append(
                            f"round {it}: fitted matrix exceeds the "
                            f"current matrix at ({i}, {k})")
            for k in range(m):
                want = sum(num(bqp.b[r]) * num(ycols[k][r])
                           for r in range(n)) + num(zbar[k])
                if abs(num(cbar[k]) - want) > tol:
                    msgs.append(f"round {it}: cbar[{k}] inconsistent")
            c_total = [a + num(c) for a, c in zip(c_total, cbar)]
            q_cur = _skew_update(q_cur - qbar, strategy)
        x = report.certificate["x"]
        costs = [a + num(l) for a, l in zip(c_total, bqp.linear)]
        bx = [sum(num(bqp.B.at(r, j)) * num(x[j]) for j in range(m))
              for r in range(n)]
        for r in range(n):
            if abs(bx[r] - num(bqp.b[r])) > tol:
                msgs.append(f"final point violates flow row {r}")
        if any(num(v) < -tol for v in x):
            msgs.append("final point has a negative coordinate")
        ptval = sum(c * num(v) for c, v in zip(costs, x))
        if abs(ptval - num(report.value)) > tol:
            msgs.append("final point does not achieve the reported value")
        y = report.certificate["duals"]
        yb = sum(num(a) * num(bqp.b[r]) for r, a in enumerate(y))
        if abs(yb - num(report.value)) > tol:
            msgs.append("final duals do not certify the value")
        for j in range(m):
            r_j = costs[j] - sum(num(y[r]) * num(bqp.B.at(r, j))
                                 for r in range(n))
            if r_j < -tol * (1 + abs(costs[j])):
                msgs.append(f"final duals infeasible at column {j}")

    elif report.name == "lbb_prime":
        y = report.certificate["y"]
        ymat = report.certificate["Y"]
        z = report.certificate["z"]
        sparsity = set(report.sparsity or ())
        for j in range(m):
            lhs = sum(num(bqp.B.at(r, j)) * num(y[r]) for r in range(n))
            rhs = 2 * sum(num(ymat[r][j]) * num(bqp.b[r])
                          for r in range(n)) + num(z[j]) + num(bqp.linear[j])
            if lhs > rhs + tol:
                msgs.append(f"dual feasibility fails at column {j}")
        for i in range(m):
            for j in range(i, m):
                if i != j and (i, j) in sparsity:
                    continue
                lhs = sum(num(bqp.B.at(r, i)) * num(ymat[r][j])
                          + num(bqp.B.at(r, j)) * num(ymat[r][i])
                          for r in range(n))
                if i == j:
                    lhs += num(z[i])
                if lhs > mat_entry(sym, i, j) + tol:
                    msgs.append(f"domination fails at pair ({i}, {j})")
        val = sum(num(y[r]) * num(bqp.b[r]) for r in range(n))
        if abs(val - num(report.value)) > tol:
            msgs.append("objective does not match the certificate")

    elif report.name == "rlt1":
        cert = report.certificate
        x = cert["x"]
        pairs = cert["pairs"]
        w = cert["w"]
        duals = cert["duals"]
        if any(num(v) < -tol for v in list(x) + list(w)):
            msgs.append("lifted point has a negative coordinate")
        widx = {tuple(p): k for k, p in enumerate(pairs)}

        def xval(i, j):
            key = (i, j) if i <= j else (j, i)
            k = widx.get(key)
            return num(w[k]) if k is not None else num(0)

        for r in range(n):
            s = sum(num(bqp.B.at(r, j)) * num(x[j]) for j in range(m))
            if abs(s - num(bqp.b[r])) > tol:
                msgs.append(f"flow row {r} violated")
            for j in range(m):
                s2 = sum(num(bqp.B.at(r, k)) * xval(k, j) for k in range(m))
                if abs(s2 - num(bqp.b[r]) * num(x[j])) > tol * (1 + abs(s2)):
                    msgs.append(f"lifted row ({r}, {j}) violated")
        for j in range(m):
            if abs(num(x[j]) - xval(j, j)) > tol:
                msgs.append(f"diagonal link violated at {j}")
        ptval = sum(num(bqp.linear[j]) * num(x[j]) for j in range(m)) + sum(
            (num(bqp.Q.at(i, i)) if i == j
             else num(bqp.Q.at(i, j)) + num(bqp.Q.at(j, i))) * num(w[k])
            for k, (i, j) in enumerate(pairs))
        if abs(ptval - num(report.value)) > tol * (1 + abs(ptval)):
            msgs.append("lifted point does not achieve the reported value")
        # map the equality duals onto the dual-side certificate and check
        # it like lbb_prime; this grounds the bound direction
        y = duals[:n]
        umat = [[duals[n + r * m + j] for j in range(m)] for r in range(n)]
        zeta = duals[n + n * m:n + n * m + m]
        for j in range(m):
            lhs = sum(num(bqp.B.at(r, j)) * num(y[r]) for r in range(n))
            rhs = sum(num(umat[r][j]) * num(bqp.b[r]) for r in range(n)) \
                - num(zeta[j]) + num(bqp.linear[j])
            if lhs > rhs + tol:
                msgs.append(f"dual certificate fails at column {j}")
        for i in range(m):
            for j in range(i, m):
                if report.sparsity and i != j \
                        and (i, j) in set(report.sparsity):
                    continue
                lhs = sum(num(bqp.B.at(r, i)) * num(umat[r][j])
                          + num(bqp.B.at(r, j)) * num(umat[r][i])
                          for r in range(n))
                if i == j:
                    lhs = sum(num(bqp.B.at(r, i)) * num(umat[r][i])
                              for r in range(n)) - num(zeta[i])
                    if lhs > num(bqp.Q.at(i, i)) + tol:
                        msgs.append(f"dual domination fails at ({i}, {i})")
                    continue
                if lhs > 2 * mat_entry(sym, i, j) + tol:
                    msgs.append(f"dual domination fails at ({i}, {j})")
        yb = sum(num(y[r]) * num(bqp.b[r]) for r in range(n))
        if abs(yb - num(report.value)) > tol * (1 + abs(yb)):
            msgs.append("dual value does not match")

    elif report.name == "lbb_generic":
        cert = report.certificate
        y = cert["y"]
        alpha = cert["alpha"]
        members = [(RationalMatrix.from_rows(qrows), c)
                   for qrows, c in cert["members"]]
        for i in range(m):
            for j in range(m):
                lhs = sum(num(alpha[t]) * num(q.at(i, j))
                          for t, (q, _) in enumerate(members))
                if lhs > mat_entry(bqp.Q, i, j) + tol:
                    msgs.append(f"family domination fails at ({i}, {j})")
        for j in range(m):
            lhs = sum(num(bqp.B.at(r, j)) * num(y[r]) for r in range(n))
            rhs = num(bqp.linear[j]) + sum(
                num(alpha[t]) * num(c[j])
                for t, (_, c) in enumerate(members))
            if lhs > rhs + tol:
                msgs.append(f"dual feasibility fails at column {j}")
        val = sum(num(y[r]) * num(bqp.b[r]) for r in range(n))
        if abs(val - num(report.value)) > tol:
            msgs.append("objective does not match the certificate")

    elif report.name == "lbb_star":
        cert = report.certificate
        y = cert["y"]
        ymat = cert["Y"]
        z = cert["z"]
        alpha = cert["alpha"]
        members = [(RationalMatrix.from_rows(qrows), c)
                   for qrows, c in cert["members"]]
        for i in range(m):
            for j in range(m):
                lhs = sum(num(bqp.B.at(r, i)) * num(ymat[r][j])
                          + num(bqp.B.at(r, j)) * num(ymat[r][i])
                          for r in range(n))
                if i == j:
                    lhs += num(z[i])
                lhs += sum(num(alpha[t]) * num(q.at(i, j))
                           for t, (q, _) in enumerate(members))
                if lhs > mat_entry(sym, i, j) + tol:
                    msgs.append(
                        f"augmented domination fails at ({i}, {j})")
        for j in range(m):
            lhs = sum(num(bqp.B.at(r, j)) * num(y[r]) for r in range(n))
            rhs = 2 * sum(num(ymat[r][j]) * num(bqp.b[r])
                          for r in range(n)) + num(z[j]) \
                + num(bqp.linear[j]) + sum(
                    num(alpha[t]) * num(c[j])
                    for t, (_, c) in enumerate(members))
            if lhs > rhs + tol:
                msgs.append(f"dual feasibility fails at column {j}")
        val = sum(num(y[r]) * num(bqp.b[r]) for r in range(n))
        if abs(val - num(report.value)) > tol:
            msgs.append("objective does not match the certificate")

    elif report.name == "opt":
        pass  # nothing to re-derive beyond brute force itself

    else:
        msgs.append(f"unknown report kind {report.name!r}")

    return not msgs, tuple(msgs)
