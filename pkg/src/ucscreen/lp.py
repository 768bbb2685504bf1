"""Dense LP and branch-and-bound MILP solvers.

The LP solver is a two-phase tableau simplex over problems of the form

    min/max  c @ y   subject to   A @ y <= b,   lo <= y <= hi

with infinite bounds allowed.  Pivoting uses Dantzig's rule and falls back
to Bland's rule after a stall, which guarantees termination on degenerate
instances.  Everything is deterministic: identical input bytes produce
identical output bytes, which the screening reports rely on.

The MILP solver runs best-first branch and bound on LP relaxations,
branching on the lowest-index fractional binary, down-branch first.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

# Shared numerical tolerances.  Screening reuses FEASIBILITY_TOL as the
# strict-inequality margin when comparing flow maxima to line limits.
FEASIBILITY_TOL = 1e-7
OPTIMALITY_TOL = 1e-9
INTEGRALITY_TOL = 1e-6

_PIVOT_TOL = 1e-9
_RATIO_TOL = 1e-10
_STALL_LIMIT = 60
_MAX_ITER = 100_000


class LpUsageError(ValueError):
    """Malformed problem data: dimension mismatch, inverted bounds, ..."""


class SimplexError(RuntimeError):
    """Simplex iteration cap reached; indicates numerical breakdown."""


class NodeLimitExceeded(RuntimeError):
    """Branch-and-bound node budget exhausted.

    Carries the best incumbent found so far (may be None) and the best
    lower bound among open nodes.
    """

    def __init__(self, message: str, incumbent=None, bound: float | None = None):
        super().__init__(message)
        self.incumbent = incumbent
        self.bound = bound


def _as_bounds_array(bounds, n: int) -> np.ndarray:
    """Normalize bounds input to an (n, 2) float array with +-inf fill."""
    out = np.empty((n, 2), dtype=float)
    if bounds is None:
        out[:, 0] = -np.inf
        out[:, 1] = np.inf
        return out
    pairs = list(bounds)
    if len(pairs) != n:
        raise LpUsageError(f"expected {n} bound pairs, got {len(pairs)}")
    for p, (lo, hi) in enumerate(pairs):
        out[p, 0] = -np.inf if lo is None else float(lo)
        out[p, 1] = np.inf if hi is None else float(hi)
    return out


@dataclass
class LpProblem:
    """min or max `objective @ y` s.t. `rows @ y <= rhs`, `lo <= y <= hi`."""

    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    bounds: np.ndarray | None = None
    sense: str = "min"

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, n)
        if self.rows.ndim != 2 or self.rows.shape[1] != n:
            raise LpUsageError(
                f"rows shape {self.rows.shape} incompatible with {n} variables"
            )
        self.rhs = np.asarray(self.rhs, dtype=float).ravel()
        if self.rhs.size != self.rows.shape[0]:
            raise LpUsageError(
                f"rhs length {self.rhs.size} != row count {self.rows.shape[0]}"
            )
        self.bounds = _as_bounds_array(self.bounds, n)
        if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
            bad = int(np.nonzero(self.bounds[:, 0] > self.bounds[:, 1])[0][0])
            raise LpUsageError(f"variable {bad} has lower bound above upper bound")
        if self.sense not in ("min", "max"):
            raise LpUsageError(f"sense must be 'min' or 'max', got {self.sense!r}")

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class LpSolution:
    """Solver verdict.  point/objective_value are None unless optimal.

    row_duals holds one multiplier (>= 0) per input row, taken from the
    final simplex basis; dual_bound is the Lagrangian bound they certify,
    which equals objective_value at an exact optimum.
    """

    status: str  # "optimal" | "infeasible" | "unbounded"
    objective_value: float | None
    point: np.ndarray | None
    row_duals: np.ndarray | None = None
    dual_bound: float | None = None
    iterations: int = 0
    nodes: int = 0


@dataclass
class MilpProblem:
    """An LpProblem plus indices of variables restricted to {0, 1}."""

    lp: LpProblem
    binary_indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.binary_indices))
        if len(set(idx)) != len(idx):
            raise LpUsageError("duplicate binary indices")
        n = self.lp.n_vars
        for i in idx:
            if not 0 <= i < n:
                raise LpUsageError(f"binary index {i} out of range for {n} variables")
            lo, hi = self.lp.bounds[i]
            if lo < -INTEGRALITY_TOL or hi > 1 + INTEGRALITY_TOL:
                raise LpUsageError(
                    f"binary variable {i} must have bounds within [0, 1], "
                    f"got [{lo}, {hi}]"
                )
        self.binary_indices = idx


class _Tableau:
    """Two-phase dense simplex working state."""

    def __init__(self, c: np.ndarray, rows: np.ndarray, rhs: np.ndarray):
        m, ns = rows.shape
        sigma = np.where(rhs >= 0.0, 1.0, -1.0)
        art_rows = np.nonzero(sigma < 0)[0]
        na = art_rows.size
        width = ns + m + na + 1
        T = np.zeros((m, width))
        T[:, :ns] = rows * sigma[:, None]
        T[np.arange(m), ns + np.arange(m)] = sigma
        T[art_rows, ns + m + np.arange(na)] = 1.0
        T[:, -1] = rhs * sigma
        basis = ns + np.arange(m)
        basis[art_rows] = ns + m + np.arange(na)
        self.T = T
        self.basis = basis
        self.ns = ns
        self.m = m
        self.na = na
        self.c = c
        self.iterations = 0

    def _zrow(self, cost: np.ndarray) -> np.ndarray:
        z = np.concatenate([cost, np.zeros(self.T.shape[1] - cost.size)])
        cb = cost[self.basis]
        if np.any(cb != 0.0):
            z -= cb @ self.T
        return z

    def _pivot(self, zrow: np.ndarray, row: int, col: int) -> None:
        T = self.T
        piv = T[row, col]
        T[row] /= piv
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T -= np.outer(colvals, T[row])
        zrow -= zrow[col] * T[row]
        self.basis[row] = col
        self.iterations += 1

    def _iterate(self, zrow: np.ndarray, active: int) -> str:
        """Run pivots until optimal/unbounded over the first `active` columns."""
        T = self.T
        stall = 0
        last_obj = -zrow[-1]
        bland = False
        while True:
            if self.iterations > _MAX_ITER:
                raise SimplexError("simplex iteration limit exceeded")
            rc = zrow[:active]
            if bland:
                neg = np.nonzero(rc < -_PIVOT_TOL)[0]
                if neg.size == 0:
                    return "optimal"
                col = int(neg[0])
            else:
                col = int(np.argmin(rc))
                if rc[col] >= -_PIVOT_TOL:
                    return "optimal"
            colvals = T[:, col]
            pos = colvals > _RATIO_TOL
            if not np.any(pos):
                return "unbounded"
            ratios = np.full(self.m, np.inf)
            ratios[pos] = T[pos, -1] / colvals[pos]
            rmin = ratios.min()
            ties = np.nonzero(ratios <= rmin + 1e-12)[0]
            if bland and ties.size > 1:
                row = int(ties[np.argmin(self.basis[ties])])
            else:
                row = int(ties[0])
            self._pivot(zrow, row, col)
            obj = -zrow[-1]
            if obj < last_obj - 1e-12:
                stall = 0
                last_obj = obj
            else:
                stall += 1
                if stall >= _STALL_LIMIT:
                    bland = True

    def solve(self) -> str:
        ns, m, na = self.ns, self.m, self.na
        if na > 0:
            p1_cost = np.zeros(ns + m + na)
            p1_cost[ns + m :] = 1.0
            zrow = self._zrow(p1_cost)
            status = self._iterate(zrow, ns + m)  # artificials never re-enter
            assert status == "optimal"  # phase-1 objective bounded below by 0
            if -zrow[-1] > FEASIBILITY_TOL:
                return "infeasible"
            self._drive_out_artificials()
        zrow = self._zrow(np.concatenate([self.c, np.zeros(self.m_active_width())]))
        self._z = zrow
        # all non-rhs columns may enter (slack indices do not shift when
        # dependent rows are dropped, so ns + self.m would undercount)
        return self._iterate(zrow, self.T.shape[1] - 1)

    def m_active_width(self) -> int:
        return self.T.shape[1] - self.ns - 1

    def _drive_out_artificials(self) -> None:
        """Pivot basic artificials out; drop dependent rows and art columns."""
        ns, m = self.ns, self.m
        art_start = ns + m
        drop_rows = []
        for row in range(self.m):
            if self.basis[row] < art_start:
                continue
            cand = np.nonzero(np.abs(self.T[row, : art_start]) > 1e-9)[0]
            if cand.size == 0:
                drop_rows.append(row)
                continue
            col = int(cand[0])
            dummy = np.zeros(self.T.shape[1])
            self._pivot(dummy, row, col)
        if drop_rows:
            keep = np.setdiff1d(np.arange(self.m), drop_rows)
            self.T = self.T[keep]
            self.basis = self.basis[keep]
            self.m = keep.size
        # Remove artificial columns entirely so they can never re-enter.
        self.T = np.concatenate([self.T[:, :art_start], self.T[:, -1:]], axis=1)

    def extract(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (standard-form solution, reduced-cost row)."""
        x = np.zeros(self.ns + self.m_active_width())
        inb = self.basis < x.size
        x[self.basis[inb]] = self.T[inb, -1]
        return x, self._z


def _standardize(c, rows, rhs, lo, hi):
    """Rewrite to min c'z, A'z <= b', z >= 0; return recovery metadata."""
    n = c.size
    fixed = lo == hi
    free = np.isinf(lo) & np.isinf(hi)
    mirrored = np.isinf(lo) & ~np.isinf(hi) & ~fixed
    shifted = ~fixed & ~free & ~mirrored  # finite lower bound

    cols = []  # (kind, var index) per standard-form column
    for j in range(n):
        if fixed[j]:
            continue
        if shifted[j]:
            cols.append(("+", j))
        elif mirrored[j]:
            cols.append(("-", j))
        else:
            cols.append(("+", j))
            cols.append(("-", j))
    ns = len(cols)
    A = np.zeros((rows.shape[0], ns))
    cstd = np.zeros(ns)
    base = np.where(fixed | shifted, np.where(np.isfinite(lo), lo, 0.0), 0.0)
    base = np.where(mirrored, hi, base)
    for k, (sign, j) in enumerate(cols):
        s = 1.0 if sign == "+" else -1.0
        A[:, k] = s * rows[:, j]
        cstd[k] = s * c[j]
    b = rhs - rows @ base
    const = float(c @ base)

    # Finite upper bounds of shifted variables become extra rows.
    ub_rows = []
    ub_vals = []
    for k, (sign, j) in enumerate(cols):
        if sign == "+" and shifted[j] and np.isfinite(hi[j]):
            r = np.zeros(ns)
            r[k] = 1.0
            ub_rows.append(r)
            ub_vals.append(hi[j] - lo[j])
    if ub_rows:
        A = np.vstack([A, np.array(ub_rows)])
        b = np.concatenate([b, np.array(ub_vals)])
    return A, b, cstd, const, cols, base


def solve_lp(problem: LpProblem) -> LpSolution:
    """Solve an LP; exact status classification, deterministic output."""
    n = problem.n_vars
    m = problem.n_rows
    lo = problem.bounds[:, 0].copy()
    hi = problem.bounds[:, 1].copy()
    c = problem.objective.copy()
    flip = problem.sense == "max"
    if flip:
        c = -c

    A, b, cstd, const, cols, base = _standardize(c, problem.rows, problem.rhs, lo, hi)

    if A.shape[1] == 0:
        # All variables fixed: feasibility is a direct check.
        if np.any(b < -FEASIBILITY_TOL):
            return LpSolution("infeasible", None, None)
        point = base.copy()
        obj = float(problem.objective @ point)
        return LpSolution("optimal", obj, point,
                          row_duals=np.zeros(m), dual_bound=obj)

    tab = _Tableau(cstd, A, b)
    status = tab.solve()
    if status == "infeasible":
        return LpSolution("infeasible", None, None, iterations=tab.iterations)
    if status == "unbounded":
        return LpSolution("unbounded", None, None, iterations=tab.iterations)

    xstd, zrow = tab.extract()
    point = base.copy()
    for k, (sign, j) in enumerate(cols):
        point[j] += xstd[k] if sign == "+" else -xstd[k]

    obj_internal = float(c @ point)
    # Row duals are the reduced costs of the original rows' slack columns.
    # Rows dropped as dependent during phase 1 keep a zero multiplier.
    duals = np.zeros(m)
    slack_cols = np.arange(tab.ns, tab.ns + tab.m_active_width())
    slack_rc = zrow[slack_cols]
    duals[:m] = np.maximum(slack_rc[:m], 0.0)

    # Lagrangian bound from the duals: exact at an exact optimum, and
    # independent of the standard-form transformations above.
    r = c + problem.rows.T @ duals
    scale = max(1.0, float(np.max(np.abs(c))) if c.size else 1.0)
    r = np.where(np.abs(r) <= 1e-9 * scale, 0.0, r)
    terms = np.zeros_like(r)
    terms[r > 0] = r[r > 0] * lo[r > 0]
    terms[r < 0] = r[r < 0] * hi[r < 0]
    dual_internal = float(-duals @ problem.rhs + np.sum(terms))

    obj = -obj_internal if flip else obj_internal
    dual_bound = -dual_internal if flip else dual_internal
    return LpSolution(
        "optimal",
        obj,
        point,
        row_duals=duals,
        dual_bound=dual_bound,
        iterations=tab.iterations,
    )


def _with_bounds(lp: LpProblem, bounds: np.ndarray) -> LpProblem:
    return LpProblem(lp.objective, lp.rows, lp.rhs, bounds=bounds.copy(),
                     sense="min")


def solve_milp(problem: MilpProblem, *, node_limit: int = 100_000) -> LpSolution:
    """Globally optimal best-first branch and bound over the binaries.

    Branching is deterministic: lowest fractional index first, down-branch
    explored first among equal bounds.
    """
    nbin = len(problem.binary_indices)
    if nbin > 60:
        raise LpUsageError(f"binary count {nbin} exceeds the desk-scale guard (60)")
    lp = problem.lp
    flip = lp.sense == "max"
    cmin = -lp.objective if flip else lp.objective
    base = LpProblem(cmin, lp.rows, lp.rhs, bounds=lp.bounds.copy(), sense="min")
    bidx = np.array(problem.binary_indices, dtype=int)

    def fractional(point: np.ndarray) -> np.ndarray:
        vals = point[bidx]
        return bidx[np.abs(vals - np.round(vals)) > INTEGRALITY_TOL]

    best_obj = np.inf
    best: LpSolution | None = None
    nodes = 0
    seq = 0
    heap: list[tuple[float, int, np.ndarray]] = []
    heapq.heappush(heap, (-np.inf, seq, base.bounds.copy()))
    seeded = False

    while heap:
        est, _, bnds = heapq.heappop(heap)
        if est >= best_obj - OPTIMALITY_TOL * max(1.0, abs(best_obj)):
            continue
        if nodes >= node_limit:
            raise NodeLimitExceeded(
                f"node limit {node_limit} exceeded",
                incumbent=best,
                bound=min(est, best_obj),
            )
        nodes += 1
        sol = solve_lp(_with_bounds(base, bnds))
        if sol.status == "infeasible":
            continue
        if sol.status == "unbounded":
            return LpSolution("unbounded", None, None, nodes=nodes)
        val = sol.objective_value
        if val >= best_obj - OPTIMALITY_TOL * max(1.0, abs(best_obj)):
            continue
        frac = fractional(sol.point)
        if frac.size == 0:
            best_obj = val
            best = sol
            continue
        if not seeded:
            # Round-up heuristic: commit every fractionally-active binary.
            seeded = True
            hb = bnds.copy()
            for i in bidx:
                v = 1.0 if sol.point[i] > INTEGRALITY_TOL else 0.0
                hb[i] = (v, v)
            hsol = solve_lp(_with_bounds(base, hb))
            if hsol.status == "optimal" and fractional(hsol.point).size == 0:
                if hsol.objective_value < best_obj:
                    best_obj = hsol.objective_value
                    best = hsol
        var = int(frac[0])
        for v in (0.0, 1.0):  # down-branch first
            child = bnds.copy()
            child[var] = (v, v)
            seq += 1
            heapq.heappush(heap, (val, seq, child))

    if best is None:
        return LpSolution("infeasible", None, None, nodes=nodes)
    obj = -best_obj if flip else best_obj
    return LpSolution("optimal", obj, best.point, iterations=best.iterations,
                      nodes=nodes)
