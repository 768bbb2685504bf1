"""Single-period DC unit-commitment models in compact inequality form.

The decision vector is y = [x, u] (dispatch MW, unit status) or
y = [x, u, l] in load-range mode.  Every model coefficient lives in one
labeled row of `rows @ y <= rhs`, including the power balance, which is
encoded as a <=/>= pair so the whole model is a single inequality system.
Only the line-limit rows are ever screening candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ucscreen.case import GridCase, PtdfMatrix, compute_ptdf
from ucscreen.lp import (
    LpProblem,
    LpUsageError,
    MilpProblem,
    solve_lp,
    solve_milp,
)

LINE_ROW_KINDS = ("line_upper", "line_lower")


class UcInfeasibleError(RuntimeError):
    """The UC model has no feasible commitment; names the tightest aggregate."""

    def __init__(self, message: str, aggregate: str):
        super().__init__(message)
        self.aggregate = aggregate  # "capacity" or "network"


@dataclass(frozen=True, order=True)
class RowLabel:
    """Stable identity of a model row, e.g. line_upper(3) or balance_le."""

    kind: str
    index: int | None = None

    def __str__(self) -> str:
        return self.kind if self.index is None else f"{self.kind}({self.index})"

    @classmethod
    def parse(cls, text: str) -> "RowLabel":
        text = text.strip()
        if text.endswith(")") and "(" in text:
            kind, _, rest = text.partition("(")
            return cls(kind, int(rest[:-1]))
        return cls(text)

    @property
    def is_line(self) -> bool:
        return self.kind in LINE_ROW_KINDS


@dataclass(frozen=True, eq=False)
class CutSet:
    """Optional tightenings: cost bound, unit-status fixes, load range."""

    cost_bound: float | None = None
    commitment_fixes: tuple[tuple[int, int], ...] = ()
    load_range: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        units = [k for k, _ in self.commitment_fixes]
        if len(set(units)) != len(units):
            raise LpUsageError("commitment fixes name a unit twice")
        for k, v in self.commitment_fixes:
            if v not in (0, 1):
                raise LpUsageError(f"commitment fix for unit {k} must be 0 or 1")
        if self.load_range is not None:
            lo, hi = (np.asarray(a, dtype=float) for a in self.load_range)
            if lo.shape != hi.shape:
                raise LpUsageError("load range bounds differ in length")
            if np.any(lo > hi) or np.any(lo < 0):
                raise LpUsageError("load range needs 0 <= lo <= hi componentwise")
            object.__setattr__(self, "load_range", (lo, hi))

    @property
    def is_empty(self) -> bool:
        return (self.cost_bound is None and not self.commitment_fixes
                and self.load_range is None)


@dataclass(frozen=True, eq=False)
class UcInstance:
    """Compact system rows @ y <= rhs with cost vector and row labels."""

    rows: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray
    row_labels: tuple[RowLabel, ...]
    binary_indices: tuple[int, ...]
    case: GridCase
    ptdf: PtdfMatrix
    load: np.ndarray | None  # fixed load; None in range mode
    cuts: CutSet = field(default_factory=CutSet)

    def __post_init__(self):
        if len(self.row_labels) != self.rows.shape[0]:
            raise LpUsageError("one label per row required")
        if len(set(self.row_labels)) != len(self.row_labels):
            raise LpUsageError("row labels must be unique")
        self.rows.flags.writeable = False
        self.rhs.flags.writeable = False
        self.cost.flags.writeable = False

    @property
    def n_gens(self) -> int:
        return self.case.n_gens

    @property
    def n_cols(self) -> int:
        return self.rows.shape[1]

    @property
    def range_mode(self) -> bool:
        return self.load is None

    def x_col(self, g: int) -> int:
        return g

    def u_col(self, g: int) -> int:
        return self.n_gens + g

    def load_col(self, n: int) -> int:
        return 2 * self.n_gens + n

    @property
    def candidates(self) -> tuple[RowLabel, ...]:
        """Screening candidate set: the line-limit rows, in row order."""
        return tuple(lb for lb in self.row_labels if lb.is_line)

    def row_index(self, label: RowLabel) -> int:
        try:
            return self.row_labels.index(label)
        except ValueError:
            raise LpUsageError(f"no row labeled {label}") from None

    def row(self, label: RowLabel) -> tuple[np.ndarray, float]:
        i = self.row_index(label)
        return self.rows[i], float(self.rhs[i])

    def lp(self, objective: np.ndarray, sense: str = "min",
           skip_label: RowLabel | None = None) -> LpProblem:
        """LP over this instance's rows, optionally with one row excluded."""
        rows, rhs = self.rows, self.rhs
        if skip_label is not None:
            i = self.row_index(skip_label)
            keep = np.arange(rows.shape[0]) != i
            rows, rhs = rows[keep], rhs[keep]
        return LpProblem(objective, rows, rhs, sense=sense)

    def without_rows(self, labels) -> "UcInstance":
        labels = set(labels)
        keep = [i for i, lb in enumerate(self.row_labels) if lb not in labels]
        return replace(
            self,
            rows=self.rows[keep].copy(),
            rhs=self.rhs[keep].copy(),
            row_labels=tuple(self.row_labels[i] for i in keep),
        )


def _core_rows(case: GridCase, ptdf: PtdfMatrix, load: np.ndarray | None):
    """Line/balance/generator/status rows; load fixed or as columns."""
    G, L, N = case.n_gens, case.n_lines, case.n_buses
    range_mode = load is None
    ncols = 2 * G + (N if range_mode else 0)
    PB = ptdf.entries @ case.gen_bus_matrix()  # (L, G)
    fmax = np.array([ln.f_max for ln in case.lines])
    fmin = np.array([ln.f_min for ln in case.lines])
    xmax = np.array([g.x_max for g in case.generators])
    xmin = np.array([g.x_min for g in case.generators])

    rows, rhs, labels = [], [], []

    def add(label: RowLabel, coeffs: np.ndarray, bound: float) -> None:
        rows.append(coeffs)
        rhs.append(bound)
        labels.append(label)

    pl = None if range_mode else ptdf.entries @ load
    for j in range(L):
        r = np.zeros(ncols)
        r[:G] = PB[j]
        if range_mode:
            r[2 * G:] = -ptdf.entries[j]
            add(RowLabel("line_upper", j), r, fmax[j])
        else:
            add(RowLabel("line_upper", j), r, fmax[j] + pl[j])
    for j in range(L):
        r = np.zeros(ncols)
        r[:G] = -PB[j]
        if range_mode:
            r[2 * G:] = ptdf.entries[j]
            add(RowLabel("line_lower", j), r, -fmin[j])
        else:
            add(RowLabel("line_lower", j), r, -fmin[j] - pl[j])

    r = np.zeros(ncols)
    r[:G] = 1.0
    if range_mode:
        r[2 * G:] = -1.0
        add(RowLabel("balance_le"), r, 0.0)
        add(RowLabel("balance_ge"), -r, 0.0)
    else:
        total = float(np.sum(load))
        add(RowLabel("balance_le"), r, total)
        add(RowLabel("balance_ge"), -r, -total)

    for g in range(G):
        r = np.zeros(ncols)
        r[g] = 1.0
        r[G + g] = -xmax[g]
        add(RowLabel("gen_upper", g), r, 0.0)
    for g in range(G):
        r = np.zeros(ncols)
        r[g] = -1.0
        r[G + g] = xmin[g]
        add(RowLabel("gen_lower", g), r, 0.0)
    for g in range(G):
        r = np.zeros(ncols)
        r[G + g] = 1.0
        add(RowLabel("u_upper", g), r, 1.0)
    for g in range(G):
        r = np.zeros(ncols)
        r[G + g] = -1.0
        add(RowLabel("u_lower", g), r, 0.0)

    return np.array(rows), np.array(rhs, dtype=float), labels, ncols


def build_uc(case: GridCase, load) -> UcInstance:
    """UC model at a fixed load: line limits via PTDF, balance pair,
    status-scaled generation bounds, and the u box, with u marked binary."""
    load = np.asarray(load, dtype=float).ravel()
    if load.size != case.n_buses:
        raise LpUsageError(
            f"load has {load.size} entries for {case.n_buses} buses")
    ptdf = compute_ptdf(case)
    rows, rhs, labels, ncols = _core_rows(case, ptdf, load)
    G = case.n_gens
    cost = np.zeros(ncols)
    cost[:G] = [g.cost for g in case.generators]
    load = load.copy()
    load.flags.writeable = False
    return UcInstance(rows, rhs, cost, tuple(labels),
                      tuple(range(G, 2 * G)), case, ptdf, load)


def relax_binaries(inst: UcInstance) -> UcInstance:
    """Binary relaxation u in [0,1]: identical rows, binary marks cleared."""
    return replace(inst, binary_indices=())


def apply_cuts(inst: UcInstance, cuts: CutSet) -> UcInstance:
    """Append cut rows; load_range additionally converts l into columns.

    Returns a new instance.  A load range can only be applied to an
    uncut fixed-load instance (the rows are rebuilt around the l columns).
    """
    if cuts.is_empty:
        return inst
    case, ptdf = inst.case, inst.ptdf
    G = inst.n_gens

    if cuts.load_range is not None:
        if not inst.cuts.is_empty:
            raise LpUsageError("apply the load range before any other cut")
        if inst.range_mode:
            raise LpUsageError("instance is already in load-range mode")
        lo, hi = cuts.load_range
        if lo.size != case.n_buses:
            raise LpUsageError(
                f"load range has {lo.size} entries for {case.n_buses} buses")
        rows, rhs, labels, ncols = _core_rows(case, ptdf, None)
        extra_rows, extra_rhs = [], []
        for n in range(case.n_buses):
            r = np.zeros(ncols)
            r[2 * G + n] = 1.0
            extra_rows.append(r)
            extra_rhs.append(hi[n])
            labels.append(RowLabel("load_upper", n))
            extra_rows.append(-r)
            extra_rhs.append(-lo[n])
            labels.append(RowLabel("load_lower", n))
        rows = np.vstack([rows, extra_rows])
        rhs = np.concatenate([rhs, extra_rhs])
        cost = np.zeros(ncols)
        cost[:G] = inst.cost[:G]
        binary = inst.binary_indices  # positions of u are unchanged
        out = UcInstance(rows, rhs, cost, tuple(labels), binary,
                         case, ptdf, None, CutSet(load_range=cuts.load_range))
        rest = CutSet(cost_bound=cuts.cost_bound,
                      commitment_fixes=cuts.commitment_fixes)
        return apply_cuts(out, rest) if not rest.is_empty else out

    rows = [inst.rows]
    rhs = list(inst.rhs)
    labels = list(inst.row_labels)
    ncols = inst.n_cols

    if cuts.cost_bound is not None:
        r = np.zeros(ncols)
        r[:G] = inst.cost[:G]
        rows.append(r[None, :])
        rhs.append(float(cuts.cost_bound))
        labels.append(RowLabel("cost_cut"))

    for k, v in cuts.commitment_fixes:
        if not 0 <= k < G:
            raise LpUsageError(f"commitment fix names unit {k}, have {G} units")
        r = np.zeros(ncols)
        r[G + k] = 1.0
        rows.append(r[None, :])
        rhs.append(float(v))
        labels.append(RowLabel("commit_fix_le", k))
        rows.append(-r[None, :])
        rhs.append(-float(v))
        labels.append(RowLabel("commit_fix_ge", k))

    merged = CutSet(
        cost_bound=cuts.cost_bound if cuts.cost_bound is not None
        else inst.cuts.cost_bound,
        commitment_fixes=inst.cuts.commitment_fixes + cuts.commitment_fixes,
        load_range=inst.cuts.load_range,
    )
    return replace(
        inst,
        rows=np.vstack(rows),
        rhs=np.array(rhs, dtype=float),
        row_labels=tuple(labels),
        cuts=merged,
    )


@dataclass(frozen=True, eq=False)
class UcSolution:
    commitment: tuple[int, ...]
    dispatch: np.ndarray  # MW
    cost: float


def milp_problem(inst: UcInstance) -> MilpProblem:
    """MILP form of the instance; binaries get explicit [0,1] solver bounds."""
    bounds = np.tile([-np.inf, np.inf], (inst.n_cols, 1))
    for i in inst.binary_indices:
        bounds[i] = (0.0, 1.0)
    lp = LpProblem(inst.cost, inst.rows, inst.rhs, bounds=bounds)
    return MilpProblem(lp, inst.binary_indices)


def solve_uc(inst: UcInstance) -> UcSolution:
    """Solve the instance as a MILP; raises UcInfeasibleError when empty."""
    G = inst.n_gens
    fixed = {k for k, _ in inst.cuts.commitment_fixes}
    if not inst.binary_indices and len(fixed) < G:
        raise LpUsageError(
            "instance has relaxed statuses that are not fixed by cuts; "
            "solve the unrelaxed instance instead")
    if inst.binary_indices:
        sol = solve_milp(milp_problem(inst))
    else:
        bounds = np.tile([-np.inf, np.inf], (inst.n_cols, 1))
        sol = solve_lp(LpProblem(inst.cost, inst.rows, inst.rhs, bounds=bounds))
    if sol.status != "optimal":
        aggregate = "network"
        if inst.load is not None:
            capacity = sum(g.x_max for g in inst.case.generators)
            if float(np.sum(inst.load)) > capacity:
                aggregate = "capacity"
        raise UcInfeasibleError(
            f"UC model is {sol.status}; tightest violated aggregate: {aggregate}",
            aggregate,
        )
    point = sol.point
    dispatch = point[:G].copy()
    commitment = tuple(int(round(point[G + g])) for g in range(G))
    return UcSolution(commitment, dispatch, float(sol.objective_value))
