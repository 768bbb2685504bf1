"""Redundant line-limit screening engines.

Three engines over the binary-relaxed instance:

* vertex-guided: solve two LPs per decision variable to get a bounding
  box, then classify every candidate row at once with the sign-split
  box-maximum test (zero LPs per row);
* line-flow-guided: one LP per candidate row, maximizing the row with
  the row itself excluded;
* the ensemble: vertex-guided first, line-flow-guided on the undecided
  remainder, matching the line-flow-guided result at a fraction of the
  LP count.

A row is only ever removed on a strict margin (FEASIBILITY_TOL); ties
are kept.  Keeping a redundant row is safe, removing a binding one is not.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ucscreen.lp import FEASIBILITY_TOL, LpUsageError, solve_lp
from ucscreen.model import RowLabel, UcInstance


class ScreeningInfeasibleError(RuntimeError):
    """The relaxed region is empty (typically a cost cut below any
    attainable cost); no screening verdict is possible."""


@dataclass(eq=False)
class BoundsBox:
    """Per-column bounds of the relaxed region, with provenance."""

    lower: np.ndarray
    upper: np.ndarray
    provenance: tuple[str, ...]  # lp_solved | load_box | fixed_by_cut
    lp_count: int = 0

    def __post_init__(self):
        if np.any(self.lower > self.upper):
            raise ScreeningInfeasibleError(
                "bounds box is empty (lower above upper)")

    @property
    def n_cols(self) -> int:
        return self.lower.size


@dataclass(eq=False)
class ScreeningReport:
    """Verdict over the candidate set, with LP accounting."""

    candidates: tuple[RowLabel, ...]
    redundant: tuple[RowLabel, ...]
    kept: tuple[RowLabel, ...]
    lp_count: int = 0
    matrix_op_count: int = 0
    wall_times: dict[str, float] = field(default_factory=dict)
    attribution: dict[RowLabel, str] = field(default_factory=dict)
    omega: dict[RowLabel, float] = field(default_factory=dict)
    diagnostics: tuple[str, ...] = ()

    def check_partition(self) -> None:
        red, kept = set(self.redundant), set(self.kept)
        if red & kept or red | kept != set(self.candidates):
            raise AssertionError("redundant/kept do not partition the candidates")


def _solve_many(problems, jobs: int):
    """Solve LPs, optionally on a thread pool; result order is by input
    position, so reports do not depend on the schedule."""
    if jobs <= 1 or len(problems) <= 1:
        return [solve_lp(p) for p in problems]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(solve_lp, problems))


def variable_bounds(inst: UcInstance, jobs: int = 1) -> BoundsBox:
    """Tight per-variable bounds over the relaxed region.

    Dispatch and status columns each cost two LPs (max and min); load
    columns take their bounds from the load box without solving, and
    status columns pinned by a commitment fix are read off the cut.
    """
    if inst.binary_indices:
        raise LpUsageError("variable bounds expect a binary-relaxed instance")
    G = inst.n_gens
    n = inst.n_cols
    lower = np.empty(n)
    upper = np.empty(n)
    provenance: list[str] = []

    fixed = dict(inst.cuts.commitment_fixes)
    lp_cols = []
    for p in range(n):
        if p >= 2 * G:
            lo, hi = inst.cuts.load_range
            lower[p], upper[p] = lo[p - 2 * G], hi[p - 2 * G]
            provenance.append("load_box")
        elif G <= p < 2 * G and (p - G) in fixed:
            lower[p] = upper[p] = float(fixed[p - G])
            provenance.append("fixed_by_cut")
        else:
            lp_cols.append(p)
            provenance.append("lp_solved")

    problems = []
    for p in lp_cols:
        obj = np.zeros(n)
        obj[p] = 1.0
        problems.append(inst.lp(obj, sense="max"))
        problems.append(inst.lp(obj, sense="min"))
    solutions = _solve_many(problems, jobs)
    for k, p in enumerate(lp_cols):
        for off, side in ((0, "max"), (1, "min")):
            sol = solutions[2 * k + off]
            if sol.status == "infeasible":
                raise ScreeningInfeasibleError(
                    "relaxed region is empty; bound LP infeasible "
                    f"for column {p} (bad cost cut?)")
            if sol.status == "unbounded":
                value = np.inf if side == "max" else -np.inf
            else:
                value = sol.objective_value
            if side == "max":
                upper[p] = value
            else:
                lower[p] = value
    return BoundsBox(lower, upper, tuple(provenance), lp_count=2 * len(lp_cols))


def box_row_maximum(rows: np.ndarray, box: BoundsBox) -> np.ndarray:
    """Exact maximum of each row over the box: positive coefficients take
    the upper bound, negative the lower (the unit-step sign split)."""
    pos = rows > 0
    neg = rows < 0
    out = np.zeros(rows.shape[0])
    # Split sums keep 0 * inf out of the arithmetic.
    out += np.sum(np.where(pos, rows * np.where(pos, box.upper, 0.0), 0.0), axis=1)
    out += np.sum(np.where(neg, rows * np.where(neg, box.lower, 0.0), 0.0), axis=1)
    return out


def vgs_screen(inst: UcInstance, box: BoundsBox,
               candidates: tuple[RowLabel, ...] | None = None) -> ScreeningReport:
    """Vertex-guided pass: one matrix operation, zero LPs.

    omega_j is the box maximum of row j minus its bound; omega_j below
    the strict margin certifies redundancy, anything else stays undecided.
    """
    if box.n_cols != inst.n_cols:
        raise LpUsageError("bounds box does not match instance columns")
    if candidates is None:
        candidates = inst.candidates
    t0 = time.perf_counter()
    idx = np.array([inst.row_index(lb) for lb in candidates], dtype=int)
    rows = inst.rows[idx]
    omega = box_row_maximum(rows, box) - inst.rhs[idx]
    redundant = tuple(lb for lb, w in zip(candidates, omega)
                      if w < -FEASIBILITY_TOL)
    report = ScreeningReport(
        candidates=tuple(candidates),
        redundant=redundant,
        kept=(),
        lp_count=0,
        matrix_op_count=1,
        wall_times={"vgs": time.perf_counter() - t0},
        attribution={lb: "vgs" for lb in redundant},
        omega={lb: float(w) for lb, w in zip(candidates, omega)},
    )
    return report


def lfgs_screen(inst: UcInstance, candidates: tuple[RowLabel, ...] | None = None,
                jobs: int = 1) -> ScreeningReport:
    """Line-flow-guided pass: per candidate, maximize the row with the row
    itself excluded and compare against its bound with the strict margin."""
    if candidates is None:
        candidates = inst.candidates
    for lb in candidates:
        if not lb.is_line:
            raise LpUsageError(f"screening candidate {lb} is not a line row")
    t0 = time.perf_counter()
    problems = []
    for lb in candidates:
        coeffs, _ = inst.row(lb)
        problems.append(inst.lp(coeffs, sense="max", skip_label=lb))
    solutions = _solve_many(problems, jobs)
    redundant, kept, diagnostics = [], [], []
    for lb, sol in zip(candidates, solutions):
        _, bound = inst.row(lb)
        if sol.status == "unbounded":
            kept.append(lb)
            diagnostics.append(f"{lb}: screening LP unbounded, kept uncertified")
            continue
        if sol.status == "infeasible":
            raise ScreeningInfeasibleError(
                f"screening LP for {lb} infeasible; relaxed region is empty")
        if sol.objective_value <= bound - FEASIBILITY_TOL:
            redundant.append(lb)
        else:
            kept.append(lb)
    return ScreeningReport(
        candidates=tuple(candidates),
        redundant=tuple(redundant),
        kept=tuple(kept),
        lp_count=len(candidates),
        matrix_op_count=0,
        wall_times={"lfgs": time.perf_counter() - t0},
        attribution={lb: "lfgs" for lb in redundant},
        diagnostics=tuple(diagnostics),
    )


def eovl(inst: UcInstance, *, use_vgs: bool = True, use_lfgs: bool = True,
         jobs: int = 1) -> ScreeningReport:
    """Ensemble: variable bounds, vertex-guided pass, then the line-flow
    pass on whatever the matrix test left undecided.

    Either phase can be switched off: vgs-only realizes scheme S1
    (undecided rows are conservatively kept), lfgs-only realizes S2.
    """
    if inst.binary_indices:
        raise LpUsageError("screening expects a binary-relaxed instance")
    candidates = inst.candidates
    wall_times: dict[str, float] = {}
    lp_count = 0
    matrix_ops = 0
    attribution: dict[RowLabel, str] = {}
    omega: dict[RowLabel, float] = {}
    diagnostics: tuple[str, ...] = ()
    vgs_redundant: tuple[RowLabel, ...] = ()

    if use_vgs:
        t0 = time.perf_counter()
        box = variable_bounds(inst, jobs=jobs)
        wall_times["bounds"] = time.perf_counter() - t0
        lp_count += box.lp_count
        part = vgs_screen(inst, box)
        wall_times.update(part.wall_times)
        matrix_ops += part.matrix_op_count
        attribution.update(part.attribution)
        omega = part.omega
        vgs_redundant = part.redundant

    undecided = tuple(lb for lb in candidates if lb not in set(vgs_redundant))
    lfgs_redundant: tuple[RowLabel, ...] = ()
    if use_lfgs and undecided:
        part = lfgs_screen(inst, undecided, jobs=jobs)
        wall_times.update(part.wall_times)
        lp_count += part.lp_count
        attribution.update(part.attribution)
        diagnostics = part.diagnostics
        lfgs_redundant = part.redundant

    redundant = set(vgs_redundant) | set(lfgs_redundant)
    report = ScreeningReport(
        candidates=candidates,
        redundant=tuple(lb for lb in candidates if lb in redundant),
        kept=tuple(lb for lb in candidates if lb not in redundant),
        lp_count=lp_count,
        matrix_op_count=matrix_ops,
        wall_times=wall_times,
        attribution=attribution,
        omega=omega,
        diagnostics=diagnostics,
    )
    report.check_partition()
    return report


def reduce_model(full: UcInstance, redundant) -> UcInstance:
    """Delete certified-redundant line rows; all other labels survive."""
    redundant = tuple(redundant)
    for lb in redundant:
        if not lb.is_line:
            raise LpUsageError(f"refusing to delete non-line row {lb}")
        full.row_index(lb)  # raises for unknown labels
    return full.without_rows(redundant)
