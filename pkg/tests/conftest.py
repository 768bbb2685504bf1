"""Shared fixtures: bundled cases, cached UC solves, small oracles."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from ucscreen.case import load_bundled_case
from ucscreen.model import UcInfeasibleError, build_uc, solve_uc

CORPUS = ("five_bus", "nine_bus", "fourteen_bus", "thirty_bus", "fifty_bus")


@pytest.fixture(scope="session")
def cases():
    return {name: load_bundled_case(name) for name in CORPUS + ("negcontrol",)}


@pytest.fixture(scope="session")
def uc_cache():
    """Memoized UC solves keyed by (case name, load bytes); acceptance
    criteria reuse many full-model solves."""
    cache: dict = {}

    def solve(case, load, name=None):
        key = (name or case.name, np.asarray(load, dtype=float).tobytes())
        if key not in cache:
            try:
                cache[key] = ("optimal", solve_uc(build_uc(case, load)))
            except UcInfeasibleError:
                cache[key] = ("infeasible", None)
        return cache[key]

    return solve


def enumerate_polygon_vertices(rows: np.ndarray, rhs: np.ndarray,
                               tol: float = 1e-9) -> np.ndarray:
    """All vertices of a 2-D polyhedron {rows @ x <= rhs} by pairwise
    hyperplane intersection plus feasibility filtering.  Test-side oracle,
    independent of any solver."""
    m = rows.shape[0]
    points = []
    for i, j in itertools.combinations(range(m), 2):
        A = rows[[i, j]]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        p = np.linalg.solve(A, rhs[[i, j]])
        if np.all(rows @ p <= rhs + tol):
            points.append(p)
    assert points, "polygon has no vertices"
    return np.array(points)


def brute_force_milp(c, A, b, bounds, binary_indices):
    """Reference MILP: enumerate binary patterns, solve each restriction."""
    from ucscreen.lp import LpProblem, solve_lp

    best = None
    any_feasible = False
    for pattern in itertools.product((0.0, 1.0), repeat=len(binary_indices)):
        bb = [list(pair) for pair in bounds]
        for i, v in zip(binary_indices, pattern):
            bb[i] = [v, v]
        sol = solve_lp(LpProblem(c, A, b, bounds=bb))
        if sol.status == "unbounded":
            return "unbounded", None
        if sol.status == "optimal":
            any_feasible = True
            if best is None or sol.objective_value < best:
                best = sol.objective_value
    if not any_feasible:
        return "infeasible", None
    return "optimal", best
