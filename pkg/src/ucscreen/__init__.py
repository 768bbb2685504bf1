"""Unit-commitment constraint screening toolkit.

Builds single-period DC unit-commitment models from JSON grid cases,
eliminates redundant line-limit rows via vertex-guided and line-flow-guided
LP screening (and their ensemble), and verifies every removal against
brute-force oracles.  See the demos/ directory for worked examples and
the `ucscreen` CLI for batch runs.
"""

from ucscreen.case import (
    CaseFormatError,
    CaseValidationError,
    GridCase,
    PtdfMatrix,
    bundled_case_names,
    case_to_json,
    compute_ptdf,
    load_bundled_case,
    parse_case,
    parse_case_file,
)
from ucscreen.lp import (
    FEASIBILITY_TOL,
    INTEGRALITY_TOL,
    OPTIMALITY_TOL,
    LpProblem,
    LpSolution,
    LpUsageError,
    MilpProblem,
    NodeLimitExceeded,
    solve_lp,
    solve_milp,
)
from ucscreen.model import (
    CutSet,
    RowLabel,
    UcInfeasibleError,
    UcInstance,
    UcSolution,
    apply_cuts,
    build_uc,
    relax_binaries,
    solve_uc,
)
from ucscreen.oracle import (
    GapReport,
    VertexBudgetError,
    enumerate_vertices,
    lp_redundancy,
    verify_zero_gap,
    vertex_check,
)
from ucscreen.predictors import (
    Dataset,
    PredictorConfig,
    commitment_fixes,
    cost_bound,
    default_k,
    generate_dataset,
    oracle_cost_bound,
    read_dataset_csv,
    write_dataset_csv,
)
from ucscreen.screening import (
    BoundsBox,
    ScreeningInfeasibleError,
    ScreeningReport,
    eovl,
    lfgs_screen,
    reduce_model,
    variable_bounds,
    vgs_screen,
)

__all__ = [
    "BoundsBox",
    "CaseFormatError",
    "CaseValidationError",
    "CutSet",
    "Dataset",
    "FEASIBILITY_TOL",
    "GapReport",
    "GridCase",
    "INTEGRALITY_TOL",
    "LpProblem",
    "LpSolution",
    "LpUsageError",
    "MilpProblem",
    "NodeLimitExceeded",
    "OPTIMALITY_TOL",
    "PredictorConfig",
    "PtdfMatrix",
    "RowLabel",
    "ScreeningInfeasibleError",
    "ScreeningReport",
    "UcInfeasibleError",
    "UcInstance",
    "UcSolution",
    "VertexBudgetError",
    "apply_cuts",
    "build_uc",
    "bundled_case_names",
    "case_to_json",
    "commitment_fixes",
    "compute_ptdf",
    "cost_bound",
    "default_k",
    "enumerate_vertices",
    "eovl",
    "generate_dataset",
    "lfgs_screen",
    "load_bundled_case",
    "lp_redundancy",
    "oracle_cost_bound",
    "parse_case",
    "parse_case_file",
    "read_dataset_csv",
    "reduce_model",
    "relax_binaries",
    "solve_lp",
    "solve_milp",
    "solve_uc",
    "variable_bounds",
    "verify_zero_gap",
    "vertex_check",
    "vgs_screen",
    "write_dataset_csv",
]
