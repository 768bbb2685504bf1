"""UC instance construction, cuts, and solve tests."""

import itertools

import numpy as np
import pytest

from conftest import brute_force_milp
from ucscreen.lp import FEASIBILITY_TOL, LpUsageError
from ucscreen.model import (
    CutSet,
    RowLabel,
    UcInfeasibleError,
    apply_cuts,
    build_uc,
    milp_problem,
    relax_binaries,
    solve_uc,
)
from ucscreen.screening import eovl


def test_row_counts_by_construction(cases):
    inst = build_uc(cases["five_bus"], cases["five_bus"].nominal_load)
    kinds = [lb.kind for lb in inst.row_labels]
    assert kinds.count("line_upper") == kinds.count("line_lower") == 6
    assert kinds.count("balance_le") == kinds.count("balance_ge") == 1
    gen_rows = sum(kinds.count(k) for k in
                   ("gen_upper", "gen_lower", "u_upper", "u_lower"))
    assert gen_rows == 8
    assert inst.rows.shape == (22, 4)
    assert inst.binary_indices == (2, 3)
    assert len(inst.candidates) == 12


def test_row_label_map_is_bijection(cases):
    inst = build_uc(cases["thirty_bus"], cases["thirty_bus"].nominal_load)
    assert len(set(inst.row_labels)) == inst.rows.shape[0]
    # removing by label then filtering by label produce the same matrix
    drop = {RowLabel("line_upper", 3), RowLabel("gen_lower", 1)}
    removed = inst.without_rows(drop)
    keep = [i for i, lb in enumerate(inst.row_labels) if lb not in drop]
    assert np.array_equal(removed.rows, inst.rows[keep])
    assert removed.row_labels == tuple(inst.row_labels[i] for i in keep)


def test_zero_load_all_off(cases):
    case = cases["five_bus"]
    sol = solve_uc(build_uc(case, np.zeros(case.n_buses)))
    assert sol.cost == 0.0
    assert sol.commitment == (0, 0)


def test_overload_is_capacity_infeasible(cases):
    case = cases["five_bus"]
    with pytest.raises(UcInfeasibleError) as err:
        solve_uc(build_uc(case, np.full(case.n_buses, 5.0)))
    assert err.value.aggregate == "capacity"


def test_network_infeasibility_diagnosed(cases):
    import json

    from ucscreen.case import case_to_json, parse_case

    doc = json.loads(case_to_json(cases["negcontrol"]))
    for line in doc["lines"]:
        line["f_max"] = 0.4
        line["f_min"] = -0.4
    case = parse_case(json.dumps(doc))
    # capacity (8) covers the load (3), but no line can deliver it
    with pytest.raises(UcInfeasibleError) as err:
        solve_uc(build_uc(case, case.nominal_load))
    assert err.value.aggregate == "network"


def test_wrong_load_length(cases):
    with pytest.raises(LpUsageError):
        build_uc(cases["five_bus"], [1.0, 2.0])


def test_relaxation_contains_every_binary_feasible_point(cases):
    case = cases["nine_bus"]
    rng = np.random.default_rng(23)
    inst = build_uc(case, case.nominal_load)
    relaxed = relax_binaries(inst)
    assert relaxed.binary_indices == ()
    assert np.array_equal(relaxed.rows, inst.rows)
    for _ in range(6):
        load = case.nominal_load * rng.uniform(0.6, 1.2, size=case.n_buses)
        inst2 = build_uc(case, load)
        try:
            sol = solve_uc(inst2)
        except UcInfeasibleError:
            continue
        point = np.concatenate([sol.dispatch, np.array(sol.commitment, float)])
        residual = relax_binaries(inst2).rows @ point - relax_binaries(inst2).rhs
        assert np.max(residual) <= FEASIBILITY_TOL


def test_relaxation_bound_and_fractional_gap(cases):
    from ucscreen.lp import solve_lp

    case = cases["five_bus"]
    inst = build_uc(case, case.nominal_load)
    prob = milp_problem(inst)
    milp = solve_uc(inst)
    lp = solve_lp(prob.lp)
    assert lp.objective_value <= milp.cost + 1e-9

    # A fractional status vector is relax-feasible but UC-infeasible.
    low = np.array([0.0, 0.0, 0.8, 0.8, 0.4])
    inst2 = build_uc(case, low)
    y = np.array([0.5, 1.5, 0.5, 0.5])  # x inside the 0.5-scaled gen bounds
    relaxed = relax_binaries(inst2)
    assert np.max(relaxed.rows @ y - relaxed.rhs) <= FEASIBILITY_TOL
    for u in itertools.product((0.0, 1.0), repeat=2):
        point = np.array([y[0], y[1], *u])
        violated = np.max(inst2.rows @ point - inst2.rhs) > FEASIBILITY_TOL
        assert violated  # x1 = 0.5 sits strictly inside (0, x_min)


def test_apply_cuts_empty_is_identity(cases):
    inst = build_uc(cases["five_bus"], cases["five_bus"].nominal_load)
    same = apply_cuts(inst, CutSet())
    assert same is inst


def test_huge_cost_bound_changes_nothing(cases):
    case = cases["nine_bus"]
    inst = relax_binaries(build_uc(case, case.nominal_load))
    plain = eovl(inst)
    cut = apply_cuts(inst, CutSet(cost_bound=1e9))
    with_cut = eovl(cut)
    assert set(plain.redundant) == set(with_cut.redundant)


def test_degenerate_load_range_equals_fixed_mode(cases):
    case = cases["five_bus"]
    inst = build_uc(case, case.nominal_load)
    plain = eovl(relax_binaries(inst))
    boxed = apply_cuts(inst, CutSet(load_range=(case.nominal_load,
                                                case.nominal_load)))
    ranged = eovl(relax_binaries(boxed))
    assert set(plain.redundant) == set(ranged.redundant)


def test_load_range_row_shapes(cases):
    case = cases["five_bus"]
    inst = build_uc(case, case.nominal_load)
    lo = 0.8 * case.nominal_load
    hi = 1.2 * case.nominal_load
    ranged = apply_cuts(inst, CutSet(load_range=(lo, hi)))
    assert ranged.range_mode
    assert ranged.n_cols == 2 * case.n_gens + case.n_buses
    kinds = [lb.kind for lb in ranged.row_labels]
    assert kinds.count("load_upper") == kinds.count("load_lower") == case.n_buses
    # load range must come first
    with pytest.raises(LpUsageError):
        apply_cuts(apply_cuts(inst, CutSet(cost_bound=100.0)),
                   CutSet(load_range=(lo, hi)))


def test_commit_fix_rows_pin_status(cases):
    case = cases["five_bus"]
    inst = build_uc(case, case.nominal_load)
    best = solve_uc(inst)
    pinned = apply_cuts(inst, CutSet(
        commitment_fixes=tuple(enumerate(best.commitment))))
    again = solve_uc(pinned)
    assert abs(again.cost - best.cost) <= 1e-9
    assert again.commitment == best.commitment
    with pytest.raises(LpUsageError):
        apply_cuts(inst, CutSet(commitment_fixes=((7, 1),)))
    with pytest.raises(LpUsageError):
        CutSet(commitment_fixes=((0, 1), (0, 0)))


def test_solve_uc_matches_pattern_enumeration(cases):
    case = cases["five_bus"]
    inst = build_uc(case, case.nominal_load)
    prob = milp_problem(inst)
    status, best = brute_force_milp(
        prob.lp.objective, prob.lp.rows, prob.lp.rhs,
        [tuple(p) for p in prob.lp.bounds], prob.binary_indices)
    sol = solve_uc(inst)
    assert status == "optimal"
    assert abs(sol.cost - best) <= 1e-9
    assert sol.commitment == (1, 1)
    # per-unit dispatch obeys the status-scaled bounds
    for g, gen in enumerate(case.generators):
        u = sol.commitment[g]
        assert u * gen.x_min - 1e-9 <= sol.dispatch[g] <= u * gen.x_max + 1e-9


def test_equal_costs_assert_objective_not_point(cases):
    import json

    from ucscreen.case import case_to_json, parse_case

    doc = json.loads(case_to_json(cases["five_bus"]))
    for g in doc["generators"]:
        g["cost"] = 9.0
    case = parse_case(json.dumps(doc))
    inst = build_uc(case, case.nominal_load)
    prob = milp_problem(inst)
    _, best = brute_force_milp(
        prob.lp.objective, prob.lp.rows, prob.lp.rhs,
        [tuple(p) for p in prob.lp.bounds], prob.binary_indices)
    sol = solve_uc(inst)
    assert abs(sol.cost - best) <= 1e-9  # ties: objective only


def test_cost_cut_above_optimum_preserves_solution(cases):
    case = cases["nine_bus"]
    inst = build_uc(case, case.nominal_load)
    best = solve_uc(inst)
    for factor in (1.0, 1.005, 1.5):
        cut = apply_cuts(inst, CutSet(cost_bound=best.cost * factor))
        sol = solve_uc(cut)
        assert abs(sol.cost - best.cost) <= 1e-6 * max(1.0, best.cost)


def test_containment_chain_by_rejection_sampling(cases):
    # R_uc subset of R_relaxed subset of cut-free region, via random points.
    case = cases["five_bus"]
    inst = build_uc(case, case.nominal_load)
    relaxed = relax_binaries(inst)
    cut = apply_cuts(inst, CutSet(cost_bound=60.0))
    rng = np.random.default_rng(29)
    hits = 0
    total = float(np.sum(case.nominal_load))
    for _ in range(4000):
        x1 = rng.uniform(0, 3.2)
        y = np.concatenate([[x1, total - x1],  # on the balance manifold
                            rng.integers(0, 2, size=2).astype(float)])
        if np.max(inst.rows @ y - inst.rhs) <= 1e-12:
            hits += 1
            assert np.max(relaxed.rows @ y - relaxed.rhs) <= 1e-12
            feasible_for_cut = np.max(cut.rows @ y - cut.rhs) <= 1e-12
            assert feasible_for_cut == (float(inst.cost @ y) <= 60.0 + 1e-12)
    assert hits > 20


def test_solve_uc_requires_binaries_or_fixes(cases):
    case = cases["five_bus"]
    relaxed = relax_binaries(build_uc(case, case.nominal_load))
    with pytest.raises(LpUsageError):
        solve_uc(relaxed)
    pinned = apply_cuts(relaxed, CutSet(commitment_fixes=((0, 1), (1, 1))))
    sol = solve_uc(pinned)
    assert sol.commitment == (1, 1)


def test_row_label_parse_roundtrip():
    for lb in (RowLabel("line_upper", 3), RowLabel("balance_le"),
               RowLabel("commit_fix_ge", 11)):
        assert RowLabel.parse(str(lb)) == lb
