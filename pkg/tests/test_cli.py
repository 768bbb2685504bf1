"""CLI behavior: schemes, reports, exit codes, determinism."""

import json
from importlib import resources

import numpy as np
import pytest

from ucscreen.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PROPERTY,
    EXIT_SCREENING_INFEASIBLE,
    SchemeConfig,
    main,
)
from ucscreen.predictors import Dataset, write_dataset_csv


def case_path(name: str) -> str:
    return str(resources.files("ucscreen") / "cases" / f"{name}.json")


def run_cli(*argv) -> int:
    return main(list(argv))


def read(path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_run_s3_equals_s2_sets(tmp_path):
    out3 = tmp_path / "s3.json"
    out2 = tmp_path / "s2.json"
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s3",
                   "--out", str(out3)) == EXIT_OK
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s2",
                   "--out", str(out2)) == EXIT_OK
    r3, r2 = read(out3), read(out2)
    assert set(r3["redundant_rows"]) == set(r2["redundant_rows"])
    assert r3["lp_count"] < r2["lp_count"]
    assert r3["gap"]["gap"] == 0.0


def test_run_report_shape_and_roundtrip(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("run", "--case", case_path("nine_bus"), "--scheme", "s3",
                   "--out", str(out)) == EXIT_OK
    doc = read(out)
    assert set(doc) == {"case", "scheme", "redundant_rows", "kept_rows",
                        "n_v", "lp_count", "r", "gap", "timings", "config"}
    assert doc["case"] == "nine_bus" and doc["scheme"] == "s3"
    assert doc["timings"] is None
    assert doc["r"] == len(doc["redundant_rows"]) / doc["lp_count"]
    n_candidates = len(doc["redundant_rows"]) + len(doc["kept_rows"])
    assert doc["lp_count"] == 4 * 3 + n_candidates - doc["n_v"]  # G = 3
    # serialize -> parse -> serialize is a fixed point
    assert json.dumps(doc, indent=2, sort_keys=True) + "\n" == out.read_text()


def test_s4_beta_zero_matches_s3(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s4",
                   "--beta", "0.0", "--out", str(a)) == EXIT_OK
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s3",
                   "--out", str(b)) == EXIT_OK
    assert set(read(a)["redundant_rows"]) == set(read(b)["redundant_rows"])


def test_s5_oracle_cost_superset_and_zero_gap(tmp_path):
    a = tmp_path / "s5.json"
    b = tmp_path / "s3.json"
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s5",
                   "--oracle-cost", "--epsilon", "0.005",
                   "--out", str(a)) == EXIT_OK
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s3",
                   "--out", str(b)) == EXIT_OK
    s5, s3 = read(a), read(b)
    assert set(s5["redundant_rows"]) >= set(s3["redundant_rows"])
    assert s5["gap"]["gap"] == 0.0


def test_byte_determinism_across_runs_and_jobs(tmp_path):
    outs = []
    for i, jobs in enumerate(("1", "1", "8")):
        out = tmp_path / f"r{i}.json"
        assert run_cli("run", "--case", case_path("thirty_bus"),
                       "--scheme", "s3", "--jobs", jobs,
                       "--out", str(out)) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_verify_corpus_passes(tmp_path):
    for name in ("five_bus", "nine_bus", "fourteen_bus"):
        out = tmp_path / f"{name}.json"
        assert run_cli("verify", "--case", case_path(name), "--scheme", "s3",
                       "--out", str(out)) == EXIT_OK
        doc = read(out)
        assert doc["passed"] is True
        assert [p["name"] for p in doc["properties"]] == [
            "matrix_test_exactness", "vgs_soundness", "ensemble_equivalence",
            "zero_gap"]


def test_verify_negative_control_names_property(tmp_path, capsys):
    out = tmp_path / "neg.json"
    code = run_cli("verify", "--case", case_path("negcontrol"),
                   "--scheme", "s3", "--drop-row", "line_upper(1)",
                   "--out", str(out))
    assert code == EXIT_PROPERTY
    doc = read(out)
    assert doc["passed"] is False
    assert doc["properties"][-1]["name"] == "zero_gap"
    assert "zero_gap" in capsys.readouterr().err


def test_verify_determinism(tmp_path):
    outs = []
    for i, jobs in enumerate(("1", "8")):
        out = tmp_path / f"v{i}.json"
        assert run_cli("verify", "--case", case_path("nine_bus"),
                       "--jobs", jobs, "--out", str(out)) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_missing_case_file_is_input_error(capsys):
    assert run_cli("run", "--case", "/nonexistent/case.json",
                   "--scheme", "s3") == EXIT_INPUT
    assert "not found" in capsys.readouterr().err


def test_infeasible_case_is_input_error(tmp_path, capsys):
    doc = json.loads((resources.files("ucscreen") / "cases"
                      / "five_bus.json").read_text())
    doc["nominal_load"] = [0.0, 0.0, 9.0, 9.0, 9.0]  # beyond total capacity
    path = tmp_path / "heavy.json"
    path.write_text(json.dumps(doc))
    assert run_cli("run", "--case", str(path), "--scheme", "s3") == EXIT_INPUT
    assert "infeasible" in capsys.readouterr().err


def test_scheme_prerequisites():
    with pytest.raises(Exception):
        SchemeConfig(case_path="x", scheme="s4")  # missing beta
    with pytest.raises(Exception):
        SchemeConfig(case_path="x", scheme="s5", epsilon=0.005)  # no source
    with pytest.raises(Exception):
        SchemeConfig(case_path="x", scheme="s6")  # no dataset
    with pytest.raises(Exception):
        SchemeConfig(case_path="x", scheme="s9")
    assert run_cli("run", "--case", case_path("five_bus"),
                   "--scheme", "s4") == EXIT_INPUT  # beta missing via CLI


def test_bad_cost_cut_dataset_gives_exit_3(tmp_path):
    # A dataset claiming near-zero costs drives the cut below any
    # attainable cost: the relaxed region empties out.
    loads = np.tile(np.array([[0.0, 0.0, 2.0, 2.0, 1.0]]), (5, 1))
    ds = Dataset(loads, np.full(5, 1e-3), np.ones((5, 2), dtype=int),
                 n_train=4)
    path = tmp_path / "bogus.csv"
    write_dataset_csv(ds, path)
    code = run_cli("run", "--case", case_path("five_bus"), "--scheme", "s5",
                   "--epsilon", "0.005", "--dataset", str(path))
    assert code == EXIT_SCREENING_INFEASIBLE


def test_gen_data_deterministic_and_flagged(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        assert run_cli("gen-data", "--case", case_path("nine_bus"),
                       "--beta", "0.5", "--n", "10", "--seed", "3",
                       "--out", str(out)) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    err = capsys.readouterr().err
    assert "per-bus independent uniform" in err
    assert "feasibility rate" in err


def test_gen_data_beta_zero_constant_columns(tmp_path):
    out = tmp_path / "c.csv"
    assert run_cli("gen-data", "--case", case_path("nine_bus"),
                   "--beta", "0.0", "--n", "6", "--seed", "1",
                   "--out", str(out)) == EXIT_OK
    rows = out.read_text().strip().splitlines()[1:]
    assert len(set(rows)) == 1


def test_gen_data_feasibility_rate_reported(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert run_cli("gen-data", "--case", case_path("nine_bus"),
                   "--beta", "0.5", "--n", "200", "--seed", "42",
                   "--out", str(out)) == EXIT_OK
    err = capsys.readouterr().err
    rate = float(err.split("feasibility rate ")[1].split(",")[0])
    assert rate >= 0.95


def test_s6_with_dataset_reports_gap(tmp_path):
    ds_path = tmp_path / "nine.csv"
    assert run_cli("gen-data", "--case", case_path("nine_bus"),
                   "--beta", "0.5", "--n", "40", "--seed", "21",
                   "--out", str(ds_path)) == EXIT_OK
    out = tmp_path / "s6.json"
    assert run_cli("run", "--case", case_path("nine_bus"), "--scheme", "s6",
                   "--dataset", str(ds_path), "--k", "5",
                   "--out", str(out)) == EXIT_OK
    doc = read(out)
    assert doc["gap"]["gap"] is not None  # measured, not asserted
    assert doc["config"]["dataset"] == str(ds_path)


def test_s7_combines_cuts(tmp_path):
    ds_path = tmp_path / "nine.csv"
    assert run_cli("gen-data", "--case", case_path("nine_bus"),
                   "--beta", "0.5", "--n", "40", "--seed", "21",
                   "--out", str(ds_path)) == EXIT_OK
    s7 = tmp_path / "s7.json"
    s3 = tmp_path / "s3.json"
    assert run_cli("run", "--case", case_path("nine_bus"), "--scheme", "s7",
                   "--dataset", str(ds_path), "--epsilon", "0.01",
                   "--oracle-cost", "--out", str(s7)) == EXIT_OK
    assert run_cli("run", "--case", case_path("nine_bus"), "--scheme", "s3",
                   "--out", str(s3)) == EXIT_OK
    assert set(read(s7)["redundant_rows"]) >= set(read(s3)["redundant_rows"])


def test_timings_flag_breaks_no_other_fields(tmp_path):
    out = tmp_path / "t.json"
    assert run_cli("run", "--case", case_path("five_bus"), "--scheme", "s3",
                   "--timings", "--out", str(out)) == EXIT_OK
    doc = read(out)
    assert isinstance(doc["timings"], dict)
    assert "total" in doc["timings"]
