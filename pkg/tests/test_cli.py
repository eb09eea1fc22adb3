import json

import pytest

from buymanylab.cli import (
    EXIT_CAPACITY,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_USAGE,
    EXIT_VALIDATION,
    main,
)
from buymanylab.errors import SolverError
from buymanylab.io import save_instance


@pytest.fixture
def counterexample_path(tmp_path):
    path = tmp_path / "counterexample.json"
    code = main(["gen", "counterexample", "--n", "4", "--eps", "0.5", "--delta", "1", "--out", str(path)])
    assert code == EXIT_OK
    return path


@pytest.fixture
def bad_bundle_path(tmp_path, bad_bundle_instance):
    path = tmp_path / "bad_bundle.json"
    save_instance(bad_bundle_instance, path)
    return path


def test_counterexample_revenue(counterexample_path, capsys):
    capsys.readouterr()
    assert main(["revenue", "--instance", str(counterexample_path)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "4.0"


def test_semantics_override(bad_bundle_path, capsys):
    assert main(["revenue", "--instance", str(bad_bundle_path), "--semantics", "buyone"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "3.0"
    assert main(["revenue", "--instance", str(bad_bundle_path)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "2.0"


def test_verify_reports_violation(bad_bundle_path, capsys):
    assert main(["verify", "--instance", str(bad_bundle_path)]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["holds"] is False
    assert result["witness"] is not None
    assert result["policies_enumerated"] > 0


def test_bestresponse(bad_bundle_path, capsys):
    assert main(["bestresponse", "--instance", str(bad_bundle_path)]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["utility"] == pytest.approx(18.0)
    assert result["payment"] == pytest.approx(2.0)


def test_bestresponse_atom_out_of_range(bad_bundle_path):
    assert main(["bestresponse", "--instance", str(bad_bundle_path), "--atom", "3"]) == EXIT_VALIDATION


def test_invalid_instance(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 1, "distribution": [], "menu": {"entries": []}}))
    assert main(["revenue", "--instance", str(path)]) == EXIT_VALIDATION
    assert main(["revenue", "--instance", str(tmp_path / "missing.json")]) == EXIT_VALIDATION


def test_capacity_error(bad_bundle_path):
    assert main(["verify", "--instance", str(bad_bundle_path), "--policy-budget", "1"]) == EXIT_CAPACITY


def test_sampling_failure_is_a_capacity_error(capsys):
    code = main(["gen", "basic-sets", "--n", "4", "--s", "3", "--b", "1", "--count", "2", "--retry-budget", "20"])
    assert code == EXIT_CAPACITY


def test_usage_errors():
    assert main(["revenue", "--bogus"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    assert main(["compress"]) == EXIT_USAGE


def test_csv_output(bad_bundle_path, tmp_path, capsys):
    out = tmp_path / "revenue.csv"
    code = main(["revenue", "--instance", str(bad_bundle_path), "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "atom,prob,entry,payment,utility"
    assert len(lines) == 2


def test_closure_csv(bad_bundle_path, capsys):
    assert main(["closure", "--instance", str(bad_bundle_path), "--format", "csv"]) == EXIT_OK
    header = capsys.readouterr().out.splitlines()[0]
    assert header == "entry,payment,outcomes,policy_steps"


def test_same_seed_same_bytes(capsys):
    main(["gen", "random", "--seed", "7"])
    first = capsys.readouterr().out
    main(["gen", "random", "--seed", "7"])
    assert capsys.readouterr().out == first


def test_perturb_emits_instance(counterexample_path, tmp_path, capsys):
    out = tmp_path / "perturbed.json"
    code = main(["perturb", "--instance", str(counterexample_path), "--eps", "0.1", "--out", str(out)])
    assert code == EXIT_OK
    capsys.readouterr()
    assert main(["revenue", "--instance", str(out)]) == EXIT_OK
    assert float(capsys.readouterr().out) > 0


def test_lp_opt_on_perturbed_counterexample(tmp_path, capsys):
    path = tmp_path / "flat.json"
    main(["gen", "counterexample", "--perturbed", "--out", str(path)])
    assert main(["lp-opt", "--instance", str(path), "--single-parameter"]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result == {"price": 4.0, "revenue": pytest.approx(3.75)}


def test_compress_stage_table(bad_bundle_path, capsys):
    assert main(["compress", "--instance", str(bad_bundle_path), "--eps", "0.25", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "stage,entries"
    assert [line.split(",")[0] for line in lines[1:]] == ["input", "drop_small", "grid_round"]


def test_continuity_reports(tmp_path, capsys):
    path = tmp_path / "prices.json"
    path.write_text(
        json.dumps(
            {
                "n": 2,
                "distribution": [
                    {"prob": 0.5, "valuation": {"kind": "additive", "values": [3.0, 1.0]}},
                    {"prob": 0.5, "valuation": {"kind": "additive", "values": [1.0, 3.0]}},
                ],
                "menu": {
                    "semantics": "buymany",
                    "entries": [
                        {"allocation": [{"set": [0], "prob": 1.0}], "price": 2.0},
                        {"allocation": [{"set": [1], "prob": 1.0}], "price": 2.0},
                    ],
                },
            }
        )
    )
    code = main(
        ["continuity", "--instance", str(path), "--eps", "1e-8", "--eps", "1e-10", "--no-reference"]
    )
    assert code == EXIT_OK
    reports = json.loads(capsys.readouterr().out)["reports"]
    assert [r["epsilon"] for r in reports] == [1e-8, 1e-10]
    assert all(r["ratio"] >= r["bound_ratio"] for r in reports)


def test_lp_solver_failure_exit_code(counterexample_path, monkeypatch, capsys):
    def failing_lp(distribution, config):
        raise SolverError("Buy-one LP", 2, "The problem is infeasible.")

    monkeypatch.setattr("buymanylab.cli.opt_buy_one", failing_lp)
    assert main(["lp-opt", "--instance", str(counterexample_path)]) == EXIT_SOLVER
    assert "Solver failed" in capsys.readouterr().err
