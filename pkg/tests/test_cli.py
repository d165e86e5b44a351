import json
from pathlib import Path

import pytest

from stopover.cli import main


def run(args):
    return main([str(a) for a in args])


def read_bytes(path):
    return Path(path).read_bytes()


@pytest.fixture(scope="module")
def sim_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    out = root / "data.hist"
    code = run(["simulate", "--paper-scenario", 100, "--seed", 7, "--out", out])
    assert code == 0
    return root, out


def test_simulate_writes_history_and_truth(sim_files):
    root, out = sim_files
    assert out.exists()
    truth = json.loads((root / "data.hist.truth.json").read_text())
    assert truth["seed"] == 7
    assert truth["N"] == 100.0
    assert len(truth["realized_abundance"]) == 3
    assert truth["params"]["r"] == [0.4, 0.2, 0.4]


def test_simulate_reproducible(sim_files, tmp_path):
    root, out = sim_files
    again = tmp_path / "again.hist"
    assert run(["simulate", "--paper-scenario", 100, "--seed", 7, "--out", again]) == 0
    assert read_bytes(out) == read_bytes(again)
    assert read_bytes(root / "data.hist.truth.json") == read_bytes(str(again) + ".truth.json")


def test_fit_end_to_end_and_reproducible(sim_files, tmp_path):
    root, out = sim_files
    f1 = tmp_path / "fit1"
    f2 = tmp_path / "fit2"
    code = run(["fit", "--data", out, "--structure", "generating", "--seed", 1, "--starts", 2, "--out", f1])
    assert code == 0
    assert run(["fit", "--data", out, "--structure", "generating", "--seed", 1, "--starts", 2, "--out", f2]) == 0
    assert read_bytes(str(f1) + ".json") == read_bytes(str(f2) + ".json")
    assert read_bytes(str(f1) + ".txt") == read_bytes(str(f2) + ".txt")
    payload = json.loads(Path(str(f1) + ".json").read_text())
    assert payload["converged"] is True
    assert payload["aic"] == pytest.approx(-2 * payload["loglik"] + 2 * payload["n_params"])
    # estimates of every reported quantity are present
    names = {row["parameter"] for row in payload["report"]}
    assert {"N", "N(t)", "r", "s", "beta", "phi"} <= names
    # config echo is part of the audit trail
    assert payload["optimizer"]["starts"] == 2
    assert payload["seed"] == 1


def test_loglik_command(sim_files, tmp_path, capsys):
    root, out = sim_files
    params_file = tmp_path / "params.json"
    from stopover import reference_scenario
    from stopover.fileio import write_params_json

    params, _ = reference_scenario(100)
    write_params_json(params_file, params)
    assert run(["loglik", "--data", out, "--params", params_file]) == 0
    printed = capsys.readouterr().out
    assert "loglik = " in printed


def test_bootstrap_command(sim_files, tmp_path):
    root, out = sim_files
    prefix = tmp_path / "boot"
    code = run([
        "bootstrap", "--data", out, "--structure", "generating",
        "--replicates", 3, "--seed", 2, "--starts", 1, "--out", prefix,
    ])
    assert code == 0
    payload = json.loads(Path(str(prefix) + ".json").read_text())
    assert payload["replicates"] == 3
    txt = Path(str(prefix) + ".txt").read_text()
    assert "(SE" in txt


def test_select_command(sim_files, tmp_path):
    root, out = sim_files
    prefix = tmp_path / "sel"
    code = run([
        "select", "--data", out, "--base", "generating", "--moves", "s=year",
        "--seed", 0, "--starts", 1, "--out", prefix,
    ])
    assert code == 0
    payload = json.loads(Path(str(prefix) + ".json").read_text())
    assert payload["best_structure"]
    assert payload["trace"][0]["note"] == "base"


def test_oracle_check_command(tmp_path, capsys):
    report = tmp_path / "oracle.json"
    assert run(["oracle-check", "--trials", 40, "--seed", 3, "--out", report]) == 0
    payload = json.loads(report.read_text())
    assert payload["ok"] is True
    assert payload["max_abs_deviation"] < 1e-10


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.hist"
    bad.write_text("T=1 K=2 G=1\n0 3 1\n")
    assert run(["fit", "--data", bad, "--structure", "constant", "--out", tmp_path / "x"]) == 2


def test_missing_file_exit_code(tmp_path):
    assert run(["fit", "--data", tmp_path / "nope.hist", "--structure", "constant", "--out", tmp_path / "x"]) == 2


def test_bad_structure_exit_code(sim_files, tmp_path):
    root, out = sim_files
    assert run(["fit", "--data", out, "--structure", "r=banana", "--out", tmp_path / "x"]) == 2
