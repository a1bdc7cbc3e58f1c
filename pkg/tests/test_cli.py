import csv
import json

import numpy as np
import pytest

from nisqsvm import cli
from nisqsvm.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv("QSVM_SEED", raising=False)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- preprocess ------------------------------------------------------------

def test_preprocess_iris(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "preprocess", "--output-dir", str(tmp_path))
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["n_points"] == 100
    for stem in ("1_raw", "2_mapped", "3_normalized", "4_angles"):
        rows = list(csv.DictReader((tmp_path / f"{stem}.csv").open()))
        assert len(rows) == 100
        assert (tmp_path / f"{stem}.svg").read_text().startswith("<svg")
    unit = np.array([[float(r["x1"]), float(r["x2"])] for r in csv.DictReader((tmp_path / "3_normalized.csv").open())])
    assert np.allclose(np.sum(unit ** 2, axis=1), 1.0, atol=1e-9)


def test_preprocess_empty_dataset(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, _, err = run_cli(capsys, "preprocess", "--dataset", str(empty), "--output-dir", str(tmp_path / "o"))
    assert code == EXIT_DATA
    assert "data error" in err


# --- run -------------------------------------------------------------------

def test_run_writes_reports(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "run", "--output-dir", str(tmp_path))
    assert code == EXIT_OK
    report = json.loads(out)
    assert {"accuracy", "alpha", "khat", "F", "depth", "js_vs_ideal"} <= set(report)
    assert report["js_vs_ideal"] is None
    assert json.loads((tmp_path / "report.json").read_text()) == report
    assert len((tmp_path / "predictions.csv").read_text().splitlines()) == 101
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["accuracy"] == report["accuracy"]
    assert (tmp_path / "classification.svg").exists()


def test_run_is_byte_identical(capsys):
    args = ("run", "--noise", "default", "--shots", "2048", "--seed", "5")
    first = run_cli(capsys, *args)
    second = run_cli(capsys, *args)
    assert first[0] == EXIT_OK
    assert first[1] == second[1]
    assert json.loads(first[1])["js_vs_ideal"] > 0


def test_env_seed_overrides_flag(capsys, monkeypatch):
    base = ("run", "--noise", "default", "--shots", "2048")
    from_flag = run_cli(capsys, *base, "--seed", "11")[1]
    monkeypatch.setenv("QSVM_SEED", "11")
    from_env = run_cli(capsys, *base, "--seed", "2")[1]
    assert from_env == from_flag
    assert json.loads(from_env)["config"]["seed"] == 11


def test_bad_env_seed_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("QSVM_SEED", "abc")
    assert run_cli(capsys, "run")[0] == EXIT_USAGE


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--circuit", "nope"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["run", "--shots", "0"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE
    assert run_cli(capsys, "run", "--c", "1.0")[0] == EXIT_USAGE
    assert run_cli(capsys, "run", "--gamma", "-1")[0] == EXIT_USAGE
    assert run_cli(capsys, "run", "--noise", "default", "--p1q", "2")[0] == EXIT_USAGE


def test_missing_dataset_is_data_error(capsys):
    assert run_cli(capsys, "run", "--dataset", "/no/such/file.csv")[0] == EXIT_DATA


def test_numeric_failure_exit_code(capsys):
    code, _, err = run_cli(capsys, "run", "--gamma", "1")
    assert code == EXIT_NUMERIC
    assert "rounded F" in err


# --- divergence ------------------------------------------------------------

def test_divergence_default_noise(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "divergence", "--runs", "3", "--shots", "4096", "--output-dir", str(tmp_path))
    assert code == EXIT_OK
    table = json.loads(out)
    c = table["circuits"]
    assert c["hhl_optimized"]["js_median"] < c["baseline"]["js_median"]
    assert c["hhl_optimized"]["depth"] == 7 and c["baseline"]["depth"] == 18
    assert [row["level"] for row in table["sweep"]] == list(cli.SWEEP_LEVELS)
    assert (tmp_path / "divergence.json").exists()


def test_divergence_zero_noise(capsys):
    code, out, _ = run_cli(capsys, "divergence", "--noise", "none", "--runs", "1")
    assert code == EXIT_OK
    for rep in json.loads(out)["circuits"].values():
        assert rep["js"] < 0.01


# --- depth-table and circuit-dump ------------------------------------------

def test_depth_table_json(capsys):
    code, out, _ = run_cli(capsys, "depth-table", "--format", "json")
    assert code == EXIT_OK
    table = json.loads(out)
    assert [r["M"] for r in table["oracles"]] == [2, 4, 8]
    assert [r["original_depth_formula"] for r in table["oracles"]] == [9, 41, 177]
    assert [r["original_depth_built"] for r in table["oracles"]] == [9, 41, None]
    assert {r["new_depth"] for r in table["oracles"]} == {1}
    assert table["solvers"] == {"hhl_optimized": 7, "baseline": 18}


def test_depth_table_csv(capsys):
    code, out, _ = run_cli(capsys, "depth-table")
    assert code == EXIT_OK
    rows = list(csv.reader(line for line in out.splitlines() if not line.startswith("#")))
    assert rows[0][0] == "M" and len(rows) == 4


def test_circuit_dump(capsys):
    code, out, _ = run_cli(capsys, "circuit-dump", "hhl_optimized", "--coupling")
    assert code == EXIT_OK
    assert "depth 7" in out and "# coupling: ok" in out
    code, out, _ = run_cli(capsys, "circuit-dump", "oracle-original", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["num_qubits"] == 2
    assert run_cli(capsys, "circuit-dump", "oracle-original", "--angles", "0.1", "0.2", "0.3")[0] == EXIT_USAGE


def test_dump_json_handles_infinity():
    assert json.loads(cli.dump_json({"x": float("inf"), "y": np.float64(0.5)})) == {"x": "inf", "y": 0.5}
