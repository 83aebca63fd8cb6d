"""Command-line interface: subcommands, formats, and exit codes."""

import csv
import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "doubling2ecss.cli"]


def run(*args, **kw):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, **kw)


@pytest.fixture()
def instance_file(tmp_path):
    path = tmp_path / "inst.json"
    res = run("gen", "uniform-cube", "--n", "8", "--seed", "3", "--out", str(path))
    assert res.returncode == 0, res.stderr
    return path


def test_gen_to_stdout():
    res = run("gen", "uniform-cube", "--n", "5", "--seed", "1")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert len(payload["points"]) == 5 or len(payload.get("matrix", [])) == 5


def test_solve_exit_ok(instance_file):
    res = run("solve", str(instance_file), "--seed", "0")
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["solution"]["feasible"]
    assert payload["report"]["weight"] <= payload["report"]["baseline_weight"] + 1e-9


def test_solve_flags_before_subcommand(instance_file):
    res = run("--seed", "2", "solve", str(instance_file))
    assert res.returncode == 0, res.stderr


def test_solve_missing_file_exit_invalid(tmp_path):
    res = run("solve", str(tmp_path / "missing.json"))
    assert res.returncode == 3


def test_solve_infeasible_exit_code(tmp_path):
    path = tmp_path / "two.json"
    res = run("gen", "line", "--n", "2", "--dim", "1", "--out", str(path))
    assert res.returncode == 0
    res = run("solve", str(path))
    assert res.returncode == 2


def test_solve_dump_tree(instance_file, tmp_path):
    tree_path = tmp_path / "tree.json"
    res = run("solve", str(instance_file), "--dump-tree", str(tree_path))
    assert res.returncode == 0
    tree = json.loads(tree_path.read_text())
    assert "root" in tree and "params" in tree


def test_oracle_brute_matches_solve_weight(instance_file):
    sol = json.loads(run("solve", str(instance_file), "--best-of", "5").stdout)
    res = run("oracle", str(instance_file), "--method", "brute-2ecss")
    assert res.returncode == 0
    oracle = json.loads(res.stdout)
    assert sol["report"]["weight"] >= oracle["weight"] - 1e-9


def test_oracle_range_guard(tmp_path):
    path = tmp_path / "big.json"
    run("gen", "uniform-cube", "--n", "20", "--out", str(path))
    res = run("oracle", str(path), "--method", "brute-2ecss")
    assert res.returncode == 3


def test_bench_outputs(tmp_path):
    out = tmp_path / "bench"
    res = run("bench", "--kind", "uniform-cube", "--n", "8", "--count", "3",
              "--seed", "1", "--out", str(out))
    assert res.returncode == 0, res.stderr
    with open(out / "bench.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    for row in rows:
        assert float(row["ratio_to_baseline"]) <= 1.0 + 1e-9
        assert row["feasible"] == "True"
    payload = json.loads((out / "bench.json").read_text())
    assert len(payload["rows"]) == 3
    assert (out / "bench_timings.json").exists()


def test_bench_deterministic_reports(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = run("bench", "--kind", "uniform-cube", "--n", "7", "--count", "2",
                  "--seed", "5", "--out", str(out))
        assert res.returncode == 0, res.stderr
    assert (a / "bench.json").read_bytes() == (b / "bench.json").read_bytes()


def test_verify_quick_selected():
    res = run("verify", "--criteria", "10", "--quick")
    assert res.returncode == 0, res.stderr
    assert "PASS criterion 10" in res.stdout


def test_verify_bad_criteria():
    res = run("verify", "--criteria", "0,99")
    assert res.returncode == 3


def test_workers_env(tmp_path):
    import os
    out = tmp_path / "bench"
    env = {**os.environ, "SOLVER_WORKERS": "2"}
    res = subprocess.run(CLI + ["bench", "--kind", "uniform-cube", "--n", "7",
                                "--count", "2", "--seed", "4", "--out", str(out)],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert (out / "bench.csv").exists()
