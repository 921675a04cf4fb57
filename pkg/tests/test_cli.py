import json
import subprocess
import sys

import pytest

from conftest import P
from loopstrings.cli import SCHEMA_VERSION, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1]) if out else None


def test_coeff_example(capsys):
    code, doc = run(capsys, "coeff", "--dim", "2", "--loop", P, "--k", "0", "--imax", "2")
    assert code == 0
    assert doc["schema"] == SCHEMA_VERSION and doc["command"] == "coeff"
    rows = {r["i"]: r for r in doc["table"]["rows"]}
    assert rows[1]["a"] == "1/1" and rows[1]["a_sym"] == "1/1" and rows[1]["b"] == "1/1"
    assert rows[0]["a"] == rows[2]["a"] == "0/1"


def test_expand_reports_partial_sum(capsys):
    code, doc = run(capsys, "expand", "--loop", P, "--k", "0", "--beta", "1/100000000", "--imax", "3")
    assert code == 0
    ser = doc["series"]
    assert ser["partial_sum"] == "1/100000000"
    # this beta lies outside the proven regime, so no tail is claimed
    assert ser["rigorous"] is False and ser["tail_bound"] is None and ser["notes"]


def test_expand_rigorous_tail(capsys):
    beta = f"1/{2 * 4096 ** 5}"
    code, doc = run(capsys, "expand", "--loop", P, "--k", "0", "--beta", beta, "--imax", "3", "--residual")
    assert code == 0
    ser = doc["series"]
    assert ser["rigorous"] is True and ser["partial_sum"] == beta
    assert ser["tail_bound"] is not None
    assert doc["equation_residual"]["within"] is True


def test_trajectories_count_and_listing(capsys, tmp_path):
    code, doc = run(capsys, "trajectories", "--loop", P, "--i", "1", "--count")
    assert code == 0 and doc["T"] == "1/1" and doc["S"] == "1/1"
    assert doc["budgets"][0]["count"] == 4 and doc["budgets"][0]["listing_consistent"]
    path = tmp_path / "list.jsonl"
    code, doc = run(capsys, "trajectories", "--loop", P, "--budget", "1,0,0,0", "--list", str(path))
    rows = [json.loads(x) for x in path.read_text().splitlines()]
    assert len(rows) == 4 and all(r["weight_den"] == 4 for r in rows)
    code, doc = run(capsys, "trajectories", "--loop", P, "--budget", "1,0,0,0", "--list")
    assert len(doc["trajectories"]) == 4


def test_check_duality(capsys):
    code, doc = run(capsys, "check", "duality", "--dim", "2", "--max-length", "4", "--imax", "2", "--kmax", "1")
    assert code == 0 and doc["all equal"] is True and doc["ok"] is True


def test_check_pruning_small(capsys):
    code, doc = run(capsys, "check", "pruning", "--max-length", "4", "--total", "2")
    assert code == 0 and doc["all_equal"] is True and doc["cases"] > 0


def test_check_invariants_small(capsys):
    code, doc = run(capsys, "check", "invariants", "--samples-per-lemma", "50", "--seed", "3")
    assert code == 0 and doc["ok"] is True


def test_mc_is_deterministic(capsys, tmp_path):
    argv = ["mc", "--loop", P, "--N", "3", "--box", "4", "--sweeps", "20", "--warmup", "10",
            "--chains", "2", "--seed", "5"]
    code, a = run(capsys, *argv)
    assert code == 0
    out = tmp_path / "mc.json"
    csv = tmp_path / "samples.csv"
    code, b = run(capsys, *argv, "--out", str(out), "--samples", str(csv))
    assert a == b
    assert json.loads(out.read_text()) == b
    assert csv.read_text().startswith("observable,chain,t,value")
    assert a["loop"] == "@(1,1) +1 +2 -1 -2"


def test_cache_round_trip(capsys, tmp_path):
    cache = tmp_path / "memo.json"
    argv = ["coeff", "--loop", f"{P} {P}", "--k", "1", "--imax", "2", "--cache", str(cache)]
    code, a = run(capsys, *argv)
    assert code == 0 and cache.exists()
    code, b = run(capsys, *argv)
    assert a == b


def test_default_cache_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("LOOPSTRINGS_CACHE_DIR", str(tmp_path))
    code, _ = run(capsys, "coeff", "--loop", P, "--imax", "1", "--cache")
    assert code == 0
    assert list(tmp_path.iterdir())


@pytest.mark.parametrize("argv,code,kind", [
    (["coeff", "--loop", "+1 +2 -1", "--imax", "1"], 2, "parse"),
    (["coeff", "--loop", P], 2, "usage"),
    (["mc", "--loop", P], 2, "usage"),
    (["coeff", "--loop", P, "--imax", "1", "--dim", "1"], 2, "usage"),
    (["trajectories", "--loop", P, "--budget", "1,x"], 2, "usage"),
    (["expand", "--loop", P, "--beta", "abc"], 2, "usage"),
    (["nonsense"], 2, "usage"),
    (["mc", "--loop", P, "--box", "2", "--seed", "1"], 1, "BoxError"),
])
def test_errors_are_json(capsys, argv, code, kind):
    got, doc = run(capsys, *argv)
    assert got == code
    assert doc["error"] == kind and doc["message"] and doc["schema"] == SCHEMA_VERSION


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "loopstrings.cli", "coeff", "--loop", P, "--imax", "1"],
        capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["table"]["rows"][1]["a"] == "1/1"
