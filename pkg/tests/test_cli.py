import json
import subprocess
import sys

import pytest

from kinterchange.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


class TestTable:
    def test_paper_order(self, capsys):
        code, doc = run_json(capsys, "table", "--n", "4", "--k", "3", "--paper-order")
        assert code == 0
        rows = doc["rows"]
        assert len(rows) == 24
        assert rows[0] == {"row": 1, "perm": "3124", "value": 1}
        assert rows[12] == {"row": 13, "perm": "1234", "value": 0}

    def test_text(self, capsys):
        code, out, _ = run(capsys, "table", "--n", "3", "--k", "2")
        assert code == 0
        assert out.splitlines()[-1].split() == ["6", "321", "3"]

    def test_paper_order_misuse(self, capsys):
        code, _, err = run(capsys, "table", "--n", "5", "--paper-order")
        assert code == 2 and "--paper-order" in err


class TestLandscape:
    def test_strict_k2(self, capsys):
        code, doc = run_json(capsys, "landscape", "--k", "2", "--mode", "strict")
        rep = doc["report"]
        assert code == 0
        assert rep["reach_fraction"] == "5/24"
        assert rep["reach_set"] == ["1234", "1243", "1324", "2134", "2143"]

    def test_weak_distance_objective(self, capsys):
        code, doc = run_json(capsys, "landscape", "--builtin", "distance", "--n", "5", "--distance-k", "2",
                             "--k", "2", "--mode", "weak")
        assert code == 0 and doc["report"]["property1"]

    def test_objective_file(self, capsys, tmp_path):
        p = tmp_path / "f.json"
        p.write_text(json.dumps({"kind": "flowshop2", "jobs": [{"a": 1, "b": 3}, {"a": 2, "b": 1}]}))
        code, doc = run_json(capsys, "landscape", "--objective", str(p), "--k", "2", "--mode", "weak")
        assert code == 0 and doc["report"]["optimum_value"] == 5


class TestSearch:
    def test_counterexample(self, capsys):
        code, doc = run_json(capsys, "search", "--start", "4312", "--k", "2")
        tr = doc["result"]["trajectories"][0]
        assert code == 0
        assert tr["status"] == "LocalOptimum" and tr["final_point"] == "(4,3,1,2)"

    def test_all_starts_fa(self, capsys):
        code, doc = run_json(capsys, "search", "--all-starts", "--kind", "FA", "--k", "2")
        assert doc["result"]["success_count"] == 24 and doc["result"]["kind"] == "nFA"

    def test_trace(self, capsys):
        code, doc = run_json(capsys, "search", "--start", "4312", "--k", "3", "--trace")
        steps = doc["result"]["trajectories"][0]["steps"]
        assert [s["point"] for s in steps] == ["(1,3,4,2)", "(1,2,3,4)"]

    def test_step_limit(self, capsys):
        code, doc = run_json(capsys, "search", "--start", "4321", "--k", "2", "--step-limit", "1")
        assert doc["result"]["trajectories"][0]["status"] == "StepLimit"

    def test_repo(self, capsys, tmp_path):
        code, _, _ = run(capsys, "search", "--random-starts", "3", "--repo", str(tmp_path))
        assert code == 0 and (tmp_path / "run-000001.json").exists()

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"trajectory_kind": "FAB", "k_min": 2, "k_max": 2, "random_starts": 4, "seed": 1}))
        code, doc = run_json(capsys, "search", "--config", str(cfg))
        assert code == 0 and doc["result"]["kind"] == "nFAB" and doc["result"]["runs"] == 4

    @pytest.mark.parametrize("argv,flag", [
        (["--k", "7"], "--k"),
        (["--k", "1"], "--k"),
        (["--start", "4313"], "--start"),
        (["--start", "123"], "--start"),
        (["--k-min", "3", "--k-max", "2"], "--k-min"),
    ])
    def test_usage_errors(self, capsys, argv, flag):
        code, _, err = run(capsys, "search", *argv)
        assert code == 2 and flag in err

    def test_bad_objective_is_infeasible(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"kind": "table", "n": 2, "values": {"12": 0}}')
        code, _, err = run(capsys, "search", "--objective", str(p), "--random-starts", "1")
        assert code == 1 and "IncompleteTable" in err

    def test_missing_objective_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "search", "--objective", str(tmp_path / "nope.json"))
        assert code == 2 and "--objective" in err


class TestProbe:
    def test_selects_plan(self, capsys):
        code, doc = run_json(capsys, "probe")
        assert code == 0
        assert doc["strategy"]["trajectory_kind"] == "FA"
        assert doc["strategy"]["k_max"] == 3

    def test_execute(self, capsys, tmp_path):
        code, doc = run_json(capsys, "probe", "--execute", "--repo", str(tmp_path))
        assert code == 0 and doc["run"]["run_id"] == "run-000001"

    def test_cap(self, capsys):
        code, _, err = run(capsys, "probe", "--builtin", "inversion", "--n", "10")
        assert code == 1 and "CapExceeded" in err


class TestVerify:
    def test_exit_zero(self, capsys):
        code, doc = run_json(capsys, "verify-paper")
        assert code == 0 and doc["all_passed"] and len(doc["checks"]) == 10

    def test_fault_injection_exits_one(self, capsys, tmp_path):
        from kinterchange import table1_objective
        doc = table1_objective().to_dict()
        doc["values"]["4321"] = 2
        p = tmp_path / "t.json"
        p.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "verify-paper", "--table", str(p), "--format", "text")
        assert code == 1
        assert [line.split()[1] for line in out.splitlines() if line.startswith("FAIL")] == ["table1:"]


class TestExportDot:
    def test_writes_dot(self, capsys, tmp_path):
        path = tmp_path / "g.dot"
        code, _, _ = run(capsys, "export-dot", "--mode", "strict", "--k", "2", "--dot", str(path))
        text = path.read_text()
        assert code == 0
        assert text.count("[label=") == 24 and text.count(" -> ") == 15

    def test_unwritable(self, capsys, tmp_path):
        code, _, err = run(capsys, "export-dot", "--mode", "weak", "--k", "2", "--dot", str(tmp_path / "x" / "g.dot"))
        assert code != 0 and err


def test_deterministic_modulo_timestamp(capsys, tmp_path):
    argv = ["search", "--random-starts", "5", "--kind", "FA", "--pivot", "random", "--seed", "7", "--k-max", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert "timestamp" in da["meta"]
    da["meta"].pop("timestamp")
    db["meta"].pop("timestamp")
    da["meta"]["config"].pop("out")
    db["meta"]["config"].pop("out")
    assert da == db


def test_no_timestamp_is_byte_identical(capsys):
    argv = ["search", "--random-starts", "3", "--seed", "5", "--format", "json", "--no-timestamp"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and "timestamp" not in first


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kinterchange", "verify-paper"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "10/10 checks passed" in res.stdout
