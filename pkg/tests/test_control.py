import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest

from kinterchange import (
    InversionObjective,
    RunRepository,
    StrategyConfig,
    enumerate_local_optima,
    execute_plan,
    probe_instance,
    select_strategy,
    table1_objective,
    verify_paper,
)
from kinterchange.control import RunRecord, SelectionThresholds, replay
from kinterchange.errors import CapExceeded, InvalidK
from kinterchange.objectives import TableObjective, random_table_objective
from kinterchange.perm import all_permutations


class TestProbe:
    def test_table1_k2(self, table1):
        p = probe_instance(table1, k_range=[2, 3])
        assert p.exhaustive and p.sample_count == 24
        assert p.at(2).local_optimum_fraction == Fraction(13, 24)
        assert p.at(2).spurious_fraction == Fraction(1, 2)
        assert p.at(3).spurious_fraction == 0
        assert p.reference_value == 0

    @pytest.mark.parametrize("seed", range(4))
    def test_exhaustive_matches_enumeration(self, seed):
        f = random_table_objective(5, random.Random(seed))
        p = probe_instance(f)
        for k in p.k_values:
            assert p.at(k).local_optima == enumerate_local_optima(f, 5, k)

    def test_sampled_is_reproducible(self):
        f = InversionObjective(7)
        a = probe_instance(f, samples=50, seed=3)
        b = probe_instance(f, samples=50, seed=3)
        assert not a.exhaustive and a.sample_count == 50
        assert a.to_dict() == b.to_dict()

    def test_large_n_sampled(self):
        p = probe_instance(InversionObjective(12), k_range=[2], samples=20, seed=1)
        assert p.at(2).spurious_fraction == 0

    def test_errors(self, table1):
        with pytest.raises(InvalidK):
            probe_instance(table1, k_range=[5])
        with pytest.raises(CapExceeded):
            probe_instance(InversionObjective(10))
        with pytest.raises(KeyError):
            probe_instance(table1, k_range=[2]).at(3)


class TestSelect:
    def test_table1(self, table1):
        cfg = select_strategy(probe_instance(table1))
        assert (cfg.trajectory_kind, cfg.k_min, cfg.k_max, cfg.random_starts) == ("FA", 2, 3, 6)

    def test_smooth_objective(self):
        cfg = select_strategy(probe_instance(InversionObjective(5)))
        assert (cfg.trajectory_kind, cfg.schedule, cfg.random_starts) == ("F", "fixed", 1)

    def test_constant_objective(self):
        f = TableObjective(n=3, values={p.elements: 7 for p in all_permutations(3)})
        p = probe_instance(f)
        assert p.degenerate
        cfg = select_strategy(p)
        assert cfg.trajectory_kind == "F" and cfg.random_starts == 1

    def test_thresholds_respected(self, table1):
        th = SelectionThresholds(plateau_rate=Fraction(1), local_optimum_fraction=Fraction(1), max_starts=2)
        cfg = select_strategy(probe_instance(table1), th)
        assert cfg.trajectory_kind == "F" and cfg.k_max == 2 and cfg.random_starts == 2

    @pytest.mark.parametrize("seed", range(5))
    def test_selected_plan_runs(self, seed):
        f = random_table_objective(5, random.Random(seed))
        cfg = select_strategy(probe_instance(f))
        rec = execute_plan(f, cfg)
        assert rec.run_id == "run-unsaved"
        assert len(rec.trajectories) == cfg.random_starts


class TestRepository:
    def test_append_and_load(self, tmp_path, table1):
        repo = RunRepository(tmp_path / "runs")
        cfg = StrategyConfig(trajectory_kind="FA", random_starts=3, seed=9)
        r1 = execute_plan(table1, cfg, repo)
        r2 = execute_plan(table1, cfg, repo)
        assert (r1.run_id, r2.run_id) == ("run-000001", "run-000002")
        assert repo.load("run-000001") == r1
        assert [r.run_id for r in repo] == ["run-000001", "run-000002"]
        assert table1.objective_id in repo.registry()

    def test_append_only(self, tmp_path, table1):
        repo = RunRepository(tmp_path)
        rec = execute_plan(table1, StrategyConfig(random_starts=1), repo)
        with pytest.raises(FileExistsError):
            repo.append(rec)

    def test_record_json_roundtrip(self, tmp_path, table1):
        rec = execute_plan(table1, StrategyConfig(random_starts=2), tmp_path)
        doc = json.loads((tmp_path / f"{rec.run_id}.json").read_text())
        assert RunRecord.from_dict(doc) == rec

    @pytest.mark.parametrize("kind,pivot", [("F", "first"), ("FA", "random"), ("FAB", "best")])
    def test_replay_is_identical(self, tmp_path, kind, pivot):
        f = random_table_objective(5, random.Random(11))
        cfg = StrategyConfig(trajectory_kind=kind, pivot=pivot, k_min=2, k_max=3, random_starts=5, seed=4)
        rec = execute_plan(f, cfg, tmp_path)
        again = replay(RunRepository(tmp_path).load(rec.run_id))
        assert tuple(tr.summary() for tr in again.trajectories) == rec.trajectories
        assert again.seeds == rec.seeds

    def test_unwritable(self, tmp_path, table1):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            execute_plan(table1, StrategyConfig(random_starts=1), blocker / "runs")


class TestVerify:
    def test_all_pass(self):
        rep = verify_paper()
        assert rep.all_passed and len(rep.checks) == 10
        assert "10/10 checks passed" in rep.format_text()

    def test_fault_injection_is_pinpointed(self):
        t = table1_objective()
        bad = dict(t.values)
        bad[(4, 3, 2, 1)] = 2
        rep = verify_paper(replace(t, values=bad))
        assert [c.name for c in rep.failed()] == ["table1"]
        assert "FAIL  table1" in rep.format_text()
