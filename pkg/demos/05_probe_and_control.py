"""
Probing an instance and choosing a strategy
===========================================

A probe counts local optima, spurious local optima and plateaus for each k.
The selector turns that into a plan, which is executed and stored in an
append-only run repository so it can be replayed later.
"""

import tempfile

from kinterchange import RunRepository, execute_plan, probe_instance, select_strategy, table1_objective
from kinterchange.control import replay

f = table1_objective()
probe = probe_instance(f)
for q in probe.per_k:
    print(
        f"k={q.k}: local optima {q.local_optimum_fraction}, spurious {q.spurious_fraction}, "
        f"plateau {q.plateau_rate}"
    )

cfg = select_strategy(probe)
print("selected:", cfg.multi_kind, f"k={cfg.k_min}..{cfg.k_max}", f"{cfg.random_starts} starts")

with tempfile.TemporaryDirectory() as root:
    repo = RunRepository(root)
    record = execute_plan(f, cfg, repo)
    print(f"{record.run_id}: {record.outcome}, {record.success_count}/{len(record.starts)} reached value {record.best_value}")
    again = replay(repo.load(record.run_id))
    print("replay identical:", tuple(t.summary() for t in again.trajectories) == record.trajectories)
