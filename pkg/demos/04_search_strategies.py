"""
Trajectory kinds and k schedules
================================

F takes improving steps only, FA may also step to equal-valued points and
FAB may additionally backtrack.  An adaptive schedule widens the window at
a local optimum and narrows it again after each move.
"""

import random

from kinterchange import StrategyConfig, build_digraph, reachability_to_optima, run_multistart
from kinterchange.objectives import global_optima, random_table_objective, table1_objective
from kinterchange.perm import all_permutations
from kinterchange.search import with_starts


def success(f, cfg):
    return run_multistart(f, with_starts(cfg, all_permutations(f.n))).success_count


f = table1_objective()
print("worked-example table, all 24 starts:")
for kind in ("F", "FA", "FAB"):
    print(f"  n{kind:<3} k=2: {success(f, StrategyConfig(trajectory_kind=kind))}/24")
print(f"  nF   adaptive(2,4): {success(f, StrategyConfig.adaptive(2, 4))}/24")

# On a rugged random table the greedy FA walk can commit to a plateau that
# leads nowhere; backtracking recovers every weakly reachable start.
g = random_table_objective(5, random.Random(0))
weak = reachability_to_optima(build_digraph(g, 5, 2, "weak"), global_optima(g, 5))
print(f"\nrandom n=5 table, k=2: weak-reachable {len(weak)}/120")
for kind in ("F", "FA", "FAB"):
    print(f"  n{kind:<3}: {success(g, StrategyConfig(trajectory_kind=kind))}/120")
print(f"  nF adaptive(2,5): {success(g, StrategyConfig.adaptive(2, 5))}/120")
