"""
Operational digraphs and reachability
=====================================

Which points can reach the optimum using only improving moves (strict
digraph), or improving and equal-value moves (weak digraph)?
"""

from kinterchange import analyze, build_digraph, compute_levels, table1_objective
from kinterchange.landscape import to_dot

f = table1_objective()

for k, mode in ((2, "strict"), (2, "weak"), (3, "strict")):
    rep = analyze(f, 4, k, mode)
    print(
        f"{mode:>6} k={k}: reach {len(rep.reach_set):>2}/24, "
        f"local optima {len(rep.local_optima):>2}, "
        f"longest shortest path {rep.max_shortest_path_to_optimum}"
    )

print("\nstrict k=2 reach set:", sorted(p.compact() for p in analyze(f, 4, 2, "strict").reach_set))

# Level structure of the move graph around the identity.
for k in (2, 3, 4):
    lv = compute_levels(4, k)
    print(f"k={k}: {lv.level_count} levels, sizes {[len(x) for x in lv.levels]}")

# A DOT rendering, ready for `dot -Tsvg`.
dot = to_dot(build_digraph(f, 4, 2, "strict"), f)
print("\n" + "\n".join(dot.splitlines()[:8]) + "\n  ...")
