"""
The n=4 worked example
======================

The objective is the number of 3-interchange steps needed to sort a
permutation.  2-search from 4312 stalls on a plateau; 3-search does not.
"""

from kinterchange import (
    StrategyConfig,
    build_search_distance_objective,
    classify_neighbors,
    make_permutation,
    run_trajectory,
    table1_objective,
)

f = build_search_distance_objective(n=4, k=3)
table = table1_objective()

print(f"{'No':>3}  s     f(s)")
for row, t in enumerate(table.order, start=1):
    assert f.value(t) == table.value(t)
    print(f"{row:>3}  {''.join(map(str, t))}  {f.value(t)}")

start = make_permutation((4, 3, 1, 2))
part = classify_neighbors(start, 2, f)
print("\n2-neighbors of 4312:")
for label, group in (("better", part.improving), ("equal", part.equal), ("worse", part.worsening)):
    print(f"  {label:<6}", {p.compact(): f(p) for p in sorted(group)})

for k in (2, 3):
    tr = run_trajectory(f, start, StrategyConfig.fixed(k))
    path = " -> ".join(p.compact() for p in tr.points)
    print(f"\n{k}-search: {path}  [{tr.status}]")
