"""
Sequencing objectives
=====================

Total weighted completion time and the two-machine flowshop makespan, both
checked against their classical ordering rules and against exhaustive
enumeration.  Weighted completion has no non-global 2-interchange local
optima; the flowshop makespan has flat regions that trap 2-search.
"""

import itertools
import random

from kinterchange import Flowshop2Objective, WeightedCompletionObjective, enumerate_local_optima, k_neighborhood
from kinterchange.objectives import johnson_order, random_flowshop_jobs, random_weighted_jobs, smith_order

rng = random.Random(1)
n = 6

wjobs = random_weighted_jobs(n, rng)
wc = WeightedCompletionObjective(wjobs)
best = min(wc.value(t) for t in itertools.permutations(range(1, n + 1)))
print("weighted completion: Smith order", smith_order(wjobs).compact(), "value", wc(smith_order(wjobs)), "optimum", best)
print("  2-local optima values:", sorted({wc(p) for p in enumerate_local_optima(wc, n, 2)}))

fjobs = random_flowshop_jobs(n, rng)
fs = Flowshop2Objective(fjobs)
best = min(fs.value(t) for t in itertools.permutations(range(1, n + 1)))
print("flowshop makespan: Johnson order", johnson_order(fjobs).compact(), "value", fs(johnson_order(fjobs)), "optimum", best)
values = sorted({fs(p) for p in enumerate_local_optima(fs, n, 2)})
print("  2-local optima values:", values)
# Only the points with every neighbor strictly worse are immune to plateaus.
strict = [p for p in enumerate_local_optima(fs, n, 2) if all(fs(x) > fs(p) for x in k_neighborhood(p, 2))]
print("  strict 2-local optima values:", sorted({fs(p) for p in strict}))
