"""Adaptive algorithm system: probe, select, execute, record.

* control unit -- :func:`probe_instance` classifies sampled points (improvable,
  plateau, local optimum) for each window size; :func:`select_strategy` turns
  the probe into a :class:`~kinterchange.search.StrategyConfig` with a fixed
  rule table;
* execution level -- :func:`execute_plan` runs the multistart search and
  summarizes it as a :class:`RunRecord`;
* repositories -- :class:`RunRepository` is an append-only directory of run
  records plus an objective registry.

:func:`verify_paper` recomputes the published worked example end to end.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Iterator

from . import __version__
from .errors import KInterchangeError
from .landscape import (
    build_digraph,
    compute_levels,
    nesting_violations,
    reachability_to_optima,
)
from .objectives import (
    InversionObjective,
    Objective,
    TableObjective,
    Value,
    build_search_distance_objective,
    objective_from_dict,
    parse_value,
    table1_objective,
    value_to_json,
)
from .perm import (
    DEFAULT_ENUMERATION_CAP,
    Permutation,
    all_tuples,
    check_cap,
    check_k,
    inversion_count,
    k_neighborhood,
    lex_unrank,
    neighbor_tuples,
    parse_permutation,
)
from .search import (
    ASIDE_EXHAUSTED,
    LOCAL_OPTIMUM,
    OPTIMUM,
    STEP_LIMIT,
    MultiStartResult,
    StrategyConfig,
    run_multistart,
    run_trajectory,
    with_starts,
)

# --------------------------------------------------------------------------
# probing


@dataclass(frozen=True)
class KProbe:
    """Point-type statistics for one window size.

    ``spurious_fraction`` counts local optima whose value is above the
    reference optimum value of the probe (so a global optimum is never
    spurious).
    """

    k: int
    local_optimum_fraction: Fraction
    spurious_fraction: Fraction
    mean_improving_degree: Fraction
    plateau_rate: Fraction
    local_optima: frozenset[Permutation] = field(repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "local_optimum_fraction": _frac(self.local_optimum_fraction),
            "spurious_fraction": _frac(self.spurious_fraction),
            "mean_improving_degree": _frac(self.mean_improving_degree),
            "plateau_rate": _frac(self.plateau_rate),
            "local_optima": sorted(p.compact() for p in self.local_optima),
        }


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ProbeReport:
    n: int
    seed: int
    sample_count: int
    exhaustive: bool
    objective_id: str
    reference_value: Value
    distinct_values: int
    per_k: tuple[KProbe, ...]

    @property
    def degenerate(self) -> bool:
        """Every sampled point has the same value."""
        return self.distinct_values <= 1

    @property
    def k_values(self) -> tuple[int, ...]:
        return tuple(p.k for p in self.per_k)

    def at(self, k: int) -> KProbe:
        for p in self.per_k:
            if p.k == k:
                return p
        raise KeyError(f"k={k} was not probed")

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "exhaustive": self.exhaustive,
            "objective_id": self.objective_id,
            "reference_value": value_to_json(self.reference_value),
            "distinct_values": self.distinct_values,
            "per_k": [p.to_dict() for p in self.per_k],
        }


def probe_instance(
    f: Objective,
    n: int | None = None,
    k_range: Iterable[int] | None = None,
    samples: int | str | None = "exhaustive",
    seed: int = 0,
    cap: int | None = None,
) -> ProbeReport:
    """Classify sampled (or all) points of ``f`` for each ``k`` in ``k_range``.

    ``samples`` is a count or ``"exhaustive"``; a count of at least ``n!`` is
    treated as exhaustive.  The reference value for spurious local optima is
    the declared optimum if any, the true minimum when exhaustive, and the
    best sampled value otherwise.

    Raises:
        CapExceeded: exhaustive probing above the enumeration cap.
        InvalidK: a ``k`` outside ``[2, n]``.
    """
    n = f.n if n is None else n
    if n is None:
        raise KInterchangeError("objective has no fixed n; pass n")
    f.check_arity(n)
    ks = tuple(range(2, n + 1)) if k_range is None else tuple(k_range)
    if not ks:
        raise KInterchangeError("k_range is empty")
    for k in ks:
        check_k(n, k)
    limit = DEFAULT_ENUMERATION_CAP if cap is None else cap

    exhaustive = samples in (None, "exhaustive") or (n <= limit and int(samples) >= math.factorial(n))
    if exhaustive:
        check_cap(n, cap)
        points = all_tuples(n, cap)
    else:
        count = int(samples)
        if count <= 0:
            raise KInterchangeError("samples must be positive")
        rng = random.Random(seed)
        if n <= limit:
            points = [lex_unrank(n, r).elements for r in sorted(rng.sample(range(math.factorial(n)), count))]
        else:
            points = [tuple(rng.sample(range(1, n + 1), n)) for _ in range(count)]

    cache: dict[tuple[int, ...], Value] = {}

    def value(t: tuple[int, ...]) -> Value:
        v = cache.get(t)
        if v is None:
            v = cache[t] = f.value(t)
        return v

    sampled = [value(t) for t in points]
    if f.known_optima is not None:
        reference = f(next(iter(f.known_optima)))
    else:
        reference = min(sampled)

    per_k = []
    total = len(points)
    for k in ks:
        lo, spurious, plateau, degree = [], 0, 0, 0
        for t, here in zip(points, sampled):
            better = equal = 0
            for x in neighbor_tuples(t, k):
                vx = value(x)
                if vx < here:
                    better += 1
                elif vx == here:
                    equal += 1
            degree += better
            if better == 0:
                lo.append(Permutation(t))
                if here > reference:
                    spurious += 1
                if equal:
                    plateau += 1
        per_k.append(KProbe(
            k=k,
            local_optimum_fraction=Fraction(len(lo), total),
            spurious_fraction=Fraction(spurious, total),
            mean_improving_degree=Fraction(degree, total),
            plateau_rate=Fraction(plateau, total),
            local_optima=frozenset(lo),
        ))
    return ProbeReport(
        n=n,
        seed=seed,
        sample_count=total,
        exhaustive=exhaustive,
        objective_id=f.objective_id,
        reference_value=reference,
        distinct_values=len(set(sampled)),
        per_k=tuple(per_k),
    )


# --------------------------------------------------------------------------
# strategy selection


@dataclass(frozen=True)
class SelectionThresholds:
    plateau_rate: Fraction = Fraction(1, 20)
    local_optimum_fraction: Fraction = Fraction(1, 20)
    multistart_scale: int = 10
    max_starts: int = 32


def select_strategy(p: ProbeReport, thresholds: SelectionThresholds | None = None) -> StrategyConfig:
    """Rule table, applied at the smallest probed ``k``:

    ============================  ==========================================
    probe                         strategy
    ============================  ==========================================
    single sampled value          F, fixed ``k_min``, one start
    plateau rate > threshold      kind FA (else F)
    spurious fraction > thresh.   adaptive ``(k_min, k_clean)`` where
                                  ``k_clean`` is the smallest probed ``k``
                                  at or under the threshold (else the
                                  largest probed ``k``); otherwise fixed
    starts                        ``1 + ceil(spurious * scale)``, capped
    ============================  ==========================================
    """
    th = thresholds or SelectionThresholds()
    k_min = min(p.k_values)
    if p.degenerate:
        return StrategyConfig.fixed(k_min, trajectory_kind="F", random_starts=1, seed=p.seed)
    base = p.at(k_min)
    kind = "FA" if base.plateau_rate > th.plateau_rate else "F"
    if base.spurious_fraction > th.local_optimum_fraction:
        clean = [q.k for q in sorted(p.per_k, key=lambda q: q.k) if q.k > k_min and q.spurious_fraction <= th.local_optimum_fraction]
        k_max = clean[0] if clean else max(p.k_values)
    else:
        k_max = k_min
    starts = min(th.max_starts, 1 + math.ceil(base.spurious_fraction * th.multistart_scale))
    return StrategyConfig(
        trajectory_kind=kind, k_min=k_min, k_max=k_max, random_starts=starts, seed=p.seed
    )


# --------------------------------------------------------------------------
# execution and repository


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class RunRecord:
    """Everything needed to replay and audit one multistart run."""

    run_id: str
    objective: dict[str, Any]
    objective_id: str
    strategy: dict[str, Any]
    starts: tuple[str, ...]
    seeds: tuple[int, ...]
    trajectories: tuple[dict[str, Any], ...]
    outcome: str
    success_count: int
    best_value: Value
    best_point: str
    started_at: str
    finished_at: str
    tool_version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "objective_id": self.objective_id,
            "objective": self.objective,
            "strategy": self.strategy,
            "starts": list(self.starts),
            "seeds": list(self.seeds),
            "outcome": self.outcome,
            "success_count": self.success_count,
            "best_value": value_to_json(self.best_value),
            "best_point": self.best_point,
            "trajectories": list(self.trajectories),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "RunRecord":
        return cls(
            run_id=doc["run_id"],
            objective=doc["objective"],
            objective_id=doc["objective_id"],
            strategy=doc["strategy"],
            starts=tuple(doc["starts"]),
            seeds=tuple(doc["seeds"]),
            trajectories=tuple(doc["trajectories"]),
            outcome=doc["outcome"],
            success_count=doc["success_count"],
            best_value=parse_value(doc["best_value"]),
            best_point=doc["best_point"],
            started_at=doc["started_at"],
            finished_at=doc["finished_at"],
            tool_version=doc["tool_version"],
        )


def _outcome(result: MultiStartResult) -> str:
    statuses = {tr.status for tr in result.trajectories}
    for status in (OPTIMUM, STEP_LIMIT, ASIDE_EXHAUSTED):
        if status in statuses:
            return status
    return LOCAL_OPTIMUM


class RunRepository:
    """Append-only directory of run records (``run-000001.json``, ...) with an
    objective registry in ``objectives.json``.  Single writer assumed."""

    REGISTRY = "objectives.json"

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _ensure(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def next_run_id(self) -> str:
        nums = [int(p.stem.split("-")[1]) for p in self.root.glob("run-*.json")] if self.root.is_dir() else []
        return f"run-{max(nums, default=0) + 1:06d}"

    def registry(self) -> dict[str, Any]:
        path = self.root / self.REGISTRY
        return json.loads(path.read_text()) if path.exists() else {}

    def register_objective(self, f: Objective) -> str:
        self._ensure()
        reg = self.registry()
        if f.objective_id not in reg:
            reg[f.objective_id] = f.to_dict()
            (self.root / self.REGISTRY).write_text(json.dumps(reg, indent=2, sort_keys=True) + "\n")
        return f.objective_id

    def append(self, record: RunRecord) -> Path:
        self._ensure()
        path = self.root / f"{record.run_id}.json"
        with open(path, "x") as fh:
            json.dump(record.to_dict(), fh, indent=2)
            fh.write("\n")
        return path

    def load(self, run_id: str) -> RunRecord:
        return RunRecord.from_dict(json.loads((self.root / f"{run_id}.json").read_text()))

    def __iter__(self) -> Iterator[RunRecord]:
        for path in sorted(self.root.glob("run-*.json")):
            yield RunRecord.from_dict(json.loads(path.read_text()))


def execute_plan(
    f: Objective, cfg: StrategyConfig, repository: RunRepository | str | Path | None = None, n: int | None = None
) -> RunRecord:
    """Run the multistart search described by ``cfg`` and persist its record.

    Pass ``repository=None`` to skip persistence.  Filesystem failures
    propagate as ``OSError``.
    """
    repo = RunRepository(repository) if isinstance(repository, (str, Path)) else repository
    started = _now()
    result = run_multistart(f, cfg, n)
    finished = _now()
    run_id = repo.next_run_id() if repo is not None else "run-unsaved"
    record = RunRecord(
        run_id=run_id,
        objective=f.to_dict(),
        objective_id=f.objective_id,
        strategy=cfg.to_dict(),
        starts=tuple(str(tr.start) for tr in result.trajectories),
        seeds=result.seeds,
        trajectories=tuple(tr.summary() for tr in result.trajectories),
        outcome=_outcome(result),
        success_count=result.success_count,
        best_value=result.best_value,
        best_point=str(result.best_point),
        started_at=started,
        finished_at=finished,
    )
    if repo is not None:
        repo.register_objective(f)
        repo.append(record)
    return record


def replay(record: RunRecord) -> MultiStartResult:
    """Re-run a recorded plan from its objective document, config and starts."""
    f = objective_from_dict(record.objective)
    cfg = StrategyConfig.from_dict(record.strategy)
    starts = [parse_permutation(s) for s in record.starts]
    return run_multistart(f, with_starts(cfg, starts) if not cfg.starts else cfg, len(starts[0]))


# --------------------------------------------------------------------------
# verification of the worked example


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    expected: Any
    computed: Any

    @property
    def passed(self) -> bool:
        return self.expected == self.computed

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "expected": self.expected,
            "computed": self.computed,
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {"all_passed": self.all_passed, "checks": [c.to_dict() for c in self.checks]}

    def format_text(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.description}")
            if not c.passed:
                lines.append(f"      expected {c.expected!r}")
                lines.append(f"      computed {c.computed!r}")
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _compact_set(ps: Iterable[Permutation]) -> list[str]:
    return sorted(p.compact() for p in ps)


def verify_paper(table: TableObjective | None = None) -> VerificationReport:
    """Recompute every published value of the n=4 example and the structural claims.

    ``table`` replaces the bundled worked-example table (used for fault injection).
    Only the first check reads the fixture; the others work from the
    recomputed 3-interchange distance function, so a corrupted fixture is
    pinpointed rather than cascading.
    """
    table = table if table is not None else table1_objective()
    g3 = build_search_distance_objective(4, 3)
    ident = Permutation.identity(4)
    s = parse_permutation("4312")
    checks: list[Check] = []

    checks.append(Check(
        "table1",
        "3-interchange distance to 1234 reproduces the 24-row worked-example table",
        {"".join(map(str, t)): value_to_json(table.values.get(t)) for t in all_tuples(4)},
        {"".join(map(str, t)): value_to_json(g3.value(t)) for t in all_tuples(4)},
    ))

    nbrs = sorted(k_neighborhood(s, 2))
    checks.append(Check(
        "counterexample_2search",
        "2-search from 4312: neighbors 3412, 4132, 4321 valued 2, 2, 3; stops at 4312",
        {"neighbors": {"3412": 2, "4132": 2, "4321": 3}, "final": "4312", "forward_steps": 0},
        {
            "neighbors": {p.compact(): g3(p) for p in nbrs},
            "final": (tr2 := run_trajectory(g3, s, StrategyConfig.fixed(2))).final_point.compact(),
            "forward_steps": tr2.forward_count,
        },
    ))

    tr3 = run_trajectory(g3, s, StrategyConfig.fixed(3))
    checks.append(Check(
        "counterexample_3search",
        "3-search from 4312 reaches 1234 in two forward steps",
        {"final": "1234", "forward_steps": 2},
        {"final": tr3.final_point.compact(), "forward_steps": tr3.forward_count},
    ))

    reach = reachability_to_optima(build_digraph(g3, 4, 2, "strict"), [ident])
    checks.append(Check(
        "strict_k2_reach",
        "in D^{2<} only 2143, 1243, 1324, 2134 (and 1234) reach the optimum",
        {"reach": ["1234", "1243", "1324", "2134", "2143"], "fraction": "5/24"},
        {"reach": _compact_set(reach), "fraction": _frac(Fraction(len(reach), 24))},
    ))

    weak = reachability_to_optima(build_digraph(g3, 4, 2, "weak"), [ident])
    checks.append(Check(
        "weak_k2_reach",
        "in D^{2<=} every permutation reaches the optimum",
        24,
        len(weak),
    ))

    checks.append(Check(
        "k3_neighborhood",
        "3-neighborhood of 1234 has 9 points after crossing out the duplicate",
        ["1243", "1324", "1342", "1423", "1432", "2134", "2314", "3124", "3214"],
        _compact_set(k_neighborhood(ident, 3)),
    ))

    strict3 = reachability_to_optima(build_digraph(g3, 4, 3, "strict"), [ident])
    checks.append(Check(
        "strict_k3_reach",
        "in D^{3<} every permutation reaches the optimum",
        24,
        len(strict3),
    ))

    checks.append(Check(
        "level_counts",
        "move-graph levels from 1234: n(n-1)/2+1 = 7 at k=2, 4 at k=3, 2 at k=4",
        {"2": 7, "3": 4, "4": 2},
        {str(k): compute_levels(4, k).level_count for k in (2, 3, 4)},
    ))

    g2_mismatch = {
        n: sum(
            1 for t, d in build_search_distance_objective(n, 2).values.items() if d != inversion_count(t)
        )
        for n in range(2, 7)
    }
    checks.append(Check(
        "g2_is_inversion_count",
        "2-interchange distance equals the inversion count for n = 2..6",
        {str(n): 0 for n in range(2, 7)},
        {str(n): c for n, c in g2_mismatch.items()},
    ))

    nesting: dict[str, list] = {}
    for n, objectives in ((4, [g3]), (5, [InversionObjective(5), build_search_distance_objective(5, 3)])):
        bad = nesting_violations(n, n, None, ("moves",))
        for f in objectives:
            bad += nesting_violations(n, n, f, ("strict", "weak"))
        nesting[str(n)] = bad
    checks.append(Check(
        "nesting",
        "O^k is contained in O^{k+1} for n = 4, 5 (moves, strict, weak)",
        {"4": [], "5": []},
        nesting,
    ))

    return VerificationReport(tuple(checks))
