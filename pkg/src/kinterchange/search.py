"""k-interchange local search.

One-line trajectories come in three kinds:

``F``    forward (strictly improving) steps only;
``FA``   forward steps, plus aside (equal-value) steps to unvisited points
         when no forward step exists;
``FAB``  as ``FA``, plus backward steps along the trajectory when both are
         exhausted (depth-first search with memory).

The window size follows either a fixed ``k`` or an adaptive schedule that
starts at ``k_min``, escalates by one whenever the current point has no
improving k-neighbor, and drops back to ``k_min`` after every move.
Multi-line variants (nF, nFA, nFAB) run independent one-line trajectories
from several starts.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

from .errors import InvalidK, KInterchangeError
from .objectives import Objective, Value, optimum_value, parse_value, value_to_json
from .perm import (
    DEFAULT_ENUMERATION_CAP,
    Permutation,
    WindowMove,
    check_k,
    move_between,
    neighbor_tuples,
    parse_permutation,
)

TRAJECTORY_KINDS = ("F", "FA", "FAB")
PIVOTS = ("first", "best", "random")

FORWARD, ASIDE, BACKWARD = "forward", "aside", "backward"

OPTIMUM = "Optimum"
LOCAL_OPTIMUM = "LocalOptimum"
STEP_LIMIT = "StepLimit"
ASIDE_EXHAUSTED = "AsideExhausted"


@dataclass(frozen=True)
class StrategyConfig:
    """How to run one or more trajectories.

    ``k_min == k_max`` is a fixed-k schedule.  ``starts`` lists explicit start
    points; otherwise ``random_starts`` points are drawn from ``seed``.
    ``aside_budget=None`` allows unlimited aside steps.  ``lower_bound`` lets
    the caller declare a value that, once reached, is known to be optimal.
    """

    trajectory_kind: str = "F"
    k_min: int = 2
    k_max: int = 2
    pivot: str = "first"
    starts: tuple[Permutation, ...] = ()
    random_starts: int = 0
    seed: int = 0
    step_limit: int = 10_000
    aside_budget: int | None = None
    lower_bound: Value | None = None

    @classmethod
    def fixed(cls, k: int, **kwargs: Any) -> "StrategyConfig":
        return cls(k_min=k, k_max=k, **kwargs)

    @classmethod
    def adaptive(cls, k_min: int, k_max: int, **kwargs: Any) -> "StrategyConfig":
        return cls(k_min=k_min, k_max=k_max, **kwargs)

    @property
    def schedule(self) -> str:
        return "fixed" if self.k_min == self.k_max else "adaptive"

    @property
    def multi_kind(self) -> str:
        """``nF`` / ``nFA`` / ``nFAB``."""
        return "n" + self.trajectory_kind

    def validate(self, n: int) -> None:
        if self.trajectory_kind not in TRAJECTORY_KINDS:
            raise KInterchangeError(f"unknown trajectory kind {self.trajectory_kind!r}")
        if self.pivot not in PIVOTS:
            raise KInterchangeError(f"unknown pivot rule {self.pivot!r}")
        check_k(n, self.k_min)
        check_k(n, self.k_max)
        if self.k_min > self.k_max:
            raise InvalidK(f"k_min={self.k_min} exceeds k_max={self.k_max}")
        if self.step_limit <= 0:
            raise KInterchangeError("step_limit must be positive")
        if self.aside_budget is not None and self.aside_budget < 0:
            raise KInterchangeError("aside_budget must be non-negative")
        if self.random_starts < 0:
            raise KInterchangeError("random_starts must be non-negative")
        for s in self.starts:
            if s.n != n:
                raise KInterchangeError(f"start {s} has n={s.n}, expected {n}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "trajectory_kind": self.trajectory_kind,
            "k_schedule": self.schedule,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "pivot": self.pivot,
            "starts": [str(s) for s in self.starts],
            "random_starts": self.random_starts,
            "seed": self.seed,
            "step_limit": self.step_limit,
            "aside_budget": self.aside_budget,
            "lower_bound": None if self.lower_bound is None else value_to_json(self.lower_bound),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "StrategyConfig":
        known = {
            "trajectory_kind", "k_schedule", "k_min", "k_max", "pivot", "starts",
            "random_starts", "seed", "step_limit", "aside_budget", "lower_bound",
        }
        unknown = set(doc) - known
        if unknown:
            raise KInterchangeError(f"unknown strategy fields: {sorted(unknown)}")
        kw = {key: doc[key] for key in known - {"k_schedule", "starts", "lower_bound"} if key in doc}
        if "starts" in doc:
            kw["starts"] = tuple(parse_permutation(s) for s in doc["starts"])
        if doc.get("lower_bound") is not None:
            kw["lower_bound"] = parse_value(doc["lower_bound"], "lower_bound")
        cfg = cls(**kw)
        if doc.get("k_schedule") == "fixed" and cfg.k_min != cfg.k_max:
            raise KInterchangeError("fixed schedule requires k_min == k_max")
        return cfg


@dataclass(frozen=True)
class TrajectoryStep:
    point: Permutation
    value: Value
    kind: str
    k: int
    move: WindowMove

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": str(self.point),
            "value": value_to_json(self.value),
            "kind": self.kind,
            "k": self.k,
            "move": self.move.to_dict(),
        }


@dataclass(frozen=True)
class SearchTrajectory:
    start: Permutation
    start_value: Value
    steps: tuple[TrajectoryStep, ...]
    status: str
    final_point: Permutation
    final_value: Value

    def _count(self, kind: str) -> int:
        return sum(1 for s in self.steps if s.kind == kind)

    @property
    def forward_count(self) -> int:
        return self._count(FORWARD)

    @property
    def aside_count(self) -> int:
        return self._count(ASIDE)

    @property
    def backward_count(self) -> int:
        return self._count(BACKWARD)

    @property
    def points(self) -> list[Permutation]:
        return [self.start] + [s.point for s in self.steps]

    def summary(self) -> dict[str, Any]:
        return {
            "start": str(self.start),
            "start_value": value_to_json(self.start_value),
            "status": self.status,
            "final_point": str(self.final_point),
            "final_value": value_to_json(self.final_value),
            "forward_count": self.forward_count,
            "aside_count": self.aside_count,
            "backward_count": self.backward_count,
        }

    def to_dict(self) -> dict[str, Any]:
        doc = self.summary()
        doc["steps"] = [s.to_dict() for s in self.steps]
        return doc


def _pick(
    candidates: list[tuple[int, ...]], pivot: str, value: Callable[[tuple[int, ...]], Value], rng: random.Random | None
) -> tuple[int, ...]:
    if pivot == "first":
        return min(candidates)
    if pivot == "best":
        return min(candidates, key=lambda x: (value(x), x))
    if rng is None:
        raise KInterchangeError("random pivot needs a random generator")
    return rng.choice(sorted(candidates))


def search_step(
    s: Permutation, k: int, f: Objective, pivot: str = "first", rng: random.Random | None = None
) -> tuple[Permutation | None, str | None]:
    """One neighborhood-search step: an improving k-neighbor chosen by ``pivot``.

    Returns ``(neighbor, "forward")``, or ``(None, None)`` at a k-local optimum.
    """
    check_k(s.n, k)
    f.check_arity(s.n)
    here = f.value(s.elements)
    improving = [x for x in neighbor_tuples(s.elements, k) if f.value(x) < here]
    if not improving:
        return None, None
    return Permutation(_pick(improving, pivot, f.value, rng)), FORWARD


def is_local_optimum(f: Objective, s: Permutation, k: int) -> bool:
    """True iff no k-neighbor of ``s`` is strictly better."""
    check_k(s.n, k)
    f.check_arity(s.n)
    here = f.value(s.elements)
    return all(f.value(x) >= here for x in neighbor_tuples(s.elements, k))


_UNSET: Any = object()


def resolve_optimum_value(f: Objective, cfg: StrategyConfig, n: int, cap: int | None = None) -> Value | None:
    """Value that identifies an optimum: ``lower_bound``, declared optima, or enumeration."""
    if cfg.lower_bound is not None:
        return cfg.lower_bound
    return optimum_value(f, n, DEFAULT_ENUMERATION_CAP if cap is None else cap)


def run_trajectory(
    f: Objective,
    start: Permutation,
    cfg: StrategyConfig,
    rng: random.Random | None = None,
    optimum: Value | None = _UNSET,
) -> SearchTrajectory:
    """Run one trajectory of kind ``cfg.trajectory_kind`` from ``start``.

    Running out of ``step_limit`` is reported through ``status``, never raised.
    ``optimum`` may be passed to skip the per-call optimum identification.
    """
    n = start.n
    f.check_arity(n)
    cfg.validate(n)
    if optimum is _UNSET:
        optimum = resolve_optimum_value(f, cfg, n)
    if rng is None:
        rng = random.Random(cfg.seed)

    cache: dict[tuple[int, ...], Value] = {}

    def value(t: tuple[int, ...]) -> Value:
        v = cache.get(t)
        if v is None:
            v = cache[t] = f.value(t)
        return v

    allow_aside = cfg.trajectory_kind in ("FA", "FAB")
    allow_back = cfg.trajectory_kind == "FAB"

    t = start.elements
    v = value(t)
    visited = {t}
    # (point, move that led here, k of that move)
    path: list[tuple[tuple[int, ...], WindowMove | None]] = [(t, None)]
    steps: list[TrajectoryStep] = []
    best_t, best_v = t, v
    k = cfg.k_min
    aside_used = 0
    aside_blocked = False

    def advance(x: tuple[int, ...], kind: str) -> None:
        nonlocal t, v, best_t, best_v
        move = move_between(Permutation(t), Permutation(x), k)
        t, v = x, value(x)
        visited.add(t)
        path.append((t, move))
        steps.append(TrajectoryStep(Permutation(t), v, kind, k, move))
        if v < best_v:
            best_t, best_v = t, v

    while True:
        if optimum is not None and v <= optimum:
            status = OPTIMUM
            break
        if len(steps) >= cfg.step_limit:
            status = STEP_LIMIT
            break

        nbrs = neighbor_tuples(t, k)
        improving = [x for x in nbrs if x not in visited and value(x) < v]
        if improving:
            advance(_pick(improving, cfg.pivot, value, rng), FORWARD)
            k = cfg.k_min
            continue
        if k < cfg.k_max:
            k += 1
            continue

        if allow_aside:
            equal = [x for x in nbrs if x not in visited and value(x) == v]
            if equal:
                if cfg.aside_budget is not None and aside_used >= cfg.aside_budget:
                    aside_blocked = True
                else:
                    advance(_pick(equal, cfg.pivot, value, rng), ASIDE)
                    aside_used += 1
                    k = cfg.k_min
                    continue

        if allow_back and len(path) > 1:
            _, move = path.pop()
            t = path[-1][0]
            v = value(t)
            steps.append(TrajectoryStep(Permutation(t), v, BACKWARD, move.k, move.inverse()))
            k = cfg.k_min
            continue

        status = ASIDE_EXHAUSTED if aside_blocked else LOCAL_OPTIMUM
        break

    final_t, final_v = (best_t, best_v) if allow_back else (t, v)
    if status == LOCAL_OPTIMUM and optimum is not None and final_v <= optimum:
        status = OPTIMUM
    return SearchTrajectory(
        start=start,
        start_value=value(start.elements),
        steps=tuple(steps),
        status=status,
        final_point=Permutation(final_t),
        final_value=final_v,
    )


# --------------------------------------------------------------------------
# multi-line


def derive_seed(seed: int, index: int) -> int:
    """Deterministic per-start seed."""
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def resolve_starts(cfg: StrategyConfig, n: int) -> tuple[Permutation, ...]:
    """Explicit starts if given, else ``random_starts`` uniform draws seeded by ``cfg.seed``."""
    if cfg.starts:
        return cfg.starts
    rng = random.Random(cfg.seed)
    return tuple(Permutation(tuple(rng.sample(range(1, n + 1), n))) for _ in range(cfg.random_starts))


@dataclass(frozen=True)
class MultiStartResult:
    kind: str
    trajectories: tuple[SearchTrajectory, ...]
    seeds: tuple[int, ...] = field(repr=False)

    @property
    def success_count(self) -> int:
        return sum(1 for tr in self.trajectories if tr.status == OPTIMUM)

    @property
    def best_value(self) -> Value:
        return min(tr.final_value for tr in self.trajectories)

    @property
    def best_point(self) -> Permutation:
        return min((tr.final_value, tr.final_point) for tr in self.trajectories)[1]

    def to_dict(self, steps: bool = False) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "success_count": self.success_count,
            "runs": len(self.trajectories),
            "best_value": value_to_json(self.best_value),
            "best_point": str(self.best_point),
            "seeds": list(self.seeds),
            "trajectories": [tr.to_dict() if steps else tr.summary() for tr in self.trajectories],
        }


def run_multistart(f: Objective, cfg: StrategyConfig, n: int | None = None) -> MultiStartResult:
    """Independent trajectories from every start; results ordered by start index."""
    n = f.n if n is None else n
    if n is None:
        if not cfg.starts:
            raise KInterchangeError("cannot infer n: objective has no fixed order and no starts given")
        n = cfg.starts[0].n
    cfg.validate(n)
    starts = resolve_starts(cfg, n)
    if not starts:
        raise KInterchangeError("no start points: set starts or random_starts")
    optimum = resolve_optimum_value(f, cfg, n)
    seeds = tuple(derive_seed(cfg.seed, i) for i in range(len(starts)))
    trajectories = tuple(
        run_trajectory(f, s, cfg, random.Random(seed), optimum) for s, seed in zip(starts, seeds)
    )
    return MultiStartResult(cfg.multi_kind, trajectories, seeds)


def with_starts(cfg: StrategyConfig, starts: Sequence[Permutation]) -> StrategyConfig:
    return replace(cfg, starts=tuple(starts), random_starts=0)
