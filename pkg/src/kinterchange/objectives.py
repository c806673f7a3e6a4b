"""Objective functions over permutations.

All values are exact: ``int`` or :class:`fractions.Fraction`.  Tie detection
(the equal-value arcs of the weak digraph) depends on exact comparison, so
floating point never enters an objective.

Objective documents are JSON.  The accepted shapes are::

    {"kind": "table", "n": 4, "values": {"1234": 0, "1243": 1, ...},
     "known_optima": ["1234"], "name": "table1"}
    {"kind": "inversion", "n": 5}
    {"kind": "search_distance", "n": 4, "k": 3, "target": "1234"}
    {"kind": "weighted_completion", "jobs": [{"p": 2, "w": 1}, ...]}
    {"kind": "flowshop2", "jobs": [{"a": 1, "b": 3}, ...]}

``known_optima`` and ``name`` are optional for every kind.  Numbers may be
integers, decimal strings or ``"p/q"`` strings.  Unknown fields are rejected.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, ClassVar, Iterable, Mapping, Sequence, Union

from .errors import (
    ArityMismatch,
    IncompleteTable,
    InvalidParams,
    InvalidPermutation,
    MissingTableEntry,
    ObjectiveParseError,
)
from .perm import (
    Permutation,
    all_tuples,
    as_tuple,
    bfs_distances,
    check_cap,
    check_k,
    inversion_count,
    parse_permutation,
)

Value = Union[int, Fraction]


def _normalize(v: Value) -> Value:
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def value_to_json(v: Value) -> int | str:
    v = _normalize(v)
    return v if isinstance(v, int) else f"{v.numerator}/{v.denominator}"


def parse_value(raw: Any, what: str = "value") -> Value:
    """Exact number from JSON: int, decimal/fraction string, or float (via its repr)."""
    if isinstance(raw, bool):
        raise ObjectiveParseError(f"{what}: booleans are not numbers")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, (float, str)):
        try:
            return _normalize(Fraction(str(raw).strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ObjectiveParseError(f"{what}: cannot read {raw!r} as an exact number")


class Objective:
    """Base class: a function ``f: P(n) -> int | Fraction`` to be minimized.

    Subclasses implement :meth:`value` on raw tuples; calling the objective on
    a :class:`Permutation` adds the arity check.
    """

    kind: ClassVar[str]
    value_domain: ClassVar[str] = "integer"

    n: int | None
    known_optima: frozenset[Permutation] | None
    name: str | None

    def value(self, t: tuple[int, ...]) -> Value:
        raise NotImplementedError

    def check_arity(self, n: int) -> None:
        if self.n is not None and n != self.n:
            raise ArityMismatch(f"objective expects n={self.n}, got n={n}")

    def __call__(self, s: Permutation | Sequence[int]) -> Value:
        t = as_tuple(s)
        self.check_arity(len(t))
        return self.value(t)

    def params(self) -> dict[str, Any]:
        return {}

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind}
        if self.name is not None:
            doc["name"] = self.name
        doc.update(self.params())
        if self.known_optima is not None:
            doc["known_optima"] = sorted(p.compact() for p in self.known_optima)
        return doc

    @property
    def objective_id(self) -> str:
        """Stable short id derived from the canonical document."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        digest = hashlib.sha256(blob.encode()).hexdigest()[:12]
        return f"{self.name or self.kind}-{digest}"


def evaluate(f: Objective, s: Permutation) -> Value:
    """``f(s)`` with arity checking."""
    return f(s)


# --------------------------------------------------------------------------
# table-backed objectives


@dataclass(frozen=True, eq=False)
class TableObjective(Objective):
    """Explicit value table over all ``n!`` permutations.

    ``order`` keeps the row order the table was given in (used for display and
    for 1-based node labels); it defaults to lexicographic.
    """

    kind: ClassVar[str] = "table"

    n: int
    values: Mapping[tuple[int, ...], Value] = field(repr=False)
    known_optima: frozenset[Permutation] | None = None
    name: str | None = None
    order: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if not self.order:
            object.__setattr__(self, "order", tuple(sorted(self.values)))

    @property
    def value_domain(self) -> str:  # type: ignore[override]
        ok = all(isinstance(v, int) for v in self.values.values())
        return "integer" if ok else "rational"

    def value(self, t: tuple[int, ...]) -> Value:
        try:
            return self.values[t]
        except KeyError:
            raise MissingTableEntry(f"no table entry for {''.join(map(str, t))}") from None

    def row_number(self, t: tuple[int, ...]) -> int:
        """1-based row of ``t`` in the table's own order."""
        return self._rows()[t]

    def _rows(self) -> dict[tuple[int, ...], int]:
        rows = self.__dict__.get("_row_cache")
        if rows is None:
            rows = {t: i for i, t in enumerate(self.order, start=1)}
            object.__setattr__(self, "_row_cache", rows)
        return rows

    def params(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "values": {"".join(map(str, t)) if self.n <= 9 else str(Permutation(t)): value_to_json(self.values[t])
                       for t in self.order},
        }


@dataclass(frozen=True, eq=False)
class SearchDistanceObjective(TableObjective):
    """``g_k``: minimum number of k-interchanges needed to reach ``target``."""

    kind: ClassVar[str] = "search_distance"

    k: int = 2
    target: Permutation | None = None

    def params(self) -> dict[str, Any]:
        return {"n": self.n, "k": self.k, "target": self.target.compact()}


def build_search_distance_objective(
    n: int, k: int, target: Permutation | None = None, cap: int | None = None
) -> SearchDistanceObjective:
    """Tabulate the k-move-graph distance to ``target`` for every permutation.

    With ``n=4, k=3`` and the identity target this is exactly the numerical
    example table of the original counterexample.

    Raises:
        InvalidK: ``k`` outside ``[2, n]``.
        CapExceeded: ``n`` above the enumeration cap.
    """
    check_k(n, k)
    check_cap(n, cap)
    target = target if target is not None else Permutation.identity(n)
    if target.n != n:
        raise ArityMismatch(f"target has n={target.n}, expected {n}")
    dist = bfs_distances([target.elements], k, cap)
    return SearchDistanceObjective(
        n=n,
        values=dist,
        known_optima=frozenset([target]),
        name=f"g{k}",
        order=tuple(all_tuples(n, cap)),
        k=k,
        target=target,
    )


def table1_objective() -> TableObjective:
    """The bundled n=4 worked example (3-interchange distance to 1234), rows in published order."""
    text = resources.files("kinterchange.data").joinpath("table1.json").read_text()
    return objective_from_dict(_loads_strict(text))


@dataclass(frozen=True, eq=False)
class InversionObjective(Objective):
    """Number of inversions; equals ``g_2`` towards the identity."""

    kind: ClassVar[str] = "inversion"

    n: int | None = None
    known_optima: frozenset[Permutation] | None = None
    name: str | None = None

    def value(self, t: tuple[int, ...]) -> int:
        return inversion_count(t)

    def params(self) -> dict[str, Any]:
        return {} if self.n is None else {"n": self.n}


# --------------------------------------------------------------------------
# scheduling


@dataclass(frozen=True)
class WeightedJobs:
    """Single-machine jobs: processing times ``p`` and weights ``w`` (job ``j`` at index ``j-1``)."""

    p: tuple[Value, ...]
    w: tuple[Value, ...]

    def __post_init__(self) -> None:
        if len(self.p) != len(self.w):
            raise InvalidParams("p and w must have the same length")
        if not self.p:
            raise InvalidParams("at least one job is required")
        if any(x <= 0 for x in self.p) or any(x <= 0 for x in self.w):
            raise InvalidParams("processing times and weights must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class FlowshopJobs:
    """Two-machine jobs: machine-1 times ``a`` and machine-2 times ``b``."""

    a: tuple[Value, ...]
    b: tuple[Value, ...]

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b):
            raise InvalidParams("a and b must have the same length")
        if not self.a:
            raise InvalidParams("at least one job is required")
        if any(x <= 0 for x in self.a) or any(x <= 0 for x in self.b):
            raise InvalidParams("machine times must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.a)


def _check_jobs_arity(jobs: WeightedJobs | FlowshopJobs, t: Sequence[int]) -> None:
    if len(t) != jobs.n:
        raise ArityMismatch(f"{jobs.n} jobs but permutation has n={len(t)}")


def weighted_completion_value(jobs: WeightedJobs, s: Permutation | Sequence[int]) -> Value:
    """Sum of ``w_j * C_j`` when jobs run in the order given by ``s``."""
    t = as_tuple(s)
    _check_jobs_arity(jobs, t)
    clock: Value = 0
    total: Value = 0
    for j in t:
        clock += jobs.p[j - 1]
        total += jobs.w[j - 1] * clock
    return _normalize(total)


def flowshop2_makespan(jobs: FlowshopJobs, s: Permutation | Sequence[int]) -> Value:
    """Makespan of the two-machine permutation flowshop in job order ``s``."""
    t = as_tuple(s)
    _check_jobs_arity(jobs, t)
    m1: Value = 0
    m2: Value = 0
    for j in t:
        m1 += jobs.a[j - 1]
        m2 = max(m1, m2) + jobs.b[j - 1]
    return _normalize(m2)


def smith_order(jobs: WeightedJobs) -> Permutation:
    """Jobs by non-increasing ``w/p``; ties by job number."""
    order = sorted(range(1, jobs.n + 1), key=lambda j: (-Fraction(jobs.w[j - 1]) / jobs.p[j - 1], j))
    return Permutation(tuple(order))


def johnson_order(jobs: FlowshopJobs) -> Permutation:
    """Johnson's rule: jobs with ``a <= b`` by ascending ``a``, then the rest by descending ``b``."""
    first = sorted((j for j in range(1, jobs.n + 1) if jobs.a[j - 1] <= jobs.b[j - 1]),
                   key=lambda j: (jobs.a[j - 1], j))
    last = sorted((j for j in range(1, jobs.n + 1) if jobs.a[j - 1] > jobs.b[j - 1]),
                  key=lambda j: (-jobs.b[j - 1], j))
    return Permutation(tuple(first + last))


def _jobs_value_domain(*cols: Iterable[Value]) -> str:
    return "integer" if all(isinstance(x, int) for c in cols for x in c) else "rational"


@dataclass(frozen=True, eq=False)
class WeightedCompletionObjective(Objective):
    kind: ClassVar[str] = "weighted_completion"

    jobs: WeightedJobs
    known_optima: frozenset[Permutation] | None = None
    name: str | None = None

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.jobs.n

    @property
    def value_domain(self) -> str:  # type: ignore[override]
        return _jobs_value_domain(self.jobs.p, self.jobs.w)

    def value(self, t: tuple[int, ...]) -> Value:
        return weighted_completion_value(self.jobs, t)

    def params(self) -> dict[str, Any]:
        return {"jobs": [{"p": value_to_json(p), "w": value_to_json(w)} for p, w in zip(self.jobs.p, self.jobs.w)]}


@dataclass(frozen=True, eq=False)
class Flowshop2Objective(Objective):
    kind: ClassVar[str] = "flowshop2"

    jobs: FlowshopJobs
    known_optima: frozenset[Permutation] | None = None
    name: str | None = None

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.jobs.n

    @property
    def value_domain(self) -> str:  # type: ignore[override]
        return _jobs_value_domain(self.jobs.a, self.jobs.b)

    def value(self, t: tuple[int, ...]) -> Value:
        return flowshop2_makespan(self.jobs, t)

    def params(self) -> dict[str, Any]:
        return {"jobs": [{"a": value_to_json(a), "b": value_to_json(b)} for a, b in zip(self.jobs.a, self.jobs.b)]}


# --------------------------------------------------------------------------
# optima


def global_optima(f: Objective, n: int | None = None, cap: int | None = None) -> frozenset[Permutation]:
    """Declared optima if present, otherwise every minimizer found by enumeration."""
    if f.known_optima is not None:
        return f.known_optima
    n = f.n if n is None else n
    if n is None:
        raise ArityMismatch("objective has no fixed n; pass n explicitly")
    f.check_arity(n)
    best: Value | None = None
    argmin: list[tuple[int, ...]] = []
    for t in all_tuples(n, cap):
        v = f.value(t)
        if best is None or v < best:
            best, argmin = v, [t]
        elif v == best:
            argmin.append(t)
    return frozenset(Permutation(t) for t in argmin)


def optimum_value(f: Objective, n: int | None = None, cap: int | None = None) -> Value | None:
    """Minimum of ``f`` when it can be identified (declared or enumerable), else ``None``."""
    n = f.n if n is None else n
    if f.known_optima is None and (n is None or n > (cap if cap is not None else 9)):
        return None
    opt = global_optima(f, n, cap)
    return f(next(iter(opt)))


# --------------------------------------------------------------------------
# random instances


def random_weighted_jobs(n: int, rng: random.Random, high: int = 10) -> WeightedJobs:
    return WeightedJobs(tuple(rng.randint(1, high) for _ in range(n)), tuple(rng.randint(1, high) for _ in range(n)))


def random_flowshop_jobs(n: int, rng: random.Random, high: int = 10) -> FlowshopJobs:
    return FlowshopJobs(tuple(rng.randint(1, high) for _ in range(n)), tuple(rng.randint(1, high) for _ in range(n)))


def random_table_objective(n: int, rng: random.Random, high: int | None = None, name: str | None = None) -> TableObjective:
    """Uniform integer values in ``[0, high]`` (default ``n``) for every permutation."""
    high = n if high is None else high
    values = {t: rng.randint(0, high) for t in all_tuples(n)}
    return TableObjective(n=n, values=values, name=name)


# --------------------------------------------------------------------------
# documents

_COMMON = {"kind", "name", "known_optima"}
_FIELDS = {
    "table": _COMMON | {"n", "values"},
    "inversion": _COMMON | {"n"},
    "search_distance": _COMMON | {"n", "k", "target"},
    "weighted_completion": _COMMON | {"jobs"},
    "flowshop2": _COMMON | {"jobs"},
}
_JOB_FIELDS = {"weighted_completion": ("p", "w"), "flowshop2": ("a", "b")}


def _no_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, val in pairs:
        if key in out:
            raise ObjectiveParseError(f"duplicate key {key!r}")
        out[key] = val
    return out


def _loads_strict(text: str) -> Any:
    try:
        return json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ObjectiveParseError(f"invalid JSON: {exc}") from None


def _int_field(doc: Mapping[str, Any], key: str) -> int:
    val = doc.get(key)
    if not isinstance(val, int) or isinstance(val, bool):
        raise ObjectiveParseError(f"field {key!r} must be an integer")
    return val


def _perm_field(raw: Any, n: int | None, what: str) -> Permutation:
    if not isinstance(raw, str):
        raise ObjectiveParseError(f"{what}: expected a permutation string, got {raw!r}")
    try:
        return parse_permutation(raw, n)
    except InvalidPermutation as exc:
        raise ObjectiveParseError(f"{what}: {exc}") from None


def objective_from_dict(doc: Any) -> Objective:
    """Build an objective from a parsed document; strict about fields and domains."""
    if not isinstance(doc, dict):
        raise ObjectiveParseError("objective document must be a JSON object")
    kind = doc.get("kind")
    if kind not in _FIELDS:
        raise ObjectiveParseError(f"unknown objective kind {kind!r}")
    unknown = set(doc) - _FIELDS[kind]
    if unknown:
        raise ObjectiveParseError(f"unknown fields for kind {kind!r}: {sorted(unknown)}")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ObjectiveParseError("field 'name' must be a string")

    n_hint = doc.get("n") if isinstance(doc.get("n"), int) else None
    if kind in _JOB_FIELDS and isinstance(doc.get("jobs"), list):
        n_hint = len(doc["jobs"])
    known = None
    if "known_optima" in doc:
        raw = doc["known_optima"]
        if not isinstance(raw, list) or not raw:
            raise ObjectiveParseError("known_optima must be a non-empty list")
        known = frozenset(_perm_field(x, n_hint, "known_optima") for x in raw)

    if kind == "table":
        n = _int_field(doc, "n")
        if n < 1:
            raise InvalidParams("n must be positive")
        check_cap(n)
        raw_values = doc.get("values")
        if not isinstance(raw_values, dict):
            raise ObjectiveParseError("table objective needs a 'values' object")
        values: dict[tuple[int, ...], Value] = {}
        order = []
        for key, raw in raw_values.items():
            t = _perm_field(key, n, "values key").elements
            if t in values:
                raise ObjectiveParseError(f"permutation {key!r} listed twice")
            values[t] = parse_value(raw, f"value of {key}")
            order.append(t)
        missing = [
            "".join(map(str, t)) if n <= 9 else str(Permutation(t))
            for t in all_tuples(n) if t not in values
        ]
        if missing:
            raise IncompleteTable(missing)
        return TableObjective(n=n, values=values, known_optima=known, name=name, order=tuple(order))

    if kind == "inversion":
        n = doc.get("n")
        if n is not None:
            n = _int_field(doc, "n")
        return InversionObjective(n=n, known_optima=known, name=name)

    if kind == "search_distance":
        n = _int_field(doc, "n")
        k = _int_field(doc, "k")
        target = _perm_field(doc.get("target"), n, "target")
        obj = build_search_distance_objective(n, k, target)
        if name is not None or known is not None:
            obj = SearchDistanceObjective(
                n=n, values=obj.values, known_optima=known or obj.known_optima,
                name=name or obj.name, order=obj.order, k=k, target=target,
            )
        return obj

    jobs_raw = doc.get("jobs")
    if not isinstance(jobs_raw, list) or not jobs_raw:
        raise ObjectiveParseError("'jobs' must be a non-empty list")
    keys = _JOB_FIELDS[kind]
    cols: list[list[Value]] = [[], []]
    for i, job in enumerate(jobs_raw, start=1):
        if not isinstance(job, dict) or set(job) != set(keys):
            raise ObjectiveParseError(f"job {i} must have exactly the fields {list(keys)}")
        for c, key in enumerate(keys):
            cols[c].append(parse_value(job[key], f"job {i} field {key!r}"))
    if kind == "weighted_completion":
        return WeightedCompletionObjective(WeightedJobs(tuple(cols[0]), tuple(cols[1])), known, name)
    return Flowshop2Objective(FlowshopJobs(tuple(cols[0]), tuple(cols[1])), known, name)


def load_objective(path: str | Path) -> Objective:
    """Read an objective document from ``path``.

    Raises:
        ObjectiveParseError: Malformed JSON, wrong types or unknown fields.
        IncompleteTable: A table lacks some of its ``n!`` entries.
        InvalidParams: Parameters outside their domain.
    """
    return objective_from_dict(_loads_strict(Path(path).read_text()))


def save_objective(f: Objective, path: str | Path) -> None:
    Path(path).write_text(json.dumps(f.to_dict(), indent=2) + "\n")
