"""Operational digraphs over the full permutation space.

Three arc sets are built on the ``n!`` nodes for a window size ``k``:

* ``moves``  -- every k-interchange (symmetric; the graph ``G^k``),
* ``strict`` -- only moves to a strictly better value (``D^{k<}``),
* ``weak``   -- moves to a better-or-equal value (``D^{k<=}``); an equal-value
  pair yields arcs in both directions.

Nodes are indexed by lexicographic rank and arcs are stored as adjacency lists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .errors import EmptyOptima, InvalidK, MissingObjective
from .objectives import Objective, TableObjective, Value, global_optima, value_to_json
from .perm import (
    Permutation,
    all_tuples,
    as_tuple,
    bfs_distances,
    check_cap,
    check_k,
    neighbor_tuples,
)

MODES = ("moves", "strict", "weak")


@dataclass(frozen=True, eq=False)
class OperationalDigraph:
    n: int
    k: int
    mode: str
    nodes: tuple[tuple[int, ...], ...] = field(repr=False)
    arcs: tuple[tuple[int, ...], ...] = field(repr=False)
    objective: Objective | None = field(default=None, repr=False)
    values: tuple[Value, ...] | None = field(default=None, repr=False)

    @property
    def objective_id(self) -> str | None:
        return None if self.objective is None else self.objective.objective_id

    @property
    def index(self) -> dict[tuple[int, ...], int]:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {t: i for i, t in enumerate(self.nodes)}
            object.__setattr__(self, "_index", idx)
        return idx

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, i: int) -> Permutation:
        return Permutation(self.nodes[i])

    def successors(self, p: Permutation | tuple[int, ...]) -> list[Permutation]:
        return [self.node(j) for j in self.arcs[self.index[as_tuple(p)]]]

    def arc_set(self) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Arcs as pairs of permutation tuples (comparable across ``k``)."""
        return {(self.nodes[u], self.nodes[v]) for u, succ in enumerate(self.arcs) for v in succ}

    @property
    def arc_count(self) -> int:
        return sum(len(s) for s in self.arcs)

    @property
    def edge_count(self) -> int:
        """Undirected edges: arcs counted once per unordered pair."""
        return len({frozenset(a) for a in self.arc_set()})

    def reverse_arcs(self) -> list[list[int]]:
        rev: list[list[int]] = [[] for _ in self.nodes]
        for u, succ in enumerate(self.arcs):
            for v in succ:
                rev[v].append(u)
        return rev


def build_digraph(
    f: Objective | None, n: int, k: int, mode: str = "moves", cap: int | None = None
) -> OperationalDigraph:
    """Build ``G^k`` (``moves``), ``D^{k<}`` (``strict``) or ``D^{k<=}`` (``weak``).

    Raises:
        CapExceeded: ``n`` above the enumeration cap.
        InvalidK: ``k`` outside ``[2, n]``.
        MissingObjective: ``f`` is ``None`` for a value-filtered mode.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    check_cap(n, cap)
    check_k(n, k)
    if mode != "moves" and f is None:
        raise MissingObjective(f"mode {mode!r} needs an objective")
    if f is not None:
        f.check_arity(n)

    nodes = tuple(all_tuples(n, cap))
    index = {t: i for i, t in enumerate(nodes)}
    values = tuple(f.value(t) for t in nodes) if f is not None else None
    arcs = []
    for i, t in enumerate(nodes):
        succ = sorted(index[x] for x in neighbor_tuples(t, k))
        if mode == "strict":
            succ = [j for j in succ if values[j] < values[i]]
        elif mode == "weak":
            succ = [j for j in succ if values[j] <= values[i]]
        arcs.append(tuple(succ))
    graph = OperationalDigraph(n, k, mode, nodes, tuple(arcs), f, values)
    object.__setattr__(graph, "_index", index)
    return graph


# --------------------------------------------------------------------------
# levels


@dataclass(frozen=True)
class LevelStructure:
    """Move-graph distance ``g_k`` to ``target`` and the induced levels."""

    n: int
    k: int
    target: Permutation
    distances: dict[Permutation, int] = field(repr=False)
    levels: tuple[tuple[Permutation, ...], ...] = field(repr=False)

    @property
    def L(self) -> int:
        return len(self.levels) - 1

    @property
    def level_count(self) -> int:
        return len(self.levels)


def compute_levels(n: int, k: int, target: Permutation | None = None, cap: int | None = None) -> LevelStructure:
    """BFS levels of the k-move graph around ``target`` (identity by default)."""
    check_cap(n, cap)
    target = target if target is not None else Permutation.identity(n)
    dist = bfs_distances([target.elements], k, cap)
    L = max(dist.values())
    buckets: list[list[Permutation]] = [[] for _ in range(L + 1)]
    for t in sorted(dist):
        buckets[dist[t]].append(Permutation(t))
    return LevelStructure(
        n=n,
        k=k,
        target=target,
        distances={Permutation(t): d for t, d in dist.items()},
        levels=tuple(tuple(b) for b in buckets),
    )


# --------------------------------------------------------------------------
# reachability and optima


def _target_indices(d: OperationalDigraph, optima: Iterable[Permutation]) -> list[int]:
    targets = sorted({d.index[as_tuple(p)] for p in optima})
    if not targets:
        raise EmptyOptima("optimum set is empty")
    return targets


def distances_to_optima(d: OperationalDigraph, optima: Iterable[Permutation]) -> dict[int, int]:
    """Shortest directed path length (in arcs) from each node that can reach ``optima``."""
    rev = d.reverse_arcs()
    targets = _target_indices(d, optima)
    dist = {t: 0 for t in targets}
    queue = deque(targets)
    while queue:
        v = queue.popleft()
        for u in rev[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def reachability_to_optima(d: OperationalDigraph, optima: Iterable[Permutation]) -> frozenset[Permutation]:
    """Every node with a directed path (possibly empty) to some optimum.

    Raises:
        EmptyOptima: ``optima`` is empty.
    """
    return frozenset(d.node(i) for i in distances_to_optima(d, optima))


def enumerate_local_optima(f: Objective, n: int | None = None, k: int = 2, cap: int | None = None) -> frozenset[Permutation]:
    """All points whose k-neighborhood contains no strictly better point."""
    n = f.n if n is None else n
    check_cap(n, cap)
    check_k(n, k)
    f.check_arity(n)
    out = []
    for t in all_tuples(n, cap):
        here = f.value(t)
        if all(f.value(x) >= here for x in neighbor_tuples(t, k)):
            out.append(Permutation(t))
    return frozenset(out)


def nesting_violations(
    n: int, kmax: int, f: Objective | None = None, modes: Iterable[str] | None = None, cap: int | None = None
) -> list[tuple[str, int, int]]:
    """``(mode, k, count)`` for every ``k`` whose arc set is not inside that of ``k+1``."""
    check_cap(n, cap)
    if kmax > n:
        raise InvalidK(f"kmax={kmax} exceeds n={n}")
    if modes is None:
        modes = MODES if f is not None else ("moves",)
    bad = []
    for mode in modes:
        prev = None
        for k in range(2, kmax + 1):
            arcs = build_digraph(f if mode != "moves" else None, n, k, mode, cap).arc_set()
            if prev is not None:
                missing = len(prev - arcs)
                if missing:
                    bad.append((mode, k - 1, missing))
            prev = arcs
    return bad


def verify_nesting(
    n: int, kmax: int, f: Objective | None = None, modes: Iterable[str] | None = None, cap: int | None = None
) -> bool:
    """True iff ``O^k ⊆ O^{k+1}`` for every ``k`` in ``[2, kmax-1]``.

    Only the move graphs are compared unless an objective is given, in which
    case the strict and weak arc sets are checked as well.
    """
    return not nesting_violations(n, kmax, f, modes, cap)


def plateau_escape_set(f: Objective, n: int, k: int, optima: Iterable[Permutation] | None = None) -> frozenset[Permutation]:
    """Least fixpoint of "is optimal, or has a better-or-equal neighbor already in the set".

    Computed by sweeping all points until nothing changes; this is independent
    of :func:`build_digraph` and serves as a cross-check for weak-mode
    reachability.
    """
    check_k(n, k)
    optima = global_optima(f, n) if optima is None else optima
    good = {as_tuple(p) for p in optima}
    if not good:
        raise EmptyOptima("optimum set is empty")
    points = all_tuples(n)
    values = {t: f.value(t) for t in points}
    nbrs = {t: [x for x in neighbor_tuples(t, k) if values[x] <= values[t]] for t in points}
    changed = True
    while changed:
        changed = False
        for t in points:
            if t not in good and any(x in good for x in nbrs[t]):
                good.add(t)
                changed = True
    return frozenset(Permutation(t) for t in good)


def plateau_criterion(f: Objective, n: int, k: int) -> bool:
    """Every non-optimal point either improves, or walks along equal values to one that does."""
    check_k(n, k)
    opt = {p.elements for p in global_optima(f, n)}
    points = all_tuples(n)
    values = {t: f.value(t) for t in points}
    can_improve = {t: any(values[x] < values[t] for x in neighbor_tuples(t, k)) for t in points}
    for t in points:
        if t in opt or can_improve[t]:
            continue
        seen = {t}
        queue = deque([t])
        found = False
        while queue and not found:
            u = queue.popleft()
            for x in neighbor_tuples(u, k):
                if values[x] == values[u] and x not in seen:
                    if can_improve[x]:
                        found = True
                        break
                    seen.add(x)
                    queue.append(x)
        if not found:
            return False
    return True


# --------------------------------------------------------------------------
# report


def _perm_list(ps: Iterable[Permutation]) -> list[str]:
    return [p.compact() for p in sorted(ps)]


@dataclass(frozen=True)
class LandscapeReport:
    n: int
    k: int
    mode: str
    objective_id: str
    global_optima: frozenset[Permutation]
    optimum_value: Value
    reach_set: frozenset[Permutation]
    reach_fraction: Fraction
    local_optima: frozenset[Permutation]
    level_count: int
    max_shortest_path_to_optimum: int
    path_bound: int
    nesting_verified: bool

    @property
    def property1(self) -> bool:
        """Every point has a directed path to an optimum."""
        return self.reach_fraction == 1

    @property
    def within_path_bound(self) -> bool:
        """Reachable points need at most ``n(n-1)/2`` arcs to get to an optimum."""
        return self.max_shortest_path_to_optimum <= self.path_bound

    @property
    def property2(self) -> bool:
        return self.property1 and self.within_path_bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "objective_id": self.objective_id,
            "global_optima": _perm_list(self.global_optima),
            "optimum_value": value_to_json(self.optimum_value),
            "reach_set": _perm_list(self.reach_set),
            "reach_count": len(self.reach_set),
            "reach_fraction": f"{self.reach_fraction.numerator}/{self.reach_fraction.denominator}",
            "property1": self.property1,
            "local_optima": _perm_list(self.local_optima),
            "level_count": self.level_count,
            "max_shortest_path_to_optimum": self.max_shortest_path_to_optimum,
            "path_bound": self.path_bound,
            "within_path_bound": self.within_path_bound,
            "property2": self.property2,
            "nesting_verified": self.nesting_verified,
        }


def analyze(f: Objective, n: int | None = None, k: int = 2, mode: str = "strict", cap: int | None = None) -> LandscapeReport:
    """Exhaustive landscape summary of ``f`` under k-interchange in ``mode``.

    ``level_count`` is the number of distinct move-graph distances to the
    optimum set (``L + 1``); ``max_shortest_path_to_optimum`` counts arcs of
    the filtered digraph over the points that can reach an optimum at all.
    ``nesting_verified`` checks this mode's arcs at ``k`` against ``k + 1``.
    """
    n = f.n if n is None else n
    if mode not in ("strict", "weak"):
        raise ValueError("analyze expects mode 'strict' or 'weak'")
    d = build_digraph(f, n, k, mode, cap)
    optima = global_optima(f, n, cap)
    dist = distances_to_optima(d, optima)
    levels = bfs_distances([p.elements for p in optima], k, cap)
    nested = True if k == n else verify_nesting(n, k + 1, f, modes=(mode,), cap=cap)
    return LandscapeReport(
        n=n,
        k=k,
        mode=mode,
        objective_id=f.objective_id,
        global_optima=optima,
        optimum_value=f(next(iter(optima))),
        reach_set=frozenset(d.node(i) for i in dist),
        reach_fraction=Fraction(len(dist), len(d)),
        local_optima=enumerate_local_optima(f, n, k, cap),
        level_count=max(levels.values()) + 1,
        max_shortest_path_to_optimum=max(dist.values()),
        path_bound=n * (n - 1) // 2,
        nesting_verified=nested,
    )


# --------------------------------------------------------------------------
# DOT export


def _node_number(f: Objective | None, t: tuple[int, ...], rank: int) -> int:
    if isinstance(f, TableObjective):
        return f.row_number(t)
    return rank + 1


def to_dot(d: OperationalDigraph, f: Objective | None = None) -> str:
    """Render ``d`` as DOT text.

    Nodes are labelled ``"<row>: <perm>"`` plus ``" (f=<value>)"`` when an
    objective is available; row numbers follow a table objective's own row
    order and are 1-based lexicographic ranks otherwise.  Directed graphs put
    equal-valued nodes on the same rank, highest value on the left.
    """
    f = f if f is not None else d.objective
    directed = d.mode != "moves"
    show_values = directed and f is not None
    lines = [f'{"digraph" if directed else "graph"} "{d.mode}_n{d.n}_k{d.k}" {{']
    if directed:
        lines.append("  rankdir=LR;")
    lines.append("  node [shape=ellipse];")
    values = [f.value(t) for t in d.nodes] if show_values else None
    for i, t in enumerate(d.nodes):
        label = f"{_node_number(f, t, i)}: {''.join(map(str, t)) if d.n <= 9 else Permutation(t)}"
        if show_values:
            label += f" (f={value_to_json(values[i])})"
        lines.append(f'  n{i} [label="{label}"];')
    if show_values:
        for v in sorted(set(values), reverse=True):
            members = " ".join(f"n{i};" for i, x in enumerate(values) if x == v)
            lines.append(f'  subgraph "value_{value_to_json(v)}" {{ rank=same; {members} }}')
    if directed:
        for u, succ in enumerate(d.arcs):
            for v in succ:
                lines.append(f"  n{u} -> n{v};")
    else:
        for u, succ in enumerate(d.arcs):
            for v in succ:
                if u < v:
                    lines.append(f"  n{u} -- n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(d: OperationalDigraph, f: Objective | None, path: str | Path) -> None:
    """Write :func:`to_dot` output to ``path``; filesystem errors propagate as ``OSError``."""
    Path(path).write_text(to_dot(d, f))
