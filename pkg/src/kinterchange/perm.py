"""Permutations, k-interchange moves and neighborhoods.

A k-interchange takes a contiguous window of ``k`` positions and rearranges
the values inside it.  The k-neighborhood ``V^k(s)`` of a permutation ``s``
is every *other* permutation reachable by one such move, deduplicated across
windows (two overlapping windows can produce the same result).

Hot loops elsewhere in the package work on plain tuples through
:func:`neighbor_tuples`; :class:`Permutation` is the validated value type
used at API boundaries.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as _itertools_permutations
from typing import Callable, Iterable, Iterator, Sequence

from .errors import (
    DuplicateElement,
    IndexOutOfRange,
    InvalidK,
    InvalidPermutation,
    WindowOutOfBounds,
    CapExceeded,
)

#: Largest ``n`` for which operations touching all ``n!`` points are allowed
#: by default (9! = 362,880 nodes).
DEFAULT_ENUMERATION_CAP = 9


def _validate_elements(elements: tuple[int, ...]) -> None:
    n = len(elements)
    if n < 1:
        raise InvalidPermutation("permutation must contain at least one element")
    seen: set[int] = set()
    for value in elements:
        if not isinstance(value, int) or isinstance(value, bool):
            raise InvalidPermutation(f"non-integer element {value!r}")
        if value in seen:
            raise DuplicateElement(f"value {value} appears more than once")
        if not 1 <= value <= n:
            raise InvalidPermutation(f"value {value} outside 1..{n}")
        seen.add(value)


@dataclass(frozen=True, order=True)
class Permutation:
    """An arrangement of ``{1..n}``; ordering is lexicographic."""

    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))
        _validate_elements(self.elements)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __getitem__(self, index: int) -> int:
        return self.elements[index]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.elements)) + ")"

    def compact(self) -> str:
        """Digit string such as ``"4312"``; only unambiguous for ``n <= 9``."""
        if self.n > 9:
            return str(self)
        return "".join(map(str, self.elements))


def make_permutation(seq: Iterable[int], max_n: int | None = None) -> Permutation:
    """Validate ``seq`` and wrap it as a :class:`Permutation`.

    Args:
        seq: Values ``1..n`` in any order.
        max_n: Optional upper bound on ``n``.

    Raises:
        DuplicateElement: A value repeats.
        InvalidPermutation: Not a bijection on ``{1..n}``, or ``n > max_n``.
    """
    elements = tuple(seq)
    if max_n is not None and len(elements) > max_n:
        raise InvalidPermutation(f"n={len(elements)} exceeds the configured maximum {max_n}")
    return Permutation(elements)


_COMPACT_RE = re.compile(r"^\d+$")


def parse_permutation(text: str, n: int | None = None) -> Permutation:
    """Parse ``"(4,3,1,2)"``, ``"4,3,1,2"`` or the compact form ``"4312"``."""
    raw = text.strip()
    if raw.startswith("(") and raw.endswith(")"):
        raw = raw[1:-1]
    try:
        if "," in raw:
            values = [int(part) for part in raw.split(",")]
        elif _COMPACT_RE.match(raw):
            values = [int(ch) for ch in raw]
        else:
            raise ValueError
    except ValueError:
        raise InvalidPermutation(f"cannot parse permutation {text!r}") from None
    perm = Permutation(tuple(values))
    if n is not None and perm.n != n:
        raise InvalidPermutation(f"{text!r} has n={perm.n}, expected {n}")
    return perm


def as_tuple(s: Permutation | Sequence[int]) -> tuple[int, ...]:
    return s.elements if isinstance(s, Permutation) else tuple(s)


def check_k(n: int, k: int) -> None:
    if not isinstance(k, int) or not 2 <= k <= n:
        raise InvalidK(f"k={k} outside [2, {n}]")


def check_cap(n: int, cap: int | None = None) -> None:
    limit = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if n > limit:
        raise CapExceeded(f"n={n} exceeds the enumeration cap {limit} ({math.factorial(n)} points)")


# --------------------------------------------------------------------------
# moves


@dataclass(frozen=True)
class WindowMove:
    """Rearrange the window ``[start, start+k-1]`` (1-based).

    ``arrangement[i]`` names which window slot (1-based) ends up at slot
    ``i + 1``: arrangement ``(2,3,1)`` turns window ``(a,b,c)`` into ``(b,c,a)``.
    """

    start: int
    k: int
    arrangement: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.arrangement, tuple):
            object.__setattr__(self, "arrangement", tuple(self.arrangement))
        if self.k < 2:
            raise InvalidK(f"window size k={self.k} must be at least 2")
        if self.start < 1:
            raise WindowOutOfBounds(f"window start {self.start} must be >= 1")
        if len(self.arrangement) != self.k:
            raise InvalidPermutation(
                f"arrangement {self.arrangement} has length {len(self.arrangement)}, expected k={self.k}"
            )
        _validate_elements(self.arrangement)

    @property
    def end(self) -> int:
        return self.start + self.k - 1

    def is_identity(self) -> bool:
        return self.arrangement == tuple(range(1, self.k + 1))

    def inverse(self) -> "WindowMove":
        inv = [0] * self.k
        for slot, src in enumerate(self.arrangement, start=1):
            inv[src - 1] = slot
        return WindowMove(self.start, self.k, tuple(inv))

    def to_dict(self) -> dict:
        return {"start": self.start, "k": self.k, "arrangement": list(self.arrangement)}


def apply_move(s: Permutation, m: WindowMove) -> Permutation:
    """Return ``s`` with its window reordered by ``m``.

    Raises:
        WindowOutOfBounds: ``m.start + m.k - 1 > s.n``.
    """
    if m.end > s.n:
        raise WindowOutOfBounds(f"window [{m.start}, {m.end}] does not fit n={s.n}")
    i = m.start - 1
    e = s.elements
    window = tuple(e[i + a - 1] for a in m.arrangement)
    return Permutation(e[:i] + window + e[i + m.k :])


def move_between(s: Permutation, t: Permutation, k: int) -> WindowMove:
    """Find a k-interchange turning ``s`` into ``t``.

    The leftmost window that covers every differing position is used.
    Raises :class:`InvalidPermutation` if ``t`` is not in ``V^k(s) ∪ {s}``.
    """
    check_k(s.n, k)
    if s.n != t.n:
        raise InvalidPermutation("permutations of different order")
    diff = [i for i in range(s.n) if s[i] != t[i]]
    if not diff:
        return WindowMove(1, k, tuple(range(1, k + 1)))
    lo, hi = diff[0], diff[-1]
    if hi - lo + 1 > k:
        raise InvalidPermutation(f"{t} is not a {k}-interchange of {s}")
    start = min(lo, s.n - k)
    pos = {v: j for j, v in enumerate(s.elements[start : start + k])}
    arrangement = tuple(pos[v] + 1 for v in t.elements[start : start + k])
    return WindowMove(start + 1, k, arrangement)


@lru_cache(maxsize=None)
def _arrangements(k: int) -> tuple[tuple[int, ...], ...]:
    # 0-based, identity excluded
    ident = tuple(range(k))
    return tuple(p for p in _itertools_permutations(range(k)) if p != ident)


def window_moves(n: int, k: int) -> Iterator[WindowMove]:
    """All non-identity k-interchanges for order ``n``, window by window."""
    check_k(n, k)
    for start in range(1, n - k + 2):
        for arr in _arrangements(k):
            yield WindowMove(start, k, tuple(a + 1 for a in arr))


def neighbor_tuples(t: tuple[int, ...], k: int) -> set[tuple[int, ...]]:
    """``V^k`` on raw tuples; no validation."""
    n = len(t)
    out: set[tuple[int, ...]] = set()
    arrs = _arrangements(k)
    for i in range(n - k + 1):
        head, window, tail = t[:i], t[i : i + k], t[i + k :]
        for arr in arrs:
            out.add(head + tuple([window[a] for a in arr]) + tail)
    return out


def k_neighborhood(s: Permutation, k: int) -> frozenset[Permutation]:
    """``V^k(s)``: permutations one k-interchange away from ``s``, excluding ``s``.

    Raises:
        InvalidK: ``k < 2`` or ``k > n``.
    """
    check_k(s.n, k)
    return frozenset(Permutation(x) for x in neighbor_tuples(s.elements, k))


@dataclass(frozen=True)
class NeighborPartition:
    """``V^k(s)`` split by value relative to ``f(s)``."""

    improving: frozenset[Permutation]
    equal: frozenset[Permutation]
    worsening: frozenset[Permutation]

    @property
    def weak(self) -> frozenset[Permutation]:
        """``V^{k<=}(s)``."""
        return self.improving | self.equal


def classify_neighbors(s: Permutation, k: int, f: Callable[[Permutation], object]) -> NeighborPartition:
    """Partition ``V^k(s)`` into improving, equal and worsening neighbors of ``s`` under ``f``."""
    here = f(s)
    improving, equal, worsening = set(), set(), set()
    for x in k_neighborhood(s, k):
        v = f(x)
        if v < here:
            improving.add(x)
        elif v == here:
            equal.add(x)
        else:
            worsening.add(x)
    return NeighborPartition(frozenset(improving), frozenset(equal), frozenset(worsening))


# --------------------------------------------------------------------------
# indexing


def lex_rank(s: Permutation | Sequence[int]) -> int:
    """Position of ``s`` among all permutations of its order in lexicographic order."""
    e = as_tuple(s)
    n = len(e)
    rank = 0
    for i, v in enumerate(e):
        smaller_later = sum(1 for w in e[i + 1 :] if w < v)
        rank += smaller_later * math.factorial(n - 1 - i)
    return rank


def lex_unrank(n: int, index: int) -> Permutation:
    """Inverse of :func:`lex_rank`.

    Raises:
        IndexOutOfRange: ``index`` not in ``[0, n!)``.
    """
    if n < 1:
        raise InvalidPermutation(f"n={n} must be positive")
    total = math.factorial(n)
    if not 0 <= index < total:
        raise IndexOutOfRange(f"index {index} outside [0, {total})")
    pool = list(range(1, n + 1))
    out = []
    for i in range(n - 1, -1, -1):
        q, index = divmod(index, math.factorial(i))
        out.append(pool.pop(q))
    return Permutation(tuple(out))


def inversion_count(s: Permutation | Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``s[i] > s[j]``."""
    e = as_tuple(s)
    return sum(1 for i in range(len(e)) for j in range(i + 1, len(e)) if e[i] > e[j])


def all_tuples(n: int, cap: int | None = None) -> list[tuple[int, ...]]:
    """Every permutation of ``1..n`` as a tuple, lexicographically ordered."""
    check_cap(n, cap)
    return list(_itertools_permutations(range(1, n + 1)))


def all_permutations(n: int, cap: int | None = None) -> list[Permutation]:
    return [Permutation(t) for t in all_tuples(n, cap)]


def bfs_distances(
    sources: Iterable[tuple[int, ...]], k: int, cap: int | None = None
) -> dict[tuple[int, ...], int]:
    """Move-graph distance from every permutation to the nearest source.

    The k-move graph is symmetric, so distance *to* a source equals distance
    *from* it and a single multi-source BFS suffices.
    """
    from collections import deque

    srcs = [tuple(s) for s in sources]
    if not srcs:
        raise ValueError("at least one source is required")
    n = len(srcs[0])
    check_cap(n, cap)
    check_k(n, k)
    dist = {s: 0 for s in srcs}
    queue = deque(srcs)
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in neighbor_tuples(u, k):
            if v not in dist:
                dist[v] = du
                queue.append(v)
    return dist
