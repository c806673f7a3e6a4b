"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`KInterchangeError`, which is also a :class:`ValueError` so that callers
that only care about "bad input" can catch the builtin.  Filesystem failures
are left as plain :class:`OSError`.
"""

from __future__ import annotations


class KInterchangeError(ValueError):
    """Base class for all package errors."""


class InvalidPermutation(KInterchangeError):
    """Sequence is not a bijection on ``{1..n}`` or ``n`` is out of range."""


class DuplicateElement(InvalidPermutation):
    """A value occurs more than once in a permutation sequence."""


class WindowOutOfBounds(KInterchangeError):
    """Window ``[start, start+k-1]`` does not fit inside the permutation."""


class InvalidK(KInterchangeError):
    """Window size outside ``[2, n]``."""


class IndexOutOfRange(KInterchangeError):
    """Lexicographic index outside ``[0, n!)``."""


class ArityMismatch(KInterchangeError):
    """Permutation order differs from the order the objective expects."""


class MissingTableEntry(KInterchangeError):
    """A table objective has no value for the requested permutation."""


class CapExceeded(KInterchangeError):
    """Full enumeration of ``n!`` points was requested above the configured cap."""


class MissingObjective(KInterchangeError):
    """An objective is required for the requested digraph mode."""


class EmptyOptima(KInterchangeError):
    """Reachability was requested towards an empty target set."""


class ObjectiveParseError(KInterchangeError):
    """Objective document is malformed or has unknown fields."""


class IncompleteTable(ObjectiveParseError):
    """Table objective lacks entries for some permutations."""

    def __init__(self, missing: list[str]):
        self.missing = missing
        shown = ", ".join(missing[:10])
        more = f" (+{len(missing) - 10} more)" if len(missing) > 10 else ""
        super().__init__(f"table is missing {len(missing)} entries: {shown}{more}")


class InvalidParams(ObjectiveParseError):
    """Objective parameters violate their domain (e.g. non-positive times)."""
