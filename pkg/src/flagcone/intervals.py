"""Interval systems on [1, n] and their blocker calculus.

An interval system is a finite set of integer intervals [lo, hi] inside
[1, n].  A rank set S blocks the system when S meets every member interval.
The family of blocking sets determines the system up to its antichain of
minimal intervals, and these antichains are exactly the combinatorial types
that matter for inequalities between chain counts: there are Catalan-many of
them, C(n+1) for ambient [1, n].
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator

from . import ranksets

#: blockers()/dual_ideal() enumerate all 2**n subsets; keep that bounded.
MAX_AMBIENT = 20


class AmbientTooLarge(ValueError):
    """Ambient n too large for exhaustive subset enumeration."""


class AmbientMismatch(ValueError):
    """Two systems on different ambients were compared."""


class IntervalOutOfRange(ValueError):
    """An interval does not fit inside the ambient [1, n]."""


@dataclass(frozen=True, order=True)
class Interval:
    """Integer interval [lo, hi] with 1 <= lo <= hi."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not (1 <= self.lo <= self.hi):
            raise IntervalOutOfRange(f"bad interval [{self.lo},{self.hi}]")

    @property
    def mask(self) -> int:
        return ranksets.interval_mask(self.lo, self.hi)

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class IntervalSystem:
    """A set of intervals inside [1, ambient_n].  ambient_n = 0 forces emptiness."""

    ambient_n: int
    intervals: frozenset[Interval]

    def __post_init__(self) -> None:
        if self.ambient_n < 0:
            raise IntervalOutOfRange(f"ambient {self.ambient_n} < 0")
        for iv in self.intervals:
            if iv.hi > self.ambient_n:
                raise IntervalOutOfRange(f"{iv} exceeds ambient [1,{self.ambient_n}]")

    @classmethod
    def of(cls, ambient_n: int, intervals: Iterable[Interval | tuple[int, int]]) -> "IntervalSystem":
        ivs = frozenset(iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals)
        return cls(ambient_n, ivs)

    @classmethod
    def empty(cls, ambient_n: int) -> "IntervalSystem":
        return cls(ambient_n, frozenset())

    @classmethod
    def parse(cls, text: str, ambient_n: int) -> "IntervalSystem":
        """Parse the literal syntax: "[1,2]+[2,3]" or "empty"."""
        s = text.strip()
        if s == "empty":
            return cls.empty(ambient_n)
        ivs = []
        for part in s.split("+"):
            p = part.strip()
            if not (p.startswith("[") and p.endswith("]")):
                raise ValueError(f"bad interval literal {part!r}")
            lo_s, hi_s = p[1:-1].split(",")
            ivs.append(Interval(int(lo_s), int(hi_s)))
        return cls.of(ambient_n, ivs)

    @property
    def sorted_intervals(self) -> tuple[Interval, ...]:
        return tuple(sorted(self.intervals))

    def sort_key(self) -> tuple:
        return tuple((iv.lo, iv.hi) for iv in self.sorted_intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.sorted_intervals)

    def __str__(self) -> str:
        if not self.intervals:
            return "empty"
        return "+".join(str(iv) for iv in self.sorted_intervals)


@dataclass(frozen=True)
class BlockerFamily:
    """All rank sets within [1, ambient_n] that meet every interval of a system."""

    ambient_n: int
    members: frozenset[int]

    def __contains__(self, mask: int) -> bool:
        return mask in self.members

    def __len__(self) -> int:
        return len(self.members)


def is_blocker(mask: int, system: IntervalSystem) -> bool:
    """Does the rank set meet every interval of the system?

    Every set blocks the empty system, including the empty set.
    """
    ranksets.check_mask(mask, system.ambient_n)
    return all(mask & iv.mask for iv in system.intervals)


def _check_ambient(n: int) -> None:
    if n > MAX_AMBIENT:
        raise AmbientTooLarge(f"ambient {n} > {MAX_AMBIENT}")


def blockers(system: IntervalSystem) -> BlockerFamily:
    """Enumerate every blocking rank set of the system."""
    n = system.ambient_n
    _check_ambient(n)
    masks = [iv.mask for iv in system.intervals]
    members = frozenset(s for s in range(1 << n) if all(s & m for m in masks))
    return BlockerFamily(n, members)


def dual_ideal(system: IntervalSystem) -> frozenset[int]:
    """Rank sets containing at least one member interval outright.

    Blockers of blockers: a set blocks every blocking set of the system
    exactly when it contains some member interval whole.
    """
    n = system.ambient_n
    _check_ambient(n)
    masks = [iv.mask for iv in system.intervals]
    return frozenset(s for s in range(1 << n) if any(s & m == m for m in masks))


def minimal_intervals(system: IntervalSystem) -> IntervalSystem:
    """The antichain of containment-minimal member intervals.

    Removing non-minimal intervals changes neither the blocker family nor
    the dual ideal.
    """
    ivs = system.sorted_intervals
    keep = [a for a in ivs if not any(b != a and a.contains(b) for b in ivs)]
    return IntervalSystem.of(system.ambient_n, keep)


def blocker_equal(a: IntervalSystem, b: IntervalSystem) -> bool:
    """Do two systems have the same blocking sets?"""
    if a.ambient_n != b.ambient_n:
        raise AmbientMismatch(f"ambient {a.ambient_n} != {b.ambient_n}")
    return minimal_intervals(a) == minimal_intervals(b)


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def enumerate_antichains(n: int) -> list[IntervalSystem]:
    """All antichains of intervals inside [1, n], C(n+1) of them.

    An antichain corresponds to a staircase shape: mark interval [c, n+1-r]
    as box (row r, column c); a downward-closed ideal of intervals is a
    left-justified shape with row lengths lam_1 >= lam_2 >= ..., lam_r <=
    n+1-r, and the antichain of its maximal intervals is the set of outer
    corner boxes.  Shapes are generated in lexicographically ascending row
    order, so the output order is deterministic and starts with the empty
    system.
    """
    if n < 0:
        raise IntervalOutOfRange(f"ambient {n} < 0")
    if n > 14:
        raise AmbientTooLarge(f"ambient {n} > 14 for antichain enumeration")
    out: list[IntervalSystem] = []

    def rec(row: int, prev_len: int, lens: list[int]) -> None:
        if row > n:
            corners = []
            padded = lens + [0]
            for r, lam in enumerate(lens, start=1):
                if lam > padded[r]:
                    corners.append(Interval(lam, n + 1 - r))
            out.append(IntervalSystem.of(n, corners))
            return
        for lam in range(0, min(prev_len, n + 1 - row) + 1):
            rec(row + 1, lam, lens + [lam])

    rec(1, n, [])
    assert len(out) == catalan(n + 1)
    return out
