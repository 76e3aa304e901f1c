"""Rank sets as bitmasks.

A rank set is a subset of [1, n].  Throughout the package it is stored as an
int bitmask where bit (i - 1) stands for the rank i, so the full set [1, n]
is (1 << n) - 1 and the empty set is 0.  Coordinate vectors indexed by rank
sets always run over masks 0, 1, ..., 2**n - 1 in ascending order.
"""

from __future__ import annotations

from typing import Iterator


class RankSetOutOfRange(ValueError):
    """A rank set mask has bits outside the ambient [1, n]."""


def check_mask(mask: int, n: int) -> None:
    if mask < 0 or mask >> n:
        raise RankSetOutOfRange(f"rank set {to_string(mask) if mask >= 0 else mask} not within [1,{n}]")


def mask_of(elems) -> int:
    """Bitmask of an iterable of ranks (each >= 1)."""
    m = 0
    for e in elems:
        if e < 1:
            raise ValueError(f"rank {e} is not >= 1")
        m |= 1 << (e - 1)
    return m


def elems_of(mask: int) -> tuple[int, ...]:
    """Sorted tuple of ranks in a mask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def interval_mask(lo: int, hi: int) -> int:
    """Bitmask of the integer interval [lo, hi], 1 <= lo <= hi."""
    return ((1 << hi) - 1) ^ ((1 << (lo - 1)) - 1)


def to_string(mask: int) -> str:
    """Set literal for a mask: 0 -> "{}", 0b101 -> "{1,3}"."""
    return "{" + ",".join(str(e) for e in elems_of(mask)) + "}"


def parse(text: str) -> int:
    """Parse a set literal like "{1,3}" or "{}" back to a mask."""
    s = text.strip()
    if s.startswith('"') and s.endswith('"'):
        s = s[1:-1]
    if not (s.startswith("{") and s.endswith("}")):
        raise ValueError(f"not a rank-set literal: {text!r}")
    body = s[1:-1].strip()
    if not body:
        return 0
    return mask_of(int(part) for part in body.split(","))


def subsets(n: int) -> Iterator[int]:
    """All masks over [1, n] in ascending order."""
    return iter(range(1 << n))


def popcount(mask: int) -> int:
    return mask.bit_count()


def labels(n: int) -> list[str]:
    """Column labels for vectors indexed by subsets of [1, n]."""
    return [to_string(m) for m in range(1 << n)]
