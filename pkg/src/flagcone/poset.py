"""Graded posets with explicit ranks, their flag numbers and chain partitions.

A graded poset here is given by elements with declared ranks 0..rank, a
unique bottom (rank 0), a unique top (rank = poset rank), and cover relations
that raise rank by exactly one; the order is the transitive closure of the
covers, and every element must lie on some bottom-to-top maximal chain.

For a rank set S inside [1, n] (poset rank n+1), the flag number f_S counts
the chains whose rank set is exactly S.  The module also builds the witness
posets P(n, I, N) whose flag numbers are powers of N determined by which
ranks meet the intervals of I, and implements the chain partition that maps
every maximal chain C to an interval system I_C such that C lands in the
class F_S exactly when S blocks I_C.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import ranksets
from .intervals import Interval, IntervalSystem


class PosetValidationError(ValueError):
    """Input fails one of the graded-poset requirements; .code names which."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class NotComparable(ValueError):
    """An interval [p, q] was requested for non-comparable p, q."""


class GradedPoset:
    """Validated graded poset.  Build through validate() or the constructors.

    Levels keep the input order of elements; that order is the default rank
    numbering used by the chain-partition operators.
    """

    __slots__ = ("rank", "_levels", "_rank_of", "_pos", "_up", "_down", "_reach_cache", "_above")

    def __init__(
        self,
        rank: int,
        levels: tuple[tuple[str, ...], ...],
        up: Mapping[str, tuple[str, ...]],
        down: Mapping[str, tuple[str, ...]],
    ):
        self.rank = rank
        self._levels = levels
        self._rank_of = {x: r for r, lvl in enumerate(levels) for x in lvl}
        self._pos = {x: i for lvl in levels for i, x in enumerate(lvl)}
        self._up = dict(up)
        self._down = dict(down)
        self._reach_cache: dict[tuple[int, int], list[int]] = {}
        self._above: dict[str, frozenset[str]] | None = None

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        """Rank-set ambient: rank sets live in [1, n] with n = rank - 1."""
        return self.rank - 1

    @property
    def bottom(self) -> str:
        return self._levels[0][0]

    @property
    def top(self) -> str:
        return self._levels[-1][0]

    @property
    def elements(self) -> tuple[str, ...]:
        return tuple(x for lvl in self._levels for x in lvl)

    @property
    def covers(self) -> tuple[tuple[str, str], ...]:
        return tuple(
            (x, y)
            for lvl in self._levels
            for x in lvl
            for y in self._up.get(x, ())
        )

    def level(self, r: int) -> tuple[str, ...]:
        return self._levels[r]

    def rank_of(self, x: str) -> int:
        return self._rank_of[x]

    def position(self, x: str) -> int:
        """Index of x within its level (the default rank numbering)."""
        return self._pos[x]

    def up_covers(self, x: str) -> tuple[str, ...]:
        return self._up.get(x, ())

    def down_covers(self, x: str) -> tuple[str, ...]:
        return self._down.get(x, ())

    def __len__(self) -> int:
        return len(self._rank_of)

    def __contains__(self, x: str) -> bool:
        return x in self._rank_of

    # -- order -------------------------------------------------------------

    def _above_sets(self) -> dict[str, frozenset[str]]:
        if self._above is None:
            above: dict[str, frozenset[str]] = {}
            for lvl in reversed(self._levels):
                for x in lvl:
                    acc: set[str] = set()
                    for y in self._up.get(x, ()):
                        acc.add(y)
                        acc.update(above[y])
                    above[x] = frozenset(acc)
            self._above = above
        return self._above

    def le(self, x: str, y: str) -> bool:
        """x <= y in the order generated by the covers."""
        return x == y or y in self._above_sets()[x]

    def lt(self, x: str, y: str) -> bool:
        return x != y and y in self._above_sets()[x]

    def reach(self, r: int, s: int) -> list[int]:
        """For each element of level r, the bitmask of level-s elements above it.

        Memoized per rank pair; this powers the flag-number dynamic program.
        """
        if not (0 <= r < s <= self.rank):
            raise ValueError(f"bad rank pair ({r}, {s})")
        cached = self._reach_cache.get((r, s))
        if cached is not None:
            return cached
        cur = {x: 1 << i for i, x in enumerate(self._levels[s])}
        for t in range(s - 1, r - 1, -1):
            cur = {
                x: _or_all(cur[y] for y in self._up.get(x, ()))
                for x in self._levels[t]
            }
        out = [cur[x] for x in self._levels[r]]
        self._reach_cache[(r, s)] = out
        return out

    def maximal_chains(self) -> list[tuple[str, ...]]:
        """All bottom-to-top chains through consecutive covers, in DFS order."""
        out: list[tuple[str, ...]] = []
        stack: list[tuple[str, ...]] = [(self.bottom,)]
        while stack:
            chain = stack.pop()
            x = chain[-1]
            if self._rank_of[x] == self.rank:
                out.append(chain)
                continue
            for y in reversed(self._up.get(x, ())):
                stack.append(chain + (y,))
        return out

    def __repr__(self) -> str:
        return f"GradedPoset(rank={self.rank}, elements={len(self)})"


def _or_all(masks) -> int:
    m = 0
    for v in masks:
        m |= v
    return m


def validate(
    elements: Iterable[tuple[str, int]],
    covers: Iterable[tuple[str, str]],
) -> GradedPoset:
    """Check the graded-poset requirements and build the poset.

    Raises PosetValidationError with .code one of: DuplicateElement,
    UnknownElement, NoUniqueBottom, NoUniqueTop, BadCoverRank,
    DanglingElement, TrivialPoset.  CyclicCovers cannot occur once
    BadCoverRank passes (covers raise rank, so no cycle closes), but the
    code name is reserved in this vocabulary.
    """
    elems = list(elements)
    rank_of: dict[str, int] = {}
    for x, r in elems:
        if x in rank_of:
            raise PosetValidationError("DuplicateElement", f"duplicate element {x!r}")
        if r < 0:
            raise PosetValidationError("BadCoverRank", f"negative rank for {x!r}")
        rank_of[x] = r
    if not rank_of:
        raise PosetValidationError("NoUniqueBottom", "empty poset")
    rank = max(rank_of.values())
    if rank == 0:
        raise PosetValidationError("TrivialPoset", "bottom equals top (rank 0)")
    levels_mut: list[list[str]] = [[] for _ in range(rank + 1)]
    for x, r in elems:
        levels_mut[r].append(x)
    if len(levels_mut[0]) != 1:
        raise PosetValidationError(
            "NoUniqueBottom", f"{len(levels_mut[0])} elements at rank 0"
        )
    if len(levels_mut[rank]) != 1:
        raise PosetValidationError(
            "NoUniqueTop", f"{len(levels_mut[rank])} elements at top rank {rank}"
        )
    up: dict[str, list[str]] = {x: [] for x in rank_of}
    down: dict[str, list[str]] = {x: [] for x in rank_of}
    seen: set[tuple[str, str]] = set()
    for lo, hi in covers:
        if lo not in rank_of or hi not in rank_of:
            raise PosetValidationError(
                "UnknownElement", f"cover ({lo!r}, {hi!r}) uses an undeclared element"
            )
        if rank_of[hi] != rank_of[lo] + 1:
            raise PosetValidationError(
                "BadCoverRank",
                f"cover ({lo!r}, {hi!r}) joins ranks {rank_of[lo]} and {rank_of[hi]}",
            )
        if (lo, hi) in seen:
            continue
        seen.add((lo, hi))
        up[lo].append(hi)
        down[hi].append(lo)
    for x, r in rank_of.items():
        if r < rank and not up[x]:
            raise PosetValidationError(
                "DanglingElement", f"{x!r} has no upper cover"
            )
        if r > 0 and not down[x]:
            raise PosetValidationError(
                "DanglingElement", f"{x!r} has no lower cover"
            )
    levels = tuple(tuple(lvl) for lvl in levels_mut)
    pos = {x: i for lvl in levels for i, x in enumerate(lvl)}
    up_t = {x: tuple(sorted(ys, key=pos.__getitem__)) for x, ys in up.items()}
    down_t = {x: tuple(sorted(ys, key=pos.__getitem__)) for x, ys in down.items()}
    return GradedPoset(rank, levels, up_t, down_t)


# -- flag numbers ----------------------------------------------------------


def flag_number(P: GradedPoset, mask: int) -> int:
    """Number of chains in P whose rank set is exactly the mask."""
    ranksets.check_mask(mask, P.n)
    ranks = ranksets.elems_of(mask)
    if not ranks:
        return 1
    counts = [1] * len(P.level(ranks[0]))
    for r_prev, r_next in zip(ranks, ranks[1:]):
        reach = P.reach(r_prev, r_next)
        nxt = [0] * len(P.level(r_next))
        for i, c in enumerate(counts):
            if not c:
                continue
            m = reach[i]
            while m:
                low = m & -m
                nxt[low.bit_length() - 1] += c
                m ^= low
        counts = nxt
    return sum(counts)


def flag_vector(P: GradedPoset) -> dict[int, int]:
    """All flag numbers, keyed by rank-set mask in ascending order."""
    return {mask: flag_number(P, mask) for mask in range(1 << P.n)}


# -- witness posets --------------------------------------------------------


@dataclass(frozen=True)
class WitnessSpec:
    """Recipe for the witness poset P(n, I, N)."""

    n: int
    intervals: IntervalSystem
    N: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"witness ambient n = {self.n} < 1")
        if self.N < 1:
            raise ValueError(f"witness N = {self.N} < 1")
        if self.intervals.ambient_n != self.n:
            raise ValueError(
                f"interval ambient {self.intervals.ambient_n} != n = {self.n}"
            )

    @property
    def k(self) -> int:
        return len(self.intervals)

    def predicted_flag_number(self, mask: int) -> int:
        """N ** (number of intervals the rank set meets)."""
        ranksets.check_mask(mask, self.n)
        hits = sum(1 for iv in self.intervals if mask & iv.mask)
        return self.N ** hits


def witness_poset(spec: WitnessSpec) -> GradedPoset:
    """Construct P(n, I, N).

    Elements at rank i are tuples (i; p_1, ..., p_k) where p_j runs over
    [1, N] when i lies in the j-th interval and is the wildcard * otherwise;
    two consecutive-rank elements are joined when every coordinate agrees or
    one side is the wildcard.  Wildcards make the cover relation transitive
    across ranks because each interval is contiguous, and the flag numbers
    come out as N to the number of intervals the rank set meets.
    """
    n, N = spec.n, spec.N
    ivs = spec.intervals.sorted_intervals
    k = len(ivs)

    def row(i: int) -> list[tuple]:
        axes = [
            range(1, N + 1) if ivs[j].lo <= i <= ivs[j].hi else (None,)
            for j in range(k)
        ]
        return [tuple(p) for p in itertools.product(*axes)]

    def name(i: int, p: tuple) -> str:
        if k == 0:
            return f"({i})"
        body = ",".join("*" if v is None else str(v) for v in p)
        return f"({i};{body})"

    elements: list[tuple[str, int]] = []
    rows: list[list[tuple]] = []
    for i in range(n + 2):
        r = row(i)
        rows.append(r)
        elements.extend((name(i, p), i) for p in r)

    covers: list[tuple[str, str]] = []
    for i in range(n + 1):
        for p in rows[i]:
            for q in rows[i + 1]:
                if all(a is None or b is None or a == b for a, b in zip(p, q)):
                    covers.append((name(i, p), name(i + 1, q)))
    return validate(elements, covers)


# -- duality ---------------------------------------------------------------


def dual(P: GradedPoset) -> GradedPoset:
    """Turn the poset upside down; element order within levels is kept."""
    levels = tuple(reversed(P._levels))
    up = {x: P.down_covers(x) for x in P.elements}
    down = {x: P.up_covers(x) for x in P.elements}
    return GradedPoset(P.rank, levels, up, down)


def reflect_mask(mask: int, n: int) -> int:
    """Rank set S -> (n+1) - S, the set paired with S under duality."""
    ranksets.check_mask(mask, n)
    return ranksets.mask_of(n + 1 - e for e in ranksets.elems_of(mask))


# -- chain partition -------------------------------------------------------


def next_selected_rank(mask: int, i: int, n: int) -> int:
    """Smallest j in [i, n+1] that is selected by the mask or equals n+1."""
    ranksets.check_mask(mask, n)
    if not (1 <= i <= n + 1):
        raise ValueError(f"i = {i} outside [1, {n + 1}]")
    for j in range(i, n + 1):
        if (mask >> (j - 1)) & 1:
            return j
    return n + 1


def _order_key(P: GradedPoset, numbering, x: str) -> int:
    if numbering is None:
        return P.position(x)
    return numbering[x]


def first_atom(P: GradedPoset, p: str, q: str, numbering=None) -> str:
    """Earliest atom of the interval [p, q] under the rank numbering.

    Atoms are the covers of p that stay below q; the numbering defaults to
    the within-level input order and may be overridden by a mapping from
    element to sort key.
    """
    if not P.lt(p, q):
        raise NotComparable(f"{p!r} < {q!r} fails")
    atoms = [z for z in P.up_covers(p) if P.le(z, q)]
    return min(atoms, key=lambda z: _order_key(P, numbering, z))


def chain_interval_system(
    P: GradedPoset, chain: Sequence[str], numbering=None
) -> IntervalSystem:
    """The interval system I_C recording how far each chain element stays first.

    For each rank i, take the largest j such that the chain's rank-i element
    is the first atom of the interval from its predecessor up to the chain's
    rank-j element; ranks whose j falls short of the top contribute the
    interval [i, j].
    """
    n = P.n
    _check_maximal_chain(P, chain)
    out = []
    for i in range(1, n + 1):
        psi = i
        for j in range(n + 1, i - 1, -1):
            if chain[i] == first_atom(P, chain[i - 1], chain[j], numbering):
                psi = j
                break
        if psi != n + 1:
            out.append(Interval(i, psi))
    return IntervalSystem.of(n, out)


def _check_maximal_chain(P: GradedPoset, chain: Sequence[str]) -> None:
    if len(chain) != P.rank + 1:
        raise ValueError(f"chain length {len(chain)} != rank + 1 = {P.rank + 1}")
    for lo, hi in zip(chain, chain[1:]):
        if hi not in P.up_covers(lo):
            raise ValueError(f"({lo!r}, {hi!r}) is not a cover")


def partition_classes(
    P: GradedPoset, numbering=None
) -> dict[int, tuple[tuple[str, ...], ...]]:
    """For every rank set S, the maximal chains in the class F_S.

    A chain C belongs to F_S when each of its elements is the first atom of
    the interval from its predecessor up to the chain element at the next
    S-selected rank.  The class sizes reproduce the flag numbers, and
    membership is equivalent to S blocking chain_interval_system(C) under
    the same numbering.
    """
    n = P.n
    chains = P.maximal_chains()
    atom_cache: dict[tuple[str, str], str] = {}

    def phi(p: str, q: str) -> str:
        key = (p, q)
        got = atom_cache.get(key)
        if got is None:
            got = atom_cache[key] = first_atom(P, p, q, numbering)
        return got

    out: dict[int, list[tuple[str, ...]]] = {m: [] for m in range(1 << n)}
    for chain in chains:
        for mask in range(1 << n):
            ok = True
            for i in range(1, n + 1):
                j = next_selected_rank(mask, i, n)
                if chain[i] != phi(chain[i - 1], chain[j]):
                    ok = False
                    break
            if ok:
                out[mask].append(chain)
    return {m: tuple(cs) for m, cs in out.items()}


# -- interval subposets ----------------------------------------------------


def interval_subposet(P: GradedPoset, a: str, b: str) -> GradedPoset:
    """The interval [a, b] of P as a graded poset in its own right."""
    if not P.le(a, b):
        raise NotComparable(f"{a!r} <= {b!r} fails")
    members = {x for x in P.elements if P.le(a, x) and P.le(x, b)}
    base = P.rank_of(a)
    elems = [(x, P.rank_of(x) - base) for x in P.elements if x in members]
    covers = [
        (x, y) for x, y in P.covers if x in members and y in members
    ]
    return validate(elems, covers)


# -- random posets ---------------------------------------------------------


def random_graded_poset(rank: int, seed: int = 0) -> GradedPoset:
    """Seeded random graded poset: middle widths in [1, 4], every element
    covered both ways, extra covers added with probability one half."""
    if rank < 1:
        raise ValueError(f"rank {rank} < 1")
    rng = random.Random(seed)
    widths = [1] + [rng.randint(1, 4) for _ in range(rank - 1)] + [1]
    levels = [
        tuple(f"e{r}_{i}" for i in range(w)) for r, w in enumerate(widths)
    ]
    elements = [(x, r) for r, lvl in enumerate(levels) for x in lvl]
    covers: set[tuple[str, str]] = set()
    for r in range(rank):
        lower, upper = levels[r], levels[r + 1]
        for y in upper:
            covers.add((rng.choice(lower), y))
        for x in lower:
            if not any((x, y) in covers for y in upper):
                covers.add((x, rng.choice(upper)))
        for x in lower:
            for y in upper:
                if (x, y) not in covers and rng.random() < 0.5:
                    covers.add((x, y))
    return validate(elements, sorted(covers))


# -- text format -----------------------------------------------------------


def format_poset(P: GradedPoset) -> str:
    """Serialize: header, elem lines by (rank, numbering), cover lines."""
    lines = [f"poset rank={P.rank}"]
    for r in range(P.rank + 1):
        for x in P.level(r):
            lines.append(f"elem {x} {r}")
    for x, y in P.covers:
        lines.append(f"cover {x} {y}")
    return "\n".join(lines) + "\n"


def parse_poset(text: str) -> GradedPoset:
    """Parse the poset text format; comments start with '#'."""
    header = None
    elements: list[tuple[str, int]] = []
    covers: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "poset":
            if header is not None:
                raise ValueError("repeated poset header")
            if len(parts) != 2 or not parts[1].startswith("rank="):
                raise ValueError(f"bad header {raw!r}")
            header = int(parts[1][len("rank="):])
        elif parts[0] == "elem":
            if len(parts) != 3:
                raise ValueError(f"bad elem line {raw!r}")
            elements.append((parts[1], int(parts[2])))
        elif parts[0] == "cover":
            if len(parts) != 3:
                raise ValueError(f"bad cover line {raw!r}")
            covers.append((parts[1], parts[2]))
        else:
            raise ValueError(f"unknown line {raw!r}")
    if header is None:
        raise ValueError("missing poset header")
    P = validate(elements, covers)
    if P.rank != header:
        raise PosetValidationError(
            "BadCoverRank", f"declared rank {header} but elements reach {P.rank}"
        )
    return P
