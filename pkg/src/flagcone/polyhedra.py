"""Exact rational linear algebra and the double description method.

This module handles pointed polyhedral cones {x : Ax >= 0} with
arbitrary-precision rational data.  It converts between the two standard
descriptions of a cone: dd_rays turns a system of inequalities into the
complete list of extreme rays, and dd_facets goes back from generators to
an irredundant set of facet normals.  Everything is exact; there is no
floating point anywhere on a decision path.

The double description implementation inserts inequality rows one at a
time, keeping the extreme rays of the intermediate cone.  Adjacency of a
positive/negative ray pair is decided in two stages: a combinatorial
prefilter (the pair's common active set must have at least d-2 rows and
must not be dominated by the active set of any third ray), then an
algebraic confirmation that the common active rows have rank exactly d-2.
The rank confirmation first tries a single modular elimination; because
the common active rows annihilate two independent rays, their rank can
never exceed d-2, so a modular rank of d-2 is already conclusive.  Only
the rare deficient case falls back to fraction-free integer elimination.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Sequence

from ._kernel import adjacency_pairs, default_workers

__all__ = [
    "DimensionOverflow",
    "EmptyInput",
    "NotPointed",
    "PolyhedralError",
    "Ray",
    "RationalMatrix",
    "ZeroVector",
    "canonicalize",
    "dd_facets",
    "dd_rays",
    "matrix_rank",
    "matrix_to_csv",
    "parse_csv",
    "rays_to_csv",
]

MAX_COLS = 64


class PolyhedralError(Exception):
    """Base class for errors raised by this module."""


class NotPointed(PolyhedralError):
    """The inequality matrix does not have full column rank."""


class DimensionOverflow(PolyhedralError):
    """More columns than the supported maximum."""


class EmptyInput(PolyhedralError):
    """An operation received no rows or no rays."""


class ZeroVector(PolyhedralError):
    """Canonicalization of the zero vector was requested."""


Scalar = int | Fraction


@dataclass(frozen=True)
class RationalMatrix:
    """A rectangular matrix of exact rationals, at least 1 x 1."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0]:
            raise EmptyInput("matrix must have at least one row and column")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise ValueError("ragged rows in matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalar]]) -> RationalMatrix:
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0])

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]


@dataclass(frozen=True)
class Ray:
    """A primitive integer direction vector of a pointed cone.

    Coordinates follow the ascending-bitset order used throughout the
    package when the ambient space is indexed by rank sets.
    """

    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coords:
            raise EmptyInput("ray needs at least one coordinate")
        if not any(self.coords):
            raise ZeroVector("ray coordinates are all zero")
        g = 0
        for x in self.coords:
            g = gcd(g, x)
        if g != 1:
            raise ValueError("ray coordinates are not primitive (gcd %d)" % g)

    def dot(self, row: Sequence[Scalar]):
        return sum(c * x for c, x in zip(row, self.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(x) for x in self.coords) + ")"


def canonicalize(v: Sequence[Scalar]) -> Ray:
    """Scale a nonzero rational vector to a primitive integer ray.

    Clears denominators and divides by the gcd; the direction is kept as
    given, there is no sign normalization.
    """
    fracs = [Fraction(x) for x in v]
    if not any(fracs):
        raise ZeroVector("cannot canonicalize the zero vector")
    scale = lcm(*(f.denominator for f in fracs)) if fracs else 1
    ints = [int(f * scale) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return Ray(tuple(x // g for x in ints))


def _integer_rows(rows: Iterable[Sequence[Scalar]]) -> list[tuple[int, ...]]:
    """Scale each row to coprime integers, dropping zero rows."""
    out: list[tuple[int, ...]] = []
    for row in rows:
        if any(row):
            out.append(canonicalize(row).coords)
    return out


def _as_rows(A: RationalMatrix | Sequence[Sequence[Scalar]]) -> list[tuple[Fraction, ...]]:
    if isinstance(A, RationalMatrix):
        return list(A.entries)
    rows = [tuple(Fraction(x) for x in row) for row in A]
    if not rows or not rows[0]:
        raise EmptyInput("matrix must have at least one row and column")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged rows in matrix")
    return rows


def matrix_rank(A: RationalMatrix | Sequence[Sequence[Scalar]]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    rows = _as_rows(A)
    mat = [list(r) for r in _integer_rows(rows)]
    if not mat:
        return 0
    m, ncols = len(mat), len(mat[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, m) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(r + 1, m):
            for j in range(c + 1, ncols):
                mat[i][j] = (mat[r][c] * mat[i][j] - mat[i][c] * mat[r][j]) // prev
            mat[i][c] = 0
        prev = mat[r][c]
        r += 1
        if r == m:
            break
    return r


_PRIME = 2_147_483_647


def _rank_mod_p(rows: list[tuple[int, ...]]) -> int:
    """Rank of integer rows modulo a fixed prime; never exceeds the true rank."""
    if not rows:
        return 0
    import numpy as np

    mat = np.array([[x % _PRIME for x in row] for row in rows], dtype=np.int64)
    m, ncols = mat.shape
    r = 0
    for c in range(ncols):
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        inv = pow(int(mat[r, c]), _PRIME - 2, _PRIME)
        mat[r] = (mat[r] * inv) % _PRIME
        below = np.nonzero(mat[r + 1 :, c])[0]
        if below.size:
            idx = r + 1 + below
            mat[idx] = (mat[idx] - np.outer(mat[idx, c], mat[r])) % _PRIME
        r += 1
        if r == m:
            break
    return r


class _Echelon:
    """Incremental row space over the rationals, for greedy basis picking."""

    def __init__(self, width: int) -> None:
        self.width = width
        self.pivots: dict[int, list[Fraction]] = {}

    def reduce(self, row: Sequence[Scalar]) -> list[Fraction]:
        work = [Fraction(x) for x in row]
        for col, base in self.pivots.items():
            if work[col]:
                f = work[col]
                work = [a - f * b for a, b in zip(work, base)]
        return work

    def try_add(self, row: Sequence[Scalar]) -> bool:
        work = self.reduce(row)
        lead = next((k for k, x in enumerate(work) if x), None)
        if lead is None:
            return False
        f = work[lead]
        self.pivots[lead] = [x / f for x in work]
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _invert(rows: list[tuple[int, ...]]) -> list[list[Fraction]]:
    """Inverse of a square invertible integer matrix, by Gauss-Jordan."""
    d = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(d)]
           for i, row in enumerate(rows)]
    for c in range(d):
        piv = next(i for i in range(c, d) if aug[i][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        f = aug[c][c]
        aug[c] = [x / f for x in aug[c]]
        for i in range(d):
            if i != c and aug[i][c]:
                g = aug[i][c]
                aug[i] = [a - g * b for a, b in zip(aug[i], aug[c])]
    return [row[d:] for row in aug]


def _active_mask(coords: tuple[int, ...], rows: list[tuple[int, ...]]) -> int:
    mask = 0
    for k, row in enumerate(rows):
        if sum(a * b for a, b in zip(row, coords)) == 0:
            mask |= 1 << k
    return mask


def dd_rays(
    A: RationalMatrix | Sequence[Sequence[Scalar]],
    *,
    workers: int | None = None,
    progress: Callable[[int, int, int], None] | None = None,
) -> list[Ray]:
    """Extreme rays of the pointed cone {x : Ax >= 0}.

    The rows are scaled to coprime integers, deduplicated, and inserted in
    order of ascending nonzero count (ties by row value), which keeps the
    intermediate ray counts small on the 0/1 matrices this package
    produces.  Output rays are canonical (primitive integer, fixed
    direction) and sorted lexicographically by coordinate vector, so the
    result is independent of the input row order.

    progress, when given, is called as progress(step, total, nrays) after
    each insertion.  workers defaults to the FLAGCONE_THREADS setting.
    """
    frac_rows = _as_rows(A)
    d = len(frac_rows[0])
    if d > MAX_COLS:
        raise DimensionOverflow("cone dimension %d exceeds %d" % (d, MAX_COLS))
    if workers is None:
        workers = default_workers()

    rows = sorted(set(_integer_rows(frac_rows)),
                  key=lambda r: (sum(1 for x in r if x), r))
    m = len(rows)

    basis_idx: list[int] = []
    ech = _Echelon(d)
    for k, row in enumerate(rows):
        if ech.try_add(row):
            basis_idx.append(k)
            if len(basis_idx) == d:
                break
    if len(basis_idx) < d:
        raise NotPointed("inequality rows have rank %d < %d" % (ech.rank, d))

    inv = _invert([rows[k] for k in basis_idx])
    rays: list[Ray] = [canonicalize([inv[i][j] for i in range(d)]) for j in range(d)]
    masks: list[int] = [_active_mask(r.coords, rows) for r in rays]

    processed = 0
    for k in basis_idx:
        processed |= 1 << k
    remaining = [k for k in range(m) if k not in set(basis_idx)]
    need = d - 2

    for step, k in enumerate(remaining):
        row = rows[k]
        vals = [r.dot(row) for r in rays]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if neg:
            pos = [i for i, v in enumerate(vals) if v > 0]
            zero = [i for i, v in enumerate(vals) if v == 0]
            visible = [mk & processed for mk in masks]
            candidates = adjacency_pairs(visible, pos, neg, need, m, workers)

            new_rays: list[Ray] = []
            new_masks: list[int] = []
            seen: set[tuple[int, ...]] = set()
            for i, j in candidates:
                common = visible[i] & visible[j]
                active = [rows[t] for t in range(m) if common >> t & 1]
                rank = _rank_mod_p(active)
                if rank < need:
                    rank = matrix_rank(active)
                if rank != need:
                    continue
                vi, vj = vals[i], vals[j]
                combo = [vi * b - vj * a for a, b in zip(rays[i].coords, rays[j].coords)]
                ray = canonicalize(combo)
                if ray.coords in seen:
                    continue
                seen.add(ray.coords)
                new_rays.append(ray)
                new_masks.append(_active_mask(ray.coords, rows))

            keep = pos + zero
            rays = [rays[i] for i in keep] + new_rays
            masks = [masks[i] for i in keep] + new_masks
        processed |= 1 << k
        if progress is not None:
            progress(step + 1, len(remaining), len(rays))

    return sorted(rays, key=lambda r: r.coords)


def _gram_solve(U: list[tuple[int, ...]], rhs: Sequence[Scalar]) -> list[Fraction]:
    """Solve (U U^T) c = rhs for full-row-rank U, by Gauss-Jordan."""
    s = len(U)
    aug = [[Fraction(sum(x * y for x, y in zip(U[i], U[j]))) for j in range(s)]
           + [Fraction(rhs[i])] for i in range(s)]
    for c in range(s):
        piv = next(i for i in range(c, s) if aug[i][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        f = aug[c][c]
        aug[c] = [x / f for x in aug[c]]
        for i in range(s):
            if i != c and aug[i][c]:
                g = aug[i][c]
                aug[i] = [x - g * y for x, y in zip(aug[i], aug[c])]
    return [aug[i][s] for i in range(s)]


def _span_coords(U: list[tuple[int, ...]], vec: Sequence[Scalar]) -> list[Fraction]:
    """Coefficients c with sum c_i U_i = vec, for vec in the row space of U."""
    rhs = [sum(Fraction(a) * Fraction(x) for a, x in zip(row, vec)) for row in U]
    return _gram_solve(U, rhs)


def dd_facets(
    rays: Sequence[Ray] | Sequence[Sequence[Scalar]],
    *,
    workers: int | None = None,
    progress: Callable[[int, int, int], None] | None = None,
) -> RationalMatrix:
    """Irredundant facet normals of the cone generated by the given rays.

    By duality the facet normals of cone(R) are the extreme rays of
    {a : R a >= 0}.  When the rays do not span the ambient space the
    computation happens inside their linear span and the reported normals
    lie in that span; facets are then facets of the cone within it.
    Rows come out canonicalized and sorted lexicographically.
    """
    if len(rays) == 0:
        raise EmptyInput("no rays given")
    coord_rows = [tuple(r.coords) if isinstance(r, Ray) else tuple(int(x) for x in r)
                  for r in rays]
    d = len(coord_rows[0])
    ech = _Echelon(d)
    span_rows: list[tuple[int, ...]] = []
    for row in coord_rows:
        if ech.try_add(row):
            span_rows.append(row)
    s = len(span_rows)
    if s == 0:
        raise ZeroVector("all rays are zero vectors")
    if s == d:
        normals = dd_rays(coord_rows, workers=workers, progress=progress)
        return RationalMatrix.from_rows(n.coords for n in normals)

    U = span_rows
    reduced = [_span_coords(U, row) for row in coord_rows]
    normals_low = dd_rays(reduced, workers=workers, progress=progress)
    lifted = []
    for nl in normals_low:
        coeff = _gram_solve(U, nl.coords)
        vec = [sum(coeff[i] * U[i][j] for i in range(s)) for j in range(d)]
        lifted.append(canonicalize(vec).coords)
    lifted.sort()
    return RationalMatrix.from_rows(lifted)


def _write_csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def rays_to_csv(rays: Sequence[Ray], header: Sequence[str]) -> str:
    """One ray per line as exact integers, preceded by a header row.

    Labels containing commas (rank set names like {1,2}) come out quoted.
    """
    for r in rays:
        if len(r.coords) != len(header):
            raise ValueError("header length does not match ray dimension")
    return _write_csv(header, ([str(x) for x in r.coords] for r in rays))


def matrix_to_csv(A: RationalMatrix, header: Sequence[str]) -> str:
    """One matrix row per line; entries are exact (integers when integral)."""
    if A.ncols != len(header):
        raise ValueError("header length does not match matrix width")
    rows = ([str(x.numerator) if x.denominator == 1 else str(x) for x in row]
            for row in A.entries)
    return _write_csv(header, rows)


def parse_csv(text: str) -> tuple[list[str], list[tuple[Fraction, ...]]]:
    """Inverse of the CSV emitters: header labels plus exact rows.

    Records whose first cell starts with '#' are comments and are skipped,
    so count footers survive a round trip.
    """
    records = [
        rec
        for rec in csv.reader(io.StringIO(text))
        if rec and not rec[0].startswith("#")
    ]
    if not records:
        raise EmptyInput("empty CSV input")
    header = records[0]
    rows = [tuple(Fraction(cell) for cell in rec) for rec in records[1:]]
    return header, rows
