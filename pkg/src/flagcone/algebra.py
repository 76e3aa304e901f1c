"""The graded algebra of chain-count functionals.

A form of degree n+1 is a rational linear combination of the basis symbols
f_S, S a subset of [1, n]; it acts on a graded poset of rank n+1 by
substituting flag numbers for the symbols.  The product (convolution) splits
a poset at a middle rank: (F * G)(P) sums F on the lower interval times G on
the upper interval over all elements at the junction rank, and on basis
symbols it unions the supports around the junction letter.

Degree-0 values are bare scalars (Fraction), never Form objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from . import poset as poset_mod
from . import ranksets
from .intervals import IntervalSystem, is_blocker


class DegreeMismatch(ValueError):
    """Operands or arguments disagree about the degree."""


class BadShiftIndex(ValueError):
    """Shift position outside [0, n]."""


class ZeroForm(ValueError):
    """The operation is undefined on the zero form."""


Scalar = Union[int, Fraction]


class Form:
    """Sparse exact-rational combination of the f_S basis in one degree."""

    __slots__ = ("degree", "_coeffs")

    def __init__(self, degree: int, coeffs: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] = ()):
        if degree < 1:
            raise DegreeMismatch(f"degree {degree} < 1")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Fraction] = {}
        for mask, c in items:
            ranksets.check_mask(mask, degree - 1)
            acc[mask] = acc.get(mask, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(
            self, "_coeffs", {m: c for m, c in sorted(acc.items()) if c}
        )

    def __setattr__(self, name, value):
        raise AttributeError("Form is immutable")

    # -- construction helpers ----------------------------------------------

    @classmethod
    def monomial(cls, degree: int, mask: int, coeff: Scalar = 1) -> "Form":
        return cls(degree, {mask: coeff})

    @classmethod
    def from_vector(cls, degree: int, vec: Sequence[Scalar]) -> "Form":
        if len(vec) != 1 << (degree - 1):
            raise DegreeMismatch(
                f"vector length {len(vec)} != 2**{degree - 1}"
            )
        return cls(degree, dict(enumerate(vec)))

    # -- inspection ----------------------------------------------------------

    def coeff(self, mask: int) -> Fraction:
        ranksets.check_mask(mask, self.degree - 1)
        return self._coeffs.get(mask, Fraction(0))

    __getitem__ = coeff

    def terms(self) -> Iterator[tuple[int, Fraction]]:
        """(mask, coefficient) pairs in ascending mask order."""
        return iter(self._coeffs.items())

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def vector(self) -> tuple[Fraction, ...]:
        """Dense coefficient tuple over all masks in ascending order."""
        return tuple(
            self._coeffs.get(m, Fraction(0)) for m in range(1 << (self.degree - 1))
        )

    # -- arithmetic ----------------------------------------------------------

    def _binop(self, other: "Form", sign: int) -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} != {other.degree}")
        acc = dict(self._coeffs)
        for m, c in other._coeffs.items():
            acc[m] = acc.get(m, Fraction(0)) + sign * c
        return Form(self.degree, acc)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return Form(self.degree, {m: -c for m, c in self._coeffs.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, Form):
            return NotImplemented
        s = Fraction(scalar)
        return Form(self.degree, {m: s * c for m, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def __eq__(self, other):
        return (
            isinstance(other, Form)
            and self.degree == other.degree
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.degree, tuple(self._coeffs.items())))

    def __str__(self):
        if not self._coeffs:
            return f"0 (degree {self.degree})"
        parts = []
        for m, c in self._coeffs.items():
            sym = "f" + ranksets.to_string(m)
            mag = abs(c)
            body = sym if mag == 1 else f"{mag}*{sym}"
            parts.append(("- " if c < 0 else "+ ") + body)
        head = parts[0][2:] if parts[0].startswith("+ ") else "-" + parts[0][2:]
        return " ".join([head] + parts[1:])

    def __repr__(self):
        return f"Form({self.degree}, {self._coeffs!r})"


def h_form(degree: int, i: int = 0) -> Form:
    """h_i = f_i - f_empty for i >= 1; h_0 denotes h_empty = f_empty."""
    if i == 0:
        return Form.monomial(degree, 0)
    ranksets.check_mask(1 << (i - 1), degree - 1)
    return Form(degree, {1 << (i - 1): 1, 0: -1})


# -- convolution and friends -------------------------------------------------


def convolve(F: Form | Scalar, G: Form | Scalar) -> Form | Fraction:
    """Product of forms: junction letter inserted between the two supports.

    On basis symbols: f(m)_S * f(n)_T = f(m+n) on S U {m} U (T + m).
    Scalars act as degree-0 forms, i.e. by scaling.
    """
    if not isinstance(F, Form) and not isinstance(G, Form):
        return Fraction(F) * Fraction(G)
    if not isinstance(F, Form):
        return G * F
    if not isinstance(G, Form):
        return F * G
    m = F.degree
    out: dict[int, Fraction] = {}
    for s, a in F.terms():
        base = s | (1 << (m - 1))
        for t, b in G.terms():
            key = base | (t << m)
            out[key] = out.get(key, Fraction(0)) + a * b
    return Form(m + G.degree, out)


def convolve_all(factors: Sequence[Form | Scalar]) -> Form | Fraction:
    acc: Form | Scalar = Fraction(1)
    for f in factors:
        acc = convolve(acc, f)
    return acc


def shift(F: Form, k: int) -> Form:
    """Degree-raising embedding: letters <= k stay, letters > k move up one.

    The image never uses letter k+1, and shifting preserves extremeness in
    the nonnegativity cones.  k may be 0 (shift every letter up) through
    n = degree - 1 (append an unused top slot).
    """
    n = F.degree - 1
    if not (0 <= k <= n):
        raise BadShiftIndex(f"k = {k} outside [0, {n}]")
    low = (1 << k) - 1
    return Form(
        F.degree + 1,
        {(s & low) | ((s & ~low) << 1): c for s, c in F.terms()},
    )


def project(F: Form, m: int) -> Form | Fraction:
    """Degree-lowering projection with visibility cutoff m.

    Top-letter terms drop their top letter; a term without the top letter
    survives unchanged exactly when its support (with 0 adjoined) meets
    [m, n-1].  For m <= 0 everything survives.  A form of degree n+1 is
    nonnegative on all rank-(n+1) posets exactly when all its projections
    m = 0..n are nonnegative on all rank-n posets; degree-1 forms project
    to their scalar coefficient.
    """
    n = F.degree - 1
    if n == 0:
        return F.coeff(0)
    top = 1 << (n - 1)
    window = ranksets.interval_mask(m, n - 1) if 1 <= m <= n - 1 else 0
    out: dict[int, Fraction] = {}
    for s, c in F.terms():
        if s & top:
            key = s ^ top
            out[key] = out.get(key, Fraction(0)) + c
        elif m <= 0 or s & window:
            out[s] = out.get(s, Fraction(0)) + c
    return Form(n, out)


def prefix_restriction(F: Form, k: int) -> Form | Fraction:
    """Keep only terms supported inside [1, k], lowering the degree by one.

    Defined for k <= n - 1 (degree n+1 input); negative k gives the zero
    form.  Degree-1 forms restrict to the scalar zero.  Satisfies
    project(F, m) = project(F, 0) - prefix_restriction(F, m - 1).
    """
    n = F.degree - 1
    if n == 0:
        if k > 0:
            raise DegreeMismatch(f"k = {k} > 0 for degree-1 form")
        return Fraction(0)
    if k > n - 1:
        raise DegreeMismatch(f"k = {k} > {n - 1} cannot land in degree {n}")
    if k < 0:
        return Form(n)
    keep = (1 << k) - 1
    return Form(n, {s: c for s, c in F.terms() if s & ~keep == 0})


def reflect(F: Form) -> Form:
    """Reverse the letters: j -> n + 1 - j.  Pairs with poset duality."""
    n = F.degree - 1
    return Form(
        F.degree,
        {poset_mod.reflect_mask(s, n): c for s, c in F.terms()},
    )


# -- support and factorization ----------------------------------------------


def support(F: Form) -> frozenset[int]:
    return F.support


def largest_letter(F: Form) -> int:
    """Largest letter used by any support set; 0 when only f_empty occurs."""
    if F.is_zero:
        raise ZeroForm("largest_letter of the zero form")
    acc = 0
    for s in F.support:
        acc |= s
    return acc.bit_length()


def smallest_letter(F: Form) -> int:
    """Smallest letter used by any support set; 0 when f_empty occurs."""
    if F.is_zero:
        raise ZeroForm("smallest_letter of the zero form")
    if 0 in F.support:
        return 0
    acc = 0
    for s in F.support:
        acc |= s & -s
    return (acc & -acc).bit_length()


def trailing_ones_factor(F: Form) -> tuple[Form | Fraction, int]:
    """Split F = F' * f(k)_empty with k maximal; k = 0 returns F itself.

    f_empty evaluates to 1 on every poset, so trailing factors of it are
    invisible to evaluation on the lower interval.  The split exists exactly
    when every support set has the same largest letter; a form supported on
    the empty set alone is (coefficient, degree).
    """
    if F.is_zero:
        raise ZeroForm("factoring the zero form")
    maxes = {s.bit_length() for s in F.support}
    if len(maxes) != 1:
        return F, 0
    m = maxes.pop()
    if m == 0:
        return F.coeff(0), F.degree
    strip = ~(1 << (m - 1))
    return Form(m, {s & strip: c for s, c in F.terms()}), F.degree - m


def leading_ones_factor(F: Form) -> tuple[Form | Fraction, int]:
    """Split F = f(k)_empty * F' with k maximal; mirror of the trailing case."""
    if F.is_zero:
        raise ZeroForm("factoring the zero form")
    if F.support == frozenset({0}):
        return F.coeff(0), F.degree
    mins = {(s & -s).bit_length() for s in F.support}
    if len(mins) != 1 or 0 in F.support:
        return F, 0
    k = mins.pop()
    return Form(F.degree - k, {s >> k: c for s, c in F.terms()}), k


def compress(F: Form) -> Form:
    """Relabel the used letters onto an initial segment, lowering the degree.

    A form whose support union misses some letter is extreme in its cone
    exactly when its compression is extreme in the smaller cone.
    """
    if F.is_zero:
        raise ZeroForm("compressing the zero form")
    union = 0
    for s in F.support:
        union |= s
    letters = ranksets.elems_of(union)
    pos = {l: i + 1 for i, l in enumerate(letters)}
    return Form(
        len(letters) + 1,
        {
            ranksets.mask_of(pos[e] for e in ranksets.elems_of(s)): c
            for s, c in F.terms()
        },
    )


def factor_once(F: Form) -> tuple[Form, Form] | None:
    """Split F = F1 * F2 at the smallest junction letter, if any.

    A junction at m requires every support set to contain m; the coefficient
    table indexed by (part below m, part above m) must then factor as an
    outer product.  F1 is normalized so its lexicographically first nonzero
    coefficient is 1.
    """
    if F.is_zero:
        raise ZeroForm("factoring the zero form")
    deg = F.degree
    common = None
    for s in F.support:
        common = s if common is None else common & s
    for m in range(1, deg):
        if not (common >> (m - 1)) & 1:
            continue
        low_mask = (1 << (m - 1)) - 1
        table: dict[tuple[int, int], Fraction] = {}
        for s, c in F.terms():
            table[(s & low_mask, s >> m)] = c
        rows = sorted({i for i, _ in table})
        cols = sorted({j for _, j in table})
        r0 = rows[0]
        c0 = min(j for (i, j) in table if i == r0)
        pivot = table[(r0, c0)]
        u = {i: table.get((i, c0), Fraction(0)) / pivot for i in rows}
        v = {j: table.get((r0, j), Fraction(0)) for j in cols}
        ok = True
        for i in rows:
            for j in cols:
                if table.get((i, j), Fraction(0)) != u[i] * v[j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return Form(m, u), Form(deg - m, v)
    return None


def factor_completely(F: Form) -> list[Form]:
    """Convenience: recurse factor_once until all factors are irreducible."""
    split = factor_once(F)
    if split is None:
        return [F]
    f1, f2 = split
    return factor_completely(f1) + factor_completely(f2)


# -- basis changes ------------------------------------------------------------


def to_h_coeffs(F: Form) -> dict[int, Fraction]:
    """Coordinates in the h-basis: the U-th one sums a_S over S containing U."""
    n = F.degree - 1
    return {
        u: sum((c for s, c in F.terms() if s & u == u), Fraction(0))
        for u in range(1 << n)
    }


def from_h_coeffs(degree: int, coeffs: Mapping[int, Scalar]) -> Form:
    """Inverse of to_h_coeffs (alternating-sum Moebius inversion)."""
    n = degree - 1
    out: dict[int, Fraction] = {}
    for s in range(1 << n):
        acc = Fraction(0)
        rest = ((1 << n) - 1) & ~s
        sub = rest
        while True:
            u = s | sub
            c = Fraction(coeffs.get(u, 0))
            if c:
                acc += (-1 if (ranksets.popcount(sub) & 1) else 1) * c
            if sub == 0:
                break
            sub = (sub - 1) & rest
        if acc:
            out[s] = acc
    return Form(degree, out)


# -- evaluation ----------------------------------------------------------------


def eval_poset(P: poset_mod.GradedPoset, F: Form) -> Fraction:
    """Substitute the poset's flag numbers into the form."""
    if P.rank != F.degree:
        raise DegreeMismatch(f"poset rank {P.rank} != form degree {F.degree}")
    return sum(
        (c * poset_mod.flag_number(P, s) for s, c in F.terms()), Fraction(0)
    )


def eval_system(system: IntervalSystem, F: Form) -> Fraction:
    """Sum the coefficients over the blockers of the interval system.

    This is the limiting normalized value of the form on the witness posets
    of the system, and nonnegativity of these sums over all systems is
    equivalent to nonnegativity of the form on every graded poset.
    """
    if system.ambient_n != F.degree - 1:
        raise DegreeMismatch(
            f"ambient {system.ambient_n} != degree - 1 = {F.degree - 1}"
        )
    return sum((c for s, c in F.terms() if is_blocker(s, system)), Fraction(0))


def eval_singleton(mask: int, F: Form) -> Fraction:
    """Sum the coefficients over supersets of the mask (h-coordinate)."""
    ranksets.check_mask(mask, F.degree - 1)
    return sum((c for s, c in F.terms() if s & mask == mask), Fraction(0))


@dataclass(frozen=True)
class EvalFunctional:
    """A linear functional on forms of one degree.

    kind 'poset': evaluation on a graded poset; kind 'interval_system':
    blocker-sum; kind 'singleton': superset-sum for one rank set.
    """

    degree: int
    kind: str
    payload: object

    @classmethod
    def from_poset(cls, P: poset_mod.GradedPoset) -> "EvalFunctional":
        return cls(P.rank, "poset", P)

    @classmethod
    def from_system(cls, system: IntervalSystem) -> "EvalFunctional":
        return cls(system.ambient_n + 1, "interval_system", system)

    @classmethod
    def from_singleton(cls, degree: int, mask: int) -> "EvalFunctional":
        ranksets.check_mask(mask, degree - 1)
        return cls(degree, "singleton", mask)

    def __call__(self, F: Form) -> Fraction:
        if F.degree != self.degree:
            raise DegreeMismatch(
                f"functional degree {self.degree} != form degree {F.degree}"
            )
        if self.kind == "poset":
            return eval_poset(self.payload, F)
        if self.kind == "interval_system":
            return eval_system(self.payload, F)
        if self.kind == "singleton":
            return eval_singleton(self.payload, F)
        raise ValueError(f"unknown kind {self.kind!r}")


def limit_check(
    system: IntervalSystem, F: Form, Ns: Sequence[int]
) -> list[Fraction]:
    """Evaluate F on the witness posets of the system, normalized by the
    top flag number; the values approach eval_system(system, F) as N grows."""
    n = F.degree - 1
    if system.ambient_n != n:
        raise DegreeMismatch(
            f"ambient {system.ambient_n} != degree - 1 = {n}"
        )
    out = []
    for N in Ns:
        P = poset_mod.witness_poset(poset_mod.WitnessSpec(n, system, N))
        full = poset_mod.flag_number(P, (1 << n) - 1)
        out.append(eval_poset(P, F) / full)
    return out


# -- text format ----------------------------------------------------------------


def format_form(F: Form) -> str:
    """Serialize: header with the degree, then one quoted term per line."""
    lines = [f"form rank={F.degree}"]
    for mask, c in F.terms():
        lines.append(f'"{ranksets.to_string(mask)}" {c}')
    return "\n".join(lines) + "\n"


def parse_form(text: str) -> Form:
    """Parse the form text format; accepts integer or num/den coefficients."""
    degree = None
    coeffs: dict[int, Fraction] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "form":
            if degree is not None:
                raise ValueError("repeated form header")
            if len(parts) != 2 or not parts[1].startswith("rank="):
                raise ValueError(f"bad header {raw!r}")
            degree = int(parts[1][len("rank="):])
        else:
            if degree is None:
                raise ValueError("term before form header")
            if len(parts) != 2:
                raise ValueError(f"bad term line {raw!r}")
            mask = ranksets.parse(parts[0])
            c = Fraction(parts[1])
            coeffs[mask] = coeffs.get(mask, Fraction(0)) + c
    if degree is None:
        raise ValueError("missing form header")
    return Form(degree, coeffs)
