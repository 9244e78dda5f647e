"""Exact affine isometries x -> diag(signs) x + trans2/2.

Translations are stored doubled so every element of a diagonal group in
normal form has integer data.  This module is deliberately independent of
the XOR calculus in `klein`: it composes actual maps and is used to check
the matrix-side rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .charmatrix import GenMatrix


@dataclass(frozen=True)
class AffineIsometry:
    signs: tuple[int, ...]
    trans2: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != len(self.trans2):
            raise ValueError("signs and translation have different lengths")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def translation(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(t, 2) for t in self.trans2)

    def is_translation(self) -> bool:
        return all(s == 1 for s in self.signs)

    def is_identity(self) -> bool:
        return self.is_translation() and not any(self.trans2)

    def entry_codes(self) -> tuple[int, ...]:
        """The 2-bit entry of each coordinate (sign, translation mod 1)."""
        return tuple((2 if s < 0 else 0) | (t & 1) for s, t in zip(self.signs, self.trans2))

    def __mul__(self, other: "AffineIsometry") -> "AffineIsometry":
        return compose(self, other)

    def __str__(self):
        parts = []
        for s, t in zip(self.signs, self.trans2):
            tr = Fraction(t, 2)
            shift = "" if tr == 0 else ("+" if tr > 0 else "-") + str(abs(tr))
            parts.append(f"{'+' if s > 0 else '-'}x{shift}")
        return "(" + ", ".join(parts) + ")"


def identity(n: int) -> AffineIsometry:
    return AffineIsometry((1,) * n, (0,) * n)


def lattice_translation(n: int, i: int) -> AffineIsometry:
    t = [0] * n
    t[i] = 2
    return AffineIsometry((1,) * n, tuple(t))


def compose(a: AffineIsometry, b: AffineIsometry) -> AffineIsometry:
    """a o b, i.e. x -> a(b(x))."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")
    return AffineIsometry(
        tuple(x * y for x, y in zip(a.signs, b.signs)),
        tuple(x * tb + ta for x, ta, tb in zip(a.signs, a.trans2, b.trans2)),
    )


def inverse(a: AffineIsometry) -> AffineIsometry:
    return AffineIsometry(a.signs, tuple(-s * t for s, t in zip(a.signs, a.trans2)))


def power(a: AffineIsometry, e: int) -> AffineIsometry:
    base = a if e >= 0 else inverse(a)
    out = identity(a.n)
    for _ in range(abs(e)):
        out = compose(out, base)
    return out


def entry_isometry(code: int) -> AffineIsometry:
    """The 1-dimensional isometry attached to a single entry."""
    return AffineIsometry((-1 if code & 2 else 1,), (code & 1,))


@dataclass(frozen=True)
class GroupRealization:
    generators: tuple[AffineIsometry, ...]
    lattice_rank: int

    def element(self, v: int) -> AffineIsometry:
        """Product of the generators selected by the bits of v, lowest first."""
        out = identity(self.lattice_rank)
        for i, g in enumerate(self.generators):
            if v >> i & 1:
                out = compose(out, g)
        return out


def realize_row(row: Sequence[int]) -> AffineIsometry:
    return AffineIsometry(
        tuple(-1 if a & 2 else 1 for a in row),
        tuple(a & 1 for a in row),
    )


def realize(A: GenMatrix) -> GroupRealization:
    return GroupRealization(tuple(realize_row(r) for r in A.rows), A.n)


def finite_order_representative(g: AffineIsometry) -> AffineIsometry | None:
    """A lattice translate of g of finite order, if one exists.

    (X, s + z) has finite order iff (X + I)(s + z) = 0, which is solvable in z
    exactly when s is integral on the +1 coordinates of X.
    """
    if any(t % 2 for s, t in zip(g.signs, g.trans2) if s == 1):
        return None
    return AffineIsometry(g.signs, tuple(0 if s == 1 else t for s, t in zip(g.signs, g.trans2)))


def torsion_oracle(A: GenMatrix) -> tuple[int, AffineIsometry] | None:
    """Search the nonzero holonomy elements for one with a finite-order lift.

    Returns (v, r) with r o r = identity.  The pair (v, r) is an element of
    order 2 of the abstract extension; when the lift r is itself the identity
    map (v acts trivially and carries no half translation) the realized
    affine group hides it, but the extension is still not torsion-free.
    """
    G = realize(A)
    for v in range(1, 1 << A.k):
        rep = finite_order_representative(G.element(v))
        if rep is not None:
            assert compose(rep, rep).is_identity()
            return v, rep
    return None


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?$")


def parse_word(word: str) -> list[tuple[str, int]]:
    """'x^-1 y^2 x y^2' -> [('x', -1), ('y', 2), ('x', 1), ('y', 2)]"""
    out = []
    for tok in word.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad word token {tok!r}")
        out.append((m.group(1), int(m.group(2) or 1)))
    return out


def eval_word(gens: Mapping[str, AffineIsometry], word) -> AffineIsometry:
    letters = parse_word(word) if isinstance(word, str) else list(word)
    if not gens:
        raise ValueError("no generators")
    n = next(iter(gens.values())).n
    out = identity(n)
    for sym, e in letters:
        if sym not in gens:
            raise KeyError(f"unknown symbol {sym!r}")
        out = compose(out, power(gens[sym], e))
    return out


def rational_rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors if any(v)]
    rank = 0
    ncols = max((len(r) for r in rows), default=0)
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / p[c]
                rows[i] = [x - f * y for x, y in zip(rows[i], p)]
        rank += 1
    return rank


def translation_rank(elems: Sequence[AffineIsometry]) -> int:
    for e in elems:
        if not e.is_translation():
            raise ValueError(f"not a translation: {e}")
    return rational_rank([e.trans2 for e in elems])


def fixed_coordinates(A: GenMatrix) -> list[int]:
    """Coordinates on which every realized generator acts by +1."""
    G = realize(A)
    return [j for j in range(A.n) if all(g.signs[j] == 1 for g in G.generators)]


def abelianization(A: GenMatrix) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion invariants) of the extension defined by A.

    Uses the presentation with generators e_1..e_n, g_1..g_k and relations
    g e g^-1 = sign * e, g_i^2 = t_i and [g_i, g_j] = t_ij, where the
    translations t are read off composed isometries.
    """
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import invariant_factors

    n, k = A.n, A.k
    G = realize(A)
    rels: list[list[int]] = []
    for g in G.generators:
        for j in range(n):
            if g.signs[j] == -1:
                r = [0] * (n + k)
                r[j] = 2
                rels.append(r)
    for i, g in enumerate(G.generators):
        sq = compose(g, g)
        r = [-(t // 2) for t in sq.trans2] + [0] * k
        r[n + i] = 2
        rels.append(r)
    for i in range(k):
        for j in range(i + 1, k):
            gi, gj = G.generators[i], G.generators[j]
            comm = compose(compose(gi, gj), compose(inverse(gi), inverse(gj)))
            assert comm.is_translation() and all(t % 2 == 0 for t in comm.trans2)
            rels.append([t // 2 for t in comm.trans2] + [0] * k)
    rels = [r for r in rels if any(r)]
    if not rels:
        return n + k, ()
    inv = [abs(int(d)) for d in invariant_factors(Matrix(rels), domain=ZZ)]
    nonzero = [d for d in inv if d != 0]
    free = n + k - len(nonzero)
    return free, tuple(d for d in nonzero if d != 1)
