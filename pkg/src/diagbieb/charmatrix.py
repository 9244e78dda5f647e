"""Characteristic matrices of diagonal crystallographic groups.

A `GenMatrix` holds one row per holonomy generator and one column per
lattice coordinate.  Its `closure` has a row for every nonzero element of
the holonomy group C2^k.  Elements are addressed by bitvectors: bit i of
the integer ``v`` stands for generator i+1, so ``v = 0b011`` is g1*g2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .klein import Row, check_entry, phi, star_rows


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class GenMatrix:
    rows: tuple[Row, ...]

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in r) for r in self.rows)
        if not rows:
            raise MatrixError("a generator matrix needs at least one row")
        n = len(rows[0])
        if n == 0:
            raise MatrixError("a generator matrix needs at least one column")
        for i, r in enumerate(rows):
            if len(r) != n:
                raise MatrixError(f"row {i + 1} has {len(r)} entries, expected {n}")
            for a in r:
                check_entry(a)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "GenMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.n)]

    def drop_columns(self, cols: Iterable[int]) -> "GenMatrix":
        drop = set(cols)
        keep = [j for j in range(self.n) if j not in drop]
        return GenMatrix(tuple(tuple(r[j] for j in keep) for r in self.rows))

    def select_columns(self, cols: Sequence[int]) -> "GenMatrix":
        return GenMatrix(tuple(tuple(r[j] for j in cols) for r in self.rows))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self):
        return "\n".join(" ".join(map(str, r)) for r in self.rows)


def popcount(v: int) -> int:
    return bin(v).count("1")


def support(v: int) -> tuple[int, ...]:
    return tuple(i for i in range(v.bit_length()) if v >> i & 1)


@lru_cache(maxsize=None)
def display_order(k: int) -> tuple[int, ...]:
    """Nonzero bitvectors graded by support size, then lexicographic."""
    return tuple(sorted(range(1, 1 << k), key=lambda v: (popcount(v), support(v))))


def element_label(v: int) -> str:
    return "*".join(f"r{i + 1}" for i in support(v))


@dataclass(frozen=True)
class ClosureMatrix:
    k: int
    n: int
    rows: dict[int, Row] = field(repr=False)

    def row(self, v: int) -> Row:
        return self.rows[v]

    def ordered(self) -> list[tuple[int, Row]]:
        return [(v, self.rows[v]) for v in display_order(self.k)]

    def column(self, j: int) -> dict[int, int]:
        return {v: r[j] for v, r in self.rows.items()}

    def ones(self, j: int) -> frozenset[int]:
        """Elements g with entry 1 in column j, i.e. where the column's class
        restricts nontrivially to <g>."""
        return frozenset(v for v, r in self.rows.items() if r[j] == 1)

    def phi_columns(self) -> list[tuple[str, ...]]:
        order = display_order(self.k)
        return [tuple(phi(self.rows[v][j] for v in order)) for j in range(self.n)]


def closure(A: GenMatrix) -> ClosureMatrix:
    rows: dict[int, Row] = {}
    zero = (0,) * A.n
    for v in range(1, 1 << A.k):
        low = (v & -v).bit_length() - 1
        rest = v & (v - 1)
        rows[v] = star_rows(rows[rest] if rest else zero, A.rows[low])
    return ClosureMatrix(A.k, A.n, rows)


def torsion_rows(C: ClosureMatrix) -> list[int]:
    """Elements whose row has no entry 1; each lifts to an element of order 2."""
    return [v for v, r in sorted(C.rows.items()) if 1 not in r]


def unfaithful_rows(C: ClosureMatrix) -> list[int]:
    """Elements acting trivially on the lattice (row inside {0,1})."""
    return [v for v, r in sorted(C.rows.items()) if all(a < 2 for a in r)]


def is_torsion_free(C: ClosureMatrix) -> bool:
    return not torsion_rows(C)


def is_faithful(C: ClosureMatrix) -> bool:
    return not unfaithful_rows(C)


@dataclass(frozen=True)
class ValidityReport:
    torsion_free: bool
    faithful: bool
    offending_rows: list[int]
    torsion_rows: list[int] = field(default_factory=list)
    unfaithful_rows: list[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.torsion_free and self.faithful


def validate(A: GenMatrix | ClosureMatrix) -> ValidityReport:
    C = A if isinstance(A, ClosureMatrix) else closure(A)
    tors = torsion_rows(C)
    unf = unfaithful_rows(C)
    return ValidityReport(
        torsion_free=not tors,
        faithful=not unf,
        offending_rows=sorted(set(tors) | set(unf)),
        torsion_rows=tors,
        unfaithful_rows=unf,
    )


def is_valid(A: GenMatrix | ClosureMatrix) -> bool:
    return validate(A).valid


def column_one_counts(C: ClosureMatrix) -> list[int]:
    return [sum(1 for r in C.rows.values() if r[j] == 1) for j in range(C.n)]


def column_count_law_holds(C: ClosureMatrix) -> bool:
    """Counts lie in {0, 2^(k-2), 2^(k-1)}, the last only on columns inside {0,1}."""
    k = C.k
    if k < 2:
        return True
    allowed = {0, 1 << (k - 2), 1 << (k - 1)}
    for j, c in enumerate(column_one_counts(C)):
        if c not in allowed:
            return False
        if c == 1 << (k - 1) and any(r[j] >= 2 for r in C.rows.values()):
            return False
    return True


# -- canonical forms --------------------------------------------------------
#
# Matrices with the same (k, n) are totally ordered by their sequence of column
# codes, column 1 first.  A column's code packs its entries into 2k bits with
# generator row 1 most significant.  The canonical form of A is the minimum of
# this order over all column permutations and all changes of generators
# (ordered bases of C2^k).  For a fixed basis the best column permutation is the
# sorted one, so the minimum is taken over bases only.

def column_code(col: Sequence[int]) -> int:
    c = 0
    for a in col:
        c = (c << 2) | a
    return c


def decode_column(code: int, k: int) -> tuple[int, ...]:
    return tuple((code >> (2 * (k - 1 - i))) & 3 for i in range(k))


def from_column_codes(codes: Sequence[int], k: int) -> GenMatrix:
    cols = [decode_column(c, k) for c in codes]
    return GenMatrix(tuple(tuple(col[i] for col in cols) for i in range(k)))


def column_codes(A: GenMatrix) -> tuple[int, ...]:
    return tuple(column_code(col) for col in A.columns())


@lru_cache(maxsize=8)
def ordered_bases(k: int) -> tuple[tuple[int, ...], ...]:
    """All ordered bases of F2^k as tuples of bitvectors (|GL_k(F2)| of them)."""
    out = []

    def extend(basis, span):
        if len(basis) == k:
            out.append(tuple(basis))
            return
        for v in range(1, 1 << k):
            if v in span:
                continue
            extend(basis + [v], span | {s ^ v for s in span})

    extend([], {0})
    return tuple(out)


def change_generators(A: GenMatrix, basis: Sequence[int]) -> GenMatrix:
    C = closure(A)
    return GenMatrix(tuple(C.rows[b] for b in basis))


def canonical_codes(A: GenMatrix) -> tuple[int, ...]:
    C = closure(A)
    k = A.k
    best = None
    for basis in ordered_bases(k):
        rows = [C.rows[b] for b in basis]
        codes = sorted(column_code(col) for col in zip(*rows))
        t = tuple(codes)
        if best is None or t < best:
            best = t
    return best


def canonicalize(A: GenMatrix) -> GenMatrix:
    return from_column_codes(canonical_codes(A), A.k)


def is_canonical(A: GenMatrix) -> bool:
    return column_codes(A) == canonical_codes(A)


def iter_all_matrices(k: int, n: int) -> Iterator[GenMatrix]:
    """Every k x n generator matrix, 4^(kn) of them.  Only for tiny sizes."""
    for flat in itertools.product(range(4), repeat=k * n):
        yield GenMatrix(tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(k)))
