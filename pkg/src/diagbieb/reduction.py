"""Column deletion quotients, holonomy renormalization and minimality.

Deleting lattice coordinate i corresponds to the quotient of the group by
<e_i>; it stays torsion-free exactly when every closure row keeps an entry 1
outside column i.  Column indices in this module are 0-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .charmatrix import (
    ClosureMatrix,
    GenMatrix,
    closure,
    is_torsion_free,
    unfaithful_rows,
    validate,
)
from .klein import Row


class ReductionError(ValueError):
    pass


class NotDiagonalError(ReductionError):
    """The refined lattice of a holonomy drop has no diagonal basis."""


def _require_valid(A: GenMatrix) -> ClosureMatrix:
    C = closure(A)
    rep = validate(C)
    if not rep.valid:
        raise ReductionError(
            f"matrix is not a Bieberbach group of diagonal type "
            f"(torsion-free={rep.torsion_free}, faithful={rep.faithful})"
        )
    return C


def _deletable(C: ClosureMatrix) -> list[int]:
    # count rows that would lose their last 1
    out = []
    for j in range(C.n):
        if all(any(a == 1 for i, a in enumerate(r) if i != j) for r in C.rows.values()):
            out.append(j)
    return out


def deletable_columns(A: GenMatrix) -> set[int]:
    return set(_deletable(_require_valid(A)))


def delete_column(A: GenMatrix, i: int) -> GenMatrix:
    C = closure(A)
    if not is_torsion_free(C):
        raise ReductionError("matrix has torsion")
    if i not in _deletable(C):
        raise ReductionError(f"column {i} is not deletable")
    return A.drop_columns([i])


# -- renormalization after a holonomy drop ----------------------------------

def _f2_reduce(vectors: list[int]) -> list[tuple[int, int]]:
    """Reduced row echelon basis over F2 as (pivot bit, vector) pairs."""
    basis: list[tuple[int, int]] = []
    for v in vectors:
        for p, b in basis:
            if v >> p & 1:
                v ^= b
        if v:
            p = v.bit_length() - 1
            basis = [(q, b ^ v if b >> p & 1 else b) for q, b in basis]
            basis.append((p, v))
    return sorted(basis)


def _span(vectors) -> set[int]:
    span = {0}
    for v in vectors:
        if v not in span:
            span |= {s ^ v for s in span}
    return span


@dataclass(frozen=True)
class Renormalization:
    matrix: GenMatrix
    kernel: tuple[int, ...]
    complement: tuple[int, ...]
    pivot_columns: tuple[int, ...]
    adjusted_columns: tuple[int, ...]


def holonomy_kernel(A: GenMatrix) -> list[int]:
    """Nonzero elements acting trivially; a subgroup since {0,1}-rows are *-closed."""
    return unfaithful_rows(closure(A))


def renormalize(A: GenMatrix) -> Renormalization:
    """Re-express a torsion-free, unfaithful group with its true holonomy.

    The elements K acting trivially become lattice translations, so the
    lattice grows to L' = Z^n + span{t_v : v in K} with t_v in (1/2)Z^n.  L'
    has a diagonal basis iff it splits along the sign-character classes of
    the columns.  Within a class the new basis is {t_p : pivots p} plus the
    unit vectors of the other columns, using the reduced F2 echelon form of
    the translation vectors; pivot coordinates lose their half translations
    and every other coordinate j picks up the half translations of the pivots
    whose basis vector covers j.  Raises NotDiagonalError when L' does not
    split and ReductionError when the whole holonomy acts trivially.
    """
    C = closure(A)
    if not is_torsion_free(C):
        raise ReductionError("input has torsion")
    K = unfaithful_rows(C)
    if not K:
        return Renormalization(A, (), tuple(1 << i for i in range(A.k)), (), ())
    n, k = A.n, A.k
    # translation vector of v in K, as a bitmask of columns holding entry 1
    tvecs = [sum(1 << j for j, a in enumerate(C.rows[v]) if a == 1) for v in K]
    classes: dict[tuple[int, ...], int] = {}
    for j in range(n):
        key = tuple(C.rows[1 << i][j] >> 1 for i in range(k))
        classes[key] = classes.get(key, 0) | (1 << j)
    W = _span(tvecs)
    for mask in classes.values():
        for w in tvecs:
            if (w & mask) not in W:
                raise NotDiagonalError(
                    "refined lattice mixes sign classes: translation on columns "
                    f"{[j for j in range(n) if w >> j & 1]} does not split"
                )
    echelon = _f2_reduce(tvecs)

    def transform(row: Row) -> Row:
        out = list(row)
        for p, b in echelon:
            bit = row[p] & 1
            out[p] = row[p] & 2
            if bit:
                for j in range(n):
                    if j != p and b >> j & 1:
                        out[j] ^= 1
        return tuple(out)

    span_k = _span(K)
    complement: list[int] = []
    for i in range(k):
        g = 1 << i
        if g not in span_k:
            complement.append(g)
            span_k |= {s ^ g for s in span_k}
    if not complement:
        raise ReductionError("holonomy becomes trivial; the group is its lattice")
    M = GenMatrix(tuple(transform(C.rows[g]) for g in complement))
    pivots = tuple(p for p, _ in echelon)
    adjusted = tuple(sorted({j for p, b in echelon for j in range(n) if j != p and b >> j & 1}))
    return Renormalization(M, tuple(K), tuple(complement), pivots, adjusted)


def renormalize_holonomy(A: GenMatrix) -> GenMatrix:
    return renormalize(A).matrix


# -- full reduction ----------------------------------------------------------

@dataclass
class ReductionStep:
    deleted_column: int
    renormalized_columns: tuple[int, ...] = ()
    holonomy_kernel: tuple[int, ...] = ()
    matrix: Optional[GenMatrix] = None
    note: str = ""

    def to_dict(self):
        return {
            "deleted_column": self.deleted_column,
            "renormalized_columns": list(self.renormalized_columns),
            "holonomy_kernel": list(self.holonomy_kernel),
            "matrix": self.matrix.tolist() if self.matrix else None,
            "note": self.note,
        }


@dataclass
class ReductionTrace:
    start: GenMatrix
    steps: list[ReductionStep] = field(default_factory=list)
    final: Optional[GenMatrix] = None

    @property
    def faithful(self) -> bool:
        return validate(self.final).faithful

    def replay(self) -> GenMatrix:
        A = self.start
        for s in self.steps:
            A = delete_column(A, s.deleted_column)
            if s.holonomy_kernel and s.note != "kept":
                A = renormalize_holonomy(A)
        return A

    def to_dict(self):
        return {
            "start": self.start.tolist(),
            "steps": [s.to_dict() for s in self.steps],
            "final": self.final.tolist(),
        }


def reduce_fully(A: GenMatrix, *, keep_diagonal: bool = False) -> ReductionTrace:
    """Delete columns (lowest index first) until no column is deletable.

    After a deletion that drops holonomy the matrix is renormalized when its
    lattice stays diagonal.  Otherwise the torsion-free but unfaithful matrix
    is kept (note "kept") and deletion continues on it; that is still a
    Bieberbach quotient, just not a diagonal one over the original basis.
    With keep_diagonal=True such deletions are skipped instead.
    """
    _require_valid(A)
    trace = ReductionTrace(A)
    cur = A
    while True:
        C = closure(cur)
        cands = _deletable(C)
        step = None
        for j in cands:
            nxt = cur.drop_columns([j])
            K = unfaithful_rows(closure(nxt))
            if not K:
                step = ReductionStep(j, matrix=nxt)
                break
            try:
                ren = renormalize(nxt)
            except NotDiagonalError:
                if keep_diagonal:
                    continue
                step = ReductionStep(j, (), tuple(K), nxt, note="kept")
                break
            except ReductionError:
                step = ReductionStep(j, (), tuple(K), nxt, note="kept")
                break
            step = ReductionStep(
                j,
                tuple(sorted(set(ren.pivot_columns) | set(ren.adjusted_columns))),
                tuple(K),
                ren.matrix,
            )
            break
        if step is None:
            break
        trace.steps.append(step)
        cur = step.matrix
        assert is_torsion_free(closure(cur))
    trace.final = cur
    return trace


# -- irreducibility and minimality ------------------------------------------

def is_col_irreducible(A: GenMatrix) -> bool:
    return not _deletable(closure(A))


def irreducibility_certificate(A: GenMatrix) -> Optional[dict[int, int]]:
    """Column -> the closure row whose only entry 1 sits in that column."""
    C = _require_valid(A)
    assignment: dict[int, int] = {}
    for v, r in C.rows.items():
        ones = [j for j, a in enumerate(r) if a == 1]
        if len(ones) == 1 and ones[0] not in assignment:
            assignment[ones[0]] = v
    if len(assignment) != C.n:
        return None
    return dict(sorted(assignment.items()))


def kernels_distinct(A: GenMatrix) -> bool:
    cols = closure(A).phi_columns()
    return len(set(cols)) == len(cols)


@dataclass(frozen=True)
class MinimalityCertificate:
    matrix: GenMatrix
    row_assignment: dict[int, int]
    phi_columns: list[tuple[str, ...]]

    def check(self) -> bool:
        """Re-verify the certificate from scratch."""
        C = closure(self.matrix)
        if not validate(C).valid:
            return False
        rows = list(self.row_assignment.values())
        if sorted(self.row_assignment) != list(range(C.n)) or len(set(rows)) != len(rows):
            return False
        for j, v in self.row_assignment.items():
            r = C.rows[v]
            if r[j] != 1 or any(a == 1 for i, a in enumerate(r) if i != j):
                return False
        return self.phi_columns == C.phi_columns() and len(set(self.phi_columns)) == C.n

    def to_dict(self):
        return {
            "matrix": self.matrix.tolist(),
            "dimension": self.matrix.n,
            "row_assignment": {str(j): v for j, v in self.row_assignment.items()},
            "phi_columns": ["".join(c) for c in self.phi_columns],
        }


def minimality_certificate(A: GenMatrix) -> Optional[MinimalityCertificate]:
    assignment = irreducibility_certificate(A)
    if assignment is None or not kernels_distinct(A):
        return None
    return MinimalityCertificate(A, assignment, closure(A).phi_columns())


def smaller_deletion_exists(A: GenMatrix) -> bool:
    """Brute force: does deleting any nonempty set of columns stay torsion-free?"""
    C = closure(A)
    rows = list(C.rows.values())
    for size in range(1, C.n):
        for drop in itertools.combinations(range(C.n), size):
            d = set(drop)
            if all(any(a == 1 for j, a in enumerate(r) if j not in d) for r in rows):
                return True
    return False
