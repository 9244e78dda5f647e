"""First Betti number, diffuseness for C2^2 holonomy and Delta_P witnesses.

Delta_P is the 3-dimensional non-diffuse Hantzsche-Wendt group
<x, y | x^-1 y^2 x y^2 = y^-1 x^2 y x^2 = 1>.  A Bieberbach group is diffuse
iff it is poly-Z iff every nontrivial subgroup has positive b1, so b1 = 0
alone already rules diffuseness out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .affine import AffineIsometry, compose, eval_word, realize, translation_rank
from .charmatrix import GenMatrix, closure, validate
from .reduction import reduce_fully

DIFFUSE = "Diffuse(polyZ)"
NON_DIFFUSE = "NonDiffuse"
NO_CERTIFICATE = "no certificate"

RELATIONS = ("x^-1 y^2 x y^2", "y^-1 x^2 y x^2")


class DiffuseError(ValueError):
    pass


class WitnessError(DiffuseError):
    pass


def _require_valid(A: GenMatrix):
    rep = validate(A)
    if not rep.valid:
        raise DiffuseError(
            f"not a Bieberbach group of diagonal type (torsion-free={rep.torsion_free}, "
            f"faithful={rep.faithful})"
        )


def fixed_columns(A: GenMatrix) -> list[int]:
    """Closure columns lying in {0,1}: coordinates fixed by all of the holonomy."""
    # a column is fixed by the group iff it is fixed by every generator
    return [j for j in range(A.n) if all(r[j] < 2 for r in A.rows)]


def betti1(A: GenMatrix) -> int:
    _require_valid(A)
    return len(fixed_columns(A))


# -- Delta_P witness -------------------------------------------------------------

@dataclass(frozen=True)
class DeltaPWitness:
    alpha: AffineIsometry
    beta: AffineIsometry
    relation_checks: tuple[bool, bool]
    independence_vectors: tuple[tuple, ...]
    independence_rank: int

    @property
    def ok(self) -> bool:
        return all(self.relation_checks) and self.independence_rank == 3

    def to_dict(self):
        return {
            "alpha": {"signs": list(self.alpha.signs), "translation2": list(self.alpha.trans2)},
            "beta": {"signs": list(self.beta.signs), "translation2": list(self.beta.trans2)},
            "relations": list(RELATIONS),
            "relation_checks": list(self.relation_checks),
            "independence_vectors": [[str(x) for x in v] for v in self.independence_vectors],
            "independence_rank": self.independence_rank,
        }


def check_deltap_relations(A: GenMatrix) -> DeltaPWitness:
    """Evaluate the Delta_P relations on the two realized generators; no checks."""
    if A.k != 2:
        raise DiffuseError(f"holonomy must be C2^2, got C2^{A.k}")
    alpha, beta = realize(A).generators
    gens = {"x": alpha, "y": beta}
    checks = tuple(eval_word(gens, w).is_identity() for w in RELATIONS)
    squares = [compose(alpha, alpha), compose(beta, beta)]
    ab = compose(alpha, beta)
    squares.append(compose(ab, ab))
    rank = translation_rank(squares)
    return DeltaPWitness(alpha, beta, checks, tuple(s.translation for s in squares), rank)


def deltap_witness(A: GenMatrix, *, require_b1_zero: bool = True) -> DeltaPWitness:
    """Show <alpha, beta> is Delta_P for a C2^2 group with b1 = 0.

    With require_b1_zero=False the relations are simply evaluated on the
    group's generators; they hold iff every fixed column is zero.
    """
    _require_valid(A)
    if A.k != 2:
        raise DiffuseError(f"holonomy must be C2^2, got C2^{A.k}")
    if require_b1_zero and fixed_columns(A):
        raise DiffuseError("b1 > 0")
    w = check_deltap_relations(A)
    if not w.ok:
        raise WitnessError(
            f"Delta_P verification failed: relations {w.relation_checks}, "
            f"rank {w.independence_rank}"
        )
    return w


# -- classification ----------------------------------------------------------------

@dataclass(frozen=True)
class DiffuseClassification:
    verdict: str
    center_rank: int
    witness: Optional[DeltaPWitness] = None
    reason: str = ""

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "center_rank": self.center_rank,
            "witness": self.witness.to_dict() if self.witness else None,
            "reason": self.reason,
        }


def classify_c22(A: GenMatrix) -> DiffuseClassification:
    """Non-diffuse iff every fixed column is the zero column.

    Then the group is Z^b1 x (restriction to the other columns) and the
    restriction has b1 = 0, so it contains Delta_P.
    """
    _require_valid(A)
    if A.k != 2:
        raise DiffuseError(f"holonomy must be C2^2, got C2^{A.k}")
    fixed = fixed_columns(A)
    b1 = len(fixed)
    nonzero = [j for j in fixed if any(r[j] for r in A.rows)]
    if nonzero:
        return DiffuseClassification(
            DIFFUSE, b1, None, f"fixed column {nonzero[0] + 1} is nonzero"
        )
    rest = A.drop_columns(fixed)
    return DiffuseClassification(
        NON_DIFFUSE, b1, deltap_witness(rest), "every fixed column is zero"
    )


def classify(A: GenMatrix) -> DiffuseClassification:
    """Best available verdict for any holonomy rank."""
    _require_valid(A)
    if A.k == 1:
        return DiffuseClassification(DIFFUSE, betti1(A), None, "cyclic holonomy")
    if A.k == 2:
        return classify_c22(A)
    b1 = betti1(A)
    if b1 == 0:
        trace = nondiffuse_pipeline(A)
        return DiffuseClassification(NON_DIFFUSE, 0, trace.terminal, "b1 = 0")
    return DiffuseClassification(NO_CERTIFICATE, b1, None, "holonomy rank >= 3 with b1 > 0")


# -- hyperplane restriction and the pipeline ----------------------------------------

def _f2_basis(elems: list[int]) -> list[int]:
    basis: list[int] = []
    span = {0}
    for v in sorted(elems):
        if v not in span:
            basis.append(v)
            span |= {s ^ v for s in span}
    return basis


def hyperplane(u: int, k: int) -> list[int]:
    """Nonzero elements of the index-2 subgroup ker(v -> <u, v>)."""
    return [v for v in range(1, 1 << k) if bin(u & v).count("1") % 2 == 0]


def b1_zero_subgroup(A: GenMatrix, *, enforce_bound: bool = True
                     ) -> Optional[tuple[list[int], GenMatrix]]:
    """First index-2 subgroup H whose preimage still has b1 = 0.

    Subgroups are scanned as kernels of the functionals u = 1, 2, ..., and
    the returned matrix uses the closure rows of the smallest-first basis of H.
    """
    _require_valid(A)
    k, n = A.k, A.n
    if k < 3:
        raise DiffuseError("hyperplane restriction needs holonomy rank >= 3")
    if fixed_columns(A):
        raise DiffuseError("b1 > 0")
    if enforce_bound and n >= (1 << k) - 1:
        raise DiffuseError(f"dimension {n} is not below 2^k - 1 = {(1 << k) - 1}")
    C = closure(A)
    for u in range(1, 1 << k):
        H = hyperplane(u, k)
        if any(all(C.rows[v][j] < 2 for v in H) for j in range(n)):
            continue
        basis = _f2_basis(H)
        return H, GenMatrix(tuple(C.rows[v] for v in basis))
    return None


@dataclass
class PipelineStep:
    kind: str  # "quotient" or "hyperplane-restriction"
    data: dict
    matrix: GenMatrix

    def to_dict(self):
        return {"kind": self.kind, "data": self.data, "matrix": self.matrix.tolist()}


@dataclass
class PipelineTrace:
    start: GenMatrix
    steps: list[PipelineStep] = field(default_factory=list)
    terminal: Optional[DeltaPWitness] = None
    final: Optional[GenMatrix] = None

    @property
    def hyperplane_steps(self) -> int:
        return sum(s.kind == "hyperplane-restriction" for s in self.steps)

    def to_dict(self):
        return {
            "start": self.start.tolist(),
            "steps": [s.to_dict() for s in self.steps],
            "final": self.final.tolist() if self.final else None,
            "terminal": self.terminal.to_dict() if self.terminal else None,
        }


def _check_step(M: GenMatrix):
    if not validate(M).valid or fixed_columns(M):
        raise DiffuseError(f"pipeline produced an invalid or b1 > 0 matrix: {M.tolist()}")


def nondiffuse_pipeline(A: GenMatrix) -> PipelineTrace:
    """Quotient to at most n_d dimensions, restrict to a hyperplane, repeat.

    Ends at C2^2 holonomy with a verified Delta_P witness.  The chain of
    subgroups and quotients is a structure certificate: a subgroup of the
    input maps onto Delta_P with poly-Z kernel.
    """
    _require_valid(A)
    if fixed_columns(A):
        raise DiffuseError("b1 > 0")
    trace = PipelineTrace(A)
    cur = A
    while cur.k > 2:
        red = reduce_fully(cur, keep_diagonal=True)
        if red.steps:
            cur = red.final
            _check_step(cur)
            trace.steps.append(PipelineStep(
                "quotient",
                {"deleted_columns": [s.deleted_column for s in red.steps],
                 "holonomy_rank": cur.k, "dimension": cur.n},
                cur,
            ))
            if cur.k <= 2:
                break
        found = b1_zero_subgroup(cur, enforce_bound=False)
        if found is None:
            raise DiffuseError("no index-2 subgroup keeps b1 = 0")
        H, M = found
        _check_step(M)
        assert M.k == cur.k - 1
        trace.steps.append(PipelineStep(
            "hyperplane-restriction",
            {"subgroup": H, "holonomy_rank": M.k, "dimension": M.n},
            M,
        ))
        cur = M
    if cur.k < 2:
        raise DiffuseError("holonomy dropped below C2^2 with b1 = 0")
    trace.final = cur
    trace.terminal = deltap_witness(cur)
    return trace

