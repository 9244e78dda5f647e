import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from diagbieb.affine import abelianization
from diagbieb.charmatrix import GenMatrix, closure, is_torsion_free, validate
from diagbieb.examples import get_example
from diagbieb.reduction import (
    NotDiagonalError, ReductionError, deletable_columns, delete_column, irreducibility_certificate,
    is_col_irreducible, kernels_distinct, minimality_certificate, reduce_fully, renormalize,
    renormalize_holonomy, smaller_deletion_exists,
)
from diagbieb.search import enumerate_bieberbach

M19 = get_example("min.19.1.1.7")
M72 = get_example("min.72.1.1.502")
DP = get_example("deltaP")
R19 = GenMatrix.of([[2, 1, 3], [1, 2, 2]])

entries = st.sampled_from((0, 1, 2, 3))


def matrices(max_k=3, max_n=7):
    return st.integers(1, max_k).flatmap(lambda k: st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=k, max_size=k)
    )).map(GenMatrix.of)


def test_deletable_examples():
    assert deletable_columns(M19) == {1}
    assert 3 in deletable_columns(GenMatrix.of([[1, 3, 2, 0], [2, 1, 3, 0]]))
    assert deletable_columns(DP) == set()
    with pytest.raises(ReductionError):
        deletable_columns(GenMatrix.of([[1, 2], [2, 1]]))


def test_delete_column_examples():
    assert delete_column(M19, 1) == R19
    Z = GenMatrix.of([[1, 3, 2, 0], [2, 1, 3, 0]])
    assert validate(delete_column(Z, 3)).valid
    D = closure(delete_column(M19, 1))
    C = closure(M19)
    assert all(D.rows[v] == tuple(a for j, a in enumerate(r) if j != 1) for v, r in C.rows.items())
    with pytest.raises(ReductionError):
        delete_column(M19, 0)


def test_renormalize_faithful_unchanged():
    assert renormalize_holonomy(M19) == M19


def test_renormalize_aligned_kernel():
    # r1*r2 = (0,1) acts trivially; its half translation refines column 2
    A = GenMatrix.of([[1, 3], [1, 2]])
    ren = renormalize(A)
    assert ren.kernel == (3,) and ren.complement == (1,)
    assert ren.matrix == GenMatrix.of([[1, 2]])
    assert validate(ren.matrix).valid
    assert abelianization(A) == abelianization(ren.matrix)


def test_renormalize_mixed_classes_not_diagonal():
    A = GenMatrix.of([[1, 1, 2], [0, 1, 3]])
    with pytest.raises(NotDiagonalError):
        renormalize(A)
    # halving units on columns 1 and 3 would describe a different group
    assert abelianization(A) != abelianization(GenMatrix.of([[0, 1, 2]]))


def test_renormalize_trivial_holonomy():
    with pytest.raises(ReductionError):
        renormalize(GenMatrix.of([[1, 0]]))
    with pytest.raises(ReductionError):
        renormalize(GenMatrix.of([[2, 2]]))


def test_renormalize_preserves_group():
    # holonomy drops produced by deleting columns of random valid matrices
    rng = random.Random(7)
    renormalized = not_diagonal = 0
    while renormalized < 150:
        k, n = rng.randint(2, 3), rng.randint(2, 6)
        A = GenMatrix(tuple(tuple(rng.randrange(4) for _ in range(n)) for _ in range(k)))
        if not validate(A).valid:
            continue
        for j in sorted(deletable_columns(A)):
            B = A.drop_columns([j])
            if validate(B).faithful:
                continue
            try:
                ren = renormalize(B)
            except NotDiagonalError:
                not_diagonal += 1
                continue
            except ReductionError:
                continue
            renormalized += 1
            assert validate(ren.matrix).valid
            assert ren.matrix.k == k - (len(ren.kernel) + 1).bit_length() + 1
            assert abelianization(ren.matrix) == abelianization(B)
    assert not_diagonal > 0


def test_reduce_fully_examples():
    tr = reduce_fully(M19)
    assert [s.deleted_column for s in tr.steps] == [1]
    assert tr.final == R19
    assert reduce_fully(DP).steps == []
    for A in enumerate_bieberbach(2, 4, up_to_equivalence=False):
        assert reduce_fully(A).final.n <= 3
    with pytest.raises(ReductionError):
        reduce_fully(GenMatrix.of([[2, 0], [0, 2]]))


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_reduce_fully_trace(A):
    assume(validate(A).valid)
    tr = reduce_fully(A)
    assert tr.replay() == tr.final
    assert is_col_irreducible(tr.final)
    for s in tr.steps:
        assert is_torsion_free(closure(s.matrix))
        if s.renormalized_columns or not s.holonomy_kernel:
            assert validate(s.matrix).valid


def test_irreducibility_certificate_examples():
    assert irreducibility_certificate(R19) == {0: 2, 1: 1, 2: 3}
    assert irreducibility_certificate(M72) is not None
    assert irreducibility_certificate(M19) is None


@settings(max_examples=200)
@given(matrices())
def test_certificate_iff_no_deletable(A):
    assume(validate(A).valid)
    assert (irreducibility_certificate(A) is not None) == (not deletable_columns(A))


def test_kernels_distinct_examples():
    assert kernels_distinct(M72)
    assert not kernels_distinct(GenMatrix.of([[1, 2, 2, 2], [2, 1, 3, 3]]))
    assert kernels_distinct(R19)
    assert ["".join(c) for c in closure(R19).phi_columns()] == ["qpq", "pqq", "qqp"]


def test_minimality_examples():
    cert = minimality_certificate(get_example("lower:k2"))
    assert cert is not None and cert.check()
    assert minimality_certificate(M19) is None
    cert = minimality_certificate(M72)
    assert cert is not None and cert.check()
    assert not smaller_deletion_exists(M72)
    assert smaller_deletion_exists(M19)
