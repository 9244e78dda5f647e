import itertools

import pytest

from diagbieb.charmatrix import (
    GenMatrix, canonical_codes, canonicalize, closure, iter_all_matrices, validate,
)
from diagbieb.examples import get_example
from diagbieb.reduction import is_col_irreducible
from diagbieb.search import (
    CounterexampleError, ResourceGuardError, brute_force_counts, build_lower_bound_matrix,
    certify_lower_bound, column_tables, enumerate_bieberbach, exhaustive_reducibility,
    k4_counting_check, lower_bound_value, n_d_report, sample_reducibility, upper_bound_value,
)


def test_lower_bound_matrices():
    assert build_lower_bound_matrix(2) == get_example("lower:k2")
    assert build_lower_bound_matrix(3) == get_example("min.72.1.1.502")
    assert build_lower_bound_matrix(4) == get_example("lower:k4")
    assert build_lower_bound_matrix(5) == get_example("lower:k5")
    with pytest.raises(ValueError):
        build_lower_bound_matrix(1)


@pytest.mark.parametrize("k,dim", [(2, 3), (3, 5), (4, 10), (5, 14), (6, 21), (7, 27)])
def test_certify_lower_bound(k, dim):
    cert = certify_lower_bound(k)
    assert cert.matrix.n == dim == lower_bound_value(k)
    assert cert.check()


@pytest.mark.parametrize("k", [4, 6])
def test_even_construction_claims(k):
    A = build_lower_bound_matrix(k)
    C = closure(A)
    pairs = list(itertools.combinations(range(k), 2))
    for v, row in C.rows.items():
        idx = [i for i in range(k) if v >> i & 1]
        m = len(idx)
        if m < 2:
            continue
        assert row[k + pairs.index((idx[0], idx[1]))] == 1
        if m % 2:
            assert all(row[l] == 2 for l in range(k) if l not in idx)
        else:
            assert row[idx[0]] == 3


def test_bound_formulas():
    assert upper_bound_value(5) == 21
    assert [lower_bound_value(k) for k in range(2, 8)] == [3, 5, 10, 14, 21, 27]


def test_enumerate_examples():
    mats = list(enumerate_bieberbach(2, 3))
    assert canonicalize(GenMatrix.of([[1, 2, 2], [2, 1, 3]])) in mats
    assert list(enumerate_bieberbach(2, 2)) == []
    assert not any(validate(A).valid for A in iter_all_matrices(2, 2))
    # [[1]] defines Z with trivial holonomy, so no faithful C2 matrix of size 1x1 exists
    assert list(enumerate_bieberbach(1, 1)) == []
    assert list(enumerate_bieberbach(1, 2)) == [GenMatrix.of([[1, 2]]), GenMatrix.of([[1, 3]])]
    with pytest.raises(ResourceGuardError):
        next(enumerate_bieberbach(4, 3))


@pytest.mark.parametrize("k,n", [(1, 2), (1, 3), (2, 3), (2, 4), (3, 3)])
def test_enumeration_matches_brute_force(k, n):
    classes = {}
    for A in iter_all_matrices(k, n):
        if validate(A).valid:
            classes.setdefault(canonical_codes(A), A)
    mats = list(enumerate_bieberbach(k, n))
    assert all(validate(A).valid for A in mats)
    assert len({canonical_codes(A) for A in mats}) == len(mats)
    assert {canonical_codes(A) for A in mats} == set(classes)


def test_brute_force_cross_check():
    counts = brute_force_counts(2, 3)
    assert counts["ordered_valid"] == counts["folded_from_multisets"]
    d = exhaustive_reducibility(2, 3, expect_reducible=False)
    assert counts["ordered_irreducible"] > 0 and d.irreducible_found > 0


def test_exhaustive_examples(digest_2_4):
    assert digest_2_4.irreducible_found == 0
    assert exhaustive_reducibility(2, 5).irreducible_found == 0
    with pytest.raises(CounterexampleError) as info:
        exhaustive_reducibility(2, 3)
    assert is_col_irreducible(info.value.matrix) and validate(info.value.matrix).valid
    with pytest.raises(ResourceGuardError):
        exhaustive_reducibility(4, 11)


@pytest.mark.slow
def test_exhaustive_3_7():
    d = exhaustive_reducibility(3, 7)
    assert d.irreducible_found == 0 and d.column_law_violations == 0


def test_digest_counts_small():
    d = exhaustive_reducibility(2, 3, expect_reducible=False)
    valid = [A for A in enumerate_bieberbach(2, 3, up_to_equivalence=False)]
    assert d.valid_found == len(valid)
    assert d.irreducible_found == sum(is_col_irreducible(A) for A in valid)
    assert d.raw_multisets == 816


def test_digest_schedule_independent():
    a = exhaustive_reducibility(3, 4, expect_reducible=False)
    b = exhaustive_reducibility(3, 4, expect_reducible=False, jobs=2)
    assert a.deterministic_dict() == b.deterministic_dict() and a.digest == b.digest


def test_column_tables_law():
    for k in (2, 3, 4):
        assert column_tables(k).law.all()


def test_counting_trace():
    tr = k4_counting_check()
    assert tr.passed
    assert tr.conclusion == "no col-irreducible valid matrix with k=4, n=11"
    names = [s.name for s in tr.steps]
    assert names[0] == "column_count_law" and names[-1] == "contradiction"
    pig = next(s for s in tr.steps if s.name == "pigeonhole")
    assert pig.data["ceil"] == 3 and pig.data["min_max_load"] == 3
    assert pig.data["assignments"] == 4 ** 11


def test_sampling_small():
    s = sample_reducibility(3, 7, 2000, seed=1)
    assert s.valid_found == 2000 and s.irreducible_found == 0 and s.column_law_violations == 0
    assert sample_reducibility(3, 7, 2000, seed=1) == s
    s = sample_reducibility(2, 3, 500, seed=2)
    assert s.irreducible_found > 0


def test_reports(digest_2_4, digest_3_6):
    digests = {(2, 4): digest_2_4, (3, 6): digest_3_6}
    assert n_d_report(1).exact == 1
    r = n_d_report(2, digests=digests)
    assert (r.lower, r.upper, r.exact) == (3, 3, 3)
    assert r.summary() == "n_d(C2^2) = 3 (exact)"
    assert n_d_report(3, digests=digests).exact == 5
    assert n_d_report(4, digests=digests).exact == 10
    r = n_d_report(5)
    assert (r.lower, r.upper, r.exact) == (14, 21, None)
    assert r.summary() == "14 <= n_d(C2^5) <= 21"
