import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pd_forms, random_pd, random_target, random_unimodular
from oracles import naive_count, theta_power_counts
from qfrep.enumeration import (
    RepresentationCount,
    RepresentationProblem,
    brute_force_count,
    count_representations,
    vectors_of_norm,
)
from qfrep.errors import OracleTooLarge
from qfrep.forms import QuadraticForm

Q = QuadraticForm


def N(A, B, **kw):
    return count_representations(RepresentationProblem(A, B), **kw).count


def test_vectors_of_norm_examples():
    v = vectors_of_norm(Q.identity(4), 1)
    assert len(v) == 8 and set(v) == {tuple(s * int(i == j) for j in range(4))
                                      for i in range(4) for s in (1, -1)}
    v = vectors_of_norm(Q.identity(3), 2)
    assert len(v) == 12 and all(sorted(map(abs, x)) == [0, 1, 1] for x in v)
    assert vectors_of_norm(Q.identity(3), 7) == []


@given(pd_forms(1, 4), st.integers(1, 20))
def test_vectors_of_norm_complete_and_symmetric(A, t):
    v = vectors_of_norm(A, t)
    assert len(v) == len(set(v))
    assert all(A.value(x) == t for x in v)
    assert set(v) == {tuple(-c for c in x) for x in v}
    assert len(v) == N(A, Q.diagonal(t))
    assert len(v) == brute_force_count(RepresentationProblem(A, Q.diagonal(t))).count


def test_count_examples():
    assert N(Q.identity(4), Q.diagonal(4)) == 24
    assert N(Q.identity(2), Q.identity(2)) == 8
    assert N(Q.identity(3), Q.diagonal(7)) == 0


def test_brute_force_examples():
    bf = lambda A, B: brute_force_count(RepresentationProblem(A, B)).count  # noqa: E731
    assert bf(Q.identity(2), Q.diagonal(5)) == 8
    assert bf(Q.identity(4), Q.diagonal(1)) == 8
    assert bf(Q([[2, 1], [1, 2]]), Q.diagonal(2)) == 6


def test_brute_force_cap():
    with pytest.raises(OracleTooLarge):
        brute_force_count(RepresentationProblem(Q.identity(8), Q.diagonal(50)), cap=10**6)


def test_counts_against_naive_scan():
    # literal scan over all matrices with entries in [-box, box]
    cases = [
        (Q.identity(2), Q.identity(2), 1),
        (Q([[2, 1], [1, 2]]), Q([[2, 1], [1, 2]]), 2),
        (Q.identity(3), Q([[2, 1], [1, 2]]), 1),
        (Q([[2, 1, 0], [1, 3, 1], [0, 1, 2]]), Q.diagonal(3), 2),
    ]
    for A, B, box in cases:
        assert N(A, B) == naive_count(A.matrix(), B.matrix(), box)


def test_sums_of_squares_match_theta():
    for n, top in ((2, 60), (3, 60), (4, 60), (5, 30)):
        r = theta_power_counts(n, top)
        assert [N(Q.identity(n), Q.diagonal(t)) for t in range(1, top + 1)] == r[1:]


def test_large_count_is_memoized():
    # r_8(196) from Jacobi's divisor formula
    res = count_representations(RepresentationProblem(Q.identity(8), Q.diagonal(196)))
    assert res.count == 134040048
    assert res.nodes_visited < 10**6


def test_m_greater_than_n():
    assert N(Q.identity(1), Q.identity(2)) == 0


def test_count_record_validation():
    with pytest.raises(ValueError):
        RepresentationCount(-1, 0, 0.0)


@given(st.integers(0, 2**32 - 1))
def test_oracle_equivalence_random(seed):
    rng = random.Random(seed)
    A = random_pd(rng, rng.randint(2, 4))
    B = random_target(rng, rng.randint(1, 2), 8)
    prob = RepresentationProblem(A, B)
    assert count_representations(prob).count == brute_force_count(prob).count


@given(st.integers(0, 2**32 - 1))
def test_unimodular_invariance(seed):
    rng = random.Random(seed)
    n, m = rng.randint(2, 4), rng.randint(1, 2)
    A = random_pd(rng, n)
    B = random_target(rng, m, 10)
    base = N(A, B)
    assert N(A, B.transform(random_unimodular(rng, m))) == base
    assert N(A.transform(random_unimodular(rng, n)), B) == base


@given(st.integers(0, 2**32 - 1))
def test_column_order_and_workers(seed):
    rng = random.Random(seed)
    A = random_pd(rng, rng.randint(3, 5))
    B = random_target(rng, 2, 10)
    base = N(A, B)
    assert N(A, B, column_order=[1, 0]) == base
    assert N(A, B, workers=3) == base


@given(pd_forms(1, 5), st.integers(1, 30))
def test_sign_symmetry(A, t):
    c = N(A, Q.diagonal(t))
    assert c % 2 == 0
