import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pd_forms, random_pd, random_target
from oracles import alpha_inf_float
from qfrep.arch import (
    ArchimedeanDensity,
    alpha_infinity_closed,
    alpha_infinity_shell,
    normalized_target,
)
from qfrep.errors import DegenerateGamma, DimensionRegime
from qfrep.forms import QuadraticForm, ScalingData, gamma_profile, minkowski_reduce, scaling_data

Q = QuadraticForm
CORPUS = [(Q.identity(n), Q.diagonal(N)) for n in (3, 4, 5) for N in (1, 2, 5)]
CORPUS.append((Q.identity(4), Q.identity(2)))


def test_closed_examples():
    with mpmath.workdps(40):
        assert abs(alpha_infinity_closed(Q.identity(3), Q.diagonal(1)).value - 2 * mpmath.pi) < 1e-35
        assert abs(alpha_infinity_closed(Q.identity(4), Q.diagonal(1)).value - mpmath.pi**2) < 1e-35
        assert abs(alpha_infinity_closed(Q.identity(3), Q.identity(2)).value
                   - 2 * mpmath.pi**2) < 1e-35


def test_closed_regime():
    with pytest.raises(DimensionRegime):
        alpha_infinity_closed(Q.identity(2), Q.identity(2))
    with pytest.raises(ValueError):
        ArchimedeanDensity(mpmath.mpf(0), "closed_form")


@given(pd_forms(1, 6), st.integers(1, 10**6))
def test_closed_matches_float_oracle(A, N):
    if A.dim < 2:
        return
    got = float(alpha_infinity_closed(A, Q.diagonal(N)).value)
    ref = alpha_inf_float(A.det, N, A.dim, 1)
    assert math.isclose(got, ref, rel_tol=1e-12)


@given(pd_forms(3, 6), st.integers(1, 500))
def test_scaling_law_in_B(A, N):
    n = A.dim
    with mpmath.workdps(40):
        lhs = alpha_infinity_closed(A, Q.diagonal(N)).value
        rhs = mpmath.power(N, mpmath.mpf(n - 2) / 2) * alpha_infinity_closed(A, Q.diagonal(1)).value
        assert abs(lhs - rhs) <= mpmath.mpf(10) ** -30 * rhs


@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
def test_determinant_law_in_A(seed, k):
    rng = random.Random(seed)
    m = rng.choice([1, 2])
    A = random_pd(rng, rng.randint(m + 1, 6))
    B = random_target(rng, m)
    kA = Q([[k * x for x in row] for row in A.entries])
    with mpmath.workdps(40):
        lhs = alpha_infinity_closed(kA, B).value
        rhs = mpmath.power(k, -mpmath.mpf(m * A.dim) / 2) * alpha_infinity_closed(A, B).value
        assert abs(lhs - rhs) <= mpmath.mpf(10) ** -30 * rhs


@pytest.mark.parametrize("A,B", CORPUS, ids=lambda f: str(f.entries))
def test_shell_matches_closed(A, B):
    closed = float(alpha_infinity_closed(A, B).value)
    s = alpha_infinity_shell(A, B, epsilon=1e-2, samples=10**6, seed=0)
    assert s.method == "shell_estimate" and s.samples == 10**6
    assert abs(float(s.value) - closed) / closed <= max(0.03, 4 * s.std_error / closed)


def _exact_shell_bias(n, eps):
    # m = 1: the shell volume is known exactly, so the finite-eps bias is too
    return ((1 + eps) ** (n / 2) - (1 - eps) ** (n / 2)) / (n * eps) - 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_shrinking_eps(n):
    A, B = Q.identity(n), Q.diagonal(2)
    closed = float(alpha_infinity_closed(A, B).value)
    biases = [abs(_exact_shell_bias(n, e)) for e in (1e-1, 1e-2)]
    assert biases[1] <= biases[0] + 1e-12
    for eps, bias in zip((1e-1, 1e-2), biases):
        s = alpha_infinity_shell(A, B, epsilon=eps, samples=10**6, seed=1)
        err = abs(float(s.value) / closed - 1)
        assert err <= bias + 4 * s.std_error / closed


def test_shrinking_eps_m2():
    A, B = Q.identity(4), Q.identity(2)
    closed = float(alpha_infinity_closed(A, B).value)
    errs = []
    for eps in (1e-1, 1e-2):
        s = alpha_infinity_shell(A, B, epsilon=eps, samples=10**6, seed=2)
        errs.append(abs(float(s.value) - closed) / closed)
        assert errs[-1] <= max(0.03, 4 * s.std_error / closed)


def test_shell_deterministic_across_workers():
    A, B = Q.identity(4), Q.identity(2)
    one = alpha_infinity_shell(A, B, samples=2 * 10**5, seed=7, workers=1)
    four = alpha_infinity_shell(A, B, samples=2 * 10**5, seed=7, workers=4)
    assert one == four
    other = alpha_infinity_shell(A, B, samples=2 * 10**5, seed=8)
    assert other.value != one.value


def test_shell_preconditions():
    with pytest.raises(ValueError):
        alpha_infinity_shell(Q.identity(3), Q.diagonal(1), epsilon=0.2)
    with pytest.raises(ValueError):
        alpha_infinity_shell(Q.identity(3), Q.diagonal(1), samples=100)


def test_normalized_target_examples():
    B = Q.diagonal(4, 16)
    c = normalized_target(B, ScalingData(1.0, (2.0, 4.0), 8.0))
    assert c.c == (1.0, 0.0, 1.0)
    assert np.array_equal(c.matrix(), np.eye(2))
    c = normalized_target(Q([[4, 2], [2, 16]]), ScalingData(1.0, (2.0, 4.0), 8.0))
    assert c.c[1] == 0.25
    B = Q.identity(3)
    c = normalized_target(B, ScalingData(9.0, (3.0, 3.0, 3.0), 27.0))
    assert c.c == tuple((1 if i == j else 0) / 9 for i in range(3) for j in range(i, 3))


def test_normalized_target_degenerate():
    with pytest.raises(DegenerateGamma):
        normalized_target(Q.identity(2), ScalingData(1.0, (1.0, math.inf), math.inf))


@given(st.integers(0, 2**32 - 1))
def test_normalized_target_positive_definite(seed):
    rng = random.Random(seed)
    B = minkowski_reduce(random_target(rng, rng.randint(1, 3), 30)).reduced
    prof = gamma_profile(B)
    if prof.degenerate:
        return
    c = normalized_target(B, scaling_data(prof, B, 1.0))
    assert np.all(np.linalg.eigvalsh(c.matrix()) > 0)
