"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import math
import random
import time
from fractions import Fraction

import mpmath

from conftest import random_pd, random_target, random_unimodular, record_criterion
from oracles import naive_count_mod, r8_divisor_formula, theta_power_counts
from qfrep.arch import alpha_infinity_closed, alpha_infinity_shell
from qfrep.errors import CapExceeded
from qfrep.enumeration import RepresentationProblem, brute_force_count, count_representations
from qfrep.forms import QuadraticForm, gamma_profile, minkowski_reduce, theorem_threshold
from qfrep.local import (
    alpha_p,
    alpha_p_bruteforce,
    density_at_level,
    local_solubility,
    singular_series_truncated,
)

Q = QuadraticForm


def _count(A, B, workers=1):
    return count_representations(RepresentationProblem(A, B), workers=workers).count


def test_criterion_1_enumeration_oracle():
    rng = random.Random(1)
    start = time.perf_counter()
    mismatches, done = [], 0
    while done < 220:
        m = rng.choice([1, 2])
        n = rng.randint(max(2, m), 6)
        A = random_pd(rng, n, 6)
        B = random_target(rng, m, 12)
        prob = RepresentationProblem(A, B)
        fast = count_representations(prob).count
        slow = brute_force_count(prob).count
        if fast != slow:
            mismatches.append((A.entries, B.entries, fast, slow))
        done += 1
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed <= 300
    record_criterion(1, ok, f"{done} instances, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert ok, mismatches[:3]


def test_criterion_2_classical_counts():
    start = time.perf_counter()
    A = Q.identity(4)
    theta = theta_power_counts(4, 50)
    bad = []
    for N in range(1, 51):
        c = _count(A, Q.diagonal(N))
        if c != brute_force_count(RepresentationProblem(A, Q.diagonal(N))).count or c != theta[N]:
            bad.append(N)
    spots = _count(A, Q.diagonal(1)) == 8 and _count(A, Q.diagonal(4)) == 24
    elapsed = time.perf_counter() - start
    ok = not bad and spots and elapsed <= 30
    record_criterion(2, ok, f"N=1..50 mismatches {bad}, spot values ok={spots}, {elapsed:.1f}s")
    assert ok


def _density_corpus():
    rng = random.Random(3)
    corpus = [(Q.identity(2), Q.diagonal(1)), (Q.identity(4), Q.diagonal(1)),
              (Q.identity(3), Q.diagonal(7)), (Q.identity(2), Q.identity(2)),
              (Q([[2, 1], [1, 2]]), Q.diagonal(2)), (Q.identity(3), Q([[2, 1], [1, 2]]))]
    for _ in range(25):
        m = rng.choice([1, 1, 2])
        A = random_pd(rng, rng.randint(m, 4 if m == 1 else 3), 6)
        corpus.append((A, random_target(rng, m, 8)))
    return corpus


def test_criterion_3_local_densities():
    checked, bad, unreached = 0, [], 0
    for A, B in _density_corpus():
        n, m = A.dim, B.dim
        for p in (2, 3, 5, 7):
            try:
                d = alpha_p(A, B, p)
            except CapExceeded:
                # the stable level is out of reach; every oracle level is still compared
                d = None
                unreached += 1
            for t in range(1, 12):
                if p ** (t * n * m) > 10**8:
                    break
                brute = alpha_p_bruteforce(A, B, p, t)
                checked += 1
                if density_at_level(A, B, p, t) != brute:
                    bad.append((A.entries, B.entries, p, t))
                if d is not None and t >= d.t_used and brute != d.value:
                    bad.append((A.entries, B.entries, p, t, "stable"))
    exact = alpha_p(Q.identity(2), Q.diagonal(1), 3).value == Fraction(4, 3)
    unram = True
    rng = random.Random(33)
    for _ in range(30):
        m = rng.choice([1, 2])
        A, B = random_pd(rng, rng.randint(m, 3), 6), random_target(rng, m, 8)
        for p in (3, 5, 7):
            if (2 * A.det * B.det) % p:
                d = alpha_p(A, B, p)
                unram &= d.t_used == 1
                if p ** (2 * A.dim * m) <= 10**7:
                    unram &= alpha_p_bruteforce(A, B, p, 2) == d.value
    ok = not bad and exact and unram
    record_criterion(3, ok, f"{checked} level checks, {len(bad)} mismatches, "
                            f"{unreached} stable levels beyond the group cap, "
                            f"alpha_3(I2,(1))=4/3 {exact}, unramified t=1 {unram}")
    assert ok, bad[:3]


def test_criterion_4_euler_factorization():
    start = time.perf_counter()
    s = singular_series_truncated(Q.identity(5), Q.diagonal(4), 20)
    elapsed = time.perf_counter() - start
    q_sum, euler = float(s.partial_sum), float(s.euler_partial)
    rel = abs(q_sum - euler) / abs(euler)
    ok = rel <= 1e-3 and s.imag_residue <= 1e-9 and elapsed <= 120
    record_criterion(4, ok, f"q-sum {q_sum:.6f}, Euler partial {euler:.6f}, rel diff {rel:.2e}, "
                            f"imag residue {float(s.imag_residue):.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_archimedean():
    with mpmath.workdps(40):
        c3 = alpha_infinity_closed(Q.identity(3), Q.diagonal(1)).value
        c4 = alpha_infinity_closed(Q.identity(4), Q.diagonal(1)).value
        digits = (abs(c3 - 2 * mpmath.pi) < 1e-12 * 2 * mpmath.pi
                  and abs(c4 - mpmath.pi**2) < 1e-12 * mpmath.pi**2)
    worst, slowest, ok_shell = 0.0, 0.0, True
    corpus = [(Q.identity(3), Q.diagonal(1)), (Q.identity(4), Q.diagonal(1)),
              (Q.identity(5), Q.diagonal(2)), (Q.identity(4), Q.identity(2))]
    for A, B in corpus:
        closed = float(alpha_infinity_closed(A, B).value)
        start = time.perf_counter()
        s = alpha_infinity_shell(A, B, epsilon=1e-2, samples=10**6, seed=0)
        slowest = max(slowest, time.perf_counter() - start)
        rel = abs(float(s.value) - closed) / closed
        worst = max(worst, rel)
        ok_shell &= rel <= max(0.03, 4 * s.std_error / closed)
    ok = digits and ok_shell and slowest <= 120
    record_criterion(5, ok, f"closed forms to 12 digits {digits}, worst shell rel err {worst:.4f}, "
                            f"slowest {slowest:.1f}s")
    assert ok


def test_criterion_6_main_term():
    A = Q.identity(8)
    errs = []
    for N in (64, 100, 144, 196):
        exact = _count(A, Q.diagonal(N))
        assert exact == r8_divisor_formula(N)
        euler = Fraction(1)
        for p in _primes(100):
            euler *= alpha_p(A, Q.diagonal(N), p).value
        with mpmath.workdps(40):
            main = alpha_infinity_closed(A, Q.diagonal(N)).value * euler.numerator / euler.denominator
            errs.append(float(abs(exact - main) / main))
    bounded = all(e <= 0.10 for e in errs)
    shrinking = all(b < a for a, b in zip(errs, errs[1:]))
    ok = bounded and shrinking
    record_criterion(6, ok, "relative errors " + ", ".join(f"{e:.10e}" for e in errs)
                     + f"; <= 0.10 {bounded}; strictly shrinking {shrinking}")
    assert ok


def _primes(x):
    return [p for p in range(2, x + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_criterion_7_euler_product_band():
    corpus = [(Q.identity(n), Q.diagonal(N)) for n in (5, 6, 7) for N in (1, 2, 3, 6, 12)]
    corpus += [(Q.diagonal(1, 1, 1, 1, 2), Q.diagonal(N)) for N in (1, 5, 7)]
    corpus += [(Q.identity(7), B) for B in (Q.identity(2), Q([[2, 1], [1, 2]]), Q.diagonal(1, 2))]
    corpus += [(Q.identity(8), Q([[2, 1], [1, 2]])), (Q.identity(7), Q([[2, 1], [1, 3]])),
               (Q.identity(8), Q([[2, 1], [1, 18]]))]
    values, outside = [], []
    for A, B in corpus:
        assert A.dim >= 2 * B.dim + 3
        if local_solubility(A, B, 100):
            continue
        euler = Fraction(1)
        for p in _primes(100):
            euler *= alpha_p(A, B, p).value
        values.append(float(euler))
        if not 1e-2 <= euler <= 1e2:
            outside.append((A.entries, B.entries, float(euler)))
    ok = not outside and len(values) >= 20
    record_criterion(7, ok, f"{len(values)} soluble instances, range "
                            f"[{min(values):.4f}, {max(values):.4f}], outside {len(outside)}")
    assert ok, outside


def test_criterion_8_invariance():
    rng = random.Random(8)
    failures = []
    trials = 0
    for _ in range(40):
        m = rng.choice([1, 2])
        n = rng.randint(max(m, 2), 5)
        A, B = random_pd(rng, n, 5), random_target(rng, m, 10)
        base = _count(A, B)
        U = random_unimodular(rng, n)
        V = random_unimodular(rng, m)
        if _count(A.transform(U), B) != base:
            failures.append(("A-invariance", A.entries, B.entries))
        if _count(A, B.transform(V)) != base:
            failures.append(("B-invariance", A.entries, B.entries))
        if _count(A, B, workers=3) != base:
            failures.append(("threads", A.entries, B.entries))
        trials += 1
    for _ in range(60):
        m = rng.randint(1, 3)
        B = random_target(rng, m, 40)
        red = minkowski_reduce(B)
        if B.transform(red.transform) != red.reduced:
            failures.append(("transform", B.entries))
        prof = gamma_profile(red.reduced)
        if not prof.degenerate:
            g = [mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else x
                 for x in prof.gamma_i]
            if not (g[0] == 1 and all(a >= b for a, b in zip(g, g[1:]))):
                failures.append(("gamma", red.reduced.entries))
            lo = theorem_threshold(prof, m)[0]
            if m > 1:
                bigger = type(prof)(prof.gamma_i, prof.gamma + 1, False, prof.diagonal)
                if theorem_threshold(bigger, m)[0] < lo:
                    failures.append(("threshold", red.reduced.entries))
        trials += 1
    A4, I2 = Q.identity(4), Q.identity(2)
    s1 = alpha_infinity_shell(A4, I2, samples=2 * 10**5, seed=5, workers=1)
    s4 = alpha_infinity_shell(A4, I2, samples=2 * 10**5, seed=5, workers=4)
    if s1 != s4:
        failures.append(("shell threads",))
    ok = not failures
    record_criterion(8, ok, f"{trials} randomized instances, {len(failures)} failures")
    assert ok, failures[:5]
