"""Non-archimedean side: exponential sums, p-adic densities, singular series.

Densities come from exact solution counts modulo p^t; the singular series
comes from complete exponential sums.  The two routes share no code beyond
the Z_(p) diagonalization helper, so agreement between them is a real check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import mpmath
import numpy as np

from . import _padic
from ._exact import factorize, gcd_list, is_prime, mod_fraction, primes_up_to, valuation
from .errors import CapExceeded, NotPrime, OracleTooLarge, StabilizationNotReached
from .forms import QuadraticForm, validate

__all__ = [
    "ExponentialSumQuery",
    "LocalDensity",
    "SingularSeriesTruncation",
    "exp_sum",
    "alpha_p",
    "alpha_p_bruteforce",
    "density_at_level",
    "singular_series_term",
    "singular_series_truncated",
    "euler_factor_partials",
    "local_solubility",
    "DPS",
    "Q_CAP",
]

DPS = 40          # decimal digits for complex sums
Q_CAP = 10**8     # direct evaluation cap on q^{mn}
ORACLE_CAP = 10**8


def _upper(B) -> tuple[int, ...]:
    m = len(B)
    return tuple(int(B[i][j]) for i in range(m) for j in range(i, m))


def _pairs(m):
    return [(i, j) for i in range(m) for j in range(i, m)]


def _rank_from_R(R: int) -> int:
    m = int((math.isqrt(8 * R + 1) - 1) // 2)
    if m * (m + 1) // 2 != R:
        raise ValueError(f"{R} is not a triangular number")
    return m


@dataclass(frozen=True)
class ExponentialSumQuery:
    """Modulus q, frequencies a_ij and targets B_ij over i <= j (row-major)."""
    q: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")
        a = tuple(int(x) % self.q for x in self.a)
        b = tuple(int(x) for x in self.b)
        if len(a) != len(b):
            raise ValueError("a and b must have the same length")
        _rank_from_R(len(a))
        if math.gcd(self.q, gcd_list(a)) != 1:
            raise ValueError("gcd(q, a) must be 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return _rank_from_R(len(self.a))


@dataclass(frozen=True)
class LocalDensity:
    p: int
    t_used: int
    value: Fraction
    excess: int | None = None   # mn - R; value * p^(t_used * excess) is the count mod p^t

    def __post_init__(self):
        v = Fraction(self.value)
        object.__setattr__(self, "value", v)
        if v < 0:
            raise ValueError("density must be nonnegative")
        d = v.denominator
        while d % self.p == 0:
            d //= self.p
        if d != 1:
            raise ValueError("denominator must be a power of p")
        if self.excess is not None:
            scaled = v * Fraction(self.p) ** (self.t_used * self.excess)
            if scaled.denominator != 1:
                raise ValueError("value * p^(t(mn-R)) must be an integer")

    @property
    def count(self) -> int | None:
        if self.excess is None:
            return None
        return int(self.value * Fraction(self.p) ** (self.t_used * self.excess))


@dataclass(frozen=True)
class SingularSeriesTruncation:
    Q: int
    terms: tuple[tuple[int, Fraction], ...]
    partial_sum: mpmath.mpf
    euler_partial: mpmath.mpf
    imag_residue: mpmath.mpf
    densities: tuple[LocalDensity, ...] = field(default=())

    def __post_init__(self):
        with mpmath.workdps(DPS):
            exact = sum((t for _, t in self.terms), Fraction(0))
            ref = mpmath.mpf(exact.numerator) / exact.denominator
            if abs(ref - self.partial_sum) > mpmath.mpf(10) ** (-DPS + 5) * max(1, abs(ref)):
                raise ValueError("partial_sum must equal the sum of terms")

    @property
    def exact_partial_sum(self) -> Fraction:
        return sum((t for _, t in self.terms), Fraction(0))


# ---------------------------------------------------------------------------
# exponential sums


def _check_prime(p: int):
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


@lru_cache(maxsize=32)
def _value_histogram(A_entries, m: int, q: int, cap: int):
    """Histogram of (z_i^T A z_j mod q)_{i<=j} over all z in (Z/q)^{n x m}."""
    n = len(A_entries)
    total = q ** (n * m)
    if total > cap:
        raise CapExceeded(f"direct evaluation needs {total} points, cap is {cap}")
    A = np.array(A_entries, dtype=np.int64) % q
    pairs = _pairs(m)
    weights = np.array([q**k for k in range(len(pairs))], dtype=np.int64)
    hist = np.zeros(q ** len(pairs), dtype=np.int64)
    chunk = 1 << 18
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((len(idx), n * m), dtype=np.int64)
        for k in range(n * m):
            idx, digits[:, k] = np.divmod(idx, q)
        Z = digits.reshape(-1, m, n)
        AZ = np.einsum("ab,cjb->cja", A, Z) % q
        comps = np.stack([np.einsum("ca,ca->c", Z[:, i], AZ[:, j]) % q for i, j in pairs],
                         axis=1)
        hist += np.bincount(comps @ weights, minlength=len(hist))
    support = np.nonzero(hist)[0]
    comps = np.empty((len(support), len(pairs)), dtype=np.int64)
    rest = support.copy()
    for k in range(len(pairs)):
        rest, comps[:, k] = np.divmod(rest, q)
    return comps, hist[support]


def _roots_of_unity(q: int):
    return [mpmath.expjpi(mpmath.mpf(2 * k) / q) for k in range(q)]


def _direct(A: QuadraticForm, m: int, q: int, a, b, cap: int):
    comps, counts = _value_histogram(A.entries, m, q, cap)
    a_arr = np.array(a, dtype=np.int64)
    phase = (comps @ a_arr - int(np.dot(a_arr, np.array(b, dtype=object)) % q)) % q
    # totals are at most q^{mn} <= cap, exact in float64
    per_residue = np.rint(np.bincount(phase, weights=counts, minlength=q)).astype(np.int64)
    roots = _roots_of_unity(q)
    return mpmath.fsum(int(c) * roots[k] for k, c in enumerate(per_residue) if c)


def _gauss_one(u: int, p: int, s: int):
    """sum_{x mod p^s} e(u x^2 / p^s) for p odd, p not dividing u."""
    if s == 0:
        return mpmath.mpc(1)
    root = mpmath.mpf(p) ** (mpmath.mpf(s) / 2)
    if s % 2 == 0:
        return mpmath.mpc(root)
    leg = pow(u % p, (p - 1) // 2, p)
    leg = 1 if leg == 1 else -1
    eps = mpmath.mpc(1) if p % 4 == 1 else mpmath.mpc(0, 1)
    return leg * eps * root


def _phase_matrix(A: QuadraticForm, m: int, a) -> list[list[Fraction]]:
    """Symmetric W with z^T W z = sum_{i<=j} a_ij z_i^T A z_j."""
    n = A.dim
    coef = {}
    for k, (i, j) in enumerate(_pairs(m)):
        coef[(i, j)] = Fraction(a[k]) if i == j else Fraction(a[k], 2)
        coef[(j, i)] = coef[(i, j)]
    W = [[Fraction(0)] * (m * n) for _ in range(m * n)]
    for i in range(m):
        for j in range(m):
            c = coef[(i, j)]
            if c == 0:
                continue
            for x in range(n):
                for y in range(n):
                    W[i * n + x][j * n + y] = c * A.entries[x][y]
    return W


def _gauss_path(A: QuadraticForm, m: int, p: int, r: int, a, b):
    q = p**r
    W = _phase_matrix(A, m, a)
    total = mpmath.mpc(1)
    for (w,) in _padic.block_diagonalize(W, p):
        if w == 0 or valuation(w, p) >= r:
            total *= q
            continue
        j = valuation(w, p)
        u = mod_fraction(w / Fraction(p) ** j, p)
        total *= mpmath.mpf(p) ** j * _gauss_one(u, p, r - j)
    shift = sum(x * y for x, y in zip(a, b)) % q
    return total * mpmath.expjpi(mpmath.mpf(-2 * shift) / q)


def _prime_power_sum(A, m, p, r, a, b, cap):
    if p == 2:
        return _direct(A, m, p**r, a, b, cap)
    return _gauss_path(A, m, p, r, a, b)


def exp_sum(query: ExponentialSumQuery, A: QuadraticForm, cap: int = Q_CAP,
            method: str = "auto"):
    """S_{a,q}(b) = sum_{z mod q} e_q(sum_{i<=j} a_ij (z_i^T A z_j - B_ij)).

    ``method="auto"`` splits q into prime powers (CRT), evaluates odd prime
    powers through diagonalized Gauss sums and powers of 2 directly.
    ``method="direct"`` evaluates the whole sum by exhaustive histogram and
    fails when q^{mn} exceeds ``cap``.
    """
    A = validate(A)
    q, a, b, m = query.q, query.a, query.b, query.m
    with mpmath.workdps(DPS):
        if q == 1:
            return mpmath.mpc(1)
        if method == "direct":
            return +_direct(A, m, q, a, b, cap)
        if method != "auto":
            raise ValueError(f"unknown method {method!r}")
        total = mpmath.mpc(1)
        for p, r in sorted(factorize(q).items()):
            qp = p**r
            rest = q // qp
            u = pow(rest, -1, qp)
            ap = tuple(x * u % qp for x in a)
            total *= _prime_power_sum(A, m, p, r, ap, b, cap)
        return +total


def _primitive_vectors(q: int, R: int):
    for a in product(range(q), repeat=R):
        if math.gcd(q, gcd_list(a)) == 1:
            yield a


def singular_series_term(A: QuadraticForm, B: QuadraticForm, q: int, cap: int = Q_CAP,
                         method: str = "auto") -> tuple[Fraction, mpmath.mpf]:
    """Exact q^{-mn} sum_{(a,q)=1} S_{a,q}(b) and the imaginary residue.

    The inner sum is a rational integer, so it is recovered exactly by rounding
    the high-precision value; the rounding residual is checked.
    """
    A, B = validate(A), validate(B)
    m, n = B.dim, A.dim
    b = _upper(B.entries)
    with mpmath.workdps(DPS):
        acc = mpmath.mpc(0)
        for a in _primitive_vectors(q, len(b)):
            acc += exp_sum(ExponentialSumQuery(q, a, b), A, cap=cap, method=method)
        re = mpmath.nint(acc.real)
        if abs(acc.real - re) > mpmath.mpf(10) ** -6 * max(1, abs(re)):
            raise ArithmeticError(f"term for q={q} is not integral: {acc}")
        scale = mpmath.mpf(q) ** (m * n)
        return Fraction(int(re), q ** (m * n)), abs(acc.imag) / scale


def _excess(n: int, m: int) -> int:
    return m * n - m * (m + 1) // 2


def density_at_level(A: QuadraticForm, B: QuadraticForm, p: int, t: int) -> Fraction:
    """p^{-t(mn-R)} #{X mod p^t : X^T A X = B mod p^t} from the counting engine."""
    _check_prime(p)
    A, B = validate(A), validate(B)
    c = _padic.count_mod(A.entries, B.entries, p, t)
    return Fraction(c) / Fraction(p) ** (t * _excess(A.dim, B.dim))


def alpha_p(A: QuadraticForm, B: QuadraticForm, p: int,
            t_cap: int | None = None) -> LocalDensity:
    """p-adic density at a certified stable level.

    p odd and prime to 2 det A det B: level 1 already equals the limit.
    Otherwise levels t, t+1 are compared from t0 = 1 + 2 v_p(2 det A det B)
    upward and the first equal pair is accepted, up to ``t_cap``
    (default: t0 + 3, i.e. three consecutive comparisons).
    """
    _check_prime(p)
    A, B = validate(A), validate(B)
    if t_cap is not None and t_cap < 1:
        raise ValueError("t_cap must be at least 1")
    ex = _excess(A.dim, B.dim)
    D = 2 * A.det * B.det

    def density(t):
        return density_at_level(A, B, p, t)

    if p != 2 and D % p:
        return LocalDensity(p, 1, density(1), ex)
    t0 = 1 + 2 * valuation(D, p)
    if t_cap is None:
        t_cap = t0 + 3
    if t0 + 1 > t_cap:
        raise StabilizationNotReached(t_cap, p)
    prev = density(t0)
    for t in range(t0, t_cap):
        nxt = density(t + 1)
        if nxt == prev:
            return LocalDensity(p, t, prev, ex)
        prev = nxt
    raise StabilizationNotReached(t_cap, p)


def alpha_p_bruteforce(A: QuadraticForm, B: QuadraticForm, p: int, t: int,
                       cap: int = ORACLE_CAP) -> Fraction:
    """Density at level t from an exhaustive scan of X mod p^t (oracle)."""
    _check_prime(p)
    A, B = validate(A), validate(B)
    n, m = A.dim, B.dim
    M = p**t
    if M ** (n * m) > cap:
        raise OracleTooLarge(f"scan of {M ** (n * m)} matrices exceeds cap {cap}")
    An = np.array(A.entries, dtype=np.int64)
    X = np.indices((M,) * n, dtype=np.int64).reshape(n, -1).T
    norms = np.einsum("ia,ab,ib->i", X, An, X) % M
    cols = [X[norms == B.entries[i][i] % M] for i in range(m)]

    def extend(k, chosen):
        cand = cols[k]
        ok = np.ones(len(cand), dtype=bool)
        for i, x in enumerate(chosen):
            ok &= (cand @ (An @ x) - B.entries[i][k]) % M == 0
        if k == m - 1:
            return int(ok.sum())
        return sum(extend(k + 1, chosen + [v]) for v in cand[ok])

    count = extend(0, [])
    return Fraction(count) / Fraction(p) ** (t * _excess(n, m))


def euler_factor_partials(A: QuadraticForm, B: QuadraticForm, p: int, r_max: int,
                          cap: int = Q_CAP) -> list[Fraction]:
    """Partial sums over r <= r_max of p^{-rmn} sum_{(a,p^r)=1} S_{a,p^r}(b)."""
    _check_prime(p)
    out, acc = [], Fraction(0)
    for r in range(r_max + 1):
        term = Fraction(1) if r == 0 else singular_series_term(A, B, p**r, cap)[0]
        acc += term
        out.append(acc)
    return out


def singular_series_truncated(A: QuadraticForm, B: QuadraticForm, Q: int,
                              cap: int = Q_CAP,
                              t_cap: int | None = None) -> SingularSeriesTruncation:
    """q-sum up to Q next to the Euler product of counted densities over p <= Q."""
    A, B = validate(A), validate(B)
    terms = [(1, Fraction(1))]
    imag = mpmath.mpf(0)
    for q in range(2, Q + 1):
        term, res = singular_series_term(A, B, q, cap)
        terms.append((q, term))
        imag += res
    dens = tuple(alpha_p(A, B, p, t_cap) for p in primes_up_to(Q))
    with mpmath.workdps(DPS):
        total = sum((t for _, t in terms), Fraction(0))
        partial = mpmath.mpf(total.numerator) / total.denominator
        euler = Fraction(1)
        for d in dens:
            euler *= d.value
        euler_mp = mpmath.mpf(euler.numerator) / euler.denominator
    return SingularSeriesTruncation(Q, tuple(terms), partial, euler_mp, imag, dens)


def local_solubility(A: QuadraticForm, B: QuadraticForm, prime_cap: int,
                     t_cap: int | None = None) -> list[int]:
    """Primes p <= prime_cap with alpha_p(A, B) = 0."""
    return [p for p in primes_up_to(prime_cap) if alpha_p(A, B, p, t_cap).value == 0]
