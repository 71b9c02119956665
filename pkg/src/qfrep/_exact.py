"""Exact integer and rational linear algebra on small dense matrices.

Matrices are lists of lists of Python ``int`` (or ``Fraction``); nothing here
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

Matrix = list  # list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Matrix) -> Matrix:
    return [list(col) for col in zip(*M)]


def matmul(X: Matrix, Y: Matrix) -> Matrix:
    Yt = transpose(Y)
    return [[sum(a * b for a, b in zip(row, col)) for col in Yt] for row in X]


def matvec(M: Matrix, v) -> list:
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def congruence(M: Matrix, U: Matrix) -> Matrix:
    """Return U^T M U."""
    return matmul(transpose(U), matmul(M, U))


def leading_minors(M: Matrix) -> list[int]:
    """Leading principal minors by fraction-free (Bareiss) elimination.

    Elimination runs without pivoting, so the k-th pivot is exactly the k-th
    leading minor.  Stops after the first non-positive minor, since later
    pivots are meaningless once one vanishes.
    """
    n = len(M)
    a = [list(map(int, row)) for row in M]
    minors = []
    prev = 1
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv <= 0:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return minors


def det(M: Matrix) -> int:
    """Exact determinant of an integer matrix (Bareiss with row pivoting)."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(M: Matrix) -> Matrix:
    """Inverse over the rationals by Gauss-Jordan with Fractions."""
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for k in range(n):
        piv = next(r for r in range(k, n) if a[r][k] != 0)
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for r in range(n):
            if r != k and a[r][k] != 0:
                f = a[r][k]
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    return [row[n:] for row in a]


def solve(M: Matrix, b) -> list[Fraction]:
    """Solve the square nonsingular system M x = b over Q."""
    Minv = inverse(M)
    return [sum(Fraction(c) * y for c, y in zip(row, b)) for row in Minv]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_hermite(M: Matrix) -> tuple[Matrix, Matrix, int]:
    """Column-style echelon form by unimodular column operations.

    Returns ``(H, U, r)`` with ``M U = H``, ``U`` unimodular, and the first
    ``r`` columns of ``H`` lower-echelon with positive pivots; the remaining
    columns of ``H`` are zero, so the last ``n - r`` columns of ``U`` span the
    integer kernel of ``M``.
    """
    rows = len(M)
    n = len(M[0]) if rows else 0
    H = [list(map(int, row)) for row in M]
    U = identity(n)

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for mat in (H, U):
            for row in mat:
                x, y = row[j], row[k]
                row[j], row[k] = a * x + b * y, c * x + d * y

    r = 0
    for i in range(rows):
        if r >= n:
            break
        for k in range(r + 1, n):
            if H[i][k] == 0:
                continue
            a, b = H[i][r], H[i][k]
            g, s, t = _xgcd(a, b)
            colop(r, k, s, t, -b // g, a // g)
        if H[i][r] == 0:
            continue
        if H[i][r] < 0:
            for mat in (H, U):
                for row in mat:
                    row[r] = -row[r]
        r += 1
    return H, U, r


def solve_integer(M: Matrix, b) -> tuple[list[int], Matrix] | None:
    """All integer solutions of ``M y = b``.

    Returns ``(y0, K)`` where every solution is ``y0 + K z`` for a unique
    integer vector ``z`` (``K`` is n x (n - rank), columns as kernel basis),
    or ``None`` when the system has no integer solution.
    """
    n = len(M[0])
    H, U, r = column_hermite(M)
    w = [0] * r
    col = 0
    pivots = []
    for i, row in enumerate(H):
        if col < r and row[col] != 0:
            pivots.append((i, col))
            col += 1
    assigned = [False] * r
    for i, row in enumerate(H):
        acc = int(b[i]) - sum(row[j] * w[j] for j in range(r) if assigned[j])
        piv = next((c for (pi, c) in pivots if pi == i), None)
        if piv is None:
            if acc != 0:
                return None
            continue
        if acc % row[piv]:
            return None
        w[piv] = acc // row[piv]
        assigned[piv] = True
    y0 = [sum(U[i][j] * w[j] for j in range(r)) for i in range(n)]
    K = [row[r:] for row in U]
    return y0, K


def _round_half_toward_zero(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0); exact halves go toward zero."""
    q, rem = divmod(num, den)
    if 2 * rem > den or (2 * rem == den and q < 0):
        q += 1
    return q


def pair_reduce(G: Matrix, U: Matrix | None = None) -> tuple[Matrix, Matrix]:
    """Greedy pairwise size reduction of a positive definite Gram matrix.

    Repeats ``b_i <- b_i - round(G_ij / G_jj) b_j`` while any diagonal entry
    strictly decreases, then sorts the basis by norm (stable).  Returns the
    new Gram matrix and the accumulated unimodular transform (columns).
    """
    n = len(G)
    G = [list(map(int, row)) for row in G]
    U = identity(n) if U is None else [list(row) for row in U]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j or 2 * abs(G[i][j]) <= G[j][j]:
                    continue
                q = _round_half_toward_zero(G[i][j], G[j][j])
                # column op: b_i <- b_i - q b_j
                for row in U:
                    row[i] -= q * row[j]
                for k in range(n):
                    G[k][i] -= q * G[k][j]
                for k in range(n):
                    G[i][k] -= q * G[j][k]
                changed = True
    order = sorted(range(n), key=lambda k: G[k][k])
    G = [[G[a][b] for b in order] for a in order]
    U = [[row[k] for k in order] for row in U]
    return G, U


def frac_floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def frac_ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def window(c: Fraction, s: Fraction) -> tuple[int, int]:
    """Integer range ``lo..hi`` of all integers y with (y - c)^2 <= s.

    Exact: the float guess is corrected by rational comparisons.  Returns an
    empty range (lo > hi) when s < 0.
    """
    if s < 0:
        return 1, 0
    r = float(s) ** 0.5
    cf = float(c)

    def below_top(y):  # y <= c + sqrt(s)
        return y <= c or (y - c) ** 2 <= s

    def above_bottom(y):  # y >= c - sqrt(s)
        return y >= c or (c - y) ** 2 <= s

    hi = int(cf + r)
    while below_top(hi + 1):
        hi += 1
    while not below_top(hi):
        hi -= 1
    lo = int(cf - r)
    while above_bottom(lo - 1):
        lo -= 1
    while not above_bottom(lo):
        lo += 1
    return lo, hi


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero int or Fraction."""
    if x == 0:
        raise ValueError("valuation of zero")
    x = Fraction(x)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7, 11, 13):
        if n % d == 0:
            return n == d
    d = 17
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_up_to(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if is_prime(p)]


def factorize(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, int(x))
    return g


def mod_fraction(x: Fraction, mod: int) -> int:
    """Image of a rational with denominator prime to ``mod`` in Z/mod."""
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, mod) % mod
