"""Exact Fincke-Pohst enumeration around a rational center.

Both routines work with the quantity ``(y - c)^T G (y - c)`` for an integer
positive definite Gram matrix ``G``, a rational center ``c`` and integer
vectors ``y``.  All pruning bounds are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from ._exact import dot, frac_floor, rational_sqrt, solve, window


class LDL:
    """Rational LDL^T data of a positive definite integer Gram matrix.

    Peeling the last coordinate of the leading (j+1)x(j+1) block gives
        Q(u) = pivot[j] * u_j^2 + Q_j(u' + u_j * h[j])
    where Q_j is the leading j x j block.
    """

    def __init__(self, G):
        self.G = [list(map(int, row)) for row in G]
        k = len(G)
        self.dim = k
        self.pivot: list[Fraction] = []
        self.h: list[list[Fraction]] = []
        for j in range(k):
            if j == 0:
                h: list[Fraction] = []
                d = Fraction(self.G[0][0])
            else:
                g = [self.G[i][j] for i in range(j)]
                h = solve([row[:j] for row in self.G[:j]], g)
                d = self.G[j][j] - dot(g, h)
            if d <= 0:
                raise ValueError("Gram matrix is not positive definite")
            self.pivot.append(d)
            self.h.append(h)


class Enumerator:
    """Lists or counts integer points on (or inside) a shifted ellipsoid.

    ``count`` memoizes sub-problems on (level, center mod Z^k, target): shifting
    the center by an integer vector does not change the count.  This is what
    makes counts in the 10^8 range (e.g. r_8(196)) cheap.
    """

    def __init__(self, G):
        self.ldl = G if isinstance(G, LDL) else LDL(G)
        self.dim = self.ldl.dim
        self._memo: dict = {}
        self.nodes = 0

    # -- counting -----------------------------------------------------------
    def count(self, center, target) -> int:
        c = tuple(Fraction(x) for x in center)
        return self._count(self.dim - 1, c, Fraction(target))

    def _count(self, j, c, T):
        self.nodes += 1
        if T < 0:
            return 0
        shifted = tuple(x - frac_floor(x) for x in c)
        key = (j, shifted, T)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        c = shifted
        d = self.ldl.pivot[j]
        if j == 0:
            total = self._base_count(c[0], T / d)
        else:
            h = self.ldl.h[j]
            lo, hi = window(c[j], T / d)
            total = 0
            for y in range(lo, hi + 1):
                u = y - c[j]
                nc = tuple(c[i] - u * h[i] for i in range(j))
                total += self._count(j - 1, nc, T - d * u * u)
        self._memo[key] = total
        return total

    @staticmethod
    def _base_count(c, s):
        a = rational_sqrt(s)
        if a is None:
            return 0
        if a == 0:
            return int(c.denominator == 1)
        return int((c + a).denominator == 1) + int((c - a).denominator == 1)

    # -- listing ------------------------------------------------------------
    def points(self, center, target, inside: bool = False):
        """Yield integer vectors y with Q(y - c) == target (or <= if inside)."""
        c = tuple(Fraction(x) for x in center)
        T = Fraction(target)
        k = self.dim
        y = [0] * k
        yield from self._walk(k - 1, c, T, y, inside)

    def _walk(self, j, c, T, y, inside):
        self.nodes += 1
        if T < 0:
            return
        d = self.ldl.pivot[j]
        if j == 0 and not inside:
            a = rational_sqrt(T / d)
            if a is None:
                return
            cands = {c[0] + a, c[0] - a}
            for v in sorted(cands):
                if v.denominator == 1:
                    y[0] = int(v)
                    yield tuple(y)
            return
        lo, hi = window(c[j], T / d)
        h = self.ldl.h[j]
        for v in range(lo, hi + 1):
            y[j] = v
            u = v - c[j]
            rest = T - d * u * u
            if j == 0:
                yield tuple(y)
            else:
                nc = tuple(c[i] - u * h[i] for i in range(j))
                yield from self._walk(j - 1, nc, rest, y, inside)
