"""Counting solutions of X^T A X = S mod p^t for every symmetric S at once.

A is first split over the p-adic integers into 1x1 blocks (and 2x2 blocks at
p = 2).  Substituting X = V Y with V unimodular over Z_(p) turns X^T A X into
a sum of independent row contributions, one per block, so the solution counts
are an iterated convolution over the group Sym_m(Z/p^t).

Counts are invariant under S -> g^T S g for g in GL_m(Z/p^t), so each
convolution step is evaluated only at one representative per orbit.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._exact import mod_fraction, valuation
from .errors import CapExceeded

GROUP_CAP = 2**22   # |Sym_m(Z/p^t)|
ROW_CAP = 2**24     # row tuples enumerated for one block


def block_diagonalize(A, p: int) -> list[tuple]:
    """Blocks of a Z_(p)-congruent block diagonal form of A.

    Returns a list of 1-tuples ``(c,)`` and, at p = 2 only, 3-tuples
    ``(a, b, c)`` for blocks [[a, b], [b, c]].  Entries are Fractions with
    denominators prime to p.  Works for singular A too (zero blocks).
    """
    S = [[Fraction(x) for x in row] for row in A]
    blocks: list[tuple] = []

    def val(x):
        return None if x == 0 else valuation(x, p)

    while S:
        k = len(S)
        best = None
        for i in range(k):
            for j in range(i, k):
                v = val(S[i][j])
                if v is None:
                    continue
                # prefer diagonal entries on ties
                key = (v, i != j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            blocks.extend((Fraction(0),) for _ in range(k))
            break
        (v, off), i, j = best
        if off and p != 2:
            # e_i <- e_i + e_j makes a diagonal entry of valuation v
            for r in range(k):
                S[r][i] += S[r][j]
            for c in range(k):
                S[i][c] += S[j][c]
            off = False
        if not off:
            order = [i] + [r for r in range(k) if r != i]
            S = [[S[a][b] for b in order] for a in order]
            d = S[0][0]
            rest = [[S[a][b] - S[a][0] * S[0][b] / d for b in range(1, k)]
                    for a in range(1, k)]
            blocks.append((d,))
            S = rest
            continue
        order = [i, j] + [r for r in range(k) if r not in (i, j)]
        S = [[S[a][b] for b in order] for a in order]
        a, b, c = S[0][0], S[0][1], S[1][1]
        det = a * c - b * b
        inv = [[c / det, -b / det], [-b / det, a / det]]
        rest = []
        for r in range(2, k):
            row = []
            for s in range(2, k):
                u = [S[r][0], S[r][1]]
                w = [S[0][s], S[1][s]]
                corr = sum(u[x] * inv[x][y] * w[y] for x in range(2) for y in range(2))
                row.append(S[r][s] - corr)
            rest.append(row)
        blocks.append((a, b, c))
        S = rest
    return blocks


def _pairs(m):
    return [(i, j) for i in range(m) for j in range(i, m)]


def _unit_generators(p: int, M: int) -> list[int]:
    if p == 2:
        return sorted({(M - 1) % M, 5 % M, 3 % M} - {1 % M}) or [1 % M]
    for g in range(2, p + 1):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            break
    if pow(g, p - 1, p * p) == 1:
        g += p
    return [g % M]


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class _Group:
    """Sym_m(Z/M) encoded as integers idx = sum_k comp_k M^k."""

    def __init__(self, M: int, m: int):
        self.M = M
        self.m = m
        self.pairs = _pairs(m)
        self.R = len(self.pairs)
        self.size = M ** self.R
        if self.size > GROUP_CAP:
            raise CapExceeded(f"group of {self.size} symmetric residues exceeds cap {GROUP_CAP}")
        self.weights = np.array([M**k for k in range(self.R)], dtype=np.int64)

    def encode(self, comps: np.ndarray) -> np.ndarray:
        return (comps % self.M) @ self.weights

    def decode(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.empty(idx.shape + (self.R,), dtype=np.int64)
        for k in range(self.R):
            idx, out[..., k] = np.divmod(idx, self.M)
        return out

    def encode_matrix(self, S) -> int:
        comps = np.array([int(S[i][j]) % self.M for i, j in self.pairs], dtype=np.int64)
        return int(comps @ self.weights)


def _act(group: _Group, comps: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Components of g^T S g for each row of comps."""
    M, m = group.M, group.m
    slot = {}
    for k, (i, j) in enumerate(group.pairs):
        slot[(i, j)] = slot[(j, i)] = k
    out = np.empty_like(comps)
    for k, (i, j) in enumerate(group.pairs):
        # (g^T S g)_ij = sum_{a,b} g_ai g_bj S_ab over the nonzero entries of g
        acc = np.zeros(comps.shape[0], dtype=np.int64)
        for a in range(m):
            if not g[a, i]:
                continue
            for b in range(m):
                if g[b, j]:
                    coef = int(g[a, i]) * int(g[b, j]) % M
                    acc = (acc + coef * comps[:, slot[(a, b)]]) % M
        out[:, k] = acc
    return out


@lru_cache(maxsize=64)
def orbit_data(p: int, t: int, m: int):
    """Orbit label of every element of Sym_m(Z/p^t) and one representative each."""
    M = p**t
    group = _Group(M, m)
    idx = np.arange(group.size, dtype=np.int64)
    comps = group.decode(idx)
    gens = []
    for u in _unit_generators(p, M):
        g = np.eye(m, dtype=np.int64)
        g[0, 0] = u
        gens.append(g)
    for i in range(m):
        for j in range(m):
            if i != j:
                g = np.eye(m, dtype=np.int64)
                g[i, j] = 1
                gens.append(g)
    rows, cols = [], []
    chunk = 1 << 20
    for g in gens:
        for s in range(0, group.size, chunk):
            img = group.encode(_act(group, comps[s:s + chunk], g))
            rows.append(idx[s:s + chunk])
            cols.append(img)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)),
                       shape=(group.size, group.size))
    n_orbits, labels = connected_components(graph, directed=True, connection="weak")
    _, reps = np.unique(labels, return_index=True)
    return group, labels.astype(np.int64), reps.astype(np.int64), n_orbits


def _row_grid(M: int, k: int) -> np.ndarray:
    """All vectors of (Z/M)^k as a (M^k, k) array."""
    if M**k > ROW_CAP:
        raise CapExceeded(f"{M**k} row vectors exceed cap {ROW_CAP}")
    axes = np.indices((M,) * k, dtype=np.int64).reshape(k, -1).T
    return axes


def _binary_line_distribution(group: _Group, vals, p: int, labels: np.ndarray):
    """Value distribution of a x^2 + 2b xy + c y^2 on (Z/p^t)^2 without the M^2 grid.

    Substituting y -> u y shows that every x of valuation i contributes the
    histogram of x = p^i up to multiplication by the unit square u^2, so the
    mass per orbit only needs the rows x = p^i (and x = 0).  Masses are
    spread evenly over each orbit, which is exact because the distribution
    is invariant under unit squares.
    """
    M = group.M
    a, b, c = vals
    y = np.arange(M, dtype=np.int64)
    n_orb = int(labels.max()) + 1
    mass = np.zeros(n_orb, dtype=np.int64)
    x, units = 1, M - M // p  # x = p^i and the number of x with that valuation
    while x < M:
        v = (a * x % M * x + 2 * b * x % M * y + c * y % M * y) % M
        mass += units * np.bincount(labels[v], minlength=n_orb)
        x *= p
        units //= p
    mass += np.bincount(labels[c * y % M * y % M], minlength=n_orb)
    sizes = np.bincount(labels, minlength=n_orb)
    per = mass // sizes
    if np.any(per * sizes != mass):
        raise ArithmeticError("binary block distribution is not orbit-uniform")
    support = np.nonzero(per[labels])[0]
    return group.decode(support), per[labels[support]].astype(np.float64)


def _block_distribution(group: _Group, block: tuple, p: int | None = None,
                        labels: np.ndarray | None = None):
    """Distinct contributions of one block (as group indices) with multiplicities."""
    M, m = group.M, group.m
    vals = [mod_fraction(x, M) for x in block]
    if m == 1 and len(vals) == 3 and labels is not None:
        return _binary_line_distribution(group, vals, p, labels)
    if len(vals) == 1:
        (c,) = vals
        r = _row_grid(M, m)
        comps = np.stack([(c * r[:, i] % M) * r[:, j] for i, j in group.pairs], axis=1)
    else:
        a, b, c = vals
        rs = _row_grid(M, 2 * m)
        r, s = rs[:, :m], rs[:, m:]
        cols = []
        for i, j in group.pairs:
            term = (a * r[:, i] % M) * r[:, j] + (c * s[:, i] % M) * s[:, j]
            term += (b * (r[:, i] * s[:, j] % M + s[:, i] * r[:, j] % M)) % M
            cols.append(term)
        comps = np.stack(cols, axis=1)
    idx = group.encode(comps)
    support, counts = np.unique(idx, return_counts=True)
    return group.decode(support), counts.astype(np.float64)


def solution_counts(A, m: int, p: int, t: int, targets) -> list[int]:
    """#{X in (Z/p^t)^{n x m} : X^T A X = S mod p^t} for each S in targets."""
    group, labels, reps, n_orbits = orbit_data(p, t, m)
    blocks = block_diagonalize(A, p)
    rep_comps = group.decode(reps)
    want = [int(labels[group.encode_matrix(S)]) for S in targets]

    f = [0] * n_orbits
    f[int(labels[0])] = 1
    cache: dict = {}
    for step, block in enumerate(blocks):
        key = tuple(mod_fraction(x, group.M) for x in block)
        if key not in cache:
            cache[key] = _block_distribution(group, block, p, labels)
        W, mult = cache[key]
        last = step == len(blocks) - 1
        todo = sorted(set(want)) if last else range(n_orbits)
        f_arr = f
        new = [0] * n_orbits
        for o in todo:
            diff = (rep_comps[o][None, :] - W) % group.M
            lab = labels[diff @ group.weights]
            h = np.bincount(lab, weights=mult, minlength=n_orbits)
            h = np.rint(h).astype(np.int64)
            nz = np.nonzero(h)[0]
            new[o] = sum(int(h[l]) * f_arr[l] for l in nz)
        f = new
    if not blocks:
        return [int(w == int(labels[0])) for w in want]
    return [f[w] for w in want]


# ---------------------------------------------------------------------------
# m = 1, p odd: convolution directly on orbits
#
# Orbits of Z/p^t under multiplication by unit squares are {0} and
# (v, e) = {p^v u : u a unit, (u/p) = e} for 0 <= v < t.  For a target r in
# orbit o, T[o1][o2] = #{w in o1 : r - w in o2} has a closed form, so every
# convolution step costs O(t^2) instead of O(p^t).


def _legendre(x: int, p: int) -> int:
    return 1 if pow(x % p, (p - 1) // 2, p) == 1 else -1


def _nonresidue(p: int) -> int:
    return next(g for g in range(2, p) if _legendre(g, p) == -1)


def _phi(p: int, k: int) -> int:
    return p ** (k - 1) * (p - 1) if k >= 1 else 1


class _OddLine:
    def __init__(self, p: int, t: int):
        self.p, self.t = p, t
        self.orbits = ["Z"] + [(v, e) for v in range(t) for e in (1, -1)]
        self.index = {o: i for i, o in enumerate(self.orbits)}
        self.g = _nonresidue(p)
        chi_m1 = _legendre(-1, p)
        # J[e1][e2] for unit target class e: #{u in F_p^*: (u)=e1, u != e0, (e0-u)=e2}
        self.J = {}
        for e in (1, -1):
            e0 = 1 if e == 1 else self.g
            for e1 in (1, -1):
                for e2 in (1, -1):
                    self.J[(e, e1, e2)] = sum(
                        1 for u in range(1, p)
                        if u != e0 and _legendre(u, p) == e1 and _legendre(e0 - u, p) == e2)
        self.chi_m1 = chi_m1

    def size(self, o) -> int:
        if o == "Z":
            return 1
        return _phi(self.p, self.t - o[0]) // 2

    def label(self, r: int):
        M = self.p**self.t
        r %= M
        if r == 0:
            return "Z"
        v = 0
        while r % self.p == 0:
            r //= self.p
            v += 1
        return (v, _legendre(r, self.p))

    def structure(self, o):
        """T[o1][o2] for a fixed target r in orbit o."""
        p, t = self.p, self.t
        v, e = (t, None) if o == "Z" else o
        T = {}

        def add(o1, o2, c):
            if c:
                T.setdefault(o1, {})
                T[o1][o2] = T[o1].get(o2, 0) + c

        add("Z", o, 1)
        for o1 in self.orbits[1:]:
            v1, e1 = o1
            size = self.size(o1)
            if v1 < v:
                add(o1, (v1, self.chi_m1 * e1), size)
            elif v1 > v:
                add(o1, (v, e), size)
            else:
                if e1 == e:
                    add(o1, "Z", 1)
                    for s in range(1, t - v):
                        for e2 in (1, -1):
                            add(o1, (v + s, e2), _phi(p, t - v - s) // 2)
                for e2 in (1, -1):
                    add(o1, (v, e2), self.J[(e, e1, e2)] * p ** (t - v - 1))
        return T

    def block_weights(self, c) -> dict:
        """Preimage count per element for w = c x^2, keyed by orbit."""
        p, t = self.p, self.t
        M = p**t
        mu = {}
        if c == 0 or valuation(c, p) >= t:
            return {"Z": M}
        k = valuation(c, p)
        u = mod_fraction(c / Fraction(p) ** k, p)
        zero = M
        for j in range(t):
            if k + 2 * j >= t:
                break
            cnt = _phi(p, t - j)
            o = (k + 2 * j, _legendre(u, p))
            mu[o] = mu.get(o, 0) + cnt
            zero -= cnt
        mu["Z"] = zero
        return {o: c // self.size(o) for o, c in mu.items()}


def _count_line_odd(A, p: int, t: int, target: int) -> int:
    return _count_line_blocks(block_diagonalize(A, p), p, t, target)


def _count_line_blocks(blocks, p: int, t: int, target: int) -> int:
    line = _OddLine(p, t)
    f = {o: 0 for o in line.orbits}
    f["Z"] = 1
    structures = {o: line.structure(o) for o in line.orbits}
    for step, (c,) in enumerate(blocks):
        w = line.block_weights(c)
        todo = [line.label(target)] if step == len(blocks) - 1 else line.orbits
        new = {o: 0 for o in line.orbits}
        for o in todo:
            T = structures[o]
            new[o] = sum(w[o1] * sum(k * f[o2] for o2, k in T[o1].items())
                         for o1 in w if o1 in T)
        f = new
    if not blocks:
        return int(line.label(target) == "Z")
    return f[line.label(target)]


def _count_peeled_odd(A, B, p: int, t: int) -> int | None:
    """Binary targets at odd p whose diagonal form has a unit entry.

    With B = diag(b1, b2) over Z_(p) and b1 a unit, any x1 with
    Q(x1) = b1 spans a unimodular line, which splits off.  Its complement is
    A with <b1> cancelled from the unimodular Jordan component (unique for p
    odd), so the count factors level by level.  Returns None when B has no
    unit entry.
    """
    (b1,), (b2,) = block_diagonalize(B, p)
    if b1 == 0 or valuation(b1, p) > 0:
        return None
    M = p**t
    blocks = block_diagonalize(A, p)
    first = _count_line_blocks(blocks, p, t, mod_fraction(b1, M))
    if first == 0:
        return 0
    units = [c for (c,) in blocks if c != 0 and valuation(c, p) == 0]
    rest = [(c,) for (c,) in blocks if c == 0 or valuation(c, p) > 0]
    det_u = Fraction(1)
    for c in units:
        det_u *= c
    complement = [(Fraction(1),)] * (len(units) - 2)
    if len(units) >= 2:
        complement.append((det_u / b1,))
    return first * _count_line_blocks(complement + rest, p, t, mod_fraction(b2, M))


def count_mod(A, B, p: int, t: int) -> int:
    """#{X mod p^t : X^T A X = B mod p^t}."""
    m = len(B)
    if m == 1 and p != 2:
        return _count_line_odd(A, p, t, int(B[0][0]))
    if m == 2 and p != 2:
        c = _count_peeled_odd(A, B, p, t)
        if c is not None:
            return c
    return solution_counts(A, m, p, t, [B])[0]
