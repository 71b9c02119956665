"""Exact representation counts N(A, B) = #{X in Z^{n x m} : X^T A X = B}.

Columns are found one at a time.  Column k must satisfy the bilinear
constraints (A x_i)^T x_k = B_ik for i < k, which cut out a coset
y0 + K Z^d of a sublattice; on that coset the norm condition becomes an
inhomogeneous quadratic equation that is enumerated (or, for the last column,
counted) by exact Fincke-Pohst.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exact
from ._lattice import Enumerator
from .errors import OracleTooLarge
from .forms import QuadraticForm, validate

__all__ = [
    "RepresentationProblem",
    "RepresentationCount",
    "vectors_of_norm",
    "count_representations",
    "brute_force_count",
]


@dataclass(frozen=True)
class RepresentationProblem:
    A: QuadraticForm
    B: QuadraticForm

    def __post_init__(self):
        object.__setattr__(self, "A", validate(self.A))
        object.__setattr__(self, "B", validate(self.B))

    @property
    def n(self) -> int:
        return self.A.dim

    @property
    def m(self) -> int:
        return self.B.dim


@dataclass(frozen=True)
class RepresentationCount:
    count: int
    nodes_visited: int
    elapsed: float  # seconds

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def vectors_of_norm(A: QuadraticForm, t: int) -> list[tuple[int, ...]]:
    """All integer x with x^T A x = t, sorted."""
    A = validate(A)
    if t < 0:
        return []
    enum = Enumerator(A.entries)
    return sorted(enum.points([0] * A.dim, t))


class _CosetSolver:
    """Solutions of x^T A x = norm subject to (A x_i)^T x = b_i for given x_i."""

    def __init__(self, A: QuadraticForm):
        self.A = A
        self._enums: dict = {}  # Gram matrix -> Enumerator (shared memo)
        self.nodes = 0

    def _setup(self, prev, rhs, norm):
        A = self.A.matrix()
        rows = [_exact.matvec(A, x) for x in prev]
        sol = _exact.solve_integer(rows, rhs)
        if sol is None:
            return None
        y0, K = sol
        d = len(K[0]) if K and K[0] else 0
        if d == 0:
            return y0, None, None, None, None
        G = _exact.congruence(A, K)
        G, V = _exact.pair_reduce(G)
        K = _exact.matmul(K, V)
        key = tuple(map(tuple, G))
        enum = self._enums.get(key)
        if enum is None:
            enum = self._enums[key] = Enumerator(G)
        # x = y0 + K z ; Q(x) = z^T G z + 2 z^T w + Q(y0), w = K^T A y0
        Ay0 = _exact.matvec(A, y0)
        w = [_exact.dot([K[r][c] for r in range(len(K))], Ay0) for c in range(d)]
        c = [-x for x in _exact.solve(G, w)]
        q0 = _exact.dot(y0, Ay0)
        Gc = _exact.matvec(G, c)
        target = Fraction(norm) - q0 + _exact.dot(c, Gc)
        return y0, K, enum, c, target

    def count(self, prev, rhs, norm) -> int:
        setup = self._setup(prev, rhs, norm)
        if setup is None:
            return 0
        y0, K, enum, c, target = setup
        if K is None:
            return int(self.A.value(y0) == norm)
        before = enum.nodes
        total = enum.count(c, target)
        self.nodes += enum.nodes - before
        return total

    def vectors(self, prev, rhs, norm):
        setup = self._setup(prev, rhs, norm)
        if setup is None:
            return []
        y0, K, enum, c, target = setup
        if K is None:
            return [tuple(y0)] if self.A.value(y0) == norm else []
        before = enum.nodes
        out = []
        for z in enum.points(c, target):
            out.append(tuple(y0[i] + sum(K[i][j] * z[j] for j in range(len(z)))
                             for i in range(len(y0))))
        self.nodes += enum.nodes - before
        return out


def _count_subtree(solver: _CosetSolver, B, prev) -> int:
    k = len(prev)
    m = len(B)
    rhs = [B[i][k] for i in range(k)]
    if k == m - 1:
        return solver.count(prev, rhs, B[k][k])
    total = 0
    for x in solver.vectors(prev, rhs, B[k][k]):
        total += _count_subtree(solver, B, prev + [x])
    return total


def count_representations(prob: RepresentationProblem, workers: int = 1,
                          column_order=None) -> RepresentationCount:
    """Exact N(A, B).

    ``column_order`` permutes the order in which columns of X are found (the
    count cannot depend on it).  ``workers > 1`` splits the search at the first
    column; partial counts are added, so the result is identical.
    """
    start = time.perf_counter()
    A, Bf = prob.A, prob.B
    n, m = A.dim, Bf.dim
    if m > n:
        return RepresentationCount(0, 0, time.perf_counter() - start)
    order = list(range(m)) if column_order is None else list(column_order)
    if sorted(order) != list(range(m)):
        raise ValueError("column_order must be a permutation of range(m)")
    B = [[Bf.entries[i][j] for j in order] for i in order]

    first = Enumerator(A.entries)
    if m == 1:
        count = first.count([0] * n, B[0][0])
        return RepresentationCount(count, first.nodes, time.perf_counter() - start)

    firsts = sorted(first.points([0] * n, B[0][0]))
    nodes = first.nodes
    if workers <= 1 or len(firsts) < 2:
        solver = _CosetSolver(A)
        count = sum(_count_subtree(solver, B, [x]) for x in firsts)
        nodes += solver.nodes
    else:
        chunks = [firsts[i::workers] for i in range(workers)]

        def run(chunk):
            solver = _CosetSolver(A)
            return sum(_count_subtree(solver, B, [x]) for x in chunk), solver.nodes

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
        count = sum(c for c, _ in parts)
        nodes += sum(k for _, k in parts)
    return RepresentationCount(count, nodes, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# brute-force oracle


def _box_radius(A: QuadraticForm, t: int) -> int:
    lam = float(np.linalg.eigvalsh(np.array(A.entries, dtype=float))[0])
    lam *= 1 - 1e-9
    return math.ceil(math.sqrt(t / lam)) if t > 0 else 0


def _box_vectors(A: np.ndarray, r: int, t: int) -> np.ndarray:
    """Every x with |x|_inf <= r and x^T A x == t, by exhaustive scan."""
    n = A.shape[0]
    axis = np.arange(-r, r + 1, dtype=np.int64)
    found = []
    # scan the box in slabs over the first coordinate
    k = 2 * r + 1
    if n == 1:
        rest = np.zeros((1, 0), dtype=np.int64)
    else:
        rest = np.indices((k,) * (n - 1), dtype=np.int64).reshape(n - 1, -1).T - r
    for x0 in axis:
        X = np.concatenate([np.full((rest.shape[0], 1), x0, dtype=np.int64), rest], axis=1)
        vals = np.einsum("ij,jk,ik->i", X, A, X)
        found.append(X[vals == t])
    return np.concatenate(found, axis=0)


def brute_force_count(prob: RepresentationProblem, cap: int = 10**9) -> RepresentationCount:
    """Count solutions by scanning integer boxes; a test oracle only.

    Column i ranges over |x|_inf <= ceil(sqrt(B_ii / lambda_min(A))).  Every
    column box is scanned exhaustively for the diagonal equation, then every
    tuple of surviving columns is checked against the off-diagonal equations.
    The scan size (box points plus checked tuples) must stay below ``cap``.
    """
    start = time.perf_counter()
    A, B = prob.A, prob.B
    n, m = A.dim, B.dim
    radii = [_box_radius(A, B.entries[i][i]) for i in range(m)]
    box_points = sum((2 * r + 1) ** n for r in radii)
    if box_points > cap:
        raise OracleTooLarge(f"box scan of {box_points} points exceeds cap {cap}")
    An = np.array(A.entries, dtype=np.int64)
    cols = [_box_vectors(An, r, B.entries[i][i]) for i, r in enumerate(radii)]
    tuples = math.prod(len(c) for c in cols)
    if box_points + tuples > cap:
        raise OracleTooLarge(f"tuple check of {tuples} candidates exceeds cap {cap}")

    def extend(k, chosen_mask_rows):
        # chosen_mask_rows: list of selected column vectors so far
        if k == m:
            return 1
        cand = cols[k]
        ok = np.ones(len(cand), dtype=bool)
        for i, x in enumerate(chosen_mask_rows):
            ok &= (cand @ (An @ x)) == B.entries[i][k]
        if k == m - 1:
            return int(ok.sum())
        return sum(extend(k + 1, chosen_mask_rows + [v]) for v in cand[ok])

    count = extend(0, [])
    return RepresentationCount(int(count), int(box_points + tuples),
                               time.perf_counter() - start)
