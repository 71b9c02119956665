"""Archimedean density: the Gamma-function closed form and a shell-volume estimate.

The estimate is the volume of {X : |x_i^T A x_j - B_ij| <= eps P_i P_j} with
P_i = B_ii^(1/2), divided by (2 eps)^R Pi^(m+1), Pi = prod P_i.  It converges
to the closed form as eps -> 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from ._exact import leading_minors
from .errors import DegenerateGamma, DimensionRegime
from .forms import QuadraticForm, ScalingData, validate

__all__ = [
    "ArchimedeanDensity",
    "NormalizedTarget",
    "alpha_infinity_closed",
    "alpha_infinity_shell",
    "normalized_target",
]

DPS = 40
CHUNK = 1 << 16  # samples per generator stream


@dataclass(frozen=True)
class ArchimedeanDensity:
    value: mpmath.mpf
    method: str  # "closed_form" | "shell_estimate"
    epsilon: float | None = None
    samples: int | None = None
    std_error: float | None = None

    def __post_init__(self):
        if self.method not in ("closed_form", "shell_estimate"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "closed_form" and not self.value > 0:
            raise ValueError("closed-form density must be positive")
        if self.value < 0:
            raise ValueError("density must be nonnegative")


def alpha_infinity_closed(A: QuadraticForm, B: QuadraticForm) -> ArchimedeanDensity:
    A, B = validate(A), validate(B)
    n, m = A.dim, B.dim
    if n <= m:
        raise DimensionRegime(f"closed form needs n > m (got n={n}, m={m})")
    with mpmath.workdps(DPS):
        v = mpmath.power(A.det, -mpmath.mpf(m) / 2)
        v *= mpmath.power(B.det, mpmath.mpf(n - m - 1) / 2)
        v *= mpmath.power(mpmath.pi, mpmath.mpf(m * (2 * n - m + 1)) / 4)
        for j in range(n - m + 1, n + 1):
            v /= mpmath.gamma(mpmath.mpf(j) / 2)
        return ArchimedeanDensity(+v, "closed_form")


@dataclass(frozen=True)
class NormalizedTarget:
    c: tuple[float, ...]  # c_ij = B_ij / (P_i P_j), i <= j
    m: int

    def matrix(self) -> np.ndarray:
        C = np.empty((self.m, self.m))
        k = 0
        for i in range(self.m):
            for j in range(i, self.m):
                C[i, j] = C[j, i] = self.c[k]
                k += 1
        return C


def normalized_target(B: QuadraticForm, scaling: ScalingData) -> NormalizedTarget:
    """c_ij = B_ij / (P_i P_j); C = D B D with D = diag(1/P_i)."""
    B = validate(B)
    m = B.dim
    P = scaling.P
    if len(P) != m or not all(math.isfinite(x) and x > 0 for x in P):
        raise DegenerateGamma("scaling widths must be finite and positive")
    # leading minors of D B D are those of B times positive squares of 1/P_i
    if any(x <= 0 for x in leading_minors(B.entries)):
        raise ValueError("normalized target is not positive definite")
    c = tuple(B.entries[i][j] / (P[i] * P[j]) for i in range(m) for j in range(i, m))
    return NormalizedTarget(c, m)


# ---------------------------------------------------------------------------
# shell estimate


def _unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _stream(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, chunk], dtype=np.uint64)))


def _shell_points(rng, Linv_T, n, lo, hi, size):
    """Uniform samples of {x : lo <= x^T A x <= hi}, A = L L^T."""
    u = rng.standard_normal((size, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = (lo ** (n / 2) + rng.random(size) * (hi ** (n / 2) - lo ** (n / 2))) ** (1 / n)
    return (u * r[:, None]) @ Linv_T.T


def _chunk_hits(args):
    A, L_inv_T, Bm, eps, seed, chunk, size = args
    n = A.shape[0]
    m = Bm.shape[0]
    rng = _stream(seed, chunk)
    P = np.sqrt(np.diag(Bm))
    if m == 1:
        # uniform in the ellipsoid x^T A x <= B(1+eps), count the shell
        hi = Bm[0, 0] * (1 + eps)
        x = _shell_points(rng, L_inv_T, n, 0.0, hi, size)
        v = np.einsum("ia,ab,ib->i", x, A, x)
        return int(np.count_nonzero(np.abs(v - Bm[0, 0]) <= eps * Bm[0, 0]))
    cols = []
    for i in range(m):
        lo = max(Bm[i, i] * (1 - eps), 0.0)
        cols.append(_shell_points(rng, L_inv_T, n, lo, Bm[i, i] * (1 + eps), size))
    ok = np.ones(size, dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            v = np.einsum("ia,ab,ib->i", cols[i], A, cols[j])
            ok &= np.abs(v - Bm[i, j]) <= eps * P[i] * P[j]
    return int(np.count_nonzero(ok))


def alpha_infinity_shell(A: QuadraticForm, B: QuadraticForm, epsilon: float = 1e-2,
                         samples: int = 10**6, seed: int = 0,
                         workers: int = 1) -> ArchimedeanDensity:
    """Monte Carlo shell-volume estimate of the archimedean density.

    m = 1 samples the enclosing ellipsoid.  m >= 2 samples every column
    uniformly from its own diagonal shell (exact volume) and accepts on the
    off-diagonal constraints.  Samples are drawn in fixed chunks from
    counter-based streams keyed by (seed, chunk), so the estimate does not
    depend on ``workers``.
    """
    A, B = validate(A), validate(B)
    if not 0 < epsilon <= 0.1:
        raise ValueError("epsilon must lie in (0, 0.1]")
    if samples < 10**4:
        raise ValueError("need at least 10^4 samples")
    n, m = A.dim, B.dim
    An = np.array(A.entries, dtype=float)
    Bm = np.array(B.entries, dtype=float)
    L = np.linalg.cholesky(An)
    L_inv_T = np.linalg.inv(L).T  # x = L^{-T} y maps |y|^2 to x^T A x
    jobs = []
    for c, start in enumerate(range(0, samples, CHUNK)):
        jobs.append((An, L_inv_T, Bm, epsilon, seed, c, min(CHUNK, samples - start)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_chunk_hits, jobs))
    else:
        hits = sum(map(_chunk_hits, jobs))

    ball = _unit_ball_volume(n) / math.sqrt(A.det)
    if m == 1:
        domain = ball * (Bm[0, 0] * (1 + epsilon)) ** (n / 2)
    else:
        domain = 1.0
        for i in range(m):
            lo = max(Bm[i, i] * (1 - epsilon), 0.0)
            domain *= ball * ((Bm[i, i] * (1 + epsilon)) ** (n / 2) - lo ** (n / 2))
    R = m * (m + 1) // 2
    Pi = math.prod(math.sqrt(Bm[i, i]) for i in range(m))
    norm = domain / ((2 * epsilon) ** R * Pi ** (m + 1))
    frac = hits / samples
    se = norm * math.sqrt(frac * (1 - frac) / samples)
    with mpmath.workdps(DPS):
        value = mpmath.mpf(norm) * frac
    return ArchimedeanDensity(value, "shell_estimate", epsilon, samples, se)
