"""Symmetric positive definite integer forms and their reduction theory.

Everything that can be exact is exact: positive definiteness is decided from
fraction-free leading minors, the first minimum by exact enumeration, and
reduction produces an explicit unimodular transform.
"""

from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

import mpmath

from . import _exact
from ._lattice import Enumerator
from .errors import (
    DegenerateGamma,
    MalformedForm,
    NotPositiveDefinite,
    NotReduced,
    NotSymmetric,
    UnsupportedDimension,
)

__all__ = [
    "QuadraticForm",
    "ReductionResult",
    "GammaProfile",
    "ScalingData",
    "validate",
    "determinant",
    "first_minimum",
    "minkowski_reduce",
    "is_reduced",
    "gamma_profile",
    "theorem_threshold",
    "scaling_data",
    "default_box_constant",
    "load_form",
    "dump_form",
    "form_from_json",
    "form_to_json",
]


def _as_int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, numbers.Integral):
        raise MalformedForm(f"entry {x!r} is not an exact integer")
    return int(x)


@dataclass(frozen=True)
class QuadraticForm:
    """A symmetric positive definite integer matrix.

    Construction validates; instances are immutable and hashable.
    """

    entries: tuple
    minors: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = self.entries
        try:
            rows = tuple(tuple(_as_int(x) for x in row) for row in rows)
        except TypeError as exc:
            raise MalformedForm("form must be a square matrix of integers") from exc
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise MalformedForm("form must be a non-empty square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise NotSymmetric(f"entry ({i},{j})={rows[i][j]} but ({j},{i})={rows[j][i]}")
        minors = _exact.leading_minors(rows)
        if minors[-1] <= 0 or len(minors) < n:
            raise NotPositiveDefinite(len(minors), minors[-1])
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "minors", tuple(minors))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def det(self) -> int:
        return self.minors[-1]

    def matrix(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def value(self, x) -> int:
        return sum(self.entries[i][j] * x[i] * x[j]
                   for i in range(self.dim) for j in range(self.dim))

    def bilinear(self, x, y) -> int:
        return sum(self.entries[i][j] * x[i] * y[j]
                   for i in range(self.dim) for j in range(self.dim))

    def transform(self, U) -> "QuadraticForm":
        """The form U^T B U."""
        return QuadraticForm(_exact.congruence(self.matrix(), U))

    def scaled(self, k: int) -> "QuadraticForm":
        return QuadraticForm([[k * x for x in r] for r in self.entries])

    @classmethod
    def identity(cls, n: int) -> "QuadraticForm":
        return cls(_exact.identity(n))

    @classmethod
    def diagonal(cls, *d) -> "QuadraticForm":
        n = len(d)
        return cls([[d[i] if i == j else 0 for j in range(n)] for i in range(n)])


def validate(form) -> QuadraticForm:
    """Validate a candidate square integer matrix; raise on failure."""
    if isinstance(form, QuadraticForm):
        return form
    return QuadraticForm(form)


def determinant(form: QuadraticForm) -> int:
    return form.det


def first_minimum(form: QuadraticForm) -> int:
    """min x^T B x over nonzero integer x, by exact enumeration.

    The smallest diagonal entry is a valid upper bound, so every vector that
    could beat it lies in the ellipsoid of that radius.
    """
    bound = min(form.entries[i][i] for i in range(form.dim))
    enum = Enumerator(form.entries)
    best = bound
    for y in enum.points([0] * form.dim, bound, inside=True):
        if any(y):
            best = min(best, form.value(y))
    return best


@dataclass(frozen=True)
class ReductionResult:
    original: QuadraticForm
    reduced: QuadraticForm
    transform: tuple  # columns express the reduced basis in the original one

    def __post_init__(self):
        U = [list(r) for r in self.transform]
        if abs(_exact.det(U)) != 1:
            raise ValueError("transform is not unimodular")
        if _exact.congruence(self.original.matrix(), U) != self.reduced.matrix():
            raise ValueError("transform does not map original to reduced")


def is_reduced(form: QuadraticForm) -> bool:
    """Ordered positive diagonal and |B_ij| <= B_ii for i < j."""
    B = form.entries
    m = form.dim
    if any(B[i][i] > B[i + 1][i + 1] for i in range(m - 1)):
        return False
    return all(abs(B[i][j]) <= B[i][i] for i in range(m) for j in range(i + 1, m))


def _lagrange(G, U):
    a, b, c = G[0][0], G[0][1], G[1][1]
    while True:
        if a > c:
            a, c = c, a
            U = [[r[1], r[0]] for r in U]
        if 2 * abs(b) <= a:
            break
        q = _exact._round_half_toward_zero(b, a)
        # b2 <- b2 - q b1
        U = [[r[0], r[1] - q * r[0]] for r in U]
        c = c - 2 * q * b + q * q * a
        b = b - q * a
    return [[a, b], [b, c]], U


def _local_search(G, U, bound=2):
    """Replace a basis vector by a shorter admissible combination if one exists.

    A combination s (entries within +-bound, some s_j = +-1 for j >= i, and
    s_i..s_m not all zero) may replace b_j while keeping b_1..b_{i-1}: the
    result is still a basis.  Returns the improved (G, U) or None.
    """
    m = len(G)
    for i in range(m):
        for s in product(range(-bound, bound + 1), repeat=m):
            if not any(s[i:]):
                continue
            j = next((k for k in range(i, m) if abs(s[k]) == 1), None)
            if j is None:
                continue
            val = sum(G[a][b] * s[a] * s[b] for a in range(m) for b in range(m))
            if val < G[i][i]:
                V = _exact.identity(m)
                for k in range(m):
                    V[k][j] = s[k]
                U = _exact.matmul(U, V)
                G = _exact.congruence(G, V)
                return G, U
    return None


def minkowski_reduce(form: QuadraticForm) -> ReductionResult:
    """Reduce a form of dimension <= 3 to Minkowski-reduced shape.

    m = 2 uses Lagrange's algorithm.  m = 3 alternates greedy pair reduction
    with an exhaustive search over small unimodular replacements until no
    basis vector can be shortened; the displayed conditions are then checked.
    """
    m = form.dim
    if m > 3:
        raise UnsupportedDimension(f"Minkowski reduction implemented for m <= 3, got {m}")
    G = form.matrix()
    U = _exact.identity(m)
    if m == 2:
        G, U = _lagrange(G, U)
    elif m == 3:
        while True:
            G, U = _exact.pair_reduce(G, U)
            better = _local_search(G, U)
            if better is None:
                break
            G, U = better
        G, U = _exact.pair_reduce(G, U)
    reduced = QuadraticForm(G)
    if not is_reduced(reduced):
        raise NotReduced(f"reduction postcheck failed: {G}")
    return ReductionResult(form, reduced, tuple(tuple(r) for r in U))


# ---------------------------------------------------------------------------
# exponent profile


def _perfect_power(x: int) -> tuple[int, int]:
    """Write x = base**e with e maximal."""
    best = (x, 1)
    for e in range(2, x.bit_length() + 1):
        r = round(x ** (1.0 / e))
        for cand in (r - 1, r, r + 1):
            if cand > 1 and cand ** e == x:
                best = (cand, e)
    return best


def _exponent(b11: int, bii: int):
    """gamma with b11 = bii**gamma: exact Fraction when rational, else mpf."""
    if bii == b11:
        return Fraction(1)
    base1, e1 = _perfect_power(b11)
    base2, e2 = _perfect_power(bii)
    if base1 == base2:
        return Fraction(e1, e2)
    return mpmath.log(b11) / mpmath.log(bii)


def _reciprocal(g):
    if isinstance(g, Fraction):
        return mpmath.mpf(g.denominator) / g.numerator
    return 1 / g


@dataclass(frozen=True)
class GammaProfile:
    gamma_i: tuple
    gamma: object  # Fraction, mpf, or math.inf when degenerate
    degenerate: bool
    diagonal: tuple

    @property
    def m(self) -> int:
        return len(self.diagonal)

    def residuals(self) -> list[float]:
        """|gamma_i ln B_ii - ln B_11| for the log-domain consistency check."""
        out = []
        b11 = self.diagonal[0]
        for g, bii in zip(self.gamma_i, self.diagonal):
            if self.degenerate or bii == 1:
                out.append(0.0)
                continue
            with mpmath.workdps(40):
                gm = 1 / _reciprocal(g)
                out.append(float(abs(gm * mpmath.log(bii) - mpmath.log(b11))))
        return out


def gamma_profile(form: QuadraticForm) -> GammaProfile:
    """Exponents gamma_i with B_11 = B_ii**gamma_i and gamma = sum 1/gamma_i.

    Requires a reduced form.  gamma_i = 1 whenever B_ii = B_11 (this covers
    the all-ones diagonal).  B_11 = 1 < B_ii forces gamma_i = 0: the profile
    is flagged degenerate and gamma is +inf.
    """
    if not is_reduced(form):
        raise NotReduced("gamma_profile needs a Minkowski-reduced form")
    diag = tuple(form.entries[i][i] for i in range(form.dim))
    b11 = diag[0]
    if b11 == 1 and any(d > 1 for d in diag):
        gi = tuple(Fraction(1) if d == 1 else Fraction(0) for d in diag)
        return GammaProfile(gi, math.inf, True, diag)
    with mpmath.workdps(40):
        gi = tuple(_exponent(b11, d) for d in diag)
        if all(isinstance(g, Fraction) for g in gi):
            gamma = sum((1 / g for g in gi), Fraction(0))
        else:
            gamma = mpmath.fsum(_reciprocal(g) for g in gi)
    profile = GammaProfile(gi, gamma, False, diag)
    if max(profile.residuals()) > 1e-12:
        raise ArithmeticError("gamma_i failed the log-domain residual check")
    return profile


def theorem_threshold(profile: GammaProfile, m: int | None = None) -> tuple[int, int]:
    """Smallest n with n > (2 gamma + m(m-1)) (R + 1); returns (n_min, R)."""
    if profile.degenerate:
        raise DegenerateGamma("threshold undefined for a degenerate exponent profile")
    m = profile.m if m is None else m
    R = m * (m + 1) // 2
    g = profile.gamma
    if isinstance(g, Fraction):
        bound = (2 * g + m * (m - 1)) * (R + 1)
        n_min = _exact.frac_floor(bound) + 1
    else:
        # gamma irrational (transcendental), so the bound is never an integer
        with mpmath.workdps(40):
            n_min = int(mpmath.floor((2 * g + m * (m - 1)) * (R + 1))) + 1
    return n_min, R


def default_box_constant(A: QuadraticForm) -> float:
    """4 * Gershgorin bound on lambda_max(A) / smallest leading-minor ratio."""
    gersh = max(sum(abs(x) for x in row) for row in A.entries)
    minors = (1,) + A.minors
    ratio = min(Fraction(minors[k + 1], minors[k]) for k in range(A.dim))
    return float(4 * gersh / ratio)


@dataclass(frozen=True)
class ScalingData:
    C: float
    P: tuple
    Pi_product: float


def scaling_data(profile: GammaProfile, form: QuadraticForm, C: float) -> ScalingData:
    """Box half-widths P_i = C**(1/gamma_i) * B_ii**(1/2) and their product."""
    if profile.degenerate:
        raise DegenerateGamma("box widths undefined for a degenerate exponent profile")
    if C < 1:
        raise ValueError("box constant must be >= 1")
    P = []
    with mpmath.workdps(30):
        for g, bii in zip(profile.gamma_i, profile.diagonal):
            P.append(float(mpmath.power(C, _reciprocal(g)) * mpmath.sqrt(bii)))
    return ScalingData(float(C), tuple(P), float(math.prod(P)))


# ---------------------------------------------------------------------------
# JSON form files


def form_to_json(form: QuadraticForm) -> dict:
    return {"dim": form.dim, "entries": form.matrix()}


def form_from_json(obj) -> QuadraticForm:
    if not isinstance(obj, dict) or "entries" not in obj:
        raise MalformedForm('form JSON must be an object with "entries"')
    entries = obj["entries"]
    if not isinstance(entries, list) or not all(isinstance(r, list) for r in entries):
        raise MalformedForm('"entries" must be a list of rows')
    for row in entries:
        for x in row:
            if isinstance(x, bool) or not isinstance(x, int):
                raise MalformedForm(f"non-integral entry {x!r}")
    if "dim" in obj and obj["dim"] != len(entries):
        raise MalformedForm(f'"dim" is {obj["dim"]} but there are {len(entries)} rows')
    return QuadraticForm(entries)


def load_form(path) -> QuadraticForm:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedForm(f"{path}: {exc}") from exc
    return form_from_json(obj)


def dump_form(form: QuadraticForm, path) -> None:
    Path(path).write_text(json.dumps(form_to_json(form)) + "\n")
