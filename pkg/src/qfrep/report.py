"""Report assembly and JSON serialization.

Floats are written at 12 significant digits and rationals as exact
{"num", "den"} pairs, so identical inputs give byte-identical documents once
timings are left out.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import arch, enumeration, forms, local
from ._exact import primes_up_to
from .errors import DimensionRegime

__all__ = [
    "AsymptoticReport",
    "build_report",
    "report_to_json",
    "report_from_json",
    "dumps",
    "fnum",
    "rational",
    "parse_rational",
]

SIG = 12


def fnum(x):
    """Float at 12 significant digits; None, inf and exact integers pass through."""
    if x is None:
        return None
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    v = float(x)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.{SIG}g}")


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def parse_rational(obj) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)


def _close(a: float, b: float, rel: float = 1e-10) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class AsymptoticReport:
    A: forms.QuadraticForm
    B: forms.QuadraticForm
    reduced_B: forms.QuadraticForm
    transform: tuple
    gamma_i: tuple
    gamma: object          # float or "inf"
    degenerate: bool
    theorem_n_min: int | None
    hypothesis_met: bool
    exact_count: int
    nodes: int
    alpha_inf: float | None
    alpha_inf_shell: dict | None
    prime_cap: int
    t_cap: int | None
    densities: tuple       # LocalDensity per prime
    euler_partial: float
    main_term: float | None
    relative_error: float | None
    local_obstructions: tuple
    verdict: str
    sseries: dict | None = None
    timings: dict | None = None

    @property
    def n(self) -> int:
        return self.A.dim

    @property
    def m(self) -> int:
        return self.B.dim

    @property
    def R(self) -> int:
        return self.m * (self.m + 1) // 2

    def __post_init__(self):
        forms.ReductionResult(self.B, self.reduced_B, tuple(map(tuple, self.transform)))
        if self.main_term is not None:
            if not _close(self.main_term, self.alpha_inf * self.euler_partial, 1e-10):
                raise ValueError("main_term must equal alpha_inf * euler_partial")
        if (self.relative_error is not None) != bool(self.main_term):
            raise ValueError("relative_error is present exactly when main_term > 0")
        if self.relative_error is not None:
            expect = (self.exact_count - self.main_term) / self.main_term
            # main_term is stored at 12 digits, so compare on an absolute scale
            if abs(self.relative_error - expect) > 1e-9 * (1 + abs(expect)):
                raise ValueError("relative_error inconsistent with exact_count and main_term")
        if self.verdict not in ("consistent", "inconsistent", "compared", "no-main-term"):
            raise ValueError(f"unknown verdict {self.verdict!r}")


def _density_json(d: local.LocalDensity) -> dict:
    return {"p": d.p, "t_used": d.t_used, "value": rational(d.value), "excess": d.excess}


def _density_from_json(obj) -> local.LocalDensity:
    return local.LocalDensity(int(obj["p"]), int(obj["t_used"]), parse_rational(obj["value"]),
                              obj.get("excess"))


def build_report(A: forms.QuadraticForm, B: forms.QuadraticForm, prime_cap: int = 100,
                 t_cap: int | None = 8, q_cap: int = local.Q_CAP, eps: float = 1e-2,
                 samples: int = 10**6, seed: int = 0, workers: int = 1,
                 sseries_Q: int | None = None, shell: bool = True,
                 timings: bool = True) -> AsymptoticReport:
    A, B = forms.validate(A), forms.validate(B)
    if prime_cap < 1 or (t_cap is not None and t_cap < 1) or q_cap < 1:
        raise ValueError("caps must be positive")
    clock = {}

    t0 = time.perf_counter()
    red = forms.minkowski_reduce(B)
    prof = forms.gamma_profile(red.reduced)
    if prof.degenerate:
        n_min, hyp = None, False
    else:
        n_min, _ = forms.theorem_threshold(prof, B.dim)
        hyp = A.dim >= n_min
    clock["reduce_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    cnt = enumeration.count_representations(
        enumeration.RepresentationProblem(A, red.reduced), workers=workers)
    clock["count_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    dens = tuple(local.alpha_p(A, red.reduced, p, t_cap) for p in primes_up_to(prime_cap))
    euler = Fraction(1)
    for d in dens:
        euler *= d.value
    obstructions = tuple(d.p for d in dens if d.value == 0)
    clock["local_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    try:
        a_inf = arch.alpha_infinity_closed(A, red.reduced).value
    except DimensionRegime:
        a_inf = None
    shell_block = None
    if shell and a_inf is not None:
        est = arch.alpha_infinity_shell(A, red.reduced, eps, samples, seed, workers)
        shell_block = {"value": fnum(est.value), "std_error": fnum(est.std_error),
                       "epsilon": eps, "samples": samples, "seed": seed}
    clock["arch_ms"] = (time.perf_counter() - t0) * 1e3

    ss_block = None
    if sseries_Q is not None:
        t0 = time.perf_counter()
        ss = local.singular_series_truncated(A, red.reduced, sseries_Q, q_cap, t_cap)
        ss_block = sseries_to_json(ss)
        clock["sseries_ms"] = (time.perf_counter() - t0) * 1e3

    if a_inf is None:
        main = rel = None
        verdict = "no-main-term"
    else:
        with mpmath.workdps(40):
            main_mp = a_inf * mpmath.mpf(euler.numerator) / euler.denominator
            rel_mp = (cnt.count - main_mp) / main_mp if main_mp > 0 else None
        main = fnum(main_mp)
        rel = fnum(rel_mp) if rel_mp is not None else None
        if obstructions:
            verdict = "consistent" if cnt.count == 0 else "inconsistent"
        else:
            verdict = "compared"

    return AsymptoticReport(
        A=A, B=B, reduced_B=red.reduced, transform=tuple(map(tuple, red.transform)),
        gamma_i=tuple(fnum(g) for g in prof.gamma_i), gamma=fnum(prof.gamma),
        degenerate=prof.degenerate, theorem_n_min=n_min, hypothesis_met=hyp,
        exact_count=cnt.count, nodes=cnt.nodes_visited,
        alpha_inf=fnum(a_inf) if a_inf is not None else None, alpha_inf_shell=shell_block,
        prime_cap=prime_cap, t_cap=t_cap, densities=dens, euler_partial=fnum(euler),
        main_term=main, relative_error=rel, local_obstructions=obstructions,
        verdict=verdict, sseries=ss_block,
        timings={k: fnum(v) for k, v in clock.items()} if timings else None,
    )


def report_to_json(rep: AsymptoticReport) -> dict:
    out = {
        "A": forms.form_to_json(rep.A),
        "B": forms.form_to_json(rep.B),
        "n": rep.n,
        "m": rep.m,
        "R": rep.R,
        "reduced_B": forms.form_to_json(rep.reduced_B),
        "transform": [list(r) for r in rep.transform],
        "gamma": {"gamma_i": list(rep.gamma_i), "gamma": rep.gamma,
                  "degenerate": rep.degenerate},
        "theorem_n_min": rep.theorem_n_min,
        "hypothesis_met": rep.hypothesis_met,
        "exact_count": rep.exact_count,
        "nodes": rep.nodes,
        "alpha_inf": rep.alpha_inf,
        "alpha_inf_shell": rep.alpha_inf_shell,
        "prime_cap": rep.prime_cap,
        "t_cap": rep.t_cap,
        "alpha_p": [_density_json(d) for d in rep.densities],
        "euler_partial": rep.euler_partial,
        "main_term": rep.main_term,
        "relative_error": rep.relative_error,
        "local_obstructions": list(rep.local_obstructions),
        "verdict": rep.verdict,
    }
    if rep.sseries is not None:
        out["sseries"] = rep.sseries
    if rep.timings is not None:
        out["timings"] = rep.timings
    return out


def report_from_json(obj: dict) -> AsymptoticReport:
    g = obj["gamma"]
    return AsymptoticReport(
        A=forms.form_from_json(obj["A"]), B=forms.form_from_json(obj["B"]),
        reduced_B=forms.form_from_json(obj["reduced_B"]),
        transform=tuple(map(tuple, obj["transform"])),
        gamma_i=tuple(g["gamma_i"]), gamma=g["gamma"], degenerate=bool(g["degenerate"]),
        theorem_n_min=obj["theorem_n_min"], hypothesis_met=bool(obj["hypothesis_met"]),
        exact_count=int(obj["exact_count"]), nodes=int(obj["nodes"]),
        alpha_inf=obj["alpha_inf"], alpha_inf_shell=obj.get("alpha_inf_shell"),
        prime_cap=int(obj["prime_cap"]), t_cap=obj["t_cap"],
        densities=tuple(_density_from_json(d) for d in obj["alpha_p"]),
        euler_partial=obj["euler_partial"], main_term=obj["main_term"],
        relative_error=obj["relative_error"],
        local_obstructions=tuple(obj["local_obstructions"]), verdict=obj["verdict"],
        sseries=obj.get("sseries"), timings=obj.get("timings"),
    )


# ---------------------------------------------------------------------------
# smaller documents


def count_to_json(c: enumeration.RepresentationCount, timings: bool = True) -> dict:
    out = {"count": c.count, "nodes": c.nodes_visited}
    if timings:
        out["ms"] = fnum(c.elapsed * 1e3)
    return out


def reduction_to_json(r: forms.ReductionResult) -> dict:
    return {"original": forms.form_to_json(r.original),
            "reduced": forms.form_to_json(r.reduced),
            "transform": [list(row) for row in r.transform]}


def reduction_from_json(obj) -> forms.ReductionResult:
    return forms.ReductionResult(forms.form_from_json(obj["original"]),
                                 forms.form_from_json(obj["reduced"]),
                                 tuple(map(tuple, obj["transform"])))


def gamma_to_json(p: forms.GammaProfile) -> dict:
    out = {"gamma_i": [fnum(g) for g in p.gamma_i], "gamma": fnum(p.gamma),
           "degenerate": p.degenerate, "diagonal": list(p.diagonal)}
    if p.degenerate:
        out["theorem_n_min"] = None
    else:
        out["theorem_n_min"], out["R"] = forms.theorem_threshold(p, p.m)
    return out


def density_to_json(d: local.LocalDensity) -> dict:
    return _density_json(d)


def density_from_json(obj) -> local.LocalDensity:
    return _density_from_json(obj)


def arch_to_json(a: arch.ArchimedeanDensity, seed: int | None = None) -> dict:
    out = {"value": fnum(a.value), "method": a.method}
    if a.method == "shell_estimate":
        out.update({"epsilon": a.epsilon, "samples": a.samples,
                    "std_error": fnum(a.std_error), "seed": seed})
    return out


def arch_from_json(obj) -> arch.ArchimedeanDensity:
    return arch.ArchimedeanDensity(mpmath.mpf(obj["value"]), obj["method"],
                                   obj.get("epsilon"), obj.get("samples"),
                                   obj.get("std_error"))


def sseries_to_json(s: local.SingularSeriesTruncation) -> dict:
    return {"Q": s.Q,
            "terms": [{"q": q, "term": rational(t)} for q, t in s.terms],
            "partial_sum": fnum(s.partial_sum),
            "partial_sum_exact": rational(s.exact_partial_sum),
            "euler_partial": fnum(s.euler_partial),
            "imag_residue": fnum(s.imag_residue),
            "alpha_p": [_density_json(d) for d in s.densities]}


def sseries_from_json(obj) -> local.SingularSeriesTruncation:
    terms = tuple((int(t["q"]), parse_rational(t["term"])) for t in obj["terms"])
    exact = sum((t for _, t in terms), Fraction(0))
    dens = tuple(_density_from_json(d) for d in obj["alpha_p"])
    euler = Fraction(1)
    for d in dens:
        euler *= d.value
    with mpmath.workdps(local.DPS):
        return local.SingularSeriesTruncation(
            int(obj["Q"]), terms, mpmath.mpf(exact.numerator) / exact.denominator,
            mpmath.mpf(euler.numerator) / euler.denominator,
            mpmath.mpf(obj["imag_residue"]), dens)
