"""Command-line interface: ``qfrep <command> ...``; one JSON document on stdout.

Exit codes: 0 ok, 2 unparsable input, 3 failed validation, 4 a local density
did not stabilize, 5 a computational cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import arch, enumeration, forms, local, report
from .errors import CapExceeded, MalformedForm, StabilizationNotReached

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_STABILIZATION, EXIT_CAP = 0, 2, 3, 4, 5


def _count(args):
    prob = enumeration.RepresentationProblem(forms.load_form(args.A), forms.load_form(args.B))
    res = enumeration.count_representations(prob, workers=args.workers)
    return report.count_to_json(res, timings=not args.no_timings)


def _report(args):
    rep = report.build_report(
        forms.load_form(args.A), forms.load_form(args.B), prime_cap=args.prime_cap,
        t_cap=args.t_cap, q_cap=args.q_cap, eps=args.eps, samples=args.samples,
        seed=args.seed, workers=args.workers, sseries_Q=args.sseries_Q,
        shell=not args.no_shell, timings=not args.no_timings)
    return report.report_to_json(rep)


def _reduce(args):
    return report.reduction_to_json(forms.minkowski_reduce(forms.load_form(args.B)))


def _gamma(args):
    B = forms.load_form(args.B)
    red = forms.minkowski_reduce(B)
    out = report.gamma_to_json(forms.gamma_profile(red.reduced))
    if red.reduced != B:
        out["reduced_B"] = forms.form_to_json(red.reduced)
    return out


def _alpha_p(args):
    A, B = forms.load_form(args.A), forms.load_form(args.B)
    return report.density_to_json(local.alpha_p(A, B, args.p, args.t_cap))


def _alpha_inf(args):
    A, B = forms.load_form(args.A), forms.load_form(args.B)
    if args.shell:
        est = arch.alpha_infinity_shell(A, B, args.eps, args.samples, args.seed, args.workers)
        return report.arch_to_json(est, seed=args.seed)
    return report.arch_to_json(arch.alpha_infinity_closed(A, B))


def _sseries(args):
    A, B = forms.load_form(args.A), forms.load_form(args.B)
    ss = local.singular_series_truncated(A, B, args.Q, args.q_cap, args.t_cap)
    return report.sseries_to_json(ss)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qfrep",
                                 description="Representation counts of quadratic forms "
                                             "and the local and archimedean densities.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, a=True, b=True):
        if a:
            p.add_argument("A", help="JSON form file for A")
        if b:
            p.add_argument("B", help="JSON form file for B")

    p = sub.add_parser("count", help="exact N(A, B)")
    common(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timings", action="store_true")
    p.set_defaults(func=_count)

    p = sub.add_parser("report", help="exact count against the main term")
    common(p)
    p.add_argument("--prime-cap", type=int, default=100)
    p.add_argument("--t-cap", type=int, default=8)
    p.add_argument("--q-cap", type=int, default=local.Q_CAP)
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sseries-Q", dest="sseries_Q", type=int, default=None,
                   help="also include the truncated singular series up to this Q")
    p.add_argument("--no-shell", action="store_true", help="skip the shell estimate")
    p.add_argument("--no-timings", action="store_true")
    p.set_defaults(func=_report)

    p = sub.add_parser("reduce", help="Minkowski reduction (m <= 3)")
    common(p, a=False)
    p.set_defaults(func=_reduce)

    p = sub.add_parser("gamma", help="exponent profile of the reduced form")
    common(p, a=False)
    p.set_defaults(func=_gamma)

    p = sub.add_parser("alpha-p", help="p-adic density")
    common(p)
    p.add_argument("p", type=int)
    p.add_argument("--t-cap", type=int, default=8)
    p.set_defaults(func=_alpha_p)

    p = sub.add_parser("alpha-inf", help="archimedean density")
    common(p)
    p.add_argument("--shell", action="store_true", help="Monte Carlo shell estimate")
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_alpha_inf)

    p = sub.add_parser("sseries", help="truncated singular series and Euler product")
    common(p)
    p.add_argument("Q", type=int)
    p.add_argument("--q-cap", type=int, default=local.Q_CAP)
    p.add_argument("--t-cap", type=int, default=8)
    p.set_defaults(func=_sseries)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except (MalformedForm, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StabilizationNotReached as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STABILIZATION
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(report.dumps(out))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
