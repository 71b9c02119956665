"""Exact counts against the predicted main term, through the report pipeline.

Eight squares has class number one, so the main term is exact up to the
truncation of the Euler product at 100.
"""

import json

from qfrep.forms import QuadraticForm
from qfrep.report import build_report, report_to_json

for N in (64, 100, 144, 196):
    rep = build_report(QuadraticForm.identity(8), QuadraticForm.diagonal(N),
                       prime_cap=100, t_cap=20, shell=False, timings=False)
    print(f"N = {N:3d}: exact {rep.exact_count:>10}  main {rep.main_term:>16.3f}  "
          f"rel err {rep.relative_error: .3e}")

print()
for A, B in [(QuadraticForm.identity(5), QuadraticForm.diagonal(25)),
             (QuadraticForm.identity(3), QuadraticForm.diagonal(7)),
             (QuadraticForm.identity(4), QuadraticForm.identity(2))]:
    rep = build_report(A, B, prime_cap=50, samples=10**5, timings=False)
    doc = report_to_json(rep)
    keep = {k: doc[k] for k in ("n", "m", "theorem_n_min", "hypothesis_met", "exact_count",
                                "main_term", "relative_error", "local_obstructions", "verdict")}
    print(json.dumps(keep))
