"""The real density: Gamma-function formula against a shell-volume estimate."""

import math

from qfrep.arch import alpha_infinity_closed, alpha_infinity_shell
from qfrep.forms import QuadraticForm

cases = [
    (QuadraticForm.identity(3), QuadraticForm.diagonal(1)),
    (QuadraticForm.identity(4), QuadraticForm.diagonal(1)),
    (QuadraticForm.identity(5), QuadraticForm.diagonal(5)),
    (QuadraticForm.identity(4), QuadraticForm.identity(2)),
]
print(f"{'A':>4} {'B':>14} {'closed':>12} {'eps':>6} {'shell':>12} {'std err':>10}")
for A, B in cases:
    closed = float(alpha_infinity_closed(A, B).value)
    for eps in (1e-1, 1e-2):
        s = alpha_infinity_shell(A, B, epsilon=eps, samples=10**6, seed=0, workers=4)
        print(f"I{A.dim:<3} {str(B.matrix()):>14} {closed:12.6f} {eps:6.2f} "
              f"{float(s.value):12.6f} {s.std_error:10.2e}")

print("\n2*pi =", 2 * math.pi, " pi^2 =", math.pi**2)
