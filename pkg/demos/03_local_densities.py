"""p-adic densities from exact counts mod p^t, and the singular series.

The densities are obtained by counting solutions modulo p^t until two
consecutive levels agree.  The singular series is assembled from complete
exponential sums instead, so comparing the two is a genuine check.
"""

from fractions import Fraction

from qfrep.forms import QuadraticForm
from qfrep.local import (
    alpha_p,
    alpha_p_bruteforce,
    euler_factor_partials,
    local_solubility,
    singular_series_truncated,
)

I5, B = QuadraticForm.identity(5), QuadraticForm.diagonal(4)

print("alpha_3(I2, (1)) =", alpha_p(QuadraticForm.identity(2), QuadraticForm.diagonal(1), 3).value)
for p in (2, 3, 5, 7):
    d = alpha_p(I5, B, p)
    print(f"alpha_{p}(I5, (4)) = {str(d.value):>8}  stable at t = {d.t_used}")

print("\nengine vs exhaustive scan, I3 and (5) at p = 5:")
for t in (1, 2):
    print(f"  t = {t}: scan {alpha_p_bruteforce(QuadraticForm.identity(3), QuadraticForm.diagonal(5), 5, t)}")
print("  stable:", alpha_p(QuadraticForm.identity(3), QuadraticForm.diagonal(5), 5).value)

print("\n2-part of the q-sum for (I5, (4)) as the power of 2 grows:")
for r, s in enumerate(euler_factor_partials(I5, B, 2, 5)):
    print(f"  r <= {r}: {str(s):>8} = {float(s):.6f}")
print("  alpha_2 =", alpha_p(I5, B, 2).value, "=", float(Fraction(45, 64)))

s = singular_series_truncated(I5, B, 20)
print(f"\nq-sum up to 20: {float(s.partial_sum):.6f}   Euler product over p <= 20: "
      f"{float(s.euler_partial):.6f}")
print("the gap comes from moduli 2^r > 20, whose terms are not yet negligible")

print("\nlocal obstructions for x^2+y^2+z^2 = 7:", local_solubility(QuadraticForm.identity(3),
                                                                 QuadraticForm.diagonal(7), 20))
