"""Reduce a binary target and read off how many variables the asymptotic needs.

A target that is far from reduced still has the same representation count as
its reduced form, but the exponent profile (and with it the variable
threshold) is only meaningful after reduction.
"""

from qfrep.forms import QuadraticForm, gamma_profile, minkowski_reduce, theorem_threshold

B = QuadraticForm([[4, 2], [2, 16]]).transform([[1, 3], [0, 1]])
print("input target      ", B.matrix())

red = minkowski_reduce(B)
print("reduced           ", red.reduced.matrix())
print("transform T       ", [list(r) for r in red.transform])
print("T^T B T == reduced", B.transform(red.transform) == red.reduced)

for target in (red.reduced, QuadraticForm.diagonal(4, 16), QuadraticForm.diagonal(9, 9, 9)):
    prof = gamma_profile(target)
    n_min, R = theorem_threshold(prof)
    print(f"diag {prof.diagonal}: gamma_i = {[str(g) for g in prof.gamma_i]}, "
          f"gamma = {prof.gamma}, needs n >= {n_min} (R = {R})")

# a diagonal with B_11 = 1 < B_22 has no finite exponent
prof = gamma_profile(QuadraticForm.diagonal(1, 5))
print("diag (1, 5) degenerate:", prof.degenerate, "gamma =", prof.gamma)
