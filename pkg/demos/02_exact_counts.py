"""Exact representation counts, checked against classical formulas.

Sums of four and eight squares have closed forms (Jacobi), so they make a
good sanity check for the enumerator before it is used on forms without one.
"""

import time

from qfrep.enumeration import (
    RepresentationProblem,
    brute_force_count,
    count_representations,
    vectors_of_norm,
)
from qfrep.forms import QuadraticForm

I4, I8 = QuadraticForm.identity(4), QuadraticForm.identity(8)


def jacobi_r4(N):
    return 8 * sum(d for d in range(1, N + 1) if N % d == 0 and d % 4)


def jacobi_r8(N):
    return 16 * sum((-1) ** (N + d) * d**3 for d in range(1, N + 1) if N % d == 0)


print(" N   r4(N)  Jacobi")
for N in (1, 2, 3, 4, 5, 12, 25, 48):
    c = count_representations(RepresentationProblem(I4, QuadraticForm.diagonal(N))).count
    print(f"{N:2d} {c:7d} {jacobi_r4(N):7d}")

start = time.perf_counter()
res = count_representations(RepresentationProblem(I8, QuadraticForm.diagonal(196)))
print(f"\nr8(196) = {res.count} (Jacobi {jacobi_r8(196)}), "
      f"{res.nodes_visited} nodes, {time.perf_counter() - start:.2f}s")

# matrix targets: pairs of orthogonal vectors
prob = RepresentationProblem(QuadraticForm.identity(4), QuadraticForm.identity(2))
print("\nN(I4, I2) =", count_representations(prob).count,
      " brute force:", brute_force_count(prob).count)

A = QuadraticForm([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
print("vectors of norm 2 in A3:", vectors_of_norm(A, 2))
