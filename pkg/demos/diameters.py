"""Diameters of slices and of their convex combinations.

In the max-norm space a coordinate the functionals ignore gives diameter 2.
In the Euclidean plane opposite slices average to something well inside
the ball, and l_p sums of two lines behave the same way.
"""
import math

from slice_lab.diameter import (
    SlicePolytope,
    combo_diameter_linf,
    euclidean_slice_diameter,
    lp_sum_combo_sup,
    opposite_slice_combo_sup,
    slice_diameter_linf,
)

print(slice_diameter_linf(SlicePolytope([0.5, 0.5], 0.1)).value)   # 0.2
print(slice_diameter_linf(SlicePolytope([1.0, 0.0], 0.1)).value)   # 2.0, coordinate 1 is free

terms = [(0.5, SlicePolytope([1.0, 0.0, 0.0], 0.2)), (0.5, SlicePolytope([0.0, 1.0, 0.0], 0.2))]
print("combination with a free coordinate:", combo_diameter_linf(terms).value)

for eps in (0.01, 0.1, 0.5, 1.0):
    print(f"euclidean cap eps={eps}: {euclidean_slice_diameter(eps):.4f}")

res = opposite_slice_combo_sup(2, [1.0, 0.0], 0.1)
print("opposite slices: sup", round(res.sup_estimate, 6), "exact", round(math.sqrt(0.19), 6),
      "certified", round(res.certified_upper_bound, 6))

for p in (1.5, 2.0, 4.0):
    r = lp_sum_combo_sup(p, 0.5, 0.1, samples=2000)
    print(f"p={p}: sup {r.sup_estimate:.6f}, shrinkage {r.beta_estimate:.4f}")
