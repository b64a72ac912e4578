"""Convex combinations of slices that still touch the unit sphere."""
import numpy as np

from slice_lab.model import ConvexCombo, Slice, SpaceModel, dual_basis, sup_norm
from slice_lab.sphere import WeightedMeasureSpace, fresh_coordinate_witness, l1_disjoint_witness

c0 = SpaceModel("c0", "real")
combo = ConvexCombo.of([0.5, 0.5], [Slice(dual_basis(c0, 0), 0.3), Slice(dual_basis(c0, 1), 0.3)])
w = fresh_coordinate_witness(combo)
print("fresh index", w.fresh_index, "point", w.point.coords, "norm", sup_norm(w.point))

# discrete L1: four cells of equal weight
space = WeightedMeasureSpace([0.25] * 4)
g = np.array([[1, 1, 0.5, 0.5], [0.9, 0.2, 1, 1]])
res = l1_disjoint_witness(space, g, [0.2, 0.2], [0.5, 0.5])
print("cells", res.cells, "combined", res.combined, "norm", res.combined_norm)
