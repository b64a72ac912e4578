"""Split a point near a convex combination of slices back into slice points.

We build a small complex instance by hand, look at how each coordinate is
classified, then perturb the combined point and decompose it.
"""
from slice_lab.decomposition import (
    compute_params,
    decompose,
    sample_in_neighborhood,
    verify_decomposition,
    weak_neighborhood,
)
from slice_lab.model import ConvexCombo, Point, Slice, SpaceModel, combo_point, dual_basis

space = SpaceModel("finite-discrete", "complex", 2)
slices = [Slice(dual_basis(space, 0), 0.5), Slice(dual_basis(space, 0), 1.2)]
combo = ConvexCombo.of([0.5, 0.5], slices)

# both witnesses are unimodular but differ at coordinate 0
witnesses = [Point.from_values(space, [1, 0.3]), Point.from_values(space, [1j, 0.3])]
x = combo_point(combo, witnesses)
print("x =", [x.value(t) for t in range(2)])

params = compute_params(combo, witnesses)
for t, case in params.cases.items():
    print(f"coordinate {t}: {type(case).__name__}")
print("slack", params.slack, "eta", round(params.eta, 4), "delta", params.delta)

U = weak_neighborhood(x, params)
for seed in range(3):
    y = sample_in_neighborhood(U, seed)
    zbars = decompose(combo, witnesses, params, y)
    rep = verify_decomposition(combo, witnesses, y, zbars)
    print(f"seed {seed}: passed={rep.passed} residual={rep.reconstruction_residual:.1e}",
          "slice margins", [round(m, 4) for m in rep.slice_margins])
