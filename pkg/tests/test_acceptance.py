"""Acceptance suite: one or more tests per criterion, tagged with ``criterion``.

The terminal summary (see conftest.py) prints one PASS/FAIL line per criterion.
"""
import math
import time

import numpy as np
import pytest

from oracles import brute_combo_diameter, brute_extremum, lp_grid_sup
from slice_lab.campaign import Ranges, build_instance, run_campaign
from slice_lab.circle import chord_identity_batch
from slice_lab.decomposition import (
    compute_params,
    decompose,
    sample_in_neighborhood,
    verify_decomposition,
    weak_neighborhood,
)
from slice_lab.diameter import (
    SlicePolytope,
    combo_diameter_linf,
    coord_extremum,
    lp_sum_combo_sup,
    opposite_slice_combo_sup,
)
from slice_lab.model import (
    ConvexCombo,
    Functional,
    Slice,
    SpaceModel,
    combo_point,
    slice_membership,
    sup_norm,
)
from slice_lab.sphere import WeightedMeasureSpace, fresh_coordinate_witness, l1_disjoint_witness

criterion = pytest.mark.criterion


@pytest.fixture(scope="module")
def campaign():
    start = time.perf_counter()
    res = run_campaign(instances=1000, seed=0, ys_per_instance=10, ranges=Ranges())
    res["elapsed"] = time.perf_counter() - start
    return res


@criterion(1, "chord identity and bound on 10^6 samples in < 5 s")
def test_lemma_million_samples():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = 1_000_000
    alpha = rng.uniform(-math.pi, math.pi, n)
    beta = rng.uniform(-math.pi, math.pi, n)
    mu = rng.uniform(0.0, 0.5, n)
    mu[mu == 0.0] = 0.25
    modulus, residual, bound, _ = chord_identity_batch(alpha, beta, mu)
    elapsed = time.perf_counter() - start
    print(f"max identity residual {residual.max():.3e}, max bound excess "
          f"{(modulus - bound).max():.3e}, {elapsed:.2f} s")
    assert residual.max() <= 1e-12
    assert np.all(modulus <= bound + 1e-12)
    assert elapsed < 5.0


@criterion(2, "1000 instances x 10 points decompose with 100% pass in < 60 s")
def test_decomposition_campaign(campaign):
    print(f"checks {campaign['checks']}, pass rate {campaign['pass_rate']}, "
          f"{campaign['elapsed']:.1f} s, worst {campaign['worst']}")
    assert campaign["checks"] == 10_000
    assert campaign["failures"] == []
    assert campaign["pass_rate"] == 1.0
    assert campaign["worst"]["max_reconstruction_residual"] <= 1e-9
    assert campaign["worst"]["min_ball_margin"] >= -1e-12
    assert campaign["worst"]["min_slice_margin_excess"] >= 0
    assert campaign["worst"]["max_drift_over_eta"] <= 1.0
    assert campaign["elapsed"] < 60.0


@criterion(2, "1000 instances x 10 points decompose with 100% pass in < 60 s")
def test_campaign_covers_all_models_and_fields():
    seen = set()
    for seed in range(1000):
        combo, _ = build_instance(seed, Ranges())
        sp = combo.space
        seen.add((sp.kind, sp.field))
        assert combo.k <= 5 and (sp.n is None or sp.n <= 12)
    assert len(seen) == 6


@criterion(3, "at least 100 circle-case instances with zero shift sum and chord bound")
def test_circle_case_exercise(campaign):
    worst = campaign["worst"]
    print(f"circle instances {campaign['circle_instances']}, max shift sum "
          f"{worst['max_shift_sum']:.3e}, max chord excess {worst['max_chord_bound_excess']:.3e}")
    assert campaign["circle_instances"] >= 100
    assert worst["max_shift_sum"] <= 1e-12
    assert worst["max_chord_bound_excess"] <= 1e-12


def _random_f(rng, n):
    f = rng.normal(size=n)
    f[rng.random(n) < 0.2] = 0.0
    if not f.any():
        f[0] = 1.0
    return f / np.abs(f).sum()


@criterion(4, "closed-form diameters match vertex enumeration; 0.2 and 2 reproduce")
def test_diameter_oracle_equivalence():
    rng = np.random.default_rng(44)
    worst = 0.0
    for _ in range(500):
        n, k = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        fs = [_random_f(rng, n) for _ in range(k)]
        eps = [float(rng.uniform(0.01, 2.0)) for _ in range(k)]
        raw = rng.uniform(0.1, 1, k)
        lam = list(raw / raw.sum())
        for f, e in zip(fs, eps):
            P = SlicePolytope(f, e)
            for j in range(n):
                for sense in ("max", "min"):
                    worst = max(worst, abs(coord_extremum(P, j, sense) - brute_extremum(f, e, j, sense)))
        got = combo_diameter_linf([(l, SlicePolytope(f, e)) for l, f, e in zip(lam, fs, eps)]).value
        worst = max(worst, abs(got - brute_combo_diameter(lam, fs, eps)))
    print(f"max deviation from vertex enumeration {worst:.3e}")
    assert worst <= 1e-9


@criterion(4, "closed-form diameters match vertex enumeration; 0.2 and 2 reproduce")
def test_diameter_reference_values():
    space = SpaceModel("finite-discrete", "real", 2)
    single = ConvexCombo.of([1.0], [Slice(Functional.from_values(space, [0.5, 0.5]), 0.1)])
    assert combo_diameter_linf(single).value == pytest.approx(0.2, abs=1e-15)
    free = ConvexCombo.of([1.0], [Slice(Functional.from_values(space, [1.0, 0.0]), 0.1)])
    assert combo_diameter_linf(free).value == 2.0


@criterion(5, "opposite slices and l_p sums stay strictly inside the ball")
def test_opposite_slices():
    res = opposite_slice_combo_sup(2, [1.0, 0.0], 0.1)
    print(f"estimate {res.sup_estimate:.9f}, bound {res.certified_upper_bound:.9f}")
    assert abs(res.certified_upper_bound - 2 * math.sqrt(0.19)) <= 1e-9
    assert math.sqrt(0.19) - 1e-3 <= res.sup_estimate <= math.sqrt(0.19) + 1e-9
    assert res.certified_upper_bound < 1


@criterion(5, "opposite slices and l_p sums stay strictly inside the ball")
def test_lp_sum_shrinkage():
    res = lp_sum_combo_sup(2, 0.5, 0.1)
    grid = lp_grid_sup(2, 0.5, 0.1)
    print(f"sup {res.sup_estimate:.9f}, grid {grid:.9f}, beta {res.beta_estimate:.6f}")
    assert abs(res.sup_estimate - 0.944624) <= 1e-3
    assert abs(res.sup_estimate - grid) <= 1e-6
    assert res.beta_estimate >= 0.054


def _random_c0_combo(rng):
    space = SpaceModel("c0", "complex" if rng.random() < 0.5 else "real")
    k = int(rng.integers(1, 6))
    slices = []
    for _ in range(k):
        idx = rng.choice(10, size=int(rng.integers(1, 5)), replace=False)
        vals = rng.normal(size=idx.size)
        if not space.is_real:
            vals = vals + 1j * rng.normal(size=idx.size)
        vals = vals / np.abs(vals).sum()
        coords = {int(t): (float(v) if space.is_real else complex(v)) for t, v in zip(idx, vals)}
        slices.append(Slice(Functional(space, coords), float(rng.uniform(1e-3, 1.5))))
    raw = rng.uniform(0.1, 1, k)
    return ConvexCombo.of(list(raw / raw.sum()), slices)


@criterion(6, "sphere witnesses have norm one and lie in the combination")
def test_fresh_coordinate_witnesses():
    rng = np.random.default_rng(66)
    for _ in range(200):
        combo = _random_c0_combo(rng)
        res = fresh_coordinate_witness(combo)
        assert abs(sup_norm(res.point) - 1.0) <= 1e-12
        for s, xy in zip(combo.slices, res.shifted):
            assert slice_membership(s, xy).inside
        back = combo_point(combo, res.shifted)
        assert max(abs(back.value(t) - res.point.value(t)) for t in range(res.fresh_index + 1)) <= 1e-12


@criterion(6, "sphere witnesses have norm one and lie in the combination")
def test_l1_disjoint_witnesses():
    rng = np.random.default_rng(67)
    for _ in range(200):
        n, k = int(rng.integers(4, 16)), int(rng.integers(1, 5))
        w = rng.uniform(0.1, 1, n)
        space = WeightedMeasureSpace(w / w.sum())
        eps = rng.uniform(0.05, 0.5, k)
        g = rng.uniform(-1, 1, (k, n))
        for i in range(k):
            cells = rng.choice(n, size=k, replace=False)
            g[i, cells] = np.sign(rng.normal(size=k)) * rng.uniform(1 - eps[i] / 2, 1, k)
        raw = rng.uniform(0.1, 1, k)
        res = l1_disjoint_witness(space, g, eps, raw / raw.sum())
        assert abs(res.combined_norm - 1.0) <= 1e-12
        assert all(m > 0 for m in res.margins)


def _decomposed(seed):
    combo, witnesses = build_instance(seed, Ranges())
    params = compute_params(combo, witnesses)
    U = weak_neighborhood(combo_point(combo, witnesses), params)
    y = sample_in_neighborhood(U, [seed, 0])
    return combo, witnesses, y, decompose(combo, witnesses, params, y)


@criterion(7, "tampered witnesses are flagged by the matching check")
def test_tamper_scaled_witness():
    cases = flagged = 0
    seed = 10_000
    while cases < 50:
        combo, witnesses, y, zbars = _decomposed(seed)
        seed += 1
        norms = [sup_norm(z) for z in zbars]
        i = int(np.argmax(norms))
        if 1.1 * norms[i] <= 1 + 1e-9:
            continue
        zbars[i] = zbars[i] * 1.1
        rep = verify_decomposition(combo, witnesses, y, zbars)
        cases += 1
        flagged += ("ball", i) in rep.failures and ("reconstruction", None) in rep.failures
    print(f"scaled witness: {flagged}/{cases} flagged (ball and reconstruction)")
    assert flagged == cases


@criterion(7, "tampered witnesses are flagged by the matching check")
def test_tamper_replaced_functional():
    cases = flagged = 0
    seed = 20_000
    while cases < 50:
        combo, witnesses, y, zbars = _decomposed(seed)
        seed += 1
        eligible = [i for i, s in enumerate(combo.slices) if s.epsilon <= 1]
        if not eligible:
            continue
        i = eligible[0]
        terms = list(zip(combo.lambdas, combo.slices))
        lam, s = terms[i]
        terms[i] = (lam, Slice(-s.functional, s.epsilon))
        tampered = ConvexCombo.of([t[0] for t in terms], [t[1] for t in terms])
        rep = verify_decomposition(tampered, witnesses, y, zbars)
        cases += 1
        flagged += ("slice", i) in rep.failures and ("witness", i) in rep.failures
    print(f"replaced functional: {flagged}/{cases} flagged (slice and witness)")
    assert flagged == cases
