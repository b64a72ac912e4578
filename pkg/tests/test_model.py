import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slice_lab.errors import InvalidInput
from slice_lab.model import (
    OMEGA,
    ConvexCombo,
    Functional,
    Point,
    Slice,
    SpaceModel,
    combo_point,
    dual_basis,
    l1_norm,
    linear_combination,
    norming_point,
    pairing,
    random_slice_point,
    slice_membership,
    sup_norm,
)

R2 = SpaceModel("finite-discrete", "real", 2)
R3 = SpaceModel("finite-discrete", "real", 3)
C0 = SpaceModel("c0", "complex")
COM = SpaceModel("c-omega", "real")


def test_space_model_validation():
    with pytest.raises(InvalidInput):
        SpaceModel("finite-discrete", "real", 0)
    with pytest.raises(InvalidInput):
        SpaceModel("c0", "real", 3)
    with pytest.raises(InvalidInput):
        SpaceModel("hilbert")


def test_pairing_examples():
    assert pairing(dual_basis(R2, 0), Point.from_values(R2, [1.0, 0.0])) == 1.0
    assert pairing(Functional(R2), Point.from_values(R2, [0.3, -0.7])) == 0.0
    f = Functional.from_values(R2, [0.5, 0.5])
    assert pairing(f, Point.from_values(R2, [0.9, 0.2])) == pytest.approx(0.55, abs=1e-15)


def test_pairing_omega_atom():
    f = Functional(COM, {0: 0.5}, 0.5)
    z = Point(COM, {0: 0.2}, 0.8)
    assert pairing(f, z) == pytest.approx(0.5)
    # unlisted coordinates take the tail value in c-omega
    assert pairing(Functional(COM, {7: 1.0}), z) == 0.8


def test_pairing_model_mismatch():
    with pytest.raises(InvalidInput):
        pairing(dual_basis(R2, 0), Point.from_values(R3, [1.0]))


def test_norms():
    assert sup_norm(Point.from_values(R2, [0.9, -0.2])) == 0.9
    assert sup_norm(Point(COM, {0: 0.3}, 0.5)) == 0.5
    assert l1_norm(Functional.from_values(R3, [0.5, -0.25, 0.25])) == 1.0
    assert sup_norm(Point(C0, {2: 0.6 + 0.8j})) == pytest.approx(1.0)


def test_real_model_rejects_complex():
    with pytest.raises(InvalidInput):
        Point(R2, {0: 1j})


@pytest.mark.parametrize(
    "z, inside, margin",
    [([0.9, 0.2], True, 0.4), ([0.4, 0.0], False, -0.1), ([1.2, 0.0], False, 0.7)],
)
def test_slice_membership_examples(z, inside, margin):
    s = Slice(dual_basis(R2, 0), 0.5)
    m = slice_membership(s, Point.from_values(R2, z))
    assert m.inside is inside
    assert m.slice_margin == pytest.approx(margin)


def test_membership_out_of_ball_reports_negative_margin():
    m = slice_membership(Slice(dual_basis(R2, 0), 0.5), Point.from_values(R2, [1.2, 0.0]))
    assert m.ball_margin == pytest.approx(-0.2)


def test_slice_validation():
    with pytest.raises(InvalidInput):
        Slice(Functional.from_values(R2, [0.5, 0.4]), 0.1)
    with pytest.raises(InvalidInput):
        Slice(dual_basis(R2, 0), 0.0)


def test_combo_validation():
    s = Slice(dual_basis(R2, 0), 0.5)
    with pytest.raises(InvalidInput):
        ConvexCombo.of([0.5, 0.4], [s, s])
    with pytest.raises(InvalidInput):
        ConvexCombo.of([1.5, -0.5], [s, s])
    with pytest.raises(InvalidInput):
        ConvexCombo(())


@pytest.mark.parametrize(
    "lambdas, zs, expected",
    [
        ([1.0], [[0.3, 0.7]], [0.3, 0.7]),
        ([0.5, 0.5], [[1, 0], [0, 1]], [0.5, 0.5]),
        ([0.5, 0.5], [[0.9, 0.2], [0.1, 0.9]], [0.5, 0.55]),
    ],
)
def test_combo_point_examples(lambdas, zs, expected):
    s = Slice(dual_basis(R2, 0), 2.5)
    combo = ConvexCombo.of(lambdas, [s] * len(lambdas))
    x = combo_point(combo, [Point.from_values(R2, z) for z in zs])
    assert [x.value(t) for t in range(2)] == pytest.approx(expected, abs=1e-15)


def test_combo_point_length_mismatch():
    s = Slice(dual_basis(R2, 0), 0.5)
    with pytest.raises(InvalidInput):
        combo_point(ConvexCombo.of([1.0], [s]), [])


def test_combo_point_tail_componentwise():
    s = Slice(dual_basis(COM, 0), 2.5)
    combo = ConvexCombo.of([0.25, 0.75], [s, s])
    x = combo_point(combo, [Point(COM, {0: 1.0}, 1.0), Point(COM, {3: 0.2}, -1.0)])
    assert x.tail == pytest.approx(-0.5)
    # index 3 is explicit only in the second point; the first contributes its tail
    assert x.value(3) == pytest.approx(0.25 * 1.0 + 0.75 * 0.2)


def test_norming_point_complex():
    f = Functional(C0, {0: 0.3j, 4: -0.7})
    u = norming_point(f)
    assert complex(pairing(f, u)) == pytest.approx(1.0)
    assert sup_norm(u) == pytest.approx(1.0)


def test_random_slice_point_examples():
    z = random_slice_point(Slice(dual_basis(R2, 0), 1.0), seed=3)
    assert z.value(0) > 0 and sup_norm(z) <= 1
    s = Slice(Functional.from_values(R2, [0.5, 0.5]), 0.2)
    z = random_slice_point(s, seed=1)
    assert 0.5 * (z.value(0) + z.value(1)) > 0.8
    assert slice_membership(s, z).inside
    wide = Slice(dual_basis(R2, 1), 2.1)
    assert slice_membership(wide, random_slice_point(wide, seed=0)).inside


def _random_functional(rng, space, size=4):
    vals = rng.normal(size=size) + (1j * rng.normal(size=size) if not space.is_real else 0)
    vals = vals / np.abs(vals).sum()
    atom = None
    if space.has_omega:
        vals = vals * 0.8
        atom = 0.2 * (1 if rng.random() < 0.5 else -1)
    return Functional(space, {2 * t: complex(v) if not space.is_real else float(v)
                              for t, v in enumerate(vals)}, atom)


SPACES = [
    SpaceModel("finite-discrete", "real", 8),
    SpaceModel("finite-discrete", "complex", 8),
    SpaceModel("c0", "real"),
    SpaceModel("c0", "complex"),
    SpaceModel("c-omega", "real"),
    SpaceModel("c-omega", "complex"),
]


def test_random_slice_point_all_pass():
    # 10,000 seeded draws over all models, epsilons spanning tiny to whole-ball
    rng = np.random.default_rng(0)
    bad = 0
    for seed in range(10_000):
        space = SPACES[seed % len(SPACES)]
        f = _random_functional(rng, space)
        eps = float(rng.choice([1e-3, 0.05, 0.3, 1.0, 2.5]))
        s = Slice(f, eps)
        z = random_slice_point(s, seed)
        m = slice_membership(s, z)
        bad += not (m.inside and m.slice_margin >= eps / 10 - 1e-12)
    assert bad == 0


def _random_point(rng, space):
    vals = rng.uniform(-1, 1, 6) + (1j * rng.uniform(-1, 1, 6) if not space.is_real else 0)
    coords = {t: (complex(v) if not space.is_real else float(v)) for t, v in enumerate(vals)}
    tail = None
    if space.has_omega:
        tail = float(rng.uniform(-1, 1)) if space.is_real else complex(rng.uniform(-1, 1))
    return Point(space, coords, tail)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(SPACES))
def test_pairing_linear_and_holder(seed, space):
    rng = np.random.default_rng(seed)
    f = _random_functional(rng, space)
    z, w = _random_point(rng, space), _random_point(rng, space)
    a, b = (float(v) for v in rng.normal(size=2))
    lhs = pairing(f, linear_combination([a, b], [z, w]))
    rhs = a * pairing(f, z) + b * pairing(f, w)
    assert abs(lhs - rhs) <= 1e-12
    assert abs(pairing(f, z)) <= l1_norm(f) * sup_norm(z) + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(SPACES), st.integers(1, 5))
def test_combo_point_convexity(seed, space, k):
    rng = np.random.default_rng(seed)
    zs = [_random_point(rng, space) for _ in range(k)]
    raw = rng.uniform(0.1, 1, k)
    lam = raw / raw.sum()
    s = Slice(_random_functional(rng, space), 3.0)
    x = combo_point(ConvexCombo.of(list(lam), [s] * k), zs)
    assert sup_norm(x) <= max(sup_norm(z) for z in zs) + 1e-12


@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"{s.kind}-{s.field}")
def test_json_round_trip(space):
    rng = np.random.default_rng(1)
    z = _random_point(rng, space)
    f = _random_functional(rng, space)
    combo = ConvexCombo.of([0.25, 0.75], [Slice(f, 0.3), Slice(f, 0.6)])
    assert Point.from_json(json.loads(json.dumps(z.to_json()))) == z
    assert Functional.from_json(json.loads(json.dumps(f.to_json()))) == f
    back = ConvexCombo.from_json(json.loads(json.dumps(combo.to_json())))
    assert back.lambdas == combo.lambdas
    assert back.slices[1].functional == f


def test_json_shape():
    z = Point(SpaceModel("c-omega", "complex"), {0: 1 + 2j}, 0.5)
    data = z.to_json()
    assert data == {
        "space": {"kind": "c-omega", "field": "complex"},
        "coords": {"0": [1.0, 2.0]},
        "tail": [0.5, 0.0],
    }
    assert Point.from_json({"space": {"kind": "c0"}, "coords": {"3": 0.5}}).value(3) == 0.5


def test_omega_label():
    f = Functional(COM, {1: 0.5}, -0.5)
    assert f.support() == (1, OMEGA)
    assert Point(COM, {}, 0.25).value(OMEGA) == 0.25
