"""Constructive witnesses for convex combinations of slices of C(K).

Given slices S_1, ..., S_k of the unit ball, weights lambda_i and points
z_i in S_i with x = sum lambda_i z_i, :func:`compute_params` picks a
radius ``delta`` and :func:`weak_neighborhood` returns the box

    U = {y in B : |y(t) - x(t)| < delta for t in E},

E a finite set of coordinates carrying all the functionals. For every y
in U, :func:`decompose` builds zbar_i in S_i with y = sum lambda_i zbar_i,
so U is a relatively weakly open neighbourhood of x inside the
combination.

Each coordinate t of E falls in one of three cases:

- interior: some witness has |z_i(t)| < 1. That witness absorbs the
  whole perturbation w(t) = y(t) - x(t), scaled by 1/lambda_i.
- pinned: all z_i(t) coincide and are unimodular. Every zbar_i(t) is y(t).
- circle: all z_i(t) unimodular but not all equal. Each group of equal
  values is pulled inside the disk along a chord (the shifts sum to 0),
  then shares the perturbation.

The neighbourhoods V_t of the general construction are singletons for
finite indices and {s > N} U {omega} at omega, N past every transition
index; the bump functions are their indicators.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionFailure, InvalidInput
from .model import (
    OMEGA,
    ConvexCombo,
    Point,
    _random_scalar,
    combo_point,
    pairing,
    slice_membership,
    sup_norm,
)

EQ_TOL = 1e-12
ETA_FRACTION = 0.99
RHO_FRACTION = 0.9
DELTA_FRACTION = 0.9
BALL_TOL = 1e-12
RECON_TOL = 1e-9
SLICE_TOL = 1e-9


@dataclass(frozen=True)
class InteriorCase:
    """Some witness is strictly inside the disk at this coordinate."""

    i0: int


@dataclass(frozen=True)
class PinnedCase:
    """All witnesses share one unimodular value."""

    value: complex


@dataclass(frozen=True)
class CirclePlan:
    """Shift plan at a coordinate where the witnesses are unimodular but differ.

    ``units[p]`` is the common value of group ``groups[p]``, ordered by
    increasing principal argument ``thetas[p]``; ``weights[p]`` is the
    total convex weight of the group and ``shifts[p]`` equals
    rho * (units[p - 1] - units[p]) with wraparound.
    """

    thetas: tuple
    units: tuple
    groups: tuple
    weights: tuple
    shifts: tuple

    @property
    def q(self):
        return len(self.groups)

    def group_of(self, i):
        for p, members in enumerate(self.groups):
            if i in members:
                return p
        raise KeyError(i)


@dataclass(frozen=True)
class ParamSet:
    slack: float
    eta: float
    support: tuple
    max_inv_weight: float
    interior: tuple
    delta_interior: float
    circle: tuple
    min_sq_gap: float | None
    rho: float | None
    delta_circle: float
    delta: float
    cases: dict = field(default_factory=dict)
    omega_cutoff: int | None = None

    __hash__ = None


@dataclass(frozen=True)
class BoxNeighborhood:
    center: Point
    support: tuple
    delta: float
    omega_cutoff: int | None = None

    __hash__ = None

    def coordinate_gaps(self, y: Point):
        return {t: abs(y.value(t) - self.center.value(t)) for t in self.support}

    def contains(self, y: Point) -> bool:
        if y.space != self.center.space or sup_norm(y) > 1.0 + BALL_TOL:
            return False
        return all(gap < self.delta for gap in self.coordinate_gaps(y).values())

    __contains__ = contains


@dataclass
class DecompositionReport:
    zbars: list
    reconstruction_residual: float
    ball_margins: list
    slice_margins: list
    drifts: list
    slack: float
    eta: float
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    @property
    def required_slice_margin(self):
        return self.slack - 3 * self.eta - SLICE_TOL

    def failed_checks(self):
        return sorted({name for name, _ in self.failures})

    def flagged(self, check):
        return [i for name, i in self.failures if name == check]

    def to_json(self):
        return {
            "passed": self.passed,
            "reconstruction_residual": self.reconstruction_residual,
            "ball_margins": self.ball_margins,
            "slice_margins": self.slice_margins,
            "required_slice_margin": self.required_slice_margin,
            "drifts": self.drifts,
            "slack": self.slack,
            "eta": self.eta,
            "failures": [{"check": name, "index": i} for name, i in self.failures],
            "zbars": [z.to_json() for z in self.zbars],
        }


def slice_margins(combo: ConvexCombo, points):
    return [slice_membership(s, z).slice_margin for s, z in zip(combo.slices, points)]


def slack(combo: ConvexCombo, witnesses) -> float:
    """Smallest slice margin of the witnesses; raises unless every witness is a member."""
    if len(witnesses) != combo.k:
        raise InvalidInput(f"expected {combo.k} witnesses, got {len(witnesses)}")
    for i, (s, z) in enumerate(zip(combo.slices, witnesses)):
        m = slice_membership(s, z)
        if not m.inside:
            raise InvalidInput(
                f"witness {i} is not in its slice "
                f"(slice margin {m.slice_margin:.3g}, ball margin {m.ball_margin:.3g})"
            )
    return min(slice_margins(combo, witnesses))


def eta_for(d):
    return ETA_FRACTION * min(d / 3.0, 1.0)


def combo_support(combo: ConvexCombo):
    """Union of the functionals' supports; omega is always included in c-omega."""
    coords = set()
    for s in combo.slices:
        coords.update(t for t in s.functional.support() if t != OMEGA)
    out = sorted(coords)
    if combo.space.has_omega:
        out.append(OMEGA)
    return tuple(out)


def _group_values(values):
    groups, reps = [], []
    for i, v in enumerate(values):
        for g, r in zip(groups, reps):
            if abs(v - r) <= EQ_TOL:
                g.append(i)
                break
        else:
            groups.append([i])
            reps.append(v)
    return groups, reps


def _classify(values):
    mods = [abs(v) for v in values]
    if min(mods) < 1.0 - EQ_TOL:
        # most slack first, lowest index on ties
        i0 = max(range(len(values)), key=lambda i: (1.0 - mods[i], -i))
        return "interior", i0
    groups, reps = _group_values(values)
    if len(groups) == 1:
        return "pinned", reps[0]
    return "circle", (groups, reps)


def _circle_plan(groups, reps, lambdas, rho):
    units = [r / abs(r) for r in reps]
    thetas = [cmath.phase(u) for u in units]
    order = sorted(range(len(units)), key=lambda p: thetas[p])
    units = [units[p] for p in order]
    groups = [tuple(groups[p]) for p in order]
    weights = [math.fsum(lambdas[i] for i in g) for g in groups]
    shifts = [rho * (units[p - 1] - units[p]) for p in range(len(units))]
    return CirclePlan(
        thetas=tuple(thetas[p] for p in order),
        units=tuple(units),
        groups=tuple(groups),
        weights=tuple(weights),
        shifts=tuple(shifts),
    )


def compute_params(combo: ConvexCombo, witnesses) -> ParamSet:
    d = slack(combo, witnesses)
    eta = eta_for(d)
    lambdas = combo.lambdas
    L = max(1.0 / lam for lam in lambdas)
    support = combo_support(combo)

    raw = {}
    interior_gaps = []
    sq_gaps = []
    for t in support:
        kind, info = _classify([z.value(t) for z in witnesses])
        raw[t] = (kind, info)
        if kind == "interior":
            interior_gaps.append(1.0 - abs(witnesses[info].value(t)))
        elif kind == "circle":
            _, reps = info
            units = [r / abs(r) for r in reps]
            sq_gaps.extend(
                abs(a - b) ** 2 for j, a in enumerate(units) for b in units[j + 1:]
            )

    delta_interior = min(interior_gaps) / (1 + 3 * L) if interior_gaps else math.inf
    if sq_gaps:
        D = min(sq_gaps)
        rho = RHO_FRACTION * min(D / 8.0, eta / (4 * L))
        delta_circle = D * rho / (4 * (1 + 3 * L))
    else:
        D = rho = None
        delta_circle = math.inf
    delta = DELTA_FRACTION * min(eta / (6 * L), delta_interior, delta_circle)

    cases = {}
    for t, (kind, info) in raw.items():
        if kind == "interior":
            cases[t] = InteriorCase(info)
        elif kind == "pinned":
            cases[t] = PinnedCase(info)
        else:
            cases[t] = _circle_plan(*info, lambdas, rho)

    cutoff = None
    if combo.space.has_omega:
        cutoff = max(
            [z.last_index for z in witnesses] + [s.functional.last_index for s in combo.slices]
        )
        cutoff = max(cutoff, 0)

    return ParamSet(
        slack=d,
        eta=eta,
        support=support,
        max_inv_weight=L,
        interior=tuple(t for t in support if raw[t][0] == "interior"),
        delta_interior=delta_interior,
        circle=tuple(t for t in support if raw[t][0] == "circle"),
        min_sq_gap=D,
        rho=rho,
        delta_circle=delta_circle,
        delta=delta,
        cases=cases,
        omega_cutoff=cutoff,
    )


def weak_neighborhood(x: Point, params: ParamSet) -> BoxNeighborhood:
    cutoff = None
    if x.space.has_omega:
        cutoff = max(params.omega_cutoff or 0, x.last_index)
    return BoxNeighborhood(x, params.support, params.delta, cutoff)


def sample_in_neighborhood(U: BoxNeighborhood, seed, extra=3) -> Point:
    """Random point of U, each constrained coordinate within 0.99 delta of the centre.

    Coordinates outside the box support are drawn uniformly from the
    unit disk (or [-1, 1]).
    """
    x = U.center
    if U.delta <= 0:
        return x
    rng = np.random.default_rng(seed)
    space = x.space
    radius = 0.99 * U.delta

    def near(c):
        v = c + _random_scalar(rng, space, radius)
        return v / abs(v) if abs(v) > 1.0 else v

    constrained = set(U.support)
    if space.kind == "finite-discrete":
        pool = range(space.n)
    else:
        top = max([x.last_index, U.omega_cutoff or -1] + [t for t in constrained if t != OMEGA])
        pool = range(top + 1 + int(rng.integers(0, extra + 1)))
    coords = {}
    for t in pool:
        coords[t] = near(x.value(t)) if t in constrained else _random_scalar(rng, space)
    tail = None
    if space.has_omega:
        tail = near(x.tail) if OMEGA in constrained else _random_scalar(rng, space)
    return Point(space, coords, tail)


def _new_values(case, zs, lambdas, y_t, w):
    if isinstance(case, InteriorCase):
        out = [z for z in zs]
        out[case.i0] = zs[case.i0] + w / lambdas[case.i0]
        return out
    if isinstance(case, PinnedCase):
        return [y_t] * len(zs)
    out = [None] * len(zs)
    for p, members in enumerate(case.groups):
        shift = case.shifts[p] / case.weights[p] + w / (case.q * case.weights[p])
        for i in members:
            out[i] = zs[i] + shift
    return out


def decompose(combo: ConvexCombo, witnesses, params: ParamSet, y: Point):
    """Points zbar_i in S_i with sum lambda_i zbar_i = y, for y in the neighbourhood."""
    x = combo_point(combo, witnesses)
    U = weak_neighborhood(x, params)
    if not U.contains(y):
        raise InvalidInput("y is not in the weak neighbourhood of x")
    space = x.space
    lambdas = combo.lambdas
    k = combo.k

    if space.has_omega:
        cutoff = max(U.omega_cutoff, y.last_index)
        base = {s: y.value(s) for s in range(cutoff + 1)}
    else:
        base = dict(y.coords)
    coords = [dict(base) for _ in range(k)]
    tails = [y.tail] * k

    for t in params.support:
        case = params.cases[t]
        y_t = y.value(t)
        w = y_t - x.value(t)
        values = _new_values(case, [z.value(t) for z in witnesses], lambdas, y_t, w)
        for i, v in enumerate(values):
            if abs(v) > 1.0 + BALL_TOL:
                raise ConstructionFailure(
                    f"witness {i} leaves the ball at coordinate {t} ({type(case).__name__})",
                    coord=t,
                    case=type(case).__name__,
                )
            if t == OMEGA:
                tails[i] = v
            else:
                coords[i][t] = v
    return [Point(space, c, tl) for c, tl in zip(coords, tails)]


def verify_decomposition(combo: ConvexCombo, witnesses, y: Point, zbars, eta=None):
    """Check the four postconditions of :func:`decompose` independently.

    Failures are recorded as ``(check, index)`` pairs, with checks
    ``reconstruction``, ``ball``, ``slice``, ``drift`` plus ``witness``
    when an input witness is not in its slice and ``count`` on a length
    mismatch. Nothing is raised.
    """
    failures = []
    witness_margins = slice_margins(combo, witnesses)
    for i, (s, z) in enumerate(zip(combo.slices, witnesses)):
        if not slice_membership(s, z).inside:
            failures.append(("witness", i))
    d = min(witness_margins)
    if eta is None:
        eta = eta_for(d)
    if len(zbars) != combo.k:
        failures.append(("count", None))
        return DecompositionReport(list(zbars), math.inf, [], [], [], d, eta, failures)

    lambdas = combo.lambdas
    keys = set(y.coords).union(*(z.coords for z in zbars))
    residual = max(
        (abs(sum(lam * z.value(s) for lam, z in zip(lambdas, zbars)) - y.value(s)) for s in keys),
        default=0.0,
    )
    if y.space.has_omega:
        residual = max(residual, abs(sum(lam * z.tail for lam, z in zip(lambdas, zbars)) - y.tail))
    if not residual <= RECON_TOL:
        failures.append(("reconstruction", None))

    ball = [1.0 - sup_norm(z) for z in zbars]
    margins = slice_margins(combo, zbars)
    support = combo_support(combo)
    drifts = [
        max((abs(zb.value(t) - z.value(t)) for t in support), default=0.0)
        for zb, z in zip(zbars, witnesses)
    ]
    floor = d - 3 * eta - SLICE_TOL
    for i in range(combo.k):
        if ball[i] < -BALL_TOL:
            failures.append(("ball", i))
        if not (margins[i] > 0 and margins[i] >= floor):
            failures.append(("slice", i))
        if not drifts[i] <= eta:
            failures.append(("drift", i))
    return DecompositionReport(list(zbars), residual, ball, margins, drifts, d, eta, failures)


def witness_shift_bounds(params: ParamSet, witnesses):
    """For every circle coordinate, |z_i(t) + c_p/Lambda_p| and the bound 1 - D rho/(4 Lambda_p).

    Yields ``(t, i, modulus, bound)``.
    """
    for t in params.circle:
        plan = params.cases[t]
        for p, members in enumerate(plan.groups):
            bound = 1.0 - params.min_sq_gap * params.rho / (4 * plan.weights[p])
            for i in members:
                yield t, i, abs(witnesses[i].value(t) + plan.shifts[p] / plan.weights[p]), bound


def pairing_drop(combo: ConvexCombo, witnesses, zbars):
    """Re f_i(z_i) - Re f_i(zbar_i) for every i."""
    return [
        complex(pairing(s.functional, z)).real - complex(pairing(s.functional, zb)).real
        for s, z, zb in zip(combo.slices, witnesses, zbars)
    ]
