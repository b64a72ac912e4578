"""Diameters of slices and the strict-shrinkage experiments.

In real l_inf^n the closed slice {|z_j| <= 1, <f, z> >= 1 - eps} is a
polytope, and the sup-norm diameter of a Minkowski combination of such
polytopes splits over coordinates: each coordinate contributes
sum_i lambda_i (max z_j - min z_j) over S_i. The coordinate extrema have a
closed form (saturate every other coordinate along sign(f), then spend
the remaining budget on z_j), so no LP solver is needed.

The Euclidean and l_p experiments maximize a convex function (a norm)
over a combination of caps. That is done by sampling extreme points and
refining by coordinate ascent; the results are lower estimates of the
supremum, paired with a certified upper bound where one is available.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .model import ConvexCombo, Slice

FEAS_TOL = 1e-12


@dataclass(frozen=True)
class SlicePolytope:
    functional: np.ndarray
    epsilon: float

    def __post_init__(self):
        f = np.asarray(self.functional, dtype=float)
        if f.ndim != 1 or f.size == 0:
            raise InvalidInput("functional must be a non-empty vector")
        if not self.epsilon > 0:
            raise InvalidInput("epsilon must be positive")
        object.__setattr__(self, "functional", f)

    __hash__ = None

    @property
    def dimension(self):
        return self.functional.size

    @property
    def feasible(self):
        return np.abs(self.functional).sum() >= 1.0 - self.epsilon - FEAS_TOL

    @classmethod
    def from_slice(cls, s: Slice):
        space = s.space
        if space.kind != "finite-discrete" or not space.is_real:
            raise InvalidInput("diameters are computed in real l_inf^n only")
        f = np.zeros(space.n)
        for t, v in s.functional.coords.items():
            f[t] = v
        return cls(f, s.epsilon)


@dataclass(frozen=True)
class DiameterResult:
    value: float
    coordinate: int
    spreads: tuple

    def to_json(self):
        return {"value": self.value, "coordinate": self.coordinate, "spreads": list(self.spreads)}


def coord_extremum(P: SlicePolytope, j: int, sense: str = "max") -> float:
    """Exact max or min of z_j over the closed slice polytope."""
    if sense not in ("max", "min"):
        raise InvalidInput(f"sense must be 'max' or 'min', got {sense!r}")
    if not P.feasible:
        raise InvalidInput("slice polytope is empty")
    f = P.functional
    fj = f[j]
    budget = 1.0 - P.epsilon - (np.abs(f).sum() - abs(fj))
    # remaining constraint: fj * z_j >= budget
    if sense == "max":
        if fj >= 0:
            return 1.0
        return float(min(1.0, budget / fj))
    if fj <= 0:
        return -1.0
    return float(max(-1.0, budget / fj))


def coord_spread(P: SlicePolytope, j: int) -> float:
    return coord_extremum(P, j, "max") - coord_extremum(P, j, "min")


def _result(spreads):
    spreads = tuple(float(s) for s in spreads)
    j = int(np.argmax(spreads))
    return DiameterResult(spreads[j], j, spreads)


def slice_diameter_linf(P: SlicePolytope) -> DiameterResult:
    return _result(coord_spread(P, j) for j in range(P.dimension))


def combo_diameter_linf(combo) -> DiameterResult:
    """Sup-norm diameter of sum_i lambda_i S_i.

    ``combo`` is a :class:`ConvexCombo` over a real finite-discrete model
    or a sequence of ``(lambda, SlicePolytope)`` pairs.
    """
    if isinstance(combo, ConvexCombo):
        terms = [(lam, SlicePolytope.from_slice(s)) for lam, s in combo.terms]
    else:
        terms = list(combo)
    n = {P.dimension for _, P in terms}
    if len(n) != 1:
        raise InvalidInput("all slices must live in the same dimension")
    n = n.pop()
    spreads = [math.fsum(lam * coord_spread(P, j) for lam, P in terms) for j in range(n)]
    return _result(spreads)


def euclidean_slice_diameter(epsilon: float) -> float:
    """Diameter of a slice of the Euclidean unit ball (dimension >= 2)."""
    if not 0.0 < epsilon <= 1.0:
        raise InvalidInput(f"epsilon must lie in (0, 1], got {epsilon!r}")
    return 2.0 * math.sqrt(1.0 - (1.0 - epsilon) ** 2)


def coordinate_ascent(objective, start, lower, upper, step=0.25, tol=1e-12, max_iter=20000):
    """Derivative-free ascent: try +-step along each coordinate, halve on stalls."""
    x = np.clip(np.asarray(start, dtype=float), lower, upper)
    best = objective(x)
    span = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    h = step
    it = 0
    while h > tol and it < max_iter:
        improved = False
        for i in range(x.size):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] = np.clip(trial[i] + sign * h * span[i], lower[i], upper[i])
                val = objective(trial)
                it += 1
                if val > best:
                    x, best, improved = trial, val, True
                    break
        if not improved:
            h /= 2.0
    return x, best


def _multistart(objective, candidates, lower, upper, restarts=10):
    values = np.array([objective(c) for c in candidates])
    order = np.argsort(values)[::-1][:restarts]
    best_x, best_val = candidates[order[0]], values[order[0]]
    for idx in order:
        x, val = coordinate_ascent(objective, candidates[idx], lower, upper)
        if val > best_val:
            best_x, best_val = x, val
    return best_x, float(best_val)


@dataclass(frozen=True)
class OppositeSliceResult:
    sup_estimate: float
    certified_upper_bound: float
    slice_diameter: float

    def to_json(self):
        return {
            "sup_estimate": self.sup_estimate,
            "certified_upper_bound": self.certified_upper_bound,
            "slice_diameter": self.slice_diameter,
        }


REMARK_EPS_MAX = 1.0 - math.sqrt(3.0) / 2.0


def _cap_point(h, g, direction, basis):
    g = np.asarray(g)
    norm = np.linalg.norm(g)
    u = basis @ (g / norm) if norm > 0 else basis[:, 0]
    return h * direction + math.sqrt(max(0.0, 1.0 - h * h)) * u


def opposite_slice_combo_sup(n, direction, epsilon, samples=2000, seed=0, restarts=10):
    """Estimate sup ||z|| over 1/2 S(x*, eps) + 1/2 S(-x*, eps) in Euclidean R^n.

    The certified bound is diam S(x*, eps): with x in S_1,
    ||(x1 + x2)/2|| <= ||x1 - x||/2 + ||x2 + x||/2 <= diam S_1 < 1.
    """
    if n < 2:
        raise InvalidInput("need dimension n >= 2")
    if not 0.0 < epsilon < REMARK_EPS_MAX:
        raise InvalidInput(
            f"slice diameter must be < 1, i.e. epsilon < {REMARK_EPS_MAX:.6f}; got {epsilon!r}"
        )
    a = np.asarray(direction, dtype=float)
    if a.shape != (n,) or not np.linalg.norm(a) > 0:
        raise InvalidInput("direction must be a nonzero vector of length n")
    a = a / np.linalg.norm(a)
    # orthonormal basis of the complement of a
    q, _ = np.linalg.qr(np.column_stack([a, np.eye(n)]))
    basis = q[:, 1:n]
    diam = euclidean_slice_diameter(epsilon)
    lo_h = 1.0 - epsilon
    m = n - 1

    def unpack(v):
        return v[0], v[1:1 + m], v[1 + m], v[2 + m:]

    def objective(v):
        h1, g1, h2, g2 = unpack(v)
        x1 = _cap_point(h1, g1, a, basis)
        x2 = _cap_point(h2, g2, -a, basis)
        return float(np.linalg.norm(0.5 * x1 + 0.5 * x2))

    rng = np.random.default_rng(seed)
    lower = np.concatenate([[lo_h], -np.ones(m), [lo_h], -np.ones(m)])
    upper = np.concatenate([[1.0], np.ones(m), [1.0], np.ones(m)])
    cands = rng.uniform(lower, upper, size=(samples, 2 * m + 2))
    # bias half of the samples to the rim, where the caps' extreme points spread most
    rim = rng.uniform(size=samples) < 0.5
    cands[rim, 0] = lo_h
    cands[rim, 1 + m] = lo_h
    _, best = _multistart(objective, list(cands), lower, upper, restarts)
    return OppositeSliceResult(best, diam, diam)


@dataclass(frozen=True)
class LpSumResult:
    sup_estimate: float
    beta_estimate: float
    arg: tuple

    def to_json(self):
        return {"sup_estimate": self.sup_estimate, "beta_estimate": self.beta_estimate,
                "argmax": list(self.arg)}


def lp_sphere_point(t, p):
    """Point of the unit sphere of l_p^2 at parameter angle t."""
    c, s = math.cos(t), math.sin(t)
    return np.array([math.copysign(abs(c) ** (2.0 / p), c), math.copysign(abs(s) ** (2.0 / p), s)])


def _cap_halfwidth(p, eps):
    thr = 1.0 - eps
    if thr <= -1.0:
        return math.pi
    val = math.copysign(abs(thr) ** (p / 2.0), thr)
    return math.acos(max(-1.0, min(1.0, val)))


def lp_sum_combo_sup(p, lam, epsilon, samples=4000, seed=0, restarts=10):
    """Estimate sup ||lam a + (1 - lam) b||_p for a in S(e_1*, eps1), b in S(e_2*, eps2) in R (+)_p R.

    ``epsilon`` is a number or a pair. The extreme points of each closed
    slice lie on an arc of the l_p sphere, so both points are searched on
    their arcs. ``beta_estimate = 1 - sup_estimate``.
    """
    if not p > 1:
        raise InvalidInput(f"p must exceed 1, got {p!r}")
    if not 0.0 < lam <= 1.0:
        raise InvalidInput(f"lambda must lie in (0, 1], got {lam!r}")
    eps1, eps2 = (epsilon, epsilon) if np.isscalar(epsilon) else tuple(epsilon)
    if not (eps1 > 0 and eps2 > 0):
        raise InvalidInput("epsilon must be positive")
    w1, w2 = _cap_halfwidth(p, eps1), _cap_halfwidth(p, eps2)

    def objective(v):
        a = lp_sphere_point(v[0], p)
        b = lp_sphere_point(math.pi / 2 - v[1], p)
        z = lam * a + (1.0 - lam) * b
        return float(np.sum(np.abs(z) ** p) ** (1.0 / p))

    lower = np.array([-w1, -w2])
    upper = np.array([w1, w2])
    rng = np.random.default_rng(seed)
    side = max(2, int(math.isqrt(max(samples, 4))))
    grid = [np.array([s, t]) for s in np.linspace(-w1, w1, side) for t in np.linspace(-w2, w2, side)]
    cands = grid + list(rng.uniform(lower, upper, size=(samples, 2)))
    x, best = _multistart(objective, cands, lower, upper, restarts)
    return LpSumResult(best, 1.0 - best, (float(x[0]), float(x[1])))


def slice_polytopes(combo: ConvexCombo):
    return [SlicePolytope.from_slice(s) for s in combo.slices]
