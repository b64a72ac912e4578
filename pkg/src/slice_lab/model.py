"""Finitely represented points, functionals and slices.

Three models of C(K) for a scattered compact K are supported:

- ``finite-discrete``: K = {0, ..., n-1}, the space is l_inf^n;
- ``c0``: K = N with the point at infinity removed, finitely supported
  sequences, unlisted coordinates are 0;
- ``c-omega``: K = [0, omega], eventually constant sequences. A point
  carries a ``tail`` which is its value at omega and at every unlisted
  index.

Functionals are elements of l1(K): finitely many coefficients plus, in
the ``c-omega`` model, an atom at omega. The pairing is bilinear,
``<f, z> = sum_t f(t) z(t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInput

KINDS = ("finite-discrete", "c0", "c-omega")
FIELDS = ("real", "complex")

#: Coordinate label of the limit point omega in the ``c-omega`` model.
OMEGA = math.inf

NORM_TOL = 1e-12
BALL_TOL = 1e-9
COMBO_TOL = 1e-12


@dataclass(frozen=True)
class SpaceModel:
    kind: str
    field: str = "real"
    n: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown space kind {self.kind!r}")
        if self.field not in FIELDS:
            raise InvalidInput(f"unknown scalar field {self.field!r}")
        if self.kind == "finite-discrete":
            if self.n is None or int(self.n) < 1:
                raise InvalidInput("finite-discrete model needs n >= 1")
            object.__setattr__(self, "n", int(self.n))
        elif self.n is not None:
            raise InvalidInput(f"{self.kind} model takes no coordinate count")

    @property
    def is_real(self):
        return self.field == "real"

    @property
    def has_omega(self):
        return self.kind == "c-omega"

    def coerce(self, value):
        """Convert ``value`` to the scalar type of this model."""
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise InvalidInput(f"complex scalar must be [re, im], got {value!r}")
            value = complex(float(value[0]), float(value[1]))
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InvalidInput(f"non-finite scalar {value!r}")
        if self.is_real:
            if value.imag != 0.0:
                raise InvalidInput(f"complex value {value!r} in a real model")
            return float(value.real)
        return value

    def check_index(self, t):
        if t == OMEGA:
            if not self.has_omega:
                raise InvalidInput(f"index omega is not a coordinate of {self.kind}")
            return t
        if isinstance(t, bool) or int(t) != t or t < 0:
            raise InvalidInput(f"invalid coordinate index {t!r}")
        t = int(t)
        if self.kind == "finite-discrete" and t >= self.n:
            raise InvalidInput(f"index {t} out of range for n={self.n}")
        return t

    def to_json(self):
        out = {"kind": self.kind, "field": self.field}
        if self.n is not None:
            out["n"] = self.n
        return out

    @classmethod
    def from_json(cls, data):
        return cls(kind=data["kind"], field=data.get("field", "real"), n=data.get("n"))


def _clean_coords(space, coords):
    out = {}
    for t, v in dict(coords).items():
        if t == OMEGA:
            raise InvalidInput("omega is stored as tail/omega atom, not as a coordinate")
        out[space.check_index(t)] = space.coerce(v)
    return dict(sorted(out.items()))


def _scalar_json(value, space):
    if space.is_real:
        return float(value)
    value = complex(value)
    return [value.real, value.imag]


def _coords_json(coords, space):
    return {str(t): _scalar_json(v, space) for t, v in coords.items()}


def _coords_from_json(data):
    try:
        return {int(k): v for k, v in data.items()}
    except ValueError as exc:
        raise InvalidInput(f"coordinate keys must be decimal strings: {exc}") from None


@dataclass(frozen=True, eq=True)
class Point:
    """An element of the model space C(K)."""

    space: SpaceModel
    coords: Mapping[int, complex] = field(default_factory=dict)
    tail: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "coords", _clean_coords(self.space, self.coords))
        if self.space.has_omega:
            tail = 0.0 if self.tail is None else self.tail
            object.__setattr__(self, "tail", self.space.coerce(tail))
        elif self.tail is not None:
            raise InvalidInput(f"{self.space.kind} points have no tail")

    __hash__ = None

    @classmethod
    def from_values(cls, space, values, tail=None):
        return cls(space, dict(enumerate(values)), tail)

    def value(self, t):
        if t == OMEGA:
            if not self.space.has_omega:
                raise InvalidInput("omega is not a coordinate of this model")
            return self.tail
        default = self.tail if self.space.has_omega else 0.0
        return self.coords.get(t, default)

    @property
    def last_index(self):
        """Largest explicitly stored index, -1 if none."""
        return max(self.coords, default=-1)

    def indices(self):
        return tuple(self.coords)

    def norm(self):
        return sup_norm(self)

    def __add__(self, other):
        return linear_combination([1.0, 1.0], [self, other])

    def __sub__(self, other):
        return linear_combination([1.0, -1.0], [self, other])

    def __mul__(self, scalar):
        return linear_combination([scalar], [self])

    __rmul__ = __mul__

    def to_json(self):
        out = {"space": self.space.to_json(), "coords": _coords_json(self.coords, self.space)}
        if self.space.has_omega:
            out["tail"] = _scalar_json(self.tail, self.space)
        return out

    @classmethod
    def from_json(cls, data):
        space = SpaceModel.from_json(data["space"])
        return cls(space, _coords_from_json(data.get("coords", {})), data.get("tail"))


@dataclass(frozen=True, eq=True)
class Functional:
    """An element of l1(K), acting on points of the same model."""

    space: SpaceModel
    coords: Mapping[int, complex] = field(default_factory=dict)
    omega_atom: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "coords", _clean_coords(self.space, self.coords))
        if self.space.has_omega:
            atom = 0.0 if self.omega_atom is None else self.omega_atom
            object.__setattr__(self, "omega_atom", self.space.coerce(atom))
        elif self.omega_atom is not None:
            raise InvalidInput(f"{self.space.kind} functionals have no omega atom")

    __hash__ = None

    @classmethod
    def from_values(cls, space, values, omega_atom=None):
        return cls(space, dict(enumerate(values)), omega_atom)

    def value(self, t):
        if t == OMEGA:
            return self.omega_atom if self.space.has_omega else 0.0
        return self.coords.get(t, 0.0)

    def support(self):
        """Coordinates carrying a nonzero coefficient (omega last)."""
        supp = [t for t, v in self.coords.items() if v != 0]
        if self.space.has_omega and self.omega_atom != 0:
            supp.append(OMEGA)
        return tuple(supp)

    @property
    def last_index(self):
        return max((t for t in self.support() if t != OMEGA), default=-1)

    def norm(self):
        return l1_norm(self)

    def __neg__(self):
        atom = None if self.omega_atom is None else -self.omega_atom
        return Functional(self.space, {t: -v for t, v in self.coords.items()}, atom)

    def to_json(self):
        out = {"space": self.space.to_json(), "coords": _coords_json(self.coords, self.space)}
        if self.space.has_omega:
            out["omega"] = _scalar_json(self.omega_atom, self.space)
        return out

    @classmethod
    def from_json(cls, data):
        space = SpaceModel.from_json(data["space"])
        return cls(space, _coords_from_json(data.get("coords", {})), data.get("omega"))


@dataclass(frozen=True)
class Slice:
    """The open slice {z in B : Re f(z) > 1 - epsilon} of the unit ball."""

    functional: Functional
    epsilon: float

    def __post_init__(self):
        norm = l1_norm(self.functional)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInput(f"slice functional must have l1-norm 1, got {norm!r}")
        if not self.epsilon > 0:
            raise InvalidInput(f"slice epsilon must be positive, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", float(self.epsilon))

    __hash__ = None

    @property
    def space(self):
        return self.functional.space

    def to_json(self):
        return {"functional": self.functional.to_json(), "epsilon": self.epsilon}

    @classmethod
    def from_json(cls, data):
        return cls(Functional.from_json(data["functional"]), data["epsilon"])


@dataclass(frozen=True)
class ConvexCombo:
    """sum_i lambda_i S_i for slices S_i of one model space."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(lam), s) for lam, s in self.terms)
        if not terms:
            raise InvalidInput("a convex combination needs at least one slice")
        if any(not lam > 0 for lam, _ in terms):
            raise InvalidInput("convex weights must be positive")
        total = math.fsum(lam for lam, _ in terms)
        if abs(total - 1.0) > COMBO_TOL:
            raise InvalidInput(f"convex weights must sum to 1, got {total!r}")
        spaces = {repr(s.space) for _, s in terms}
        if len(spaces) != 1:
            raise InvalidInput("all slices of a combination must share one model")
        object.__setattr__(self, "terms", terms)

    __hash__ = None

    @classmethod
    def of(cls, lambdas, slices):
        return cls(tuple(zip(lambdas, slices)))

    @property
    def lambdas(self):
        return [lam for lam, _ in self.terms]

    @property
    def slices(self):
        return [s for _, s in self.terms]

    @property
    def k(self):
        return len(self.terms)

    @property
    def space(self):
        return self.terms[0][1].space

    def to_json(self):
        return [{"lambda": lam, "slice": s.to_json()} for lam, s in self.terms]

    @classmethod
    def from_json(cls, data):
        return cls(tuple((item["lambda"], Slice.from_json(item["slice"])) for item in data))


@dataclass(frozen=True)
class Membership:
    inside: bool
    ball_margin: float
    slice_margin: float


def _same_space(a, b):
    if a != b:
        raise InvalidInput(f"model mismatch: {a} vs {b}")


def pairing(f: Functional, z: Point):
    """Evaluate f at z."""
    _same_space(f.space, z.space)
    total = sum(v * z.value(t) for t, v in f.coords.items())
    if f.space.has_omega:
        total += f.omega_atom * z.tail
    return total if not f.space.is_real else float(total)


def sup_norm(z: Point) -> float:
    values = list(z.coords.values())
    if z.space.has_omega:
        values.append(z.tail)
    return max((abs(v) for v in values), default=0.0)


def l1_norm(f: Functional) -> float:
    total = math.fsum(abs(v) for v in f.coords.values())
    if f.space.has_omega:
        total += abs(f.omega_atom)
    return total


def slice_membership(s: Slice, z: Point) -> Membership:
    """Ball test up to ``BALL_TOL``; the slice inequality is strict, no tolerance."""
    norm = sup_norm(z)
    margin = complex(pairing(s.functional, z)).real - (1.0 - s.epsilon)
    return Membership(norm <= 1.0 + BALL_TOL and margin > 0, 1.0 - norm, margin)


def linear_combination(weights: Sequence, points: Sequence[Point]) -> Point:
    if len(weights) != len(points) or not points:
        raise InvalidInput("need one weight per point")
    space = points[0].space
    for p in points[1:]:
        _same_space(space, p.space)
    keys = sorted(set().union(*(p.coords for p in points)))
    coords = {t: sum(w * p.value(t) for w, p in zip(weights, points)) for t in keys}
    tail = None
    if space.has_omega:
        tail = sum(w * p.tail for w, p in zip(weights, points))
    return Point(space, coords, tail)


def combo_point(combo: ConvexCombo, witnesses: Sequence[Point]) -> Point:
    if len(witnesses) != combo.k:
        raise InvalidInput(f"expected {combo.k} witnesses, got {len(witnesses)}")
    for s, z in zip(combo.slices, witnesses):
        _same_space(s.space, z.space)
    return linear_combination(combo.lambdas, witnesses)


def _unit(v):
    """Conjugate phase of v, i.e. the u with |u| = 1 and v * u = |v|."""
    if v == 0:
        return 0.0
    if isinstance(v, float):
        return math.copysign(1.0, v)
    return complex(v).conjugate() / abs(v)


def norming_point(f: Functional) -> Point:
    """The ball point with <f, z> = ||f||_1, zero off the support of f."""
    coords = {t: _unit(v) for t, v in f.coords.items()}
    tail = _unit(f.omega_atom) if f.space.has_omega else None
    return Point(f.space, coords, tail)


def basis_point(space: SpaceModel, j: int) -> Point:
    return Point(space, {j: 1.0})


def dual_basis(space: SpaceModel, j) -> Functional:
    if j == OMEGA:
        return Functional(space, {}, 1.0)
    return Functional(space, {j: 1.0})


def _random_scalar(rng, space, radius=1.0):
    if space.is_real:
        return float(rng.uniform(-radius, radius))
    r = radius * math.sqrt(rng.uniform())
    return complex(r * np.exp(1j * rng.uniform(-math.pi, math.pi)))


def random_ball_point(space: SpaceModel, indices: Iterable[int], rng) -> Point:
    coords = {t: _random_scalar(rng, space) for t in indices}
    tail = _random_scalar(rng, space) if space.has_omega else None
    return Point(space, coords, tail)


def _pool(f: Functional, extra=3):
    if f.space.kind == "finite-discrete":
        return range(f.space.n)
    return range(f.last_index + 1 + extra)


def random_slice_point(s: Slice, seed) -> Point:
    """Draw a point of the slice ``s`` with slice margin at least epsilon/10.

    The norming point of the functional is blended with a uniform ball
    point; the blend factor is capped so the margin bound holds exactly.
    """
    rng = np.random.default_rng(seed)
    f = s.functional
    u = norming_point(f)
    r = random_ball_point(f.space, _pool(f), rng)
    a = complex(pairing(f, u)).real
    b = complex(pairing(f, r)).real
    room = a - (1.0 - s.epsilon) - s.epsilon / 10.0
    t_max = 1.0 if a <= b else min(1.0, room / (a - b))
    t = float(rng.uniform()) * max(t_max, 0.0)
    return linear_combination([1.0 - t, t], [u, r])
