"""Points of a convex combination of slices lying on the unit sphere.

Two constructions:

* :func:`fresh_coordinate_witness` (c0): every slice contains the norming
  point x_i of its functional; adding the unit vector of an index y = e_m
  outside all supports keeps each x_i + y in its slice, and the
  combination sum lambda_i (x_i + y) has norm exactly 1.
* :func:`l1_disjoint_witness` (L1 of a finite measure space): each slice
  functional g_i picks its own cell where |g_i| is close to one; the
  normalized indicators of disjoint cells combine to a unit vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, InvalidInput
from .model import (
    ConvexCombo,
    Point,
    basis_point,
    combo_point,
    norming_point,
    sup_norm,
)


@dataclass(frozen=True)
class FreshWitness:
    point: Point
    fresh_index: int
    norming_points: list
    direction: Point

    __hash__ = None

    @property
    def shifted(self):
        return [x + self.direction for x in self.norming_points]

    def to_json(self):
        return {
            "point": self.point.to_json(),
            "fresh_index": self.fresh_index,
            "norm": sup_norm(self.point),
            "norming_points": [x.to_json() for x in self.norming_points],
        }


def fresh_coordinate_witness(combo: ConvexCombo) -> FreshWitness:
    space = combo.space
    if space.kind != "c0":
        raise InvalidInput("the fresh-coordinate construction needs the c0 model")
    m = 1 + max(s.functional.last_index for s in combo.slices)
    xs = [norming_point(s.functional) for s in combo.slices]
    y = basis_point(space, m)
    point = combo_point(combo, [x + y for x in xs])
    return FreshWitness(point, m, xs, y)


@dataclass(frozen=True)
class WeightedMeasureSpace:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w <= 0):
            raise InvalidInput("cell weights must be a non-empty positive vector")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise InvalidInput(f"cell weights must sum to 1, got {math.fsum(w)!r}")
        object.__setattr__(self, "weights", w)

    __hash__ = None

    @property
    def cells(self):
        return self.weights.size

    def l1_norm(self, h):
        return math.fsum(self.weights * np.abs(h))

    def pairing(self, g, h):
        return math.fsum(self.weights * np.asarray(g) * np.asarray(h))


@dataclass(frozen=True)
class L1Witness:
    densities: np.ndarray
    cells: tuple
    combined: np.ndarray
    norms: tuple
    combined_norm: float
    margins: tuple

    __hash__ = None

    def to_json(self):
        return {
            "densities": self.densities.tolist(),
            "cells": list(self.cells),
            "combined": self.combined.tolist(),
            "norms": list(self.norms),
            "combined_norm": self.combined_norm,
            "margins": list(self.margins),
        }


def l1_disjoint_witness(space: WeightedMeasureSpace, g, eps, lam) -> L1Witness:
    """Disjoint single-cell densities f_i with <g_i, f_i> > 1 - eps_i.

    Densities with the fewest qualifying cells choose first; each takes
    its free cell of largest |g_i|, lowest index on ties.
    """
    g = np.atleast_2d(np.asarray(g, dtype=float))
    eps = np.asarray(eps, dtype=float)
    lam = np.asarray(lam, dtype=float)
    k, n = g.shape
    if n != space.cells or eps.shape != (k,) or lam.shape != (k,):
        raise InvalidInput("shapes of g, eps, lambda and the measure space disagree")
    if np.any(np.abs(g) > 1.0 + 1e-12):
        raise InvalidInput("slice densities must have sup-norm at most 1")
    if np.any(eps <= 0) or np.any(lam <= 0) or abs(math.fsum(lam) - 1.0) > 1e-12:
        raise InvalidInput("need positive eps and positive weights summing to 1")

    qualifying = [np.flatnonzero(np.abs(g[i]) > 1.0 - eps[i]) for i in range(k)]
    order = sorted(range(k), key=lambda i: (qualifying[i].size, i))
    taken = set()
    cells = [None] * k
    for i in order:
        free = [c for c in qualifying[i] if c not in taken]
        if not free:
            deficient = [j for j in range(k) if qualifying[j].size < k] or [i]
            raise FeasibilityError(
                f"cannot pick disjoint near-max cells; deficient densities {deficient}",
                deficient,
            )
        c = min(free, key=lambda c: (-abs(g[i, c]), c))
        cells[i] = int(c)
        taken.add(c)

    f = np.zeros((k, n))
    for i, c in enumerate(cells):
        f[i, c] = math.copysign(1.0, g[i, c]) / space.weights[c]
    combined = lam @ f
    norms = tuple(space.l1_norm(row) for row in f)
    margins = tuple(space.pairing(g[i], f[i]) - (1.0 - eps[i]) for i in range(k))
    return L1Witness(f, tuple(cells), combined, norms, space.l1_norm(combined), margins)
