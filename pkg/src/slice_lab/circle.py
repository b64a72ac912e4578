"""Chords of the unit circle.

For unit vectors e^{ia}, e^{ib} at distance d and 0 < mu < 1/2 the point
c = mu e^{ia} + (1 - mu) e^{ib} satisfies |c|^2 = 1 - d^2 mu (1 - mu),
and therefore |c| <= 1 - d^2 mu / 4. The shift construction used on
circle coordinates of the decomposition relies on this bound.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

BOUND_TOL = 1e-12


@dataclass(frozen=True)
class ChordInstance:
    alpha: float
    beta: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.mu < 0.5:
            raise InvalidInput(f"mu must lie in (0, 1/2), got {self.mu!r}")

    @property
    def distance(self):
        return chord_distance(self.alpha, self.beta)


@dataclass(frozen=True)
class ChordCheck:
    modulus: float
    identity_residual: float
    bound: float
    bound_satisfied: bool
    cosine_residual: float


def chord_distance(alpha, beta):
    return abs(cmath.exp(1j * alpha) - cmath.exp(1j * beta))


def chord_point(inst: ChordInstance) -> complex:
    return inst.mu * cmath.exp(1j * inst.alpha) + (1 - inst.mu) * cmath.exp(1j * inst.beta)


def chord_bound(d, mu):
    if not 0.0 <= d <= 2.0:
        raise InvalidInput(f"chord length must lie in [0, 2], got {d!r}")
    if not 0.0 < mu < 0.5:
        raise InvalidInput(f"mu must lie in (0, 1/2), got {mu!r}")
    return 1.0 - d * d * mu / 4.0


def chord_identity_check(inst: ChordInstance) -> ChordCheck:
    """Check the modulus identity and the bound for one chord.

    ``cosine_residual`` compares d^2 with 2 - 2 cos(alpha - beta), the
    second route to the chord length.
    """
    c = chord_point(inst)
    d = inst.distance
    mu = inst.mu
    modulus = abs(c)
    residual = abs(modulus**2 - (1.0 - d * d * mu * (1.0 - mu)))
    bound = chord_bound(min(d, 2.0), mu)
    cos_res = abs(d * d - (2.0 - 2.0 * math.cos(inst.alpha - inst.beta)))
    return ChordCheck(modulus, residual, bound, modulus <= bound + BOUND_TOL, cos_res)


def chord_identity_batch(alpha, beta, mu):
    """Vectorized :func:`chord_identity_check`.

    Returns ``(modulus, identity_residual, bound, cosine_residual)`` arrays.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any((mu <= 0) | (mu >= 0.5)):
        raise InvalidInput("mu must lie in (0, 1/2)")
    ea = np.exp(1j * alpha)
    eb = np.exp(1j * beta)
    c = mu * ea + (1 - mu) * eb
    d2 = np.abs(ea - eb) ** 2
    modulus = np.abs(c)
    residual = np.abs(modulus**2 - (1.0 - d2 * mu * (1.0 - mu)))
    bound = 1.0 - d2 * mu / 4.0
    cos_res = np.abs(d2 - (2.0 - 2.0 * np.cos(alpha - beta)))
    return modulus, residual, bound, cos_res


def proof_chain(d, mu):
    """The three terms sqrt(1 - d^2 mu(1-mu)) <= 1 - d^2 mu(1-mu)/2 <= 1 - d^2 mu/4."""
    d = np.asarray(d, dtype=float)
    mu = np.asarray(mu, dtype=float)
    s = d * d * mu * (1 - mu)
    return np.sqrt(1.0 - s), 1.0 - s / 2.0, 1.0 - d * d * mu / 4.0
