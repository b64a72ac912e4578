"""Points on a chord of the unit circle sit strictly inside the disk.

Mixing two unimodular numbers with weight mu < 1/2 lands at distance
sqrt(1 - d^2 mu (1 - mu)) from the origin, where d is the chord length.
"""
import math

import numpy as np

from slice_lab.circle import ChordInstance, chord_identity_batch, chord_identity_check

# antipodal endpoints, a quarter of the way along the chord
res = chord_identity_check(ChordInstance(0.0, math.pi, 0.25))
print("antipodal:", res.modulus, "bound", res.bound)

# quarter turn
res = chord_identity_check(ChordInstance(0.0, math.pi / 2, 0.25))
print("quarter turn:", round(res.modulus, 6), "bound", res.bound)

# a batch of random chords
rng = np.random.default_rng(0)
n = 100_000
alpha, beta = rng.uniform(-math.pi, math.pi, (2, n))
mu = rng.uniform(1e-6, 0.5, n)
modulus, residual, bound, _ = chord_identity_batch(alpha, beta, mu)
print("largest identity residual:", residual.max())
print("largest gap to the bound:", (modulus - bound).max())

# the bound is tight only for coincident endpoints
d = np.abs(np.exp(1j * alpha) - np.exp(1j * beta))
print("corr(d, bound - modulus):", np.corrcoef(d, bound - modulus)[0, 1].round(3))
