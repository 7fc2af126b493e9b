"""
Splitting a curvature tensor into Weyl, Ricci and scalar parts
==============================================================

Build curvature tensors from Kulkarni-Nomizu products, decompose them and
read off the scale-invariant pinching ratio.
"""

import numpy as np

from curvlab.tensor_core import (
    G,
    decompose,
    homothety_scale,
    invariants,
    kulkarni_nomizu,
    pinching_classify,
    random_curvature,
)

# The unit round sphere has Riem = 1/2 g o g: constant curvature, no Weyl part.
sphere = decompose(0.5 * kulkarni_nomizu(G, G))
print("round sphere: R =", sphere.scalar, " |W| =", np.linalg.norm(sphere.weyl))

# S^3 x S^1 is conformally flat but not Einstein.
e = np.diag([0.5, 0.5, 0.5, -1.5])
product = decompose(0.5 * kulkarni_nomizu(e, G) + 6.0 / 24.0 * kulkarni_nomizu(G, G))
rep = invariants(product)
print("S3xS1: sigma2 =", rep.sigma2, " WP =", rep.wp, "->", pinching_classify(rep).tag.value)

# A random algebraic curvature tensor reassembles exactly from its parts.
r = random_curvature(np.random.default_rng(0))
d = decompose(r)
print("round-trip error:", np.abs(d.riemann - r).max())

# WP is unchanged by homotheties, while R scales like t^-2.
for t in (0.5, 1.0, 4.0):
    scaled = invariants(homothety_scale(d, t))
    print(f"t = {t:3}: R = {scaled.scalar:10.4f}  WP = {scaled.wp:.12f}")
