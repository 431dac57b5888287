"""Random flats: the Crofton formula and the V_k action.

Run: python3 demos/04_crofton.py
"""
import math

import numpy as np

from angcurv.crofton import crofton_estimate, vk_action
from angcurv.curvmeas import Federer, intrinsic_volume
from angcurv.polytope import cube, random_polytope, regular_polygon

# V_k is the (suitably normalized) measure of (n-k)-flats that meet the body.
# The normalization is calibrated once on the unit cube.
P = random_polytope(np.random.default_rng(5), 3, 9)
for k in (1, 2, 3):
    r = crofton_estimate(P, k, samples=200_000, seed=6)
    print(f"V_{k}: flats {r.value:.4f} ± {r.sigma:.4f}   face sum {intrinsic_volume(P, k):.4f}")

# Averaging a curvature measure over the slices by lines: with the first
# intrinsic volume this gives (π/2)·area in the plane.
for name, Q in [("unit square", cube(2)), ("64-gon", regular_polygon(64))]:
    r = vk_action(Federer(1), Q, k=1, samples=400_000, seed=7)
    print(f"(V_1·V_1)({name}) = {r.value:.4f} ± {r.sigma:.4f};  (π/2)·area = {math.pi / 2 * Q.volume:.4f}")
