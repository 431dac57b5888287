"""Curvature measures of polytopes as face sums.

A translation-invariant curvature measure with weight f evaluates on a
polytope P and a box U as the sum over k-faces F of
f(direction of F) · γ(F, P) · vol_k(F ∩ U).

Run: python3 demos/02_curvature_measures.py
"""
import math

import numpy as np

from angcurv.curvmeas import ConstCoeff, Federer, direct_constcoeff, evaluate, intrinsic_volume, steiner_check
from angcurv.exterior import BiGradedForm
from angcurv.polytope import BorelBox, cube, random_polytope, simplex

# Federer weights (f = 1) give the intrinsic volumes.
for name, P in [("unit cube", cube(3)), ("tetrahedron", simplex(3))]:
    print(name, [round(intrinsic_volume(P, k), 6) for k in range(4)])

# They are the coefficients of the tube-volume polynomial.
r = steiner_check(cube(3), 0.5, samples=400_000, seed=2)
print(f"\nvolume of the 0.5-tube around the cube: sampled {r.mc:.4f} ± {r.mc_sigma:.4f}, polynomial {r.target:.4f}")

# Localizing to a box cuts each face down to the part inside it.
U = BorelBox([0, 0, 0], [0.5, 1, 1])
print("\nhalf of the cube's curvature measures:", [round(evaluate(Federer(k), cube(3), U).total, 6) for k in range(4)])

# A constant-coefficient form ω gives a weight as well.  The face sum agrees
# with integrating ω over the normal disc bundle directly.
rng = np.random.default_rng(3)
P = random_polytope(rng, 3, 8)
om = BiGradedForm.random(3, 1, 2, rng)
U = BorelBox([0.1, 0.0, 0.2], [0.8, 0.9, 0.9])
a = evaluate(ConstCoeff(om), P, U)
b = direct_constcoeff(om, P, U, samples=200_000, seed=4)
print(f"\nconstant-coefficient measure: face sum {a.total:.5f}, direct {b.total:.5f} ± {b.sigma:.5f}")

# The volume form dx1∧dx2 in the base slot is Lebesgue measure; dy1∧dy2 in
# the fiber slot adds up the unit normal discs over the vertices, giving π.
vol = direct_constcoeff(BiGradedForm.term(2, (0, 1), ()), cube(2, side=2))
fib = direct_constcoeff(BiGradedForm.term(2, (), (0, 1)), cube(2), samples=200_000, seed=5)
print(f"area of a 2×2 square: {vol.total:.12f};  fiber volume form: {fib.total:.4f} ± {fib.sigma:.4f} (π = {math.pi:.4f})")
