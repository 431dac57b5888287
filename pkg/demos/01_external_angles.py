"""External angles of cones and of polytope faces.

Run: python3 demos/01_external_angles.py
"""
import numpy as np

from angcurv.cones import PolyCone, angle_additivity_check, external_angle_estimate, triangulate
from angcurv.curvmeas import face_angle
from angcurv.polytope import cube, random_polytope, tangent_cone

# The positive orthant of R^n: its polar is the negative orthant, so the
# external angle is 2^-n.  Up to three dimensions the value is exact.
for n in range(1, 6):
    a = external_angle_estimate(PolyCone.from_rays(np.eye(n)), samples=400_000, seed=1)
    tag = "exact" if a.exact else f"± {a.sigma:.1e}"
    print(f"orthant R^{n}: γ = {a.value:.6f} ({tag}), 2^-n = {2.0**-n:.6f}")

# A cone over a square.  It is not simplicial, so it splits into two
# simplicial pieces; the angles add up by inclusion-exclusion.
sq = PolyCone.from_rays([[1, 1, 1], [1, -1, 1], [-1, -1, 1], [-1, 1, 1]])
print("\nsquare cone: γ =", round(external_angle_estimate(sq).value, 6), "pieces:", len(triangulate(sq)))
r = angle_additivity_check(sq)
print("inclusion-exclusion residual:", r.residual)

# For a polytope, the vertex angles partition the sphere.
P = random_polytope(np.random.default_rng(0), 3, 9)
angles = [face_angle(P, i).value for i, F in enumerate(P.faces) if F.dim == 0]
print(f"\nrandom polytope with f-vector {P.f_vector()}: vertex angles sum to {sum(angles):.12f}")
edge = P.faces_of_dim(1)[0]
print("tangent cone at one edge has", len(tangent_cone(P, edge).generators), "generators and a line of lineality")

# Every facet of a full-dimensional polytope has angle 1/2, every edge of
# the cube 1/4.
C = cube(3)
print("cube edge angle:", face_angle(C, C.faces.index(C.faces_of_dim(1)[0])).value)
