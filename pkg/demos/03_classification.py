"""Which functions on the Grassmannian are restrictions of quadratic Plücker polynomials?

Run: python3 demos/03_classification.py
"""
from angcurv.grassrank import constcoeff_weight_rank, dim_formula, obstruction_family_check, restriction_rank

print(" n  k  formula  rank  gap       constcoeff rank  span residual")
for n, k in [(3, 1), (4, 1), (4, 2), (5, 2), (5, 3), (6, 2)]:
    r = restriction_rank(n, k, seed=1)
    c = constcoeff_weight_rank(n, k, seed=1)
    print(f"{n:2d} {k:2d}  {dim_formula(n, k):7d}  {r.rank:4d}  {r.gap:8.1e}  {c.rank:15d}  {c.max_residual:.1e}")

# Highest weight vectors of weight (m1, 0, ...) restrict to cos^(2 m1) φ on a
# one-parameter family of planes.  Only m1 <= 1 is reachable by quadratics.
print("\nm1  max |value - cos^2m1|  quadratic fit residual   (n, k) = (5, 2)")
for m1 in range(4):
    o = obstruction_family_check(5, 2, m1)
    print(f"{m1:2d}  {o.max_error:21.1e}  {o.fit_residual:.3g}")
