"""Representation-theoretic bookkeeping behind the classification.

Run: python3 demos/05_representations.py
"""
from math import comb

from angcurv.repcomb import littlewood_restrict, so_branch_dim_check, tensor_decompose, weyl_dim_sl, weyl_dim_so

# Λ^2 ⊗ Λ^2 and Λ^3 ⊗ Λ^1 of GL(4) differ by exactly one summand, Γ_(2,2).
a = tensor_decompose((1, 1), (1, 1), 4)
b = tensor_decompose((1, 1, 1), (1,), 4)
print("Λ²⊗Λ² =", a)
print("Λ³⊗Λ¹ =", b)
print("extra summand:", {nu: m for nu, m in a.items() if b.get(nu, 0) != m})

# Its dimension is C(n,k)^2 - C(n,k-1)C(n,k+1).
n, k = 6, 2
print(f"\ndim Γ_(2^{n - k}) for GL({n}) = {weyl_dim_sl((2,) * (n - k), n)} = {comb(n, k) ** 2 - comb(n, k - 1) * comb(n, k + 1)}")

# Restricting Γ_(2,2) from GL(4) to O(4): the constituents are (2,2), (2), ().
res = littlewood_restrict((2, 2), 4)
dims = {mu: weyl_dim_so(mu + (0,) * (2 - len(mu)), 4) for mu in res}
print("\nGL(4) → O(4):", res, "SO(4) dimensions", dims, "(2,2) also appears as (2,-2)")
print("dimension defect:", so_branch_dim_check(2, 4))
