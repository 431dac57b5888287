from collections import Counter
from functools import lru_cache
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from angcurv.repcomb import (
    SOWeight,
    lemma22_dim_check,
    littlewood_restrict,
    lr_coefficient,
    partition,
    partitions_of,
    so_branch_dim_check,
    tensor_decompose,
    transpose,
    weyl_dim_sl,
    weyl_dim_so,
)


# -- oracle: Schur polynomials from semistandard tableaux ----------------------


@lru_cache(maxsize=None)
def schur_monomials(lam, nvars):
    """{exponent vector: count of SSYT of shape lam with that content} in nvars variables."""
    cells = [(r, c) for r, row in enumerate(lam) for c in range(row)]
    out = Counter()

    def fill(i, tab):
        if i == len(cells):
            content = [0] * nvars
            for v in tab.values():
                content[v] += 1
            out[tuple(content)] += 1
            return
        r, c = cells[i]
        lo = 0
        if c > 0:
            lo = max(lo, tab[(r, c - 1)])
        if r > 0:
            lo = max(lo, tab[(r - 1, c)] + 1)
        for v in range(lo, nvars):
            tab[(r, c)] = v
            fill(i + 1, tab)
        tab.pop((r, c), None)

    fill(0, {})
    return dict(out)


def schur_product_decomposition(lam, mu, nvars):
    prod = Counter()
    for a, x in schur_monomials(lam, nvars).items():
        for b, y in schur_monomials(mu, nvars).items():
            prod[tuple(i + j for i, j in zip(a, b))] += x * y
    result = {}
    while True:
        dominant = [e for e, c in prod.items() if c and all(e[i] >= e[i + 1] for i in range(nvars - 1))]
        if not dominant:
            break
        top = max(dominant)
        c = prod[top]
        nu = partition(top)
        result[nu] = c
        for e, k in schur_monomials(nu, nvars).items():
            prod[e] -= c * k
    assert all(v == 0 for v in prod.values())
    return result


def small_partitions(max_size):
    return [p for s in range(max_size + 1) for p in partitions_of(s)]


# -- tests -----------------------------------------------------------------------


def test_transpose_examples():
    assert transpose((3, 3, 2, 1, 1)) == (5, 3, 2)
    assert transpose((2, 2)) == (2, 2)
    assert transpose(()) == ()
    for p in small_partitions(7):
        assert transpose(transpose(p)) == p


def test_partition_validation():
    assert partition((3, 1, 0, 0)) == (3, 1)
    with pytest.raises(ValueError):
        partition((1, 2))


def test_lr_examples():
    assert lr_coefficient((1,), (1,), (2,)) == 1
    assert lr_coefficient((1,), (1,), (1, 1)) == 1
    assert lr_coefficient((2, 1), (2, 1), (3, 2, 1)) == 2
    assert lr_coefficient((1, 1), (1, 1), (2, 2)) == 1
    assert lr_coefficient((1,), (1,), (3,)) == 0


def test_lr_against_schur_oracle():
    parts = small_partitions(3)
    for lam, mu in product(parts, parts):
        size = sum(lam) + sum(mu)
        nvars = max(size, 1)
        expected = schur_product_decomposition(lam, mu, nvars)
        for nu in partitions_of(size):
            assert lr_coefficient(lam, mu, nu) == expected.get(nu, 0), (lam, mu, nu)


def test_lr_symmetry_exhaustive():
    parts = small_partitions(4)
    for lam, mu in product(parts, parts):
        if sum(lam) + sum(mu) > 8:
            continue
        for nu in partitions_of(sum(lam) + sum(mu)):
            assert lr_coefficient(lam, mu, nu) == lr_coefficient(mu, lam, nu)


def is_horizontal_strip(nu, lam):
    if len(nu) < len(lam) or any(a < b for a, b in zip(nu, lam)):
        return False
    lam = list(lam) + [0] * (len(nu) - len(lam))
    return all(nu[i + 1] <= lam[i] for i in range(len(nu) - 1))


def test_pieri_rule():
    for lam in small_partitions(5):
        for r in range(1, 4):
            for nu in partitions_of(sum(lam) + r):
                c = lr_coefficient(lam, (r,), nu)
                assert c == (1 if is_horizontal_strip(nu, lam) else 0)


def test_tensor_examples():
    assert tensor_decompose((1,), (1,), 2) == {(2,): 1, (1, 1): 1}
    for n in (4, 5, 6):
        a = Counter(tensor_decompose((1, 1), (1, 1), n))
        b = Counter(tensor_decompose((1, 1, 1), (1,), n))
        assert a - b == Counter({(2, 2): 1}) and not (b - a)


def test_tensor_lemma_difference_general():
    for n in range(4, 8):
        for i in range(1, n):
            a = Counter(tensor_decompose((1,) * i, (1,) * i, n))
            b = Counter(tensor_decompose((1,) * (i + 1), (1,) * (i - 1), n)) if i + 1 <= n else Counter()
            assert a - b == Counter({(2,) * i: 1}) and not (b - a)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(small_partitions(4)),
    st.sampled_from(small_partitions(3)),
    st.integers(2, 6),
)
def test_tensor_dimension_consistency(lam, mu, n):
    if len(lam) > n or len(mu) > n:
        return
    dec = tensor_decompose(lam, mu, n)
    assert sum(c * weyl_dim_sl(nu, n) for nu, c in dec.items()) == weyl_dim_sl(lam, n) * weyl_dim_sl(mu, n)
    sl = tensor_decompose(lam, mu, n, sl=True)
    assert sum(c * weyl_dim_sl(nu, n) for nu, c in sl.items()) == weyl_dim_sl(lam, n) * weyl_dim_sl(mu, n)


def test_weyl_dim_examples():
    assert weyl_dim_sl((2, 2), 3) == 6
    assert weyl_dim_sl((1,), 3) == 3
    assert weyl_dim_sl((), 7) == 1
    assert weyl_dim_so((0, 0), 4) == 1
    assert weyl_dim_so((2, 0), 4) == 9
    assert weyl_dim_so((2, 2), 4) == 5
    assert weyl_dim_so((2, -2), 4) == 5
    assert weyl_dim_so((1, 0), 5) == 5
    # adjoint representations: dim so(n) = n(n-1)/2
    for n in range(5, 12):
        assert weyl_dim_so((1, 1), n) == n * (n - 1) // 2
    # SO(3): spin-l has dimension 2l+1
    for l in range(5):
        assert weyl_dim_so((l,), 3) == 2 * l + 1


def test_so_weight_validation():
    with pytest.raises(ValueError):
        SOWeight((1, -1), 5)
    with pytest.raises(ValueError):
        SOWeight((1, 2), 4)
    SOWeight((1, -1), 4)


def test_littlewood_examples():
    assert littlewood_restrict((1,), 3) == {(1,): 1}
    assert littlewood_restrict((2,), 3) == {(2,): 1, (): 1}
    for n in range(2, 11):
        for k in range(n // 2 + 1):
            assert littlewood_restrict((2,) * k, n) == {(2,) * i: 1 for i in range(k + 1)}
    with pytest.raises(ValueError):
        littlewood_restrict((1, 1), 3)


def test_littlewood_dimension_count_odd_n():
    # for odd n, restriction to O(n) ⊃ SO(n) keeps irreducibles; dimensions must add up
    for n in (5, 7):
        for lam in small_partitions(4):
            if len(lam) > n // 2:
                continue
            res = littlewood_restrict(lam, n)
            assert sum(m * weyl_dim_so(mu + (0,) * (n // 2 - len(mu)), n) for mu, m in res.items()) == weyl_dim_sl(lam, n)


def test_lemma_checks():
    assert so_branch_dim_check(2, 4) == 0
    assert so_branch_dim_check(2, 5) == 0
    assert so_branch_dim_check(3, 6) == 0
    for n in range(2, 11):
        for k in range(1, n):
            assert lemma22_dim_check(n, k) == 0
    for n in range(3, 9):
        for k in range(n // 2 + 1):
            assert so_branch_dim_check(k, n) == 0
