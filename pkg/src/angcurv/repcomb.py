"""Partition combinatorics for GL(n) and SO(n) representations, all in exact arithmetic.

Partitions are plain tuples of positive integers in non-increasing order;
:func:`partition` validates and strips trailing zeros.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Iterable, Iterator, Sequence

Partition = tuple[int, ...]


def partition(parts: Iterable[int]) -> Partition:
    p = tuple(int(x) for x in parts)
    if any(x < 0 for x in p):
        raise ValueError(f"negative part in {p}")
    if any(a < b for a, b in zip(p, p[1:])):
        raise ValueError(f"parts must be non-increasing: {p}")
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def transpose(lam: Sequence[int]) -> Partition:
    lam = partition(lam)
    return tuple(sum(1 for x in lam if x >= i) for i in range(1, (lam[0] if lam else 0) + 1))


def partitions_of(total: int, max_part: int | None = None, max_len: int | None = None) -> Iterator[Partition]:
    """All partitions of ``total`` with bounded largest part and length."""
    max_part = total if max_part is None else max_part
    max_len = total if max_len is None else max_len
    if total == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in partitions_of(total - first, first, max_len - 1):
            yield (first,) + rest


def _contains(big: Partition, small: Partition) -> bool:
    return len(small) <= len(big) and all(b >= s for b, s in zip(big, small))


# -- Littlewood-Richardson ---------------------------------------------------


def _strips(shape: list[int], target: Partition, size: int, start_row: int = 0):
    """Horizontal strips of ``size`` boxes added to ``shape`` inside ``target``.

    Yields per-row box counts.  A strip never puts two boxes in one column:
    row r may grow at most up to the old length of row r-1.
    """
    rows = len(target)
    if size == 0:
        yield [0] * rows
        return
    if start_row >= rows:
        return
    r = start_row
    cur = shape[r] if r < len(shape) else 0
    above = shape[r - 1] if r > 0 else target[0]
    cap = min(target[r], above) - cur
    for c in range(min(cap, size), -1, -1):
        for rest in _strips(shape, target, size - c, r + 1):
            out = list(rest)
            out[r] = c
            yield out


def lr_coefficient(lam: Sequence[int], mu: Sequence[int], nu: Sequence[int]) -> int:
    """Number of strict μ-expansions of λ with shape ν.

    Boxes labelled 1 are added first (μ_1 of them, no two in a column), then
    μ_2 boxes labelled 2, and so on.  An expansion counts when its word,
    read right to left along rows from the top row down, has at every
    prefix at least as many p's as (p+1)'s.
    """
    lam, mu, nu = partition(lam), partition(mu), partition(nu)
    if sum(lam) + sum(mu) != sum(nu) or not _contains(nu, lam) or not _contains(nu, mu):
        return 0
    return _lr(lam, mu, nu)


@lru_cache(maxsize=None)
def _lr(lam: Partition, mu: Partition, nu: Partition) -> int:
    rows = len(nu)
    base = list(lam) + [0] * (rows - len(lam))
    count = 0

    def extend(shape: list[int], label: int, fills: list[list[int]]):
        nonlocal count
        if label == len(mu):
            if _lattice(fills, rows):
                count += 1
            return
        for strip in _strips(shape, nu, mu[label]):
            new = [a + b for a, b in zip(shape, strip)]
            extend(new, label + 1, fills + [strip])

    extend(base, 0, [])
    return count


def _lattice(fills: list[list[int]], rows: int) -> bool:
    tally = [0] * (len(fills) + 1)
    for r in range(rows):
        for label in range(len(fills) - 1, -1, -1):
            c = fills[label][r]
            if c == 0:
                continue
            tally[label] += c
            if label and tally[label] > tally[label - 1]:
                return False
    return True


def sl_normalize(nu: Sequence[int], n: int) -> Partition:
    """Drop full columns of height n (the SL(n) restriction of det^c ⊗ Γ_ν is Γ_ν)."""
    nu = partition(nu)
    if len(nu) < n:
        return nu
    c = nu[n - 1]
    return partition(x - c for x in nu)


def tensor_decompose(lam: Sequence[int], mu: Sequence[int], n: int, sl: bool = False) -> dict[Partition, int]:
    """``Γ_λ ⊗ Γ_μ = ⊕ N_{λμν} Γ_ν`` over ν with at most n parts.

    With ``sl=True`` each ν is reduced by its n-th part (SL(n) labels), which
    can merge summands.
    """
    lam, mu = partition(lam), partition(mu)
    if len(lam) > n or len(mu) > n:
        raise ValueError("partitions must have at most n parts")
    out: Counter = Counter()
    for nu in partitions_of(sum(lam) + sum(mu), max_len=n):
        c = lr_coefficient(lam, mu, nu)
        if c:
            out[sl_normalize(nu, n) if sl else nu] += c
    return dict(out)


# -- Weyl dimensions ---------------------------------------------------------


def weyl_dim_sl(lam: Sequence[int], n: int) -> int:
    lam = sl_normalize(lam, n)
    if len(lam) > n:
        raise ValueError(f"partition {lam} has more than {n} parts")
    l = list(lam) + [0] * (n - len(lam))
    val = prod(
        (Fraction(l[i] - l[j] + j - i, j - i) for i in range(n) for j in range(i + 1, n)),
        start=Fraction(1),
    )
    if val.denominator != 1:
        raise ArithmeticError(f"non-integer dimension {val}")
    return int(val)


@dataclass(frozen=True)
class SOWeight:
    """Highest weight of SO(n): ⌊n/2⌋ integers; for even n the last one may be negative."""

    m: tuple[int, ...]
    n: int

    def __post_init__(self):
        r = self.n // 2
        m = tuple(int(x) for x in self.m) + (0,) * (r - len(self.m))
        if len(m) != r:
            raise ValueError(f"SO({self.n}) weight has {r} entries, got {len(self.m)}")
        object.__setattr__(self, "m", m)
        if r == 0:
            return
        if any(a < b for a, b in zip(m[:-2], m[1:-1])):
            raise ValueError(f"weight must be non-increasing: {m}")
        if self.n % 2:
            if (r >= 2 and m[-2] < m[-1]) or m[-1] < 0:
                raise ValueError(f"odd n needs λ_1 >= … >= λ_m >= 0: {m}")
        elif r >= 2 and m[-2] < abs(m[-1]):
            raise ValueError(f"even n needs λ_(m-1) >= |λ_m|: {m}")


def weyl_dim_so(mu: SOWeight | Sequence[int], n: int | None = None) -> int:
    """Weyl dimension formula for so(n), types B (n odd) and D (n even)."""
    w = mu if isinstance(mu, SOWeight) else SOWeight(tuple(mu), int(n))
    r, n = len(w.m), w.n
    if r == 0:
        return 1
    if n % 2:
        rho = [Fraction(2 * (r - i) - 1, 2) for i in range(r)]
    else:
        rho = [Fraction(r - 1 - i) for i in range(r)]
    l = [x + p for x, p in zip(w.m, rho)]
    val = Fraction(1)
    for i in range(r):
        for j in range(i + 1, r):
            val *= (l[i] - l[j]) * (l[i] + l[j]) / ((rho[i] - rho[j]) * (rho[i] + rho[j]))
        if n % 2:
            val *= l[i] / rho[i]
    if val.denominator != 1:
        raise ArithmeticError(f"non-integer dimension {val}")
    return int(val)


# -- restriction to O(n) -------------------------------------------------------


def littlewood_restrict(lam: Sequence[int], n: int) -> dict[Partition, int]:
    """Stable-range restriction GL(n) → O(n): ``N_{λμ} = Σ_{δ even} N_{δμλ}``."""
    lam = partition(lam)
    if len(lam) > n // 2:
        raise ValueError(f"{lam} is outside the stable range (at most {n // 2} parts) for n = {n}")
    out: dict[Partition, int] = {}
    total = sum(lam)
    for size in range(total, -1, -1):
        if (total - size) % 2:
            continue
        for mu in partitions_of(size, max_len=len(lam)):
            if not _contains(lam, mu):
                continue
            mt = transpose(mu)
            if sum(mt[:2]) > n:
                continue
            mult = 0
            for half in partitions_of((total - size) // 2, max_len=len(lam)):
                delta = tuple(2 * x for x in half)
                mult += lr_coefficient(delta, mu, lam)
            if mult:
                out[mu] = mult
    return out


def so_branch_dim_check(k: int, n: int) -> int:
    """``dim Γ_(2^k) − Σ dim`` of its SO(n) constituents; zero when the restriction rule holds.

    For even n a constituent whose last entry (index n/2) is positive
    contributes both signed weights.
    """
    if not 0 <= 2 * k <= n:
        raise ValueError("need k <= n/2")
    lam = (2,) * k
    r = n // 2
    total = 0
    for mu, mult in littlewood_restrict(lam, n).items():
        w = list(mu) + [0] * (r - len(mu))
        d = weyl_dim_so(tuple(w), n)
        if n % 2 == 0 and r and w[-1] > 0:
            d += weyl_dim_so(tuple(w[:-1] + [-w[-1]]), n)
        total += mult * d
    return weyl_dim_sl(lam, n) - total


def lemma22_dim_check(n: int, k: int) -> int:
    """``C(n,k)^2 − C(n,k−1) C(n,k+1) − dim Γ_(2^{n−k})``; zero when the two tensor products differ by one module."""
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    return comb(n, k) ** 2 - comb(n, k - 1) * comb(n, k + 1) - weyl_dim_sl((2,) * (n - k), n)
