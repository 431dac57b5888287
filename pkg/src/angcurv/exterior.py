"""Dense exterior algebra over R^n.

Multivectors and forms of grade ``k`` store one coefficient per sorted
``k``-subset of ``{0, ..., n-1}`` in lexicographic order (the order produced
by :func:`itertools.combinations`).  The same container is used for
covectors; the basis ``dx_I`` is orthonormal for the inner product that
makes wedges of orthonormal covectors orthonormal.

A :class:`BiGradedForm` is an element of ``Λ^a (R^n)* ⊗ Λ^b (R^n)*``, read as
the constant form ``Σ c[I, J] dx_I ∧ dy_J`` on ``R^n ⊕ R^n``.  The first
(``dx``) slot is the base slot, the second (``dy``) slot the fiber slot.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

ORTHO_TOL = 1e-12
GRAM_TOL = 1e-12


@lru_cache(maxsize=None)
def subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def subset_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(subsets(n, k))}


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Sign of the permutation sorting the concatenation ``a + b`` (0 if they meet)."""
    if set(a) & set(b):
        return 0
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int, q: int):
    """Index arrays (i, j, target, sign) for the nonzero products of basis blades."""
    idx = subset_index(n, p + q)
    rows = []
    for i, a in enumerate(subsets(n, p)):
        for j, b in enumerate(subsets(n, q)):
            s = _merge_sign(a, b)
            if s:
                rows.append((i, j, idx[tuple(sorted(a + b))], s))
    if not rows:
        z = np.zeros(0, dtype=int)
        return z, z, z, z
    arr = np.array(rows, dtype=int)
    return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MultiVector:
    """Homogeneous element of Λ^k R^n (or of Λ^k (R^n)*)."""

    n: int
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"grade {self.k} outside 0..{self.n}")
        c = _frozen(np.ravel(self.coeffs))
        if c.shape != (comb(self.n, self.k),):
            raise ValueError(
                f"expected {comb(self.n, self.k)} coefficients for grade {self.k} in R^{self.n}, got {c.size}"
            )
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, n: int, k: int) -> "MultiVector":
        return cls(n, k, np.zeros(comb(n, k)))

    @classmethod
    def scalar(cls, n: int, value: float = 1.0) -> "MultiVector":
        return cls(n, 0, np.array([value]))

    @classmethod
    def blade(cls, n: int, idx: Iterable[int], coef: float = 1.0) -> "MultiVector":
        """``coef * e_{i1} ∧ ... ∧ e_{ik}`` for 0-based indices in any order."""
        idx = tuple(idx)
        s = tuple(sorted(idx))
        if len(set(s)) != len(s):
            return cls.zero(n, len(s))
        sign = 1
        # parity of the sorting permutation
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                if idx[i] > idx[j]:
                    sign = -sign
        c = np.zeros(comb(n, len(s)))
        c[subset_index(n, len(s))[s]] = sign * coef
        return cls(n, len(s), c)

    @classmethod
    def vector(cls, v: Sequence[float]) -> "MultiVector":
        v = np.asarray(v, dtype=float)
        return cls(v.size, 1, v)

    def terms(self):
        for s, c in zip(subsets(self.n, self.k), self.coeffs):
            if c != 0.0:
                yield s, float(c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def dot(self, other: "MultiVector") -> float:
        _check_same(self, other)
        return float(self.coeffs @ other.coeffs)

    def __add__(self, other: "MultiVector") -> "MultiVector":
        _check_same(self, other)
        return MultiVector(self.n, self.k, self.coeffs + other.coeffs)

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        _check_same(self, other)
        return MultiVector(self.n, self.k, self.coeffs - other.coeffs)

    def __neg__(self) -> "MultiVector":
        return MultiVector(self.n, self.k, -self.coeffs)

    def __mul__(self, s: float) -> "MultiVector":
        return MultiVector(self.n, self.k, self.coeffs * float(s))

    __rmul__ = __mul__

    def __xor__(self, other: "MultiVector") -> "MultiVector":
        return wedge(self, other)

    def allclose(self, other: "MultiVector", atol: float = 1e-12) -> bool:
        return self.n == other.n and self.k == other.k and np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:g}*e{''.join(str(i + 1) for i in s) or '∅'}" for s, c in self.terms())
        return f"MultiVector(n={self.n}, k={self.k}: {body or '0'})"


def _check_same(u: MultiVector, v: MultiVector) -> None:
    if u.n != v.n or u.k != v.k:
        raise ValueError(f"shape mismatch: (n={u.n}, k={u.k}) vs (n={v.n}, k={v.k})")


def wedge(u: MultiVector, v: MultiVector) -> MultiVector:
    """Exterior product ``u ∧ v``."""
    if u.n != v.n:
        raise ValueError(f"dimension mismatch: {u.n} vs {v.n}")
    if u.k + v.k > u.n:
        raise ValueError(f"grade overflow: {u.k} + {v.k} > {u.n}")
    i, j, t, s = _wedge_table(u.n, u.k, v.k)
    out = np.zeros(comb(u.n, u.k + v.k))
    np.add.at(out, t, s * u.coeffs[i] * v.coeffs[j])
    return MultiVector(u.n, u.k + v.k, out)


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered list of ``k`` vectors in R^n, stored as the columns of an n×k matrix."""

    matrix: np.ndarray
    orthonormal: bool = False

    def __post_init__(self):
        m = _frozen(np.asarray(self.matrix, dtype=float).reshape(np.shape(self.matrix)[0], -1))
        object.__setattr__(self, "matrix", m)
        if self.orthonormal:
            g = m.T @ m
            if not np.allclose(g, np.eye(m.shape[1]), atol=ORTHO_TOL, rtol=0):
                raise ValueError("frame flagged orthonormal but Gram matrix is not the identity")

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]], n: int | None = None, orthonormal: bool = False):
        if len(vectors) == 0:
            if n is None:
                raise ValueError("empty frame needs an explicit ambient dimension")
            return cls(np.zeros((n, 0)), orthonormal)
        return cls(np.column_stack([np.asarray(v, dtype=float) for v in vectors]), orthonormal)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, j] for j in range(self.k)]


def as_matrix(frame) -> np.ndarray:
    if isinstance(frame, Frame):
        return frame.matrix
    return np.asarray(frame, dtype=float)


@lru_cache(maxsize=None)
def _row_index(n: int, k: int) -> np.ndarray:
    return np.array(subsets(n, k), dtype=int).reshape(comb(n, k), k)


def plucker_coords(frames: np.ndarray) -> np.ndarray:
    """Batched Plücker coordinates: ``(..., n, k)`` frames to ``(..., C(n, k))`` minors."""
    frames = np.asarray(frames, dtype=float)
    n, k = frames.shape[-2:]
    if k == 0:
        return np.ones(frames.shape[:-2] + (1,))
    rows = _row_index(n, k)
    minors = frames[..., rows, :]  # (..., C, k, k)
    return np.linalg.det(minors)


def plucker(frame) -> MultiVector:
    """``e_1 ∧ ... ∧ e_k`` for the frame's vectors."""
    m = as_matrix(frame)
    n, k = m.shape
    if k > 0:
        gram = np.linalg.det(m.T @ m)
        if gram < GRAM_TOL:
            raise ValueError(f"rank-deficient frame (Gram determinant {gram:.3e})")
    return MultiVector(n, k, plucker_coords(m))


def oriented_complement(frame) -> Frame:
    """Orthonormal frame of E^⊥ making ``[frame | complement]`` positively oriented."""
    m = as_matrix(frame)
    n, k = m.shape
    c = complement_batch(m[None])[0]
    return Frame(c, orthonormal=True) if n - k else Frame(np.zeros((n, 0)))


def complement_batch(frames: np.ndarray) -> np.ndarray:
    """Vectorized :func:`oriented_complement` for ``(N, n, k)`` orthonormal frames."""
    frames = np.asarray(frames, dtype=float)
    N, n, k = frames.shape
    if k == n:
        return np.zeros((N, n, 0))
    if k == 0:
        return np.broadcast_to(np.eye(n), (N, n, n)).copy()
    q, _ = np.linalg.qr(frames, mode="complete")
    comp = q[:, :, k:].copy()
    det = np.linalg.det(np.concatenate([frames, comp], axis=2))
    comp[det < 0, :, -1] *= -1.0
    return comp


@dataclass(frozen=True, eq=False)
class BiGradedForm:
    """Constant form ``Σ coeffs[I, J] dx_I ∧ dy_J`` of bidegree (base, fiber) on R^n ⊕ R^n."""

    n: int
    base: int
    fiber: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = (comb(self.n, self.base), comb(self.n, self.fiber))
        if not (0 <= self.base <= self.n and 0 <= self.fiber <= self.n):
            raise ValueError("grades out of range")
        c = np.asarray(self.coeffs, dtype=float)
        if c.size != shape[0] * shape[1]:
            raise ValueError(f"expected {shape[0]}x{shape[1]} coefficients, got {c.size}")
        object.__setattr__(self, "coeffs", _frozen(c.reshape(shape)))

    @classmethod
    def zero(cls, n: int, base: int, fiber: int) -> "BiGradedForm":
        return cls(n, base, fiber, np.zeros((comb(n, base), comb(n, fiber))))

    @classmethod
    def term(cls, n: int, base_idx: Sequence[int], fiber_idx: Sequence[int], coef: float = 1.0):
        """``coef * dx_I ⊗ dy_J`` from 0-based index lists (any order; sign applied)."""
        a = MultiVector.blade(n, base_idx)
        b = MultiVector.blade(n, fiber_idx)
        return cls(n, a.k, b.k, coef * np.outer(a.coeffs, b.coeffs))

    @classmethod
    def random(cls, n: int, base: int, fiber: int, rng: np.random.Generator) -> "BiGradedForm":
        return cls(n, base, fiber, rng.standard_normal((comb(n, base), comb(n, fiber))))

    @property
    def degree(self) -> int:
        return self.base + self.fiber

    def __add__(self, other: "BiGradedForm") -> "BiGradedForm":
        self._check(other)
        return BiGradedForm(self.n, self.base, self.fiber, self.coeffs + other.coeffs)

    def __mul__(self, s: float) -> "BiGradedForm":
        return BiGradedForm(self.n, self.base, self.fiber, self.coeffs * float(s))

    __rmul__ = __mul__

    def __neg__(self) -> "BiGradedForm":
        return self * -1.0

    def _check(self, other: "BiGradedForm") -> None:
        if (self.n, self.base, self.fiber) != (other.n, other.base, other.fiber):
            raise ValueError("bidegree mismatch")

    def terms(self):
        bs, fs = subsets(self.n, self.base), subsets(self.n, self.fiber)
        for i, j in zip(*np.nonzero(self.coeffs)):
            yield bs[i], fs[j], float(self.coeffs[i, j])

    def fiber_part(self) -> MultiVector:
        """The fiber-slot covector when the base grade is 0."""
        if self.base != 0:
            raise ValueError("base slot is not scalar")
        return MultiVector(self.n, self.fiber, self.coeffs[0])

    def to_full(self) -> MultiVector:
        """The same form as an element of Λ^{a+b} (R^{2n})*, dy_j ↦ dz_{n+j}."""
        N = 2 * self.n
        idx = subset_index(N, self.degree)
        out = np.zeros(comb(N, self.degree))
        for I, J, c in self.terms():
            out[idx[I + tuple(self.n + j for j in J)]] += c
        return MultiVector(N, self.degree, out)

    @classmethod
    def from_full(cls, w: MultiVector, n: int, base: int) -> "BiGradedForm":
        """Keep the bidegree-(base, w.k - base) block of a form on R^{2n}."""
        if w.n != 2 * n:
            raise ValueError("form must live on R^{2n}")
        fiber = w.k - base
        out = np.zeros((comb(n, base), comb(n, fiber)))
        bi, fi = subset_index(n, base), subset_index(n, fiber)
        for s, c in w.terms():
            I = tuple(i for i in s if i < n)
            J = tuple(i - n for i in s if i >= n)
            if len(I) == base:
                out[bi[I], fi[J]] += c
        return cls(n, base, fiber, out)

    def evaluate(self, vectors: np.ndarray) -> float:
        """Value of the form on ``a + b`` vectors of R^{2n} given as the columns of a 2n×(a+b) matrix.

        Computed from the full ``(a+b)``-minors, independently of the
        contraction machinery.
        """
        v = np.asarray(vectors, dtype=float)
        full = self.to_full()
        rows = _row_index(2 * self.n, self.degree)
        return float(full.coeffs @ np.linalg.det(v[rows, :]))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "base": self.base,
            "fiber": self.fiber,
            "terms": [
                {"base_idx": [i + 1 for i in I], "fiber_idx": [j + 1 for j in J], "coef": c}
                for I, J, c in self.terms()
            ],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "BiGradedForm":
        if isinstance(data, str):
            data = json.loads(data)
        n, base, fiber = int(data["n"]), int(data["base"]), int(data["fiber"])
        out = np.zeros((comb(n, base), comb(n, fiber)))
        bi, fi = subset_index(n, base), subset_index(n, fiber)
        for pos, t in enumerate(data.get("terms", [])):
            I = tuple(int(i) - 1 for i in t["base_idx"])
            J = tuple(int(j) - 1 for j in t["fiber_idx"])
            for name, s, g in (("base_idx", I, base), ("fiber_idx", J, fiber)):
                if len(s) != g or any(b <= a for a, b in zip(s, s[1:])) or any(not 0 <= i < n for i in s):
                    raise ValueError(f"terms[{pos}].{name}: expected {g} strictly increasing indices in 1..{n}")
            out[bi[I], fi[J]] += float(t["coef"])
        return cls(n, base, fiber, out)


def contract(u: MultiVector, w):
    """Interior product of ``u`` into the base slot of ``w``.

    ``w`` is a :class:`BiGradedForm` or a covector :class:`MultiVector`.
    Convention: ``contract(u, w)(x) = w(u ∧ x)``, so
    ``contract(u, contract(v, w)) == contract(v ∧ u, w)``.
    """
    if isinstance(w, MultiVector):
        lifted = BiGradedForm(w.n, w.k, 0, w.coeffs[:, None])
        return MultiVector(w.n, w.k - u.k, contract(u, lifted).coeffs[:, 0]) if u.k <= w.k else _grade_err(u, w.k)
    if u.n != w.n:
        raise ValueError(f"dimension mismatch: {u.n} vs {w.n}")
    if u.k > w.base:
        _grade_err(u, w.base)
    r = w.base - u.k
    i, j, t, s = _wedge_table(w.n, u.k, r)
    out = np.zeros((comb(w.n, r), w.coeffs.shape[1]))
    np.add.at(out, j, (s * u.coeffs[i])[:, None] * w.coeffs[t])
    return BiGradedForm(w.n, r, w.fiber, out)


def _grade_err(u: MultiVector, g: int):
    raise ValueError(f"cannot contract grade {u.k} into grade {g}")


def symplectic_wedge(eta: BiGradedForm) -> BiGradedForm:
    """``σ ∧ η`` with ``σ = Σ_i dx_i ∧ dy_i``; bidegree (a, b) maps to (a+1, b+1)."""
    n, a, b = eta.n, eta.base, eta.fiber
    if a + 1 > n or b + 1 > n:
        raise ValueError(f"bidegree ({a}, {b}) leaves no room for σ in R^{n}")
    out = np.zeros((comb(n, a + 1), comb(n, b + 1)))
    bi, fi = subset_index(n, a + 1), subset_index(n, b + 1)
    for I, J, c in eta.terms():
        for i in range(n):
            if i in I or i in J:
                continue
            # dx_i∧dy_i∧dx_I∧dy_J = (-1)^|I| (dx_i∧dx_I)∧(dy_i∧dy_J)
            sgn = (-1) ** a * _merge_sign((i,), I) * _merge_sign((i,), J)
            out[bi[tuple(sorted((i,) + I))], fi[tuple(sorted((i,) + J))]] += sgn * c
    return BiGradedForm(n, a + 1, b + 1, out)


def symplectic_form(n: int) -> MultiVector:
    """``σ`` as a 2-form on R^{2n}."""
    out = MultiVector.zero(2 * n, 2)
    for i in range(n):
        out = out + MultiVector.blade(2 * n, (i, n + i))
    return out
