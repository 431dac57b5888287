"""Convex polytopes with an exact face lattice.

Vertices are stored as :class:`fractions.Fraction` tuples.  Every
combinatorial decision (facet support, face identity, dimension) is made on
integer-scaled coordinates; floating point is used only for volumes,
angles, distances and sampling.

Facets are found by brute force: every affinely independent set of
``dim P`` vertices spans a candidate hyperplane, kept when all vertices lie
on one side.  Lower faces are the intersections of facet vertex sets.  A
polytope of dimension ``m < n`` is handled inside its affine hull, using a
coordinate projection that is injective on it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations, islice
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from . import _mc
from .cones import PolyCone

SLICE_TOL = 1e-9


# -- exact integer linear algebra -----------------------------------------


def _det(m: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(map(Fraction, r)) for r in rows]
    if not a:
        return a, []
    ncol = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def _nullspace(rows: list[list[Fraction]], ncol: int) -> list[list[Fraction]]:
    red, piv = _rref(rows)
    free = [c for c in range(ncol) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for r, p in enumerate(piv):
            v[p] = -red[r][f]
        out.append(v)
    return out


def _affine_rank(points: Sequence[Sequence[int]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return len(_rref([[a - b for a, b in zip(p, base)] for p in points[1:]])[1])


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def _cofactor_normal(diffs: list[list[int]], m: int) -> list[int]:
    """Integer vector orthogonal to the ``m-1`` rows of ``diffs`` (generalized cross product)."""
    out = []
    for j in range(m):
        minor = [[r[c] for c in range(m) if c != j] for r in diffs]
        out.append((-1) ** j * _det(minor))
    return out


_BATCH = 20_000


def _candidate_facets(chart: list[list[int]], m: int):
    """Vertex m-subsets that might span a supporting hyperplane.

    A float pass discards subsets only with a clear margin: the exact normal
    is an integer vector, so a float normal far below 1/2 means it is zero,
    and integer side values far from zero on both signs mean the hyperplane
    cuts the polytope.  Survivors get the exact test.
    """
    X = np.array(chart, dtype=float)
    big = float(np.abs(X).max(initial=0.0))
    it = combinations(range(len(chart)), m)
    while True:
        block = np.array(list(islice(it, _BATCH)), dtype=np.intp).reshape(-1, m)
        if block.size == 0:
            return
        D = X[block[:, 1:]] - X[block[:, :1]]
        normal = np.empty((block.shape[0], m))
        for j in range(m):
            cols = [c for c in range(m) if c != j]
            normal[:, j] = (-1) ** j * np.linalg.det(D[:, :, cols])
        bound = np.prod(np.linalg.norm(D, axis=2), axis=1) * 1e-10 + 1e-10 * big**m
        nmax = np.abs(normal).max(axis=1)
        alive = (nmax >= 0.25) | (bound >= 0.25)
        vals = (X @ normal.T).T - np.einsum("bj,bj->b", normal, X[block[:, 0]])[:, None]
        slack = 1e-9 * np.abs(vals).max(axis=1) + 0.25
        cuts = (vals.min(axis=1) < -slack) & (vals.max(axis=1) > slack)
        for row in block[alive & ~cuts]:
            yield tuple(int(i) for i in row)


# -- Borel boxes -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BorelBox:
    """Axis-aligned box ``[lo, hi]``; ``BorelBox.all()`` stands for all of R^n."""

    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        if (self.lo is None) != (self.hi is None):
            raise ValueError("give both corners or neither")
        if self.lo is not None:
            lo = np.asarray(self.lo, dtype=float)
            hi = np.asarray(self.hi, dtype=float)
            if lo.shape != hi.shape or np.any(lo > hi):
                raise ValueError("box needs lo <= hi componentwise")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)

    @classmethod
    def all(cls) -> "BorelBox":
        return cls()

    @property
    def is_all(self) -> bool:
        return self.lo is None

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        if self.is_all:
            return np.ones(x.shape[0], dtype=bool)
        return np.all((x >= self.lo) & (x <= self.hi), axis=1)

    def transform(self, sign: float = 1.0, shift=None) -> "BorelBox":
        """Image under ``x ↦ sign * x + shift`` (sign ±1 keeps it a box)."""
        if self.is_all:
            return self
        lo, hi = (self.lo, self.hi) if sign > 0 else (-self.hi, -self.lo)
        if shift is not None:
            lo, hi = lo + shift, hi + shift
        return BorelBox(lo, hi)

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """``A x <= b`` form of the box."""
        n = self.lo.size
        return np.vstack([np.eye(n), -np.eye(n)]), np.concatenate([self.hi, -self.lo])

    def to_json(self):
        return "ALL" if self.is_all else {"lo": self.lo.tolist(), "hi": self.hi.tolist()}

    @classmethod
    def from_json(cls, data) -> "BorelBox":
        if data in (None, "ALL", "all"):
            return cls.all()
        if isinstance(data, str):
            data = json.loads(data)
        rows = {}
        for key in ("lo", "hi"):
            if key not in data:
                raise ValueError(f"{key}: missing")
            try:
                rows[key] = np.asarray(data[key], float).reshape(-1)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{key}: not a list of numbers") from exc
        if rows["lo"].size != rows["hi"].size:
            raise ValueError(f"hi: expected {rows['lo'].size} entries, got {rows['hi'].size}")
        return cls(rows["lo"], rows["hi"])


ALL = BorelBox.all()


# -- faces -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Face:
    dim: int
    vertex_indices: tuple[int, ...]
    polytope: "Polytope" = field(repr=False)

    @cached_property
    def vertices(self) -> np.ndarray:
        return self.polytope.vertices_float[list(self.vertex_indices)]

    @cached_property
    def barycenter_exact(self) -> tuple[Fraction, ...]:
        vs = [self.polytope.vertices[i] for i in self.vertex_indices]
        return tuple(sum(c) / len(vs) for c in zip(*vs))

    @cached_property
    def barycenter(self) -> np.ndarray:
        return np.array([float(c) for c in self.barycenter_exact])

    @cached_property
    def affine_basis(self) -> np.ndarray:
        """Orthonormal n×dim frame of the direction space of the face."""
        if self.dim == 0:
            return np.zeros((self.polytope.n, 0))
        diff = self.vertices[1:] - self.vertices[0]
        _, _, vt = np.linalg.svd(diff, full_matrices=False)
        return vt[: self.dim].T

    @cached_property
    def subfaces(self) -> list["Face"]:
        """Faces of dimension ``dim - 1`` contained in this face."""
        mine = set(self.vertex_indices)
        return [g for g in self.polytope.faces_of_dim(self.dim - 1) if mine.issuperset(g.vertex_indices)]

    @cached_property
    def chart_halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """``A y <= b`` describing the face in coordinates ``y = Q^T (x - barycenter)``."""
        q, o = self.affine_basis, self.barycenter
        rows, rhs = [], []
        for g in self.subfaces:
            yg = (g.vertices - o) @ q
            gdir = q.T @ g.affine_basis
            if gdir.shape[1]:
                u, _, _ = np.linalg.svd(gdir, full_matrices=True)
                nu = u[:, -1]
            else:
                nu = np.ones(1)
            off = float(nu @ yg[0])
            if off < 0:
                nu, off = -nu, -off
            rows.append(nu)
            rhs.append(off)
        return np.array(rows, dtype=float).reshape(len(rows), self.dim), np.array(rhs, dtype=float)

    @cached_property
    def simplices(self) -> list[tuple[int, ...]]:
        """Triangulation by coning from the lowest-index vertex over the far subfaces."""
        if len(self.vertex_indices) == self.dim + 1:
            return [self.vertex_indices]
        v0 = self.vertex_indices[0]
        out = []
        for g in self.subfaces:
            if v0 in g.vertex_indices:
                continue
            out.extend((v0,) + s for s in g.simplices)
        return out

    @cached_property
    def volume(self) -> float:
        """Exact-rational Gram determinants, one square root per simplex."""
        if self.dim == 0:
            return 1.0
        P = self.polytope
        total = 0.0
        for s in self.simplices:
            v0 = P.vertices[s[0]]
            d = [[a - b for a, b in zip(P.vertices[i], v0)] for i in s[1:]]
            gram = [[sum(x * y for x, y in zip(r1, r2)) for r2 in d] for r1 in d]
            total += math.sqrt(_frac_det(gram))
        return total / math.factorial(self.dim)

    def __hash__(self):
        return hash(self.vertex_indices)

    def __eq__(self, other):
        return isinstance(other, Face) and other.polytope is self.polytope and other.vertex_indices == self.vertex_indices


def _frac_det(m: list[list[Fraction]]) -> Fraction:
    a = [list(r) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


# -- polytopes ---------------------------------------------------------------


class Polytope:
    """Convex hull of finitely many rational points in R^n.

    Non-extreme input points are dropped, so ``vertices`` lists exactly the
    extreme points.
    """

    def __init__(self, points: Iterable[Sequence], n: int | None = None):
        pts = [tuple(_to_fraction(c) for c in p) for p in points]
        if not pts:
            raise ValueError("a polytope needs at least one point")
        self.n = len(pts[0]) if n is None else n
        if any(len(p) != self.n for p in pts):
            raise ValueError("points have inconsistent dimensions")
        pts = list(dict.fromkeys(pts))
        while True:
            self._setup(pts)
            keep = sorted(f.vertex_indices[0] for f in self.faces_of_dim(0))
            if len(keep) == len(pts):
                break
            pts = [pts[i] for i in keep]
        self.vertices: tuple[tuple[Fraction, ...], ...] = tuple(pts)
        self.vertices_float = np.array([[float(c) for c in p] for p in pts]).reshape(len(pts), self.n)
        self.vertices_float.setflags(write=False)

    # construction internals
    def _setup(self, pts):
        self.vertices = tuple(pts)
        denom = reduce(math.lcm, (c.denominator for p in pts for c in p), 1)
        self._scale = denom
        ints = [[int(c * denom) for c in p] for p in pts]
        self._ints = ints
        base = ints[0]
        diffs = [[a - b for a, b in zip(p, base)] for p in ints[1:]]
        red, piv = _rref(diffs) if diffs else ([], [])
        self.dim = len(piv)
        self._pivots = piv
        self._equalities = [
            [int(x) for x in _integerize(v)] for v in _nullspace(red, self.n)
        ] if self.n else []
        chart = [[p[c] for c in piv] for p in ints]
        self._chart = chart
        self._facet_sets, self._facet_eqs = self._find_facets(chart, self.dim)
        self.__dict__.pop("faces", None)
        self.__dict__.pop("_faces_by_dim", None)

    @staticmethod
    def _find_facets(chart, m):
        V = len(chart)
        if m == 0:
            return [], []
        found: dict[tuple, frozenset] = {}
        if m == 1:
            xs = [p[0] for p in chart]
            lo, hi = min(xs), max(xs)
            found[((-1,), -lo)] = frozenset(i for i in range(V) if xs[i] == lo)
            found[((1,), hi)] = frozenset(i for i in range(V) if xs[i] == hi)
        else:
            sets: list[frozenset] = []
            for combo in _candidate_facets(chart, m):
                cs = set(combo)
                if any(cs <= s for s in sets):
                    continue
                p0 = chart[combo[0]]
                diffs = [[a - b for a, b in zip(chart[c], p0)] for c in combo[1:]]
                nv = _cofactor_normal(diffs, m)
                if not any(nv):
                    continue
                vals = [sum(a * b for a, b in zip(nv, p)) for p in chart]
                off = vals[combo[0]]
                if all(v <= off for v in vals):
                    pass
                elif all(v >= off for v in vals):
                    nv, off, vals = [-a for a in nv], -off, [-v for v in vals]
                else:
                    continue
                g = reduce(math.gcd, nv + [off])
                key = (tuple(a // g for a in nv), off // g)
                if key not in found:
                    s = frozenset(i for i, v in enumerate(vals) if v == off)
                    found[key] = s
                    sets.append(s)
        keys = list(found)
        return [found[k] for k in keys], keys

    @cached_property
    def faces(self) -> list[Face]:
        """All nonempty faces, including the polytope itself, sorted by (dim, vertices)."""
        allv = frozenset(range(len(self.vertices)))
        sets = set(self._facet_sets) | {allv}
        frontier = set(self._facet_sets)
        while frontier:
            new = set()
            for a in frontier:
                for b in self._facet_sets:
                    c = a & b
                    if c and c not in sets:
                        new.add(c)
            sets |= new
            frontier = new
        out = []
        for s in sets:
            idx = tuple(sorted(s))
            out.append(Face(_affine_rank([self._chart[i] for i in idx]), idx, self))
        out.sort(key=lambda f: (f.dim, f.vertex_indices))
        return out

    @cached_property
    def _faces_by_dim(self) -> dict[int, list[Face]]:
        d: dict[int, list[Face]] = {}
        for f in self.faces:
            d.setdefault(f.dim, []).append(f)
        return d

    def faces_of_dim(self, k: int) -> list[Face]:
        return self._faces_by_dim.get(k, [])

    def f_vector(self) -> list[int]:
        return [len(self.faces_of_dim(k)) for k in range(self.dim + 1)]

    @property
    def whole(self) -> Face:
        return self.faces_of_dim(self.dim)[0]

    @cached_property
    def facets(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """Inequalities ``a·x <= b`` (exact) valid on the affine hull; see :attr:`equalities`."""
        out = []
        for nv, off in self._facet_eqs:
            a = [Fraction(0)] * self.n
            for c, val in zip(self._pivots, nv):
                a[c] = Fraction(val)
            out.append((tuple(a), Fraction(off, self._scale)))
        return out

    @cached_property
    def equalities(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """``a·x = b`` cutting out the affine hull."""
        out = []
        for e in self._equalities:
            off = sum(Fraction(a) * c for a, c in zip(e, self.vertices[0]))
            out.append((tuple(Fraction(a) for a in e), off))
        return out

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """Float ``A x <= b`` with each equality split into two inequalities; rows unit length."""
        rows, rhs = [], []
        for a, b in self.facets:
            rows.append([float(x) for x in a])
            rhs.append(float(b))
        for a, b in self.equalities:
            rows.append([float(x) for x in a])
            rhs.append(float(b))
            rows.append([-float(x) for x in a])
            rhs.append(-float(b))
        A = np.array(rows, dtype=float).reshape(-1, self.n)
        b = np.array(rhs, dtype=float)
        nrm = np.linalg.norm(A, axis=1)
        nrm[nrm == 0] = 1.0
        return A / nrm[:, None], b / nrm

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        A, b = self.halfspaces
        x = np.atleast_2d(x)
        return np.all(x @ A.T <= b + tol * max(1.0, self.radius), axis=1)

    @cached_property
    def center(self) -> np.ndarray:
        return self.vertices_float.mean(axis=0)

    @cached_property
    def radius(self) -> float:
        """Circumradius about the vertex centroid."""
        return float(np.max(np.linalg.norm(self.vertices_float - self.center, axis=1)))

    @cached_property
    def volume(self) -> float:
        return self.whole.volume if self.dim == self.n else 0.0

    # transformations
    def transform(self, q=None, t=None) -> "Polytope":
        """Image under ``x ↦ q x + t`` (exact when q and t are None or rational)."""
        if q is None:
            pts = [list(p) for p in self.vertices]
        else:
            q = np.asarray(q, dtype=float)
            pts = [list(row) for row in self.vertices_float @ q.T]
        if t is not None:
            pts = [[_to_fraction(c) + _to_fraction(s) for c, s in zip(p, t)] for p in pts]
        return Polytope(pts, n=len(pts[0]))

    def __neg__(self) -> "Polytope":
        return Polytope([tuple(-c for c in p) for p in self.vertices], n=self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "vertices": [[str(c) for c in p] for p in self.vertices]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Polytope":
        if isinstance(data, str):
            data = json.loads(data)
        if "vertices" not in data:
            raise ValueError("vertices: missing")
        n = int(data.get("n", len(data["vertices"][0]) if data["vertices"] else 0))
        pts = []
        for i, v in enumerate(data["vertices"]):
            if len(v) != n:
                raise ValueError(f"vertices[{i}]: expected {n} coordinates, got {len(v)}")
            row = []
            for j, c in enumerate(v):
                try:
                    row.append(_to_fraction(c))
                except (ValueError, ZeroDivisionError, TypeError) as exc:
                    raise ValueError(f"vertices[{i}][{j}]: cannot parse {c!r} as a rational") from exc
            pts.append(row)
        return cls(pts, n=n)

    def __repr__(self) -> str:
        return f"Polytope(n={self.n}, dim={self.dim}, vertices={len(self.vertices)})"


def _integerize(v: Sequence[Fraction]) -> list[int]:
    den = reduce(math.lcm, (x.denominator for x in v), 1)
    return [int(x * den) for x in v]


# -- standard bodies ---------------------------------------------------------


def cube(n: int, side=1) -> Polytope:
    s = _to_fraction(side)
    return Polytope([tuple(s * b for b in bits) for bits in _bits(n)], n=n)


def _bits(n: int):
    for m in range(2**n):
        yield tuple((m >> i) & 1 for i in range(n))


def simplex(n: int) -> Polytope:
    """Convex hull of 0 and the standard basis vectors."""
    pts = [tuple(0 for _ in range(n))]
    pts += [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    return Polytope(pts, n=n)


def regular_polygon(m: int, radius: float = 1.0) -> Polytope:
    t = 2 * np.pi * np.arange(m) / m
    return Polytope(np.column_stack([radius * np.cos(t), radius * np.sin(t)]).tolist(), n=2)


def random_polytope(rng: np.random.Generator, n: int, points: int) -> Polytope:
    """Hull of uniform points in the unit cube, rounded to multiples of 1/1024."""
    pts = np.round(rng.random((points, n)) * 1024).astype(int)
    return Polytope([[Fraction(int(c), 1024) for c in p] for p in pts], n=n)


# -- operations --------------------------------------------------------------


def face_lattice(P: Polytope) -> list[Face]:
    return P.faces


def tangent_cone(P: Polytope, F: Face) -> PolyCone:
    """``T_F P`` with lineality the direction space of ``F``.

    Modulo the lineality, the cone is generated by one vertex ``v - b`` from
    each face of dimension ``dim F + 1`` containing ``F``; using those
    instead of all vertices gives an irredundant ray set.
    """
    mine = set(F.vertex_indices)
    picks = []
    for G in P.faces_of_dim(F.dim + 1):
        if mine.issubset(G.vertex_indices):
            picks.append(next(i for i in G.vertex_indices if i not in mine))
    gens = P.vertices_float[picks] - F.barycenter
    return PolyCone(P.n, gens.reshape(-1, P.n), F.affine_basis.T).normalize()


def _clip_volume(A: np.ndarray, b: np.ndarray, k: int) -> float:
    """Volume of ``{y in R^k : A y <= b}`` (assumed bounded)."""
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    tol = 1e-12 * scale
    nrm = np.linalg.norm(A, axis=1)
    flat = nrm <= 1e-14
    if np.any(b[flat] < -tol):
        return 0.0
    A, b, nrm = A[~flat], b[~flat], nrm[~flat]
    if k == 0:
        return 1.0
    if k == 1:
        a = A[:, 0]
        hi = np.min(b[a > 0] / a[a > 0]) if np.any(a > 0) else np.inf
        lo = np.max(b[a < 0] / a[a < 0]) if np.any(a < 0) else -np.inf
        return float(max(0.0, hi - lo))
    res = linprog(
        np.r_[np.zeros(k), -1.0],
        A_ub=np.hstack([A, nrm[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * k + [(0, None)],
        method="highs",
    )
    if res.status != 0 or res.x[-1] <= 1e-10 * scale:
        return 0.0
    inner = res.x[:k]
    hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), inner)
    return float(ConvexHull(hs.intersections).volume)


def face_volume(
    F: Face,
    U: BorelBox = ALL,
    method: str = "exact",
    samples: int = 100_000,
    seed: int | None = 0,
    embedding: tuple[np.ndarray, np.ndarray] | None = None,
) -> float:
    """``vol_k(F ∩ U)``.

    ``method="exact"`` clips the face against the box (halfspace
    intersection in the face's own chart); ``method="mc"`` samples the face
    uniformly.  ``embedding=(p, Q)`` places the polytope in R^N via
    ``x ↦ p + Q x`` before intersecting with ``U``.
    """
    return face_volume_estimate(F, U, method, samples, seed, embedding).value


def _embed_box(U: BorelBox, o: np.ndarray, q: np.ndarray, embedding):
    """Box constraints on chart coordinates y, where x = o + q y (mapped through the embedding)."""
    A, b = U.halfspaces()
    if embedding is not None:
        p, Q = embedding
        o, q = p + Q @ o, Q @ q
    return A @ q, b - A @ o


def face_volume_estimate(F, U=ALL, method="exact", samples=100_000, seed=0, embedding=None, key=()):
    total = F.volume
    if U.is_all:
        return _mc.Estimate(total, 0.0, 0)
    pts = F.vertices if embedding is None else embedding[0] + F.vertices @ np.asarray(embedding[1]).T
    if np.all(U.contains(pts)):
        return _mc.Estimate(total, 0.0, 0)
    if np.any(pts.max(axis=0) < U.lo) or np.any(pts.min(axis=0) > U.hi):
        return _mc.Estimate(0.0, 0.0, 0)
    if method == "exact" or F.dim == 0:
        Ac, bc = F.chart_halfspaces
        Ab, bb = _embed_box(U, F.barycenter, F.affine_basis, embedding)
        return _mc.Estimate(_clip_volume(np.vstack([Ac, Ab]), np.concatenate([bc, bb]), F.dim), 0.0, 0)
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")

    def draw(rng, m):
        x = sample_face(F, rng, m)
        if embedding is not None:
            x = embedding[0] + x @ np.asarray(embedding[1]).T
        return U.contains(x)

    est = _mc.indicator_mean(draw, samples, seed, 0xF00, *key)
    return _mc.Estimate(total * est.value, total * est.sigma, est.samples)


@dataclass(frozen=True)
class _SimplexTable:
    corners: np.ndarray  # (S, k+1, n)
    weights: np.ndarray  # (S,)


def _simplex_table(F: Face) -> _SimplexTable:
    cache = F.__dict__.setdefault("_simplex_table", None)
    if cache is not None:
        return cache
    P = F.polytope
    corners = np.array([P.vertices_float[list(s)] for s in F.simplices])
    vols = []
    for c in corners:
        d = c[1:] - c[0]
        vols.append(math.sqrt(max(0.0, float(np.linalg.det(d @ d.T)))) if F.dim else 1.0)
    w = np.array(vols)
    tab = _SimplexTable(corners, w / w.sum())
    F.__dict__["_simplex_table"] = tab
    return tab


def sample_face(F: Face, rng: np.random.Generator, m: int) -> np.ndarray:
    """``m`` points uniform on the face (volume-weighted choice of simplex, then Dirichlet)."""
    tab = _simplex_table(F)
    which = rng.choice(len(tab.weights), size=m, p=tab.weights)
    bary = rng.dirichlet(np.ones(F.dim + 1), size=m)
    return np.einsum("mj,mjn->mn", bary, tab.corners[which])


def distance_to_polytope(P: Polytope, x) -> np.ndarray | float:
    """Euclidean distance from ``x`` (one point or rows of points) to ``P``."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    best = np.full(X.shape[0], np.inf)
    tol = 1e-9 * max(1.0, P.radius)
    for F in P.faces:
        q, o = F.affine_basis, F.barycenter
        y = (X - o) @ q
        A, b = F.chart_halfspaces
        inside = np.all(y @ A.T <= b + tol, axis=1) if A.size else np.ones(X.shape[0], bool)
        d = np.linalg.norm(X - (o + y @ q.T), axis=1)
        best = np.where(inside & (d < best), d, best)
    best[P.contains(X)] = 0.0
    return float(best[0]) if single else best


class DegenerateSlice(ValueError):
    """The flat touches the polytope in a non-generic way; re-sample the flat."""


def slice_polytope(P: Polytope, point, frame) -> Polytope | None:
    """``P ∩ (point + span(frame))`` in the flat's coordinates, or ``None`` if empty.

    Vertices are found by brute force over ``d``-subsets of the facet
    inequalities rewritten in flat coordinates.
    """
    p = np.asarray(point, dtype=float)
    Q = np.asarray(frame, dtype=float).reshape(P.n, -1)
    d = Q.shape[1]
    A, b = P.halfspaces
    Ad, bd = A @ Q, b - A @ p
    scale = max(1.0, P.radius, float(np.abs(p).max(initial=0.0)))
    tol = SLICE_TOL * scale
    if d == 0:
        return Polytope([()], n=0) if np.all(bd >= -tol) else None
    verts: list[np.ndarray] = []
    for rows in combinations(range(Ad.shape[0]), d):
        M = Ad[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        y = np.linalg.solve(M, bd[list(rows)])
        if np.all(Ad @ y <= bd + tol) and not any(np.linalg.norm(y - v) <= tol for v in verts):
            verts.append(y)
    if not verts:
        return None
    S = Polytope([v.tolist() for v in verts], n=d)
    generic = P.dim + d - P.n
    if S.dim != generic:
        raise DegenerateSlice(f"slice has dimension {S.dim}, expected {generic}")
    return S
