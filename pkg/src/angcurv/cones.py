"""Polyhedral convex cones and their external angles.

A :class:`PolyCone` is ``cone(generators) + span(lineality)``.  The polar
cone is never built explicitly; angles come from membership tests, except
in the low-dimensional cases where an exact formula is available:

* polar sphere of dimension 0 or 1: counting / arc length,
* polar sphere of dimension 2: area of the polar spherical polygon, summed
  over a fan of spherical triangles (Girard excess).

Higher-dimensional cases are estimated by sampling the unit sphere of
``L(C)^⊥``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.spatial import ConvexHull

from . import _mc

LP_SLACK = 1e-10
RANK_TOL = 1e-10
DEFAULT_SAMPLES = 200_000
EXACT_MAX_DIM = 3


def _orth(vectors: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis (rows) of the span of the given rows."""
    vectors = np.asarray(vectors, dtype=float).reshape(-1, n)
    if vectors.shape[0] == 0:
        return np.zeros((0, n))
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    scale = max(1.0, float(s[0]) if s.size else 0.0)
    r = int(np.sum(s > RANK_TOL * scale))
    return vt[:r]


def _complement(basis: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of ``span(basis)``."""
    if basis.shape[0] == 0:
        return np.eye(n)
    _, _, vt = np.linalg.svd(basis, full_matrices=True)
    return vt[basis.shape[0]:]


@dataclass(frozen=True, eq=False)
class PolyCone:
    """``cone(generators) + span(lineality)`` in R^n (vectors are rows)."""

    n: int
    generators: np.ndarray
    lineality: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        g = np.array(self.generators, dtype=float).reshape(-1, self.n)
        l = np.array(self.lineality, dtype=float).reshape(-1, self.n)
        g = g[np.linalg.norm(g, axis=1) > 0] if g.size else g
        g.setflags(write=False)
        l.setflags(write=False)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "lineality", l)

    @classmethod
    def from_rays(cls, rays, lineality=()) -> "PolyCone":
        rays = np.atleast_2d(np.asarray(rays, dtype=float))
        n = rays.shape[1]
        return cls(n, rays, np.asarray(lineality, dtype=float).reshape(-1, n))

    @classmethod
    def subspace(cls, basis, n: int) -> "PolyCone":
        return cls(n, np.zeros((0, n)), np.asarray(basis, dtype=float).reshape(-1, n))

    @cached_property
    def _normal_form(self) -> "PolyCone":
        basis = lineality_space(self)
        g = self.generators
        if g.shape[0]:
            g = g - (g @ basis.T) @ basis
            keep = np.linalg.norm(g, axis=1) > RANK_TOL * max(1.0, float(np.abs(self.generators).max()))
            g = g[keep]
            g = g / np.linalg.norm(g, axis=1, keepdims=True)
        return PolyCone(self.n, g, basis, normalized=True)

    def normalize(self) -> "PolyCone":
        """Equivalent cone with orthonormal lineality ``L(C)`` and unit generators orthogonal to it."""
        return self if self.normalized else self._normal_form

    @property
    def lineality_dim(self) -> int:
        return self.normalize().lineality.shape[0]

    def transform(self, q: np.ndarray) -> "PolyCone":
        """Image under the linear map ``x ↦ q x``."""
        q = np.asarray(q, dtype=float)
        return PolyCone(q.shape[0], self.generators @ q.T, self.lineality @ q.T)

    def embed(self, m: int) -> "PolyCone":
        """The same cone inside R^m, m ≥ n, by appending zero coordinates."""
        pad = ((0, 0), (0, m - self.n))
        return PolyCone(m, np.pad(self.generators, pad), np.pad(self.lineality, pad))

    def to_json(self) -> dict:
        return {"n": self.n, "generators": self.generators.tolist(), "lineality": self.lineality.tolist()}

    @classmethod
    def from_json(cls, data: dict | str) -> "PolyCone":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        for key in ("generators", "lineality"):
            for i, v in enumerate(data.get(key, [])):
                if len(v) != n:
                    raise ValueError(f"{key}[{i}]: expected {n} coordinates, got {len(v)}")
        return cls(n, np.asarray(data.get("generators", []), float).reshape(-1, n),
                   np.asarray(data.get("lineality", []), float).reshape(-1, n))


def _in_cone(target: np.ndarray, gens: np.ndarray, lin: np.ndarray) -> bool:
    """Is ``target`` a nonnegative combination of ``gens`` plus an element of ``span(lin)``?"""
    cols = [gens.T, lin.T, -lin.T] if lin.shape[0] else [gens.T]
    a = np.hstack(cols) if gens.shape[0] or lin.shape[0] else np.zeros((target.size, 0))
    if a.shape[1] == 0:
        return bool(np.linalg.norm(target) <= LP_SLACK)
    _, resid = nnls(a, target)
    return bool(resid <= LP_SLACK * max(1.0, float(np.linalg.norm(target))))


def lineality_space(c: PolyCone) -> np.ndarray:
    """Orthonormal basis (rows) of ``L(C) = C ∩ (-C)``.

    A generator lies in ``L(C)`` iff its negative is in ``C``; those
    generators together with the given lineality vectors span ``L(C)``.
    """
    if c.normalized:
        return c.lineality
    inside = [g for g in c.generators if _in_cone(-g, c.generators, c.lineality)]
    return _orth(np.vstack([c.lineality] + ([np.array(inside)] if inside else [])), c.n)


def polar_contains_many(c: PolyCone, xi: np.ndarray) -> np.ndarray:
    """Vectorized polar membership for the rows of ``xi``."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    scale = max([1.0] + [float(np.linalg.norm(v)) for v in c.generators] + [float(np.linalg.norm(v)) for v in c.lineality])
    tol = 1e-12 * np.linalg.norm(xi, axis=1) * scale
    ok = np.ones(xi.shape[0], dtype=bool)
    if c.generators.shape[0]:
        ok &= np.all(xi @ c.generators.T <= tol[:, None], axis=1)
    if c.lineality.shape[0]:
        ok &= np.all(np.abs(xi @ c.lineality.T) <= tol[:, None], axis=1)
    return ok


def polar_contains(c: PolyCone, xi) -> bool:
    """``ξ ∈ C°``: ``⟨ξ, g⟩ ≤ 0`` on generators and ``⟨ξ, l⟩ = 0`` on the lineality."""
    return bool(polar_contains_many(c, np.asarray(xi, dtype=float)[None])[0])


@dataclass(frozen=True)
class _Reduced:
    """Normalized cone written in coordinates of ``span(C) ∩ L^⊥``."""

    lineality: np.ndarray  # rows, orthonormal, in R^n
    perp: np.ndarray  # rows, orthonormal basis of L^⊥
    span: np.ndarray  # rows, orthonormal basis of the span of the projected generators
    rays: np.ndarray  # generators in ``span`` coordinates


def _reduce(c: PolyCone) -> _Reduced:
    c = c.normalize()
    span = _orth(c.generators, c.n)
    rays = c.generators @ span.T if span.shape[0] else np.zeros((c.generators.shape[0], 0))
    return _Reduced(c.lineality, _complement(c.lineality, c.n), span, rays)


def _section_direction(rays: np.ndarray) -> np.ndarray:
    """Unit ``c`` with ``⟨c, r⟩ > 0`` for every ray of a pointed cone.

    The normalized ray sum works for most cones but not all (a ray can make
    an obtuse angle with it), so fall back to the max-margin direction.
    """
    u = rays / np.linalg.norm(rays, axis=1, keepdims=True)
    s = u.sum(axis=0)
    s /= np.linalg.norm(s)
    if np.min(u @ s) > 1e-3:
        return s
    d = u.shape[1]
    # maximize t subject to <c, u_i> >= t, -1 <= c_j <= 1
    res = linprog(
        np.r_[np.zeros(d), -1.0],
        A_ub=np.hstack([-u, np.ones((u.shape[0], 1))]),
        b_ub=np.zeros(u.shape[0]),
        bounds=[(-1, 1)] * d + [(None, 1)],
        method="highs",
    )
    if res.status != 0 or -res.fun <= 1e-12:
        raise ValueError("cone is not pointed; no section hyperplane meets every ray")
    c = res.x[:d]
    return c / np.linalg.norm(c)


def _plane_basis(c: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning ``c^⊥``."""
    return _complement(c[None], c.size)


def _convex_order_2d(pts: np.ndarray) -> list[int]:
    """Indices of the extreme points of a 2D point set in counter-clockwise order."""
    order = sorted(range(len(pts)), key=lambda i: (pts[i, 0], pts[i, 1]))

    def cross(o, a, b):
        return (pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1]) - (pts[a, 1] - pts[o, 1]) * (pts[b, 0] - pts[o, 0])

    scale = max(1.0, float(np.abs(pts).max()))
    tol = 1e-12 * scale * scale
    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= tol:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= tol:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _triangle_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Spherical excess of the triangle with unit vertices a, b, c."""
    num = abs(float(np.dot(a, np.cross(b, c))))
    den = 1.0 + float(a @ b + b @ c + c @ a)
    return 2.0 * math.atan2(num, den)


def polar_polygon(rays: np.ndarray) -> np.ndarray:
    """Unit vertices (cyclic order) of ``C° ∩ S^2`` for a pointed full-dimensional cone in R^3."""
    c = _section_direction(rays)
    plane = _plane_basis(c)
    sect = rays / (rays @ c)[:, None]
    ring = _convex_order_2d(sect @ plane.T)
    ext = rays[ring]
    # c need not lie inside the cone; the sum of unit rays does
    inner = (ext / np.linalg.norm(ext, axis=1, keepdims=True)).sum(axis=0)
    normals = []
    for i in range(len(ext)):
        nv = np.cross(ext[i], ext[(i + 1) % len(ext)])
        if nv @ inner > 0:
            nv = -nv
        normals.append(nv / np.linalg.norm(nv))
    return np.array(normals)


def _girard_fraction(rays: np.ndarray) -> float:
    poly = polar_polygon(rays)
    area = sum(_triangle_area(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1))
    return area / (4.0 * math.pi)


def _exact_angle(red: _Reduced) -> float:
    d = red.span.shape[0]
    if d == 0:
        return 1.0
    if d == 1:
        return 0.5
    if d == 2:
        u = red.rays / np.linalg.norm(red.rays, axis=1, keepdims=True)
        cosines = np.clip(u @ u.T, -1.0, 1.0)
        alpha = float(np.arccos(cosines.min()))
        return (math.pi - alpha) / (2.0 * math.pi)
    return _girard_fraction(red.rays)


@dataclass(frozen=True)
class AngleEstimate:
    value: float
    sigma: float
    exact: bool

    def __float__(self) -> float:
        return self.value


def external_angle_estimate(
    c: PolyCone, samples: int = DEFAULT_SAMPLES, seed: int | None = 0, key: tuple[int, ...] = ()
) -> AngleEstimate:
    """External angle with its Monte Carlo error (0 on exact branches).

    The exact branches work in the span of the projected cone, which by
    ambient independence gives the same value as working in ``L(C)^⊥``.
    """
    red = _reduce(c)
    if red.span.shape[0] <= EXACT_MAX_DIM:
        return AngleEstimate(_exact_angle(red), 0.0, True)
    if samples < 1:
        raise ValueError("Monte Carlo branch needs at least one sample")
    cn = c.normalize()
    perp = red.perp

    def draw(rng, m):
        xi = _mc.uniform_sphere(rng, m, perp.shape[0]) @ perp
        return polar_contains_many(cn, xi)

    est = _mc.indicator_mean(draw, samples, seed, 0xA17E, *key)
    return AngleEstimate(est.value, est.sigma, False)


def external_angle(c: PolyCone, samples: int = DEFAULT_SAMPLES, seed: int | None = 0) -> float:
    """Fraction of the unit sphere of ``L(C)^⊥`` covered by the polar cone."""
    return external_angle_estimate(c, samples, seed).value


# -- triangulation ---------------------------------------------------------


def _affine_chart(pts: np.ndarray):
    """Affine dimension of a point set and its coordinates in an orthonormal chart."""
    base = pts[0]
    diff = pts - base
    basis = _orth(diff, pts.shape[1])
    return basis.shape[0], diff @ basis.T


def _group_facets(hull: ConvexHull, pts: np.ndarray, tol: float) -> list[np.ndarray]:
    """Distinct facet hyperplanes of a hull as boolean masks over ``pts``."""
    seen: list[np.ndarray] = []
    masks = []
    for eq in hull.equations:
        if any(np.allclose(eq, s, atol=1e-9) for s in seen):
            continue
        seen.append(eq)
        masks.append(np.abs(pts @ eq[:-1] + eq[-1]) <= tol)
    return masks


def pulling_triangulation(pts: np.ndarray, idx: list[int] | None = None) -> list[tuple[int, ...]]:
    """Triangulate ``conv(pts)`` by repeatedly coning from the lowest-index vertex.

    Returns simplices as sorted tuples of point indices.  The vertex order is
    global, so the triangulations induced on shared faces agree and the
    result is a simplicial complex.
    """
    pts = np.asarray(pts, dtype=float)
    if idx is None:
        idx = list(range(len(pts)))
    sub = pts[idx]
    dim, chart = _affine_chart(sub)
    if dim == 0:
        return [(idx[0],)]
    if dim == 1:
        t = chart[:, 0]
        return [tuple(sorted((idx[int(np.argmin(t))], idx[int(np.argmax(t))])))]
    hull = ConvexHull(chart)
    extreme = sorted(idx[i] for i in hull.vertices)
    if len(extreme) == dim + 1:
        return [tuple(extreme)]
    v0 = extreme[0]
    local_v0 = idx.index(v0)
    scale = max(1.0, float(np.abs(chart).max()))
    out: list[tuple[int, ...]] = []
    for mask in _group_facets(hull, chart, 1e-9 * scale):
        if mask[local_v0]:
            continue
        members = [idx[i] for i in np.nonzero(mask)[0]]
        for simplex in pulling_triangulation(pts, members):
            out.append(tuple(sorted((v0,) + simplex)))
    return out


@dataclass(frozen=True)
class Triangulation:
    """Simplicial pieces of a cone: ``pieces[i] = cone(rays[list]) + L``."""

    cone: PolyCone
    rays: np.ndarray
    simplices: list[tuple[int, ...]]

    def piece(self, indices) -> PolyCone:
        indices = list(indices)
        return PolyCone(self.cone.n, self.rays[indices] if indices else np.zeros((0, self.cone.n)),
                        self.cone.lineality, normalized=True)

    @property
    def pieces(self) -> list[PolyCone]:
        return [self.piece(s) for s in self.simplices]


def triangulate_cone(c: PolyCone) -> Triangulation:
    c = c.normalize()
    red = _reduce(c)
    d = red.span.shape[0]
    rays = c.generators
    if d <= 1:
        return Triangulation(c, rays, [tuple(range(len(rays)))])
    cdir = _section_direction(red.rays)
    plane = _plane_basis(cdir)
    sect = (red.rays / (red.rays @ cdir)[:, None]) @ plane.T
    simplices = pulling_triangulation(sect)
    return Triangulation(c, rays, simplices)


def triangulate(c: PolyCone) -> list[PolyCone]:
    """Cones sharing ``L(C)`` whose projections mod ``L`` are simplicial and whose union is ``C``."""
    return triangulate_cone(c).pieces


@dataclass(frozen=True)
class AdditivityResult:
    residual: float
    sigma: float
    pieces: int
    exact: bool


def angle_additivity_check(c: PolyCone, samples: int = DEFAULT_SAMPLES, seed: int | None = 0) -> AdditivityResult:
    """``|Σ_S (-1)^{|S|-1} γ(∩_{i∈S} C_i) − γ(C)|`` over a triangulation of ``C``.

    Intersections of pieces are the cones over their common rays.  On the
    Monte Carlo branch every term is evaluated on the same sphere samples,
    and ``sigma`` is the standard error of the per-sample residual.
    """
    tri = triangulate_cone(c)
    cn = tri.cone
    m = len(tri.simplices)
    coeff: dict[frozenset, int] = {}
    for size in range(1, m + 1):
        for combo in combinations(range(m), size):
            common = frozenset.intersection(*(frozenset(tri.simplices[i]) for i in combo))
            coeff[common] = coeff.get(common, 0) + (-1) ** (size - 1)
    terms = [(tri.piece(sorted(s)), w) for s, w in coeff.items() if w]
    red = _reduce(cn)
    if red.perp.shape[0] <= EXACT_MAX_DIM:
        total = sum(w * external_angle(p) for p, w in terms) - external_angle(cn)
        return AdditivityResult(abs(total), 0.0, m, True)
    perp = red.perp

    def draw(rng, count):
        xi = _mc.uniform_sphere(rng, count, perp.shape[0]) @ perp
        z = -polar_contains_many(cn, xi).astype(float)
        for p, w in terms:
            z += w * polar_contains_many(p, xi)
        return z

    est = _mc.mc_mean(draw, samples, seed, 0xADD)
    return AdditivityResult(abs(est.value), est.sigma, m, False)
