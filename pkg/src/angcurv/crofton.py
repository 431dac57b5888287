"""Monte Carlo integral geometry over affine Grassmannians.

Flats of dimension ``d = n - k`` are drawn with a uniform direction and an
offset uniform in the radius-R ball of the orthogonal complement, centred
on the body.  The Haar normalization is not computed in closed form:
:func:`calibrate` fixes the constant ``c`` so that the estimator reproduces
``V_k`` of the unit cube, and every later estimate is ``c`` times a sample
mean taken with the same window radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _mc
from .curvmeas import WeightSpec, _as_specs, ball_volume, evaluate, intrinsic_volume
from .exterior import complement_batch
from .polytope import ALL, BorelBox, DegenerateSlice, Polytope, cube, slice_polytope

WINDOW_FACTOR = 1.05
DEFAULT_FLATS = 1_000_000
_KEY_CAL = 0xCA1
_KEY_EST = 0xC0F


@dataclass(frozen=True, eq=False)
class AffineFlat:
    point: np.ndarray
    frame: np.ndarray  # n × d, orthonormal

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def d(self) -> int:
        return self.frame.shape[1]


@dataclass(frozen=True)
class FlatMeasure:
    n: int
    d: int
    radius: float
    c: float | None = None
    c_sigma: float = 0.0

    @property
    def k(self) -> int:
        return self.n - self.d

    @property
    def calibrated(self) -> bool:
        return self.c is not None


def default_measure(n: int, k: int, bodies: Sequence[Polytope] = ()) -> FlatMeasure:
    """Window radius: the largest of the unit-cube and body circumradii, plus 5%.

    A flat meeting a body lies within its circumradius of the centre, so any
    radius at least that large is unbiased; larger radii only add variance.
    """
    r = max([math.sqrt(n) / 2] + [P.radius for P in bodies])
    return FlatMeasure(n, n - k, WINDOW_FACTOR * r)


def _draw(meas: FlatMeasure, rng: np.random.Generator, m: int):
    """Normal frames G (m, n, k) and offsets Y (m, k) of ``m`` flats around the origin."""
    n, k = meas.n, meas.k
    if k == 0:
        return np.zeros((m, n, 0)), np.zeros((m, 0))
    g = rng.standard_normal((m, n, k))
    G, _ = np.linalg.qr(g)
    Y = meas.radius * _mc.uniform_ball(rng, m, k)
    return G, Y


def sample_flat(meas: FlatMeasure, seed: int | None = 0, index: int = 0, center=None) -> AffineFlat:
    G, Y = _draw(meas, _mc.substream(seed, 0xF1A7, index), 1)
    c = np.zeros(meas.n) if center is None else np.asarray(center, float)
    Q = complement_batch(G)[0] if meas.k else np.eye(meas.n)
    return AffineFlat(c + G[0] @ Y[0], Q)


def hits(P: Polytope, center: np.ndarray, G: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Does the flat through ``center + G y`` normal to ``G`` meet ``P``?

    Equivalent to ``y`` lying in the projection of ``P - center`` onto
    ``span G``.  For k = 1 that is an interval test; for k = n it is the
    H-representation.  Otherwise every facet of the projection is the image
    of a (k-1)-face of ``P``, so ``y`` is outside exactly when the image
    hyperplane of one of those faces separates it from the projected vertices.
    """
    m, n, k = G.shape
    if k == 0:
        return np.ones(m, dtype=bool)
    if P.dim < k:
        # the projection is a null set in span G
        return np.zeros(m, dtype=bool)
    if k == n:
        return P.contains(center + np.einsum("mnk,mk->mn", G, Y), tol=1e-12)
    Z = np.einsum("vn,mnk->mvk", P.vertices_float - center, G)
    if k == 1:
        z = Z[:, :, 0]
        y = Y[:, 0]
        return (z.min(axis=1) <= y) & (y <= z.max(axis=1))
    tol = 1e-12 * max(1.0, P.radius)
    missed = np.zeros(m, dtype=bool)
    for F in P.faces_of_dim(k - 1):
        D = np.einsum("nj,mnk->mkj", F.affine_basis, G)  # (m, k, k-1)
        normal = np.empty((m, k))
        for j in range(k):
            rows = [r for r in range(k) if r != j]
            normal[:, j] = (-1) ** j * np.linalg.det(D[:, rows, :])
        nn = np.linalg.norm(normal, axis=1, keepdims=True)
        normal = normal / np.where(nn > 0, nn, 1.0)
        a = Z[:, F.vertex_indices[0]]
        s = np.einsum("mvk,mk->mv", Z - a[:, None], normal)
        t = np.einsum("mk,mk->m", Y - a, normal)
        live = nn[:, 0] > 1e-12
        sep = ((s <= tol).all(axis=1) & (t > tol)) | ((s >= -tol).all(axis=1) & (t < -tol))
        missed |= live & sep
    return ~missed


def hit_fraction(P: Polytope, meas: FlatMeasure, samples: int, seed: int | None, key: int) -> _mc.Estimate:
    if P.radius > meas.radius * (1 + 1e-12):
        raise ValueError(f"body radius {P.radius:.4g} exceeds window radius {meas.radius:.4g}")
    center = P.center

    def draw(rng, m):
        G, Y = _draw(meas, rng, m)
        return hits(P, center, G, Y)

    return _mc.indicator_mean(draw, samples, seed, key, meas.n, meas.k)


def calibrate(meas: FlatMeasure, samples: int = DEFAULT_FLATS, seed: int | None = 0) -> FlatMeasure:
    """Set ``c`` so that the estimator returns ``V_k`` of the unit cube."""
    ref = cube(meas.n)
    target = intrinsic_volume(ref, meas.k)
    est = hit_fraction(ref, meas, samples, seed, _KEY_CAL)
    if est.value == 0:
        raise ValueError("no flat hit the reference cube; window too large for the sample count")
    c = target / est.value
    return replace(meas, c=c, c_sigma=c * est.sigma / est.value)


@dataclass(frozen=True)
class CroftonResult:
    value: float
    sigma: float
    c: float
    c_sigma: float
    raw: float
    raw_sigma: float

    def to_json(self) -> dict:
        return {"value": self.value, "sigma": self.sigma, "calibration": {"c": self.c, "sigma": self.c_sigma}}


def _combine(meas: FlatMeasure, est: _mc.Estimate) -> CroftonResult:
    val = meas.c * est.value
    rel = math.hypot(meas.c_sigma / meas.c, est.sigma / est.value) if est.value else 0.0
    sig = abs(val) * rel if est.value else meas.c * est.sigma
    return CroftonResult(val, sig, meas.c, meas.c_sigma, est.value, est.sigma)


def _prepared(P: Polytope, k: int, meas: FlatMeasure | None, samples: int, seed) -> FlatMeasure:
    if meas is None:
        meas = default_measure(P.n, k, [P])
    if meas.n != P.n or meas.k != k:
        raise ValueError(f"measure is for (n, k) = ({meas.n}, {meas.k}), asked for ({P.n}, {k})")
    return meas if meas.calibrated else calibrate(meas, samples, seed)


def crofton_estimate(
    P: Polytope, k: int, meas: FlatMeasure | None = None, samples: int = DEFAULT_FLATS, seed: int | None = 0
) -> CroftonResult:
    """``V_k(P)`` as the calibrated measure of flats of dimension ``n - k`` meeting ``P``."""
    if not 0 <= k <= P.n:
        raise ValueError("need 0 <= k <= n")
    meas = _prepared(P, k, meas, samples, seed)
    return _combine(meas, hit_fraction(P, meas, samples, seed, _KEY_EST))


def vk_globalization_constant(k: int, j: int) -> float:
    """``a`` with ``(V_k · V_j)(P) = a · V_{k+j}(P)``, from ``V_i = (2^i / (i! ω_i)) V_1^i``."""

    def b(i):
        return math.factorial(i) * ball_volume(i) / 2**i

    return b(k + j) / (b(k) * b(j))


def _segment_terms(specs: list[WeightSpec], P: Polytope, U: BorelBox, center, G, Y, Q):
    """Ψ on the chords ``P ∩ line`` for all lines at once (d = 1)."""
    m = G.shape[0]
    A, b = P.halfspaces
    p = center + np.einsum("mnk,mk->mn", G, Y)
    q = Q[:, :, 0]

    def interval(A, b):
        aq = q @ A.T
        r = b[None, :] - p @ A.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = r / aq
        lo = np.where(aq < -1e-15, ratio, -np.inf).max(axis=1)
        hi = np.where(aq > 1e-15, ratio, np.inf).min(axis=1)
        bad = ((np.abs(aq) <= 1e-15) & (r < -1e-12)).any(axis=1)
        return lo, np.where(bad, -np.inf, hi)

    lo, hi = interval(A, b)
    nonempty = hi >= lo
    lo, hi = np.where(nonempty, lo, 0.0), np.where(nonempty, hi, 0.0)
    out = np.zeros(m)
    for spec in specs:
        if spec.k == 0:
            f0 = spec.values(np.zeros((m, P.n, 0)))
            ends = 0.5 * (U.contains(p + lo[:, None] * q).astype(float) + U.contains(p + hi[:, None] * q))
            out += np.where(nonempty, f0 * ends, 0.0)
        elif spec.k == 1:
            if U.is_all:
                ulo, uhi = lo, hi
            else:
                blo, bhi = interval(*U.halfspaces())
                ulo, uhi = np.maximum(lo, blo), np.minimum(hi, bhi)
            length = np.where(nonempty, np.clip(uhi - ulo, 0.0, None), 0.0)
            f1 = spec.values(Q) if np.any(length > 0) else np.zeros(m)
            out += f1 * length
    return out


def vk_action(
    specs: WeightSpec | Sequence[WeightSpec],
    P: Polytope,
    U: BorelBox = ALL,
    k: int = 1,
    meas: FlatMeasure | None = None,
    samples: int = DEFAULT_FLATS,
    seed: int | None = 0,
    angle_samples: int = 20_000,
) -> CroftonResult:
    """``(V_k · Ψ)(P, U)``: calibrated flat average of ``Ψ(P ∩ E, U)``.

    Lines (``d = 1``) use a vectorized chord computation.  Other dimensions
    slice and evaluate flat by flat; a degenerate slice is replaced by a
    fresh flat from the same stream.
    """
    spec_list = _as_specs(specs)
    meas = _prepared(P, k, meas, samples, seed)
    center = P.center
    if P.radius > meas.radius * (1 + 1e-12):
        raise ValueError("body does not fit in the window")

    def draw(rng, m):
        G, Y = _draw(meas, rng, m)
        Q = complement_batch(G) if meas.k else np.broadcast_to(np.eye(P.n), (m, P.n, P.n))
        if meas.d == 1:
            return _segment_terms(spec_list, P, U, center, G, Y, Q)
        vals = np.zeros(m)
        for i in range(m):
            g, y, q = G[i], Y[i], Q[i]
            while True:
                try:
                    S = slice_polytope(P, center + g @ y, q)
                    break
                except DegenerateSlice:
                    g1, y1 = _draw(meas, rng, 1)
                    g, y = g1[0], y1[0]
                    q = complement_batch(g1)[0] if meas.k else np.eye(P.n)
            if S is None:
                continue
            vals[i] = evaluate(spec_list, S, U, samples=angle_samples, seed=seed, embedding=(center + g @ y, q)).total
        return vals

    est = _mc.mc_mean(draw, samples, seed, _KEY_EST, meas.n, meas.k)
    return _combine(meas, est)
