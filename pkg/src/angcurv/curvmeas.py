"""Translation-invariant curvature measures of polytopes.

A measure is given by one weight per degree, a function on k-planes.  On a
polytope it is evaluated by the face sum

    Σ_k Σ_{F k-face} f_k(span F) · γ(F, P) · vol_k(F ∩ U).

Weights from constant bidegree-(k, n-k) forms ω use the convention

    f(E) = ω_{n-k} · ω(e_1, …, e_k ; g_1, …, g_{n-k})

with (e, g) a positively oriented orthonormal frame adapted to E ⊕ E^⊥, the
e's in the base slot and the g's in the fiber slot.  With this constant the
face sum equals the integral of ω over the normal disc current, which
:func:`direct_constcoeff` estimates without touching external angles.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import _mc
from .cones import DEFAULT_SAMPLES, PolyCone, external_angle_estimate, polar_contains_many
from .exterior import BiGradedForm, complement_batch, plucker_coords
from .polytope import ALL, BorelBox, Polytope, distance_to_polytope, face_volume, sample_face, tangent_cone

MC_FLOOR = 1e-9


def ball_volume(k: int) -> float:
    if k < 0:
        raise ValueError("dimension must be >= 0")
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def _frames(frames, k: int) -> np.ndarray:
    f = np.asarray(frames, dtype=float)
    if f.ndim == 2:
        f = f[None]
    if f.shape[-1] != k:
        raise ValueError(f"weight has degree {k}, frame has {f.shape[-1]} vectors")
    return f


def _orientation(frames: np.ndarray, comp: np.ndarray) -> np.ndarray:
    """det[E | G]; +1 except when E is the whole space and G is empty."""
    N, n, k = frames.shape
    if k == n:
        return np.linalg.det(frames) if n else np.ones(N)
    return np.ones(N)


@dataclass(frozen=True)
class Federer:
    k: int

    def values(self, frames) -> np.ndarray:
        return np.ones(_frames(frames, self.k).shape[0])


@dataclass(frozen=True, eq=False)
class Quadratic:
    """``f(E) = p^T Q p`` on Plücker coordinates, Q indexed by sorted k-subsets."""

    n: int
    k: int
    Q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.Q, dtype=float)
        m = math.comb(self.n, self.k)
        if q.shape != (m, m):
            raise ValueError(f"Q must be {m}x{m} for (n, k) = ({self.n}, {self.k})")
        if not np.allclose(q, q.T, rtol=0, atol=1e-12):
            raise ValueError("Q must be symmetric")
        object.__setattr__(self, "Q", q)

    def values(self, frames) -> np.ndarray:
        p = plucker_coords(_frames(frames, self.k))
        return np.einsum("ni,ij,nj->n", p, self.Q, p)


@dataclass(frozen=True, eq=False)
class ConstCoeff:
    omega: BiGradedForm

    @property
    def k(self) -> int:
        return self.omega.base

    @property
    def n(self) -> int:
        return self.omega.n

    def __post_init__(self):
        if self.omega.base + self.omega.fiber != self.omega.n:
            raise ValueError(
                f"form has bidegree ({self.omega.base}, {self.omega.fiber}); need base + fiber = n = {self.omega.n}"
            )

    def values(self, frames) -> np.ndarray:
        f = _frames(frames, self.k)
        g = complement_batch(f)
        pe, pg = plucker_coords(f), plucker_coords(g)
        raw = np.einsum("ni,ij,nj->n", pe, self.omega.coeffs, pg)
        return ball_volume(self.n - self.k) * _orientation(f, g) * raw


@dataclass(frozen=True, eq=False)
class Tabulated:
    """User-supplied weight; evenness is spot-checked on construction."""

    n: int
    k: int
    func: Callable[[np.ndarray], float] = field(repr=False)
    name: str = "tabulated"
    check_even: bool = True

    def __post_init__(self):
        if self.check_even:
            rng = np.random.default_rng(0xE7E7)
            for _ in range(100):
                q, _ = np.linalg.qr(rng.standard_normal((self.n, self.k)))
                flip = q.copy()
                if self.k:
                    flip[:, 0] *= -1
                a, b = float(self.func(q)), float(self.func(flip))
                if abs(a - b) > 1e-10 * max(1.0, abs(a)):
                    raise ValueError(f"weight {self.name!r} is not even: {a} vs {b}")

    def values(self, frames) -> np.ndarray:
        return np.array([float(self.func(f)) for f in _frames(frames, self.k)])


WeightSpec = Union[Federer, Quadratic, ConstCoeff, Tabulated]


def _proj_e1(frame):
    return float(np.sum(frame[0] ** 2))


def _abs_first_plucker(frame):
    return float(abs(plucker_coords(frame[None])[0, 0]))


TABULATED: dict[str, Callable[[np.ndarray], float]] = {
    "proj-e1": _proj_e1,
    "abs-first-plucker": _abs_first_plucker,
}


def weight_eval(w: WeightSpec, frame) -> float:
    return float(w.values(frame)[0])


def weight_from_json(data: dict | str, n: int | None = None) -> WeightSpec:
    if isinstance(data, str):
        data = json.loads(data)
    variant = data.get("variant")
    if variant == "federer":
        return Federer(int(data["k"]))
    if variant == "quadratic":
        return Quadratic(int(data.get("n", n) or 0), int(data["k"]), np.asarray(data["Q"], float))
    if variant == "constcoeff":
        try:
            omega = BiGradedForm.from_json(data["omega"])
        except ValueError as exc:
            raise ValueError(f"omega.{exc}") from exc
        return ConstCoeff(omega)
    if variant in ("tabulated", "tabulated-id"):
        ident = data.get("id")
        if ident not in TABULATED:
            raise ValueError(f"id: unknown tabulated weight {ident!r}; known: {sorted(TABULATED)}")
        return Tabulated(int(data.get("n", n) or 0), int(data["k"]), TABULATED[ident], name=ident)
    raise ValueError(f"variant: unknown {variant!r}")


def weight_to_json(w: WeightSpec) -> dict:
    if isinstance(w, Federer):
        return {"variant": "federer", "k": w.k}
    if isinstance(w, Quadratic):
        return {"variant": "quadratic", "n": w.n, "k": w.k, "Q": w.Q.tolist()}
    if isinstance(w, ConstCoeff):
        return {"variant": "constcoeff", "k": w.k, "omega": w.omega.to_json()}
    return {"variant": "tabulated-id", "n": w.n, "k": w.k, "id": w.name}


# -- face sums ---------------------------------------------------------------


@dataclass(frozen=True)
class CurvatureEvaluation:
    contributions: dict[int, float]
    sigmas: dict[int, float]
    exact: bool = True

    @property
    def total(self) -> float:
        return float(sum(self.contributions.values()))

    @property
    def sigma(self) -> float:
        return math.sqrt(sum(s * s for s in self.sigmas.values()))

    def agrees(self, other: "CurvatureEvaluation", nsigma: float = 3.0) -> bool:
        return abs(self.total - other.total) < nsigma * math.hypot(self.sigma, other.sigma) + MC_FLOOR

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "sigma": self.sigma,
            "exact": self.exact,
            "contributions": {str(k): v for k, v in self.contributions.items()},
            "sigmas": {str(k): v for k, v in self.sigmas.items()},
        }


def face_angle(P: Polytope, face_index: int, samples: int = DEFAULT_SAMPLES, seed: int | None = 0):
    """External angle γ(F, P) of ``P.faces[face_index]``, cached on the polytope."""
    cache = P.__dict__.setdefault("_angle_cache", {})
    key = (face_index, samples, seed)
    if key not in cache:
        F = P.faces[face_index]
        cache[key] = external_angle_estimate(tangent_cone(P, F), samples, seed, key=(face_index,))
    return cache[key]


def _as_specs(w) -> list[WeightSpec]:
    if isinstance(w, dict):
        return list(w.values())
    if isinstance(w, (list, tuple)):
        return list(w)
    return [w]


def evaluate(
    w: WeightSpec | Sequence[WeightSpec],
    P: Polytope,
    U: BorelBox = ALL,
    samples: int = DEFAULT_SAMPLES,
    seed: int | None = 0,
    embedding: tuple[np.ndarray, np.ndarray] | None = None,
) -> CurvatureEvaluation:
    """Face sum of ``w`` over ``P`` localized to ``U``.

    ``embedding=(p, Q)`` treats ``P`` as living in the flat ``p + Q R^d``
    of a larger space: weights see the ambient frames ``Q B`` and ``U`` is
    intersected in ambient coordinates.  External angles are intrinsic and
    computed inside ``P``'s own space.
    """
    Q = None if embedding is None else np.asarray(embedding[1], dtype=float)
    contrib: dict[int, float] = {}
    sig: dict[int, float] = {}
    exact = True
    for spec in _as_specs(w):
        k = spec.k
        tot, var = 0.0, 0.0
        for idx, F in enumerate(P.faces):
            if F.dim != k:
                continue
            frame = F.affine_basis if Q is None else Q @ F.affine_basis
            f = float(spec.values(frame)[0])
            if f == 0.0:
                continue
            vol = face_volume(F, U, embedding=embedding)
            if vol == 0.0:
                continue
            g = face_angle(P, idx, samples, seed)
            exact &= g.exact
            tot += f * g.value * vol
            var += (f * vol * g.sigma) ** 2
        contrib[k] = contrib.get(k, 0.0) + tot
        sig[k] = math.hypot(sig.get(k, 0.0), math.sqrt(var))
    return CurvatureEvaluation(contrib, sig, exact)


def intrinsic_volume_estimate(P: Polytope, k: int, samples: int = DEFAULT_SAMPLES, seed: int | None = 0):
    return evaluate(Federer(k), P, ALL, samples, seed)


def intrinsic_volume(P: Polytope, k: int, samples: int = DEFAULT_SAMPLES, seed: int | None = 0) -> float:
    return intrinsic_volume_estimate(P, k, samples, seed).total


@dataclass(frozen=True)
class SteinerResult:
    mc: float
    mc_sigma: float
    target: float
    target_sigma: float

    @property
    def residual(self) -> float:
        return abs(self.mc - self.target)

    @property
    def sigma(self) -> float:
        return math.hypot(self.mc_sigma, self.target_sigma)

    def passed(self, nsigma: float = 3.0) -> bool:
        return self.residual < nsigma * self.sigma + MC_FLOOR


def steiner_polynomial(P: Polytope, eps: float, samples: int = DEFAULT_SAMPLES, seed: int | None = 0):
    """``Σ_k ω_{n-k} ε^{n-k} V_k(P)`` and its error from MC angles."""
    n = P.n
    val, var = 0.0, 0.0
    for k in range(P.dim + 1):
        v = intrinsic_volume_estimate(P, k, samples, seed)
        c = ball_volume(n - k) * eps ** (n - k)
        val += c * v.total
        var += (c * v.sigma) ** 2
    return val, math.sqrt(var)


def steiner_check(P: Polytope, eps: float, samples: int = 1_000_000, seed: int | None = 0) -> SteinerResult:
    """Tube volume by rejection sampling in the ε-enlarged bounding box vs the Steiner polynomial."""
    if eps <= 0:
        raise ValueError("ε must be positive")
    lo = P.vertices_float.min(axis=0) - eps
    hi = P.vertices_float.max(axis=0) + eps
    box = float(np.prod(hi - lo))

    def draw(rng, m):
        x = lo + (hi - lo) * rng.random((m, P.n))
        return distance_to_polytope(P, x) <= eps

    est = _mc.indicator_mean(draw, samples, seed, 0x57E1)
    target, tsig = steiner_polynomial(P, eps, seed=seed)
    return SteinerResult(box * est.value, box * est.sigma, target, tsig)


# -- independent oracle for constant-coefficient measures ---------------------


def direct_constcoeff(
    omega: BiGradedForm,
    P: Polytope,
    U: BorelBox = ALL,
    samples: int = 100_000,
    seed: int | None = 0,
) -> CurvatureEvaluation:
    """Integral of ω over the part of the normal disc current above ``U``.

    For each k-face the integrand is constant (ω on the oriented tangent
    frame of F × fiber), so the integral is that constant times the measure
    of ``(F ∩ U) × (polar cone ∩ unit ball of F^⊥)``.  Both factors are
    sampled jointly: a uniform point on F tested against U, and a uniform
    point in the fiber ball tested against the polar cone, built from all
    ``v − b`` so no angle or clipping code is reused.
    """
    n, k = omega.n, omega.base
    if omega.fiber != n - k:
        raise ValueError("form must have bidegree (k, n - k)")
    total, var = 0.0, 0.0
    exact = True
    for idx, F in enumerate(P.faces):
        if F.dim != k:
            continue
        E = F.affine_basis
        G = complement_batch(E[None])[0]
        frame = np.zeros((2 * n, n))
        frame[:n, :k] = E
        frame[n:, k:] = G
        sign = float(_orientation(E[None], G[None])[0])
        c = sign * omega.evaluate(frame)
        if c == 0.0:
            continue
        vol = F.volume
        if k == n and U.is_all:
            total += c * vol
            continue
        if k == n:
            est = _mc.indicator_mean(lambda rng, m, F=F: U.contains(sample_face(F, rng, m)), samples, seed, 0xDC, idx)
            exact = False
            total += c * vol * est.value
            var += (c * vol * est.sigma) ** 2
            continue
        cone = PolyCone(n, P.vertices_float - F.barycenter, E.T)
        weight = c * vol * ball_volume(n - k)

        def draw(rng, m, F=F, G=G, cone=cone):
            x = sample_face(F, rng, m)
            xi = _mc.uniform_ball(rng, m, n - k) @ G.T
            return U.contains(x) & polar_contains_many(cone, xi)

        est = _mc.indicator_mean(draw, samples, seed, 0xDC, idx)
        exact = False
        total += weight * est.value
        var += (weight * est.sigma) ** 2
    return CurvatureEvaluation({k: total}, {k: math.sqrt(var)}, exact)
