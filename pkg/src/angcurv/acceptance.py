"""The ten acceptance checks, shared by the test suite and ``angcurv verify-all``.

Every check uses the fixed seed in :data:`SEEDS`; seeds were chosen once and
are not tuned per run.  ``nsigma`` loosens or tightens the Monte Carlo
tolerance (default 3).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _mc
from .cones import PolyCone, angle_additivity_check, external_angle_estimate
from .crofton import calibrate, crofton_estimate, default_measure, vk_action
from .curvmeas import ConstCoeff, Federer, direct_constcoeff, evaluate, face_angle, intrinsic_volume_estimate, steiner_check
from .exterior import BiGradedForm, symplectic_wedge
from .grassrank import (
    constcoeff_weight_rank,
    dim_formula,
    obstruction_family_check,
    restriction_rank,
    sample_grassmann,
)
from .polytope import BorelBox, Polytope, cube, random_polytope, simplex
from .repcomb import lemma22_dim_check, littlewood_restrict, so_branch_dim_check

SEEDS = {i: 100 + i for i in range(1, 11)}
RANK_CASES = [(3, 1), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3), (6, 2)]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  criterion {self.number:2d}: {self.title} ({self.seconds:.1f} s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, "seconds": self.seconds, "details": self.details}


def _within(diff: float, sigma: float, nsigma: float) -> bool:
    return abs(diff) < nsigma * sigma + 1e-9


def classification_dimension(nsigma: float = 3.0) -> CriterionResult:
    rows, ok = [], True
    for n, k in RANK_CASES:
        t = time.perf_counter()
        r = restriction_rank(n, k, seed=SEEDS[1])
        dt = time.perf_counter() - t
        good = r.rank == dim_formula(n, k) and r.gap >= 1e3 and dt < 60
        ok &= good
        rows.append({**r.to_json(), "seconds": round(dt, 3), "passed": good})
    return CriterionResult(1, "restriction rank equals the dimension formula", ok, details={"cases": rows})


def constcoeff_coincidence(nsigma: float = 3.0) -> CriterionResult:
    rows, ok = [], True
    for n, k in RANK_CASES:
        base = restriction_rank(n, k, seed=SEEDS[2])
        cc = constcoeff_weight_rank(n, k, seed=SEEDS[2])
        good = cc.stable and cc.rank == base.rank and cc.max_residual < 1e-8
        ok &= good
        rows.append({"n": n, "k": k, "restriction_rank": base.rank, "constcoeff_rank": cc.rank, "max_span_residual": cc.max_residual, "passed": good})
    return CriterionResult(2, "constant-coefficient weights span the quadratic restrictions", ok, details={"cases": rows})


def _random_box(rng: np.random.Generator, n: int) -> BorelBox:
    lo = rng.random(n) * 0.6 - 0.1
    return BorelBox(lo, lo + 0.3 + 0.5 * rng.random(n))


def angularity(nsigma: float = 3.0, trials: int = 50) -> CriterionResult:
    rng = _mc.substream(SEEDS[3], 3)
    rows, ok = [], True
    for t in range(trials):
        n = (2, 3, 4)[t % 3]
        k = int(rng.integers(0, n + 1))
        P = random_polytope(rng, n, n + 3 + int(rng.integers(0, 3)))
        om = BiGradedForm.random(n, k, n - k, rng)
        U = _random_box(rng, n)
        a = evaluate(ConstCoeff(om), P, U, seed=SEEDS[3])
        b = direct_constcoeff(om, P, U, samples=100_000, seed=SEEDS[3] + t)
        sig = math.hypot(a.sigma, b.sigma)
        good = _within(a.total - b.total, sig, nsigma)
        ok &= good
        rows.append({"trial": t, "n": n, "k": k, "face_sum": a.total, "direct": b.total, "sigma": sig, "passed": good})
    return CriterionResult(3, "face sum of a constant-coefficient measure equals the direct integral", ok, details={"trials": rows})


def symplectic_kernel(nsigma: float = 3.0) -> CriterionResult:
    rng = _mc.substream(SEEDS[4], 4)
    rows, ok = [], True
    for t in range(20):
        n = (2, 3, 4)[t % 3]
        a = int(rng.integers(0, n - 1))
        eta = BiGradedForm.random(n, a, n - 2 - a, rng)
        gs = sample_grassmann(n, a + 1, 500, seed=SEEDS[4] + t)
        worst = float(np.max(np.abs(ConstCoeff(symplectic_wedge(eta)).values(gs.frames))))
        good = worst < 1e-12
        ok &= good
        rows.append({"n": n, "k": a + 1, "max_abs_weight": worst, "passed": good})
    return CriterionResult(4, "weights of σ∧η vanish", ok, details={"forms": rows})


def steiner(nsigma: float = 3.0) -> CriterionResult:
    bodies = {
        "square": cube(2),
        "cube3": cube(3),
        "triangle": simplex(2),
        "tetrahedron": simplex(3),
        "segment": Polytope([[0, 0], [1, 0]]),
        "point": Polytope([[0, 0]]),
    }
    rows, ok = [], True
    for name, P in bodies.items():
        for eps in (0.1, 0.5, 1.0):
            r = steiner_check(P, eps, samples=1_000_000, seed=SEEDS[5])
            rel = r.sigma / r.target
            good = _within(r.mc - r.target, r.sigma, nsigma) and rel <= 0.005
            ok &= good
            rows.append({"body": name, "eps": eps, "mc": r.mc, "target": r.target, "sigma": r.sigma, "rel_sigma": rel, "passed": good})
    return CriterionResult(5, "tube volume matches the Steiner polynomial", ok, details={"cases": rows})


def _random_cone(rng: np.random.Generator, n: int, rays: int) -> PolyCone:
    axis = rng.standard_normal(n)
    axis /= np.linalg.norm(axis)
    return PolyCone.from_rays(axis + 0.7 * rng.standard_normal((rays, n)))


def external_angles(nsigma: float = 3.0) -> CriterionResult:
    seed = SEEDS[6]
    rng = _mc.substream(seed, 6)
    det: dict = {"orthants": [], "facets": [], "vertex_sums": [], "additivity": []}
    ok = True
    for n in range(1, 6):
        a = external_angle_estimate(PolyCone.from_rays(np.eye(n)), samples=1_000_000, seed=seed)
        good = abs(a.value - 2.0**-n) < 1e-12 if n <= 3 else _within(a.value - 2.0**-n, a.sigma, nsigma)
        good &= a.exact == (n <= 3)
        ok &= good
        det["orthants"].append({"n": n, "angle": a.value, "sigma": a.sigma, "passed": good})
    polys = {
        "cube3": cube(3),
        "tetrahedron": simplex(3),
        "random3": random_polytope(rng, 3, 9),
        "cube4": cube(4),
        "random4": random_polytope(rng, 4, 8),
    }
    for name, P in polys.items():
        facet_angles = [face_angle(P, i, seed=seed) for i, F in enumerate(P.faces) if F.dim == P.dim - 1]
        good = all(g.exact and g.value == 0.5 for g in facet_angles)
        ok &= good
        det["facets"].append({"body": name, "facets": len(facet_angles), "passed": good})
        v = [face_angle(P, i, seed=seed) for i, F in enumerate(P.faces) if F.dim == 0]
        total = sum(g.value for g in v)
        sig = math.sqrt(sum(g.sigma**2 for g in v))
        good = _within(total - 1.0, sig, nsigma) if sig else abs(total - 1.0) < 1e-9
        ok &= good
        det["vertex_sums"].append({"body": name, "sum": total, "sigma": sig, "passed": good})
    for t in range(20):
        n = 3 if t < 10 else 4
        r = angle_additivity_check(_random_cone(rng, n, 5 + t % 3), samples=400_000, seed=seed + t)
        good = r.residual < 1e-10 if r.exact else _within(r.residual, r.sigma, nsigma)
        ok &= good
        det["additivity"].append({"n": n, "pieces": r.pieces, "residual": r.residual, "sigma": r.sigma, "passed": good})
    return CriterionResult(6, "external angle suite", ok, details=det)


def crofton(nsigma: float = 3.0, flats: int = 1_000_000) -> CriterionResult:
    rng = _mc.substream(SEEDS[7], 7)
    rows, ok = [], True
    for n in (2, 3):
        bodies = {"simplex": simplex(n)}
        for i in range(5):
            bodies[f"random{i}"] = random_polytope(rng, n, n + 3 + i)
        for k in range(1, n + 1):
            meas = calibrate(default_measure(n, k, list(bodies.values())), flats, SEEDS[7])
            for name, P in bodies.items():
                r = crofton_estimate(P, k, meas=meas, samples=flats, seed=SEEDS[7])
                target = intrinsic_volume_estimate(P, k, seed=SEEDS[7])
                sig = math.hypot(r.sigma, target.sigma)
                rel = r.sigma / target.total
                good = _within(r.value - target.total, sig, nsigma) and rel <= 0.01
                ok &= good
                rows.append({"n": n, "k": k, "body": name, "crofton": r.value, "sigma": r.sigma, "face_sum": target.total, "rel_sigma": rel, "passed": good})
    return CriterionResult(7, "Crofton estimate matches the face-sum intrinsic volume", ok, details={"cases": rows})


def v1_power(nsigma: float = 3.0, flats: int = 1_000_000) -> CriterionResult:
    r = vk_action(Federer(1), cube(2), k=1, samples=flats, seed=SEEDS[8])
    rel = r.sigma / r.value
    good = _within(r.value - math.pi / 2, r.sigma, nsigma) and rel <= 0.01
    return CriterionResult(8, "(V_1·V_1)(unit square) = π/2", good, details={**r.to_json(), "target": math.pi / 2, "rel_sigma": rel})


def representation_identities(nsigma: float = 3.0) -> CriterionResult:
    t = time.perf_counter()
    lemma = {f"{n},{k}": lemma22_dim_check(n, k) for n in range(2, 11) for k in range(1, n)}
    branch = {f"{n},{k}": so_branch_dim_check(k, n) for n in range(3, 9) for k in range(n // 2 + 1)}
    restr = all(
        littlewood_restrict((2,) * k, n) == {(2,) * i: 1 for i in range(k + 1)} for n in range(2, 11) for k in range(n // 2 + 1)
    )
    dt = time.perf_counter() - t
    good = not any(lemma.values()) and not any(branch.values()) and restr and dt < 1.0
    det = {"tensor_residuals_nonzero": [c for c, v in lemma.items() if v], "branch_residuals_nonzero": [c for c, v in branch.items() if v], "restriction_ok": restr}
    return CriterionResult(9, "representation dimension identities", good, details=det)


def obstruction_family(nsigma: float = 3.0) -> CriterionResult:
    rows, ok = [], True
    for n in (3, 4, 5, 6):
        for k in range(1, max(1, n // 2) + 1):
            for m1 in range(4):
                r = obstruction_family_check(n, k, m1)
                fit_ok = r.fit_residual < 1e-8 if m1 <= 1 else r.fit_residual > 0.01
                good = r.max_error < 1e-10 and fit_ok
                ok &= good
                rows.append({"n": n, "k": k, "m1": m1, "max_error": r.max_error, "fit_residual": r.fit_residual, "passed": good})
    return CriterionResult(10, "highest weight vectors on the test family", ok, details={"cases": rows})


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: classification_dimension,
    2: constcoeff_coincidence,
    3: angularity,
    4: symplectic_kernel,
    5: steiner,
    6: external_angles,
    7: crofton,
    8: v1_power,
    9: representation_identities,
    10: obstruction_family,
}


def run(number: int, nsigma: float = 3.0) -> CriterionResult:
    t = time.perf_counter()
    res = CRITERIA[number](nsigma=nsigma)
    res.seconds = time.perf_counter() - t
    return res


def run_all(numbers=None, nsigma: float = 3.0, report: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for i in numbers or sorted(CRITERIA):
        res = run(i, nsigma)
        if report:
            report(res.line())
        out.append(res)
    return out
