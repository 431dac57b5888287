import math

import numpy as np
import pytest
from scipy.stats import special_ortho_group

from angcurv.curvmeas import (
    ConstCoeff,
    Federer,
    Quadratic,
    Tabulated,
    ball_volume,
    direct_constcoeff,
    evaluate,
    intrinsic_volume,
    steiner_check,
    weight_eval,
    weight_from_json,
    weight_to_json,
)
from angcurv.exterior import BiGradedForm, symplectic_wedge
from angcurv.polytope import BorelBox, Polytope, cube, random_polytope, regular_polygon, simplex


def test_ball_volume():
    assert ball_volume(0) == 1.0
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    # ω_k = 2π/k · ω_{k-2}
    for k in range(2, 10):
        assert ball_volume(k) == pytest.approx(2 * math.pi / k * ball_volume(k - 2))


def test_weight_examples():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((4, 2)))
    assert weight_eval(Federer(2), q) == 1.0
    assert weight_eval(Quadratic(4, 2, np.eye(6)), q) == pytest.approx(1.0)
    w = ConstCoeff(BiGradedForm.term(2, (0,), (1,)))
    assert weight_eval(w, [[1.0], [0.0]]) == pytest.approx(2.0)
    assert weight_eval(w, [[0.0], [1.0]]) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        weight_eval(Federer(1), q)


def test_constcoeff_weight_even():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4):
        for k in range(n + 1):
            w = ConstCoeff(BiGradedForm.random(n, k, n - k, rng))
            for _ in range(20):
                q, _ = np.linalg.qr(rng.standard_normal((n, k)))
                flip = q.copy()
                if k:
                    flip[:, -1] *= -1
                assert weight_eval(w, q) == pytest.approx(weight_eval(w, flip), abs=1e-12)


def test_quadratic_must_be_symmetric():
    with pytest.raises(ValueError):
        Quadratic(3, 1, np.array([[1, 2, 0], [0, 1, 0], [0, 0, 1]]))


def test_tabulated_evenness_enforced():
    Tabulated(3, 1, lambda f: f[0, 0] ** 2)
    with pytest.raises(ValueError):
        Tabulated(3, 1, lambda f: f[0, 0])


def test_federer_examples():
    assert evaluate(Federer(3), cube(3)).total == pytest.approx(1.0)
    for P in (cube(2), simplex(2), simplex(3), regular_polygon(7)):
        assert evaluate(Federer(0), P).total == pytest.approx(1.0, abs=1e-12)
    assert evaluate(Federer(1), cube(2)).total == pytest.approx(2.0)


def test_intrinsic_volumes_of_cube():
    for n in (2, 3):
        for k in range(n + 1):
            assert intrinsic_volume(cube(n), k) == pytest.approx(math.comb(n, k), abs=1e-12)
    assert intrinsic_volume(simplex(3), 3) == pytest.approx(1 / 6)
    # V_1 of a 3D body is ambient independent: a unit square in R^3 has V_1 = 2
    sq3 = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    assert intrinsic_volume(sq3, 1) == pytest.approx(2.0)
    assert intrinsic_volume(sq3, 2) == pytest.approx(1.0)


def test_vertex_angle_sum_4d_mc():
    P = simplex(4)
    r = evaluate(Federer(0), P, samples=100_000, seed=3)
    assert not r.exact
    assert abs(r.total - 1) < 3 * r.sigma


def test_evaluation_total_is_sum():
    P = random_polytope(np.random.default_rng(2), 3, 9)
    r = evaluate([Federer(k) for k in range(4)], P, BorelBox([0.1] * 3, [0.6] * 3))
    assert r.total == pytest.approx(sum(r.contributions.values()), abs=1e-12)


def test_rigid_motion_invariance():
    rng = np.random.default_rng(3)
    P = random_polytope(rng, 3, 8)
    q = special_ortho_group.rvs(3, random_state=rng)
    Q = P.transform(q)
    for k in range(4):
        assert evaluate(Federer(k), Q).total == pytest.approx(evaluate(Federer(k), P).total, abs=1e-9)


def test_evenness_under_point_reflection():
    rng = np.random.default_rng(4)
    P = random_polytope(rng, 3, 8)
    U = BorelBox([0.2, 0.1, 0.0], [0.9, 0.7, 0.6])
    om = BiGradedForm.random(3, 1, 2, rng)
    specs = [Federer(1), Quadratic(3, 2, np.diag([1.0, 2.0, 3.0])), ConstCoeff(om), Tabulated(3, 1, lambda f: f[0, 0] ** 2)]
    for w in specs:
        a = evaluate(w, P, U).total
        b = evaluate(w, -P, U.transform(-1.0)).total
        assert a == pytest.approx(b, abs=1e-10)


def test_additivity_in_the_box():
    rng = np.random.default_rng(5)
    P = random_polytope(rng, 3, 9)
    left = BorelBox([-1, -1, -1], [0.4, 2, 2])
    right = BorelBox([0.4, -1, -1], [2, 2, 2])
    for k in range(4):
        whole = evaluate(Federer(k), P).total
        assert evaluate(Federer(k), P, left).total + evaluate(Federer(k), P, right).total == pytest.approx(whole, abs=1e-10)


def test_direct_examples():
    P = random_polytope(np.random.default_rng(6), 2, 7)
    vol = direct_constcoeff(BiGradedForm.term(2, (0, 1), ()), P)
    assert vol.total == pytest.approx(P.volume, rel=1e-12)
    sq = cube(2)
    r = direct_constcoeff(BiGradedForm.term(2, (), (0, 1)), sq, samples=200_000, seed=1)
    assert abs(r.total - math.pi) < 3 * r.sigma
    # symplectic multiple pairs to zero
    eta = BiGradedForm.random(3, 0, 1, np.random.default_rng(7))
    r = direct_constcoeff(symplectic_wedge(eta), simplex(3), samples=20_000, seed=1)
    assert abs(r.total) < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_angularity_identity(n):
    rng = np.random.default_rng(10 + n)
    for k in range(n + 1):
        P = random_polytope(rng, n, n + 4)
        om = BiGradedForm.random(n, k, n - k, rng)
        lo = rng.random(n) * 0.5
        U = BorelBox(lo, lo + 0.5)
        a = evaluate(ConstCoeff(om), P, U)
        b = direct_constcoeff(om, P, U, samples=100_000, seed=k)
        assert a.agrees(b)


def test_steiner_examples():
    for P, eps, target in [
        (cube(2), 0.5, 1 + 4 * 0.5 + math.pi * 0.25),
        (Polytope([[0, 0]]), 1.0, math.pi),
        (Polytope([[0, 0], [1, 0]]), 1.0, 2 + math.pi),
    ]:
        r = steiner_check(P, eps, samples=200_000, seed=2)
        assert r.target == pytest.approx(target, rel=1e-12)
        assert r.passed()


def test_weight_json_roundtrip():
    om = BiGradedForm.random(3, 1, 2, np.random.default_rng(8))
    for w in (Federer(2), Quadratic(3, 1, np.eye(3)), ConstCoeff(om)):
        back = weight_from_json(weight_to_json(w))
        q = np.linalg.qr(np.random.default_rng(9).standard_normal((3, w.k)))[0]
        assert weight_eval(back, q) == pytest.approx(weight_eval(w, q))
    t = weight_from_json({"variant": "tabulated-id", "n": 3, "k": 1, "id": "proj-e1"})
    assert weight_eval(t, [[1.0], [0.0], [0.0]]) == 1.0
    with pytest.raises(ValueError, match="variant"):
        weight_from_json({"variant": "nope", "k": 1})
    bad = {"variant": "constcoeff", "k": 1, "omega": {"n": 2, "base": 1, "fiber": 1, "terms": [{"base_idx": [3], "fiber_idx": [1], "coef": 1}]}}
    with pytest.raises(ValueError, match=r"omega\.terms\[0\]"):
        weight_from_json(bad)
