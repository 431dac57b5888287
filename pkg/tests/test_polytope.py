import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull
from scipy.stats import special_ortho_group

from angcurv.polytope import (
    ALL,
    BorelBox,
    DegenerateSlice,
    Polytope,
    cube,
    distance_to_polytope,
    face_volume,
    face_volume_estimate,
    random_polytope,
    regular_polygon,
    simplex,
    slice_polytope,
    tangent_cone,
)


def euler(P):
    return sum((-1) ** k * c for k, c in enumerate(P.f_vector()))


def test_face_counts():
    assert cube(2).f_vector() == [4, 4, 1]
    assert simplex(3).f_vector() == [4, 6, 4, 1]
    assert cube(3).f_vector() == [8, 12, 6, 1]
    assert cube(4).f_vector() == [16, 32, 24, 8, 1]
    cross = Polytope([s * np.eye(3)[i] for i in range(3) for s in (1, -1)])
    assert cross.f_vector() == [6, 12, 8, 1]


def test_non_extreme_points_dropped():
    P = Polytope([[0, 0], [1, 0], [0, 1], [1, 1], ["1/2", "1/2"], [1, "1/3"]])
    assert len(P.vertices) == 4
    assert P.f_vector() == [4, 4, 1]


def test_lower_dimensional_polytope():
    tri = Polytope([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert tri.dim == 2
    assert tri.f_vector() == [3, 3, 1]
    assert len(tri.equalities) == 1
    seg = Polytope([[0, 0, 0], [1, 1, 1], ["1/2", "1/2", "1/2"]])
    assert seg.dim == 1 and len(seg.vertices) == 2
    pt = Polytope([[3, 4]])
    assert pt.f_vector() == [1]


def test_euler_relation_random():
    rng = np.random.default_rng(0)
    for n, m in [(2, 9), (3, 10), (3, 14), (4, 10), (5, 9)]:
        P = random_polytope(rng, n, m)
        assert euler(P) == 1


def test_vertices_on_enough_facets():
    rng = np.random.default_rng(1)
    P = random_polytope(rng, 3, 12)
    for i, v in enumerate(P.vertices):
        tight = sum(1 for a, b in P.facets if sum(x * y for x, y in zip(a, v)) == b)
        assert all(sum(x * y for x, y in zip(a, v)) <= b for a, b in P.facets)
        assert tight >= P.n


def test_facets_match_scipy_hull():
    rng = np.random.default_rng(2)
    P = random_polytope(rng, 3, 15)
    hull = ConvexHull(P.vertices_float)
    normals = {tuple(np.round(eq[:3], 8)) for eq in hull.equations}
    assert len(normals) == len(P.faces_of_dim(2))
    assert P.volume == pytest.approx(hull.volume, rel=1e-12)


def test_affine_basis_spans_face():
    P = cube(3)
    for F in P.faces:
        B = F.affine_basis
        assert B.shape == (3, F.dim)
        assert np.allclose(B.T @ B, np.eye(F.dim))
        diff = F.vertices - F.vertices[0]
        assert np.allclose(diff - diff @ B @ B.T, 0)


def test_tangent_cone_examples():
    sq = cube(2)
    vtx = next(f for f in sq.faces_of_dim(0) if f.vertex_indices == (0,))
    c = tangent_cone(sq, vtx)
    assert c.lineality_dim == 0
    assert sorted(map(tuple, np.round(c.generators, 12))) == [(0.0, 1.0), (1.0, 0.0)]
    edge = sq.faces_of_dim(1)[0]
    c = tangent_cone(sq, edge)
    assert c.lineality_dim == 1
    c = tangent_cone(sq, sq.whole)
    assert c.lineality_dim == 2


def test_tangent_cone_lineality_equals_face_dim():
    rng = np.random.default_rng(3)
    P = random_polytope(rng, 3, 9)
    for F in P.faces:
        assert tangent_cone(P, F).lineality_dim == F.dim


def test_face_volume_examples():
    seg = Polytope([[0], [1]])
    assert face_volume(seg.whole) == 1.0
    sq = cube(2)
    top = next(f for f in sq.faces_of_dim(1) if np.all(f.vertices[:, 1] == 1))
    assert face_volume(top, BorelBox([0, 0], [0.5, 1])) == pytest.approx(0.5)
    assert face_volume(sq.whole, BorelBox([0, 0], [0.5, 0.5])) == pytest.approx(0.25)
    tri = Polytope([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert face_volume(tri.whole) == pytest.approx(math.sqrt(3) / 4, rel=1e-12)


def test_face_volume_tilted_faces():
    # facet of the 3-simplex opposite the origin: equilateral, side √2
    S = simplex(3)
    far = next(f for f in S.faces_of_dim(2) if 0 not in f.vertex_indices)
    assert face_volume(far) == pytest.approx(math.sqrt(3) / 2, rel=1e-14)
    diag = next(f for f in S.faces_of_dim(1) if f.vertex_indices == (1, 2))
    assert face_volume(diag) == pytest.approx(math.sqrt(2), rel=1e-14)


def test_box_volume_exact_matches_mc():
    rng = np.random.default_rng(4)
    P = random_polytope(rng, 3, 10)
    U = BorelBox([0.2, 0.1, 0.3], [0.7, 0.8, 0.9])
    for F in P.faces:
        exact = face_volume(F, U)
        est = face_volume_estimate(F, U, method="mc", samples=40_000, seed=5)
        assert abs(exact - est.value) <= 4 * est.sigma + 1e-12


def test_box_volume_monotone():
    rng = np.random.default_rng(6)
    P = random_polytope(rng, 3, 10)
    small = BorelBox([0.3, 0.3, 0.3], [0.6, 0.6, 0.6])
    mid = BorelBox([0.2, 0.2, 0.1], [0.7, 0.8, 0.7])
    for F in P.faces:
        a, b, c = face_volume(F, small), face_volume(F, mid), face_volume(F)
        assert a <= b + 1e-12 and b <= c + 1e-12


def test_distance_examples():
    sq = cube(2)
    assert distance_to_polytope(sq, [0.5, 0.5]) == 0.0
    assert distance_to_polytope(sq, [2, 0.5]) == pytest.approx(1.0)
    assert distance_to_polytope(sq, [2, 2]) == pytest.approx(math.sqrt(2))
    assert distance_to_polytope(cube(3), [0.2, 0.4, 0.9]) == 0.0


def test_distance_lipschitz_and_brute_force():
    rng = np.random.default_rng(7)
    P = random_polytope(rng, 3, 10)
    x = rng.normal(0.5, 1.0, (1000, 3))
    y = x + rng.normal(0, 0.3, (1000, 3))
    dx, dy = distance_to_polytope(P, x), distance_to_polytope(P, y)
    assert np.all(np.abs(dx - dy) <= np.linalg.norm(x - y, axis=1) + 1e-12)
    # brute force: minimize over a fine sample of the polytope
    w = rng.dirichlet(np.ones(len(P.vertices)) * 0.3, size=20_000)
    cloud = w @ P.vertices_float
    for i in range(20):
        assert dx[i] <= np.min(np.linalg.norm(cloud - x[i], axis=1)) + 1e-12


def test_slice_examples():
    sq = cube(2)
    seg = slice_polytope(sq, [0.5, 0], [[0], [1]])
    assert seg.dim == 1 and seg.whole.volume == pytest.approx(1.0)
    assert slice_polytope(sq, [2, 0], [[0], [1]]) is None


def test_slice_cube_generic_planes():
    rng = np.random.default_rng(8)
    C = cube(3)
    for _ in range(50):
        q, _ = np.linalg.qr(rng.standard_normal((3, 2)))
        S = slice_polytope(C, [0.5, 0.5, 0.5], q)
        assert S.dim == 2 and len(S.vertices) in (3, 4, 5, 6)
        # every vertex of the slice is a point of the cube boundary on the plane
        pts = 0.5 + S.vertices_float @ q.T
        assert np.all(pts >= -1e-9) and np.all(pts <= 1 + 1e-9)
        assert np.all(np.min(np.minimum(np.abs(pts), np.abs(pts - 1)), axis=1) < 1e-9)


def test_slice_degenerate_touch():
    with pytest.raises(DegenerateSlice):
        slice_polytope(cube(2), [1, 1], [[1], [-1]])


def test_json_roundtrip_and_errors():
    P = Polytope([[0, 0], ["1/3", 0], [0, "2/7"]])
    back = Polytope.from_json(P.to_json())
    assert back.vertices == P.vertices
    assert back.vertices[1][0] == Fraction(1, 3)
    with pytest.raises(ValueError, match=r"vertices\[1\]\[0\]"):
        Polytope.from_json({"n": 2, "vertices": [[0, 0], ["x/2", 1]]})
    with pytest.raises(ValueError, match=r"vertices\[2\]"):
        Polytope.from_json({"n": 2, "vertices": [[0, 0], [1, 1], [1]]})


def test_box_json():
    assert BorelBox.from_json("ALL").is_all
    b = BorelBox.from_json({"lo": [0, 0], "hi": [1, 2]})
    assert np.all(b.hi == [1, 2])
    with pytest.raises(ValueError):
        BorelBox([1, 0], [0, 1])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_rigid_motion_preserves_volume_and_lattice(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 3, 8)
    q = special_ortho_group.rvs(3, random_state=rng)
    Q = P.transform(q, t=[1, 2, 3])
    assert Q.f_vector() == P.f_vector()
    assert Q.volume == pytest.approx(P.volume, rel=1e-9)


def test_regular_polygon():
    P = regular_polygon(6)
    assert P.f_vector() == [6, 6, 1]
    assert P.volume == pytest.approx(3 * math.sqrt(3) / 2, rel=1e-12)
    assert euler(P) == 1
    assert ALL.is_all
