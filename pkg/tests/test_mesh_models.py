"""Hyperbolic meshes, the intrinsic distance oracle and the three continuum models.

Oracles: Floyd-Warshall written out in numpy for shortest paths, the
arcosh form of hyperbolic distance, and the scalar cosh law evaluated with
the math module.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorentzcauchy.errors import InputError, InvariantError
from lorentzcauchy.mesh import (
    HyperbolicMesh,
    IntrinsicDistanceOracle,
    build_disk_mesh,
    hyperbolic_distance,
    minkowski_inner,
    polar_point,
)
from lorentzcauchy.models import (
    ConeModel,
    MinkowskiModel,
    StripModel,
    cone_causal,
    cone_distance,
    minkowski_distance,
    minkowski_slice,
    strip_slice,
)


def floyd_warshall(mesh):
    n = mesh.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for (a, b), w in zip(mesh.edges, mesh.weights):
        d[a, b] = d[b, a] = min(d[a, b], w)
    for k in range(n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


def cosh_law_squared(ra, rb, D):
    """Squared scalar cone distance: ra^2 + rb^2 - 2 ra rb cosh D inside the cone, else 0."""
    if ra == 0:
        return rb * rb
    if rb < ra * math.exp(D):
        return 0.0
    return max(ra * ra + rb * rb - 2 * ra * rb * math.cosh(D), 0.0)


# -- hyperbolic primitives ---------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(r1=st.floats(0, 3), r2=st.floats(0, 3), a1=st.floats(0, 6.3), a2=st.floats(0, 6.3))
def test_chord_form_matches_arcosh(r1, r2, a1, a2):
    # compare in cosh space: arcosh loses half the digits near 1
    u, v = polar_point(r1, a1), polar_point(r2, a2)
    direct = -float(minkowski_inner(u, v))
    assert math.cosh(float(hyperbolic_distance(u, v))) == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_polar_point_on_hyperboloid():
    p = polar_point(np.linspace(0, 3, 7), np.linspace(0, 6, 7))
    np.testing.assert_allclose(minkowski_inner(p, p), -1.0, atol=1e-12)


# -- mesh construction --------------------------------------------------------------


def test_fan_mesh_boundary_at_radius():
    m = build_disk_mesh(1.0, 1)
    assert m.n == 7
    rho = hyperbolic_distance(m.vertices[0], m.vertices[1:])
    np.testing.assert_allclose(rho, 1.0, atol=m.tolerance)
    assert m.invariant_failures() == []


def test_resolution_four_vertex_count(disk4):
    assert disk4.n == 331


@pytest.mark.parametrize("bad", [dict(radius=0, resolution=2), dict(radius=1, resolution=0), dict(radius=1, resolution=1.5)])
def test_disk_rejects_bad_parameters(bad):
    with pytest.raises(InputError):
        build_disk_mesh(**bad)


def test_dijkstra_matches_floyd_warshall(disk2):
    oracle = IntrinsicDistanceOracle.from_mesh(disk2)
    np.testing.assert_allclose(oracle.matrix, floyd_warshall(disk2), rtol=0, atol=1e-12)


def test_oracle_within_two_percent_of_hyperbolic(disk4, cone4):
    d = cone4.oracle.matrix
    h = hyperbolic_distance(disk4.vertices[:, None, :], disk4.vertices[None, :, :])
    assert (d >= h - 1e-9).all()  # paths never beat geodesics
    rho = np.arccosh(disk4.vertices[:, 0])
    rim = np.flatnonzero(np.abs(rho - 1.0) < 1e-9)
    assert d[0, rim].max() == pytest.approx(1.0, rel=0.02)


def test_annulus_detours_around_hole(annulus):
    oracle = IntrinsicDistanceOracle.from_mesh(annulus)
    v = annulus.vertices
    rho = np.arccosh(v[:, 0])
    inner = np.flatnonzero(np.abs(rho - 0.5) < 1e-9)
    theta = np.arctan2(v[inner, 2], v[inner, 1])
    a = inner[0]
    b = inner[np.argmin(np.abs(np.angle(np.exp(1j * (theta - theta[0] - np.pi)))))]
    ambient = float(hyperbolic_distance(v[a], v[b]))
    assert ambient == pytest.approx(1.0, abs=1e-9)
    assert oracle.matrix[a, b] > ambient * 1.2


def test_mesh_invariant_detects_off_sheet():
    v = polar_point([0.0, 0.5, 0.5], [0.0, 0.0, 2.0])
    v[2, 0] += 0.1
    m = HyperbolicMesh(v, [[0, 1], [1, 2]])
    assert m.invariant_failures()[0][0] == "on_hyperboloid"
    with pytest.raises(InvariantError):
        m.check()


def test_mesh_invariant_detects_disconnected():
    v = polar_point([0.0, 0.5, 0.5, 0.5], [0.0, 0.0, 2.0, 4.0])
    m = HyperbolicMesh(v, [[0, 1], [2, 3]])
    assert ("connected", 2) in m.invariant_failures()


def test_mesh_rejects_bad_edges():
    v = polar_point([0.0, 0.5], [0.0, 0.0])
    with pytest.raises(InputError):
        HyperbolicMesh(v, [[0, 2]])
    with pytest.raises(InputError):
        HyperbolicMesh(v, [[1, 1]])


def test_mesh_json_round_trip(disk2, tmp_path):
    disk2.save(tmp_path / "m.json")
    back = HyperbolicMesh.load(tmp_path / "m.json")
    np.testing.assert_array_equal(back.vertices, disk2.vertices)
    np.testing.assert_array_equal(back.edges, disk2.edges)


def test_oracle_cache_round_trip(cone2, tmp_path):
    cone2.oracle.save(tmp_path / "o.bin")
    back = IntrinsicDistanceOracle.load(tmp_path / "o.bin")
    np.testing.assert_array_equal(back.matrix, cone2.oracle.matrix)
    (tmp_path / "bad.bin").write_bytes(b"NOTMAGIC" + b"\0" * 16)
    with pytest.raises(InputError):
        IntrinsicDistanceOracle.load(tmp_path / "bad.bin")


def test_shortest_path_length_matches_oracle(cone4, disk4):
    path = disk4.shortest_path(0, 300)
    length = sum(cone4.oracle.matrix[a, b] for a, b in zip(path, path[1:]))
    assert length == pytest.approx(cone4.oracle.matrix[0, 300], abs=1e-12)


# -- cone distance ------------------------------------------------------------------


def test_cone_distance_examples():
    assert cone_distance(1.0, 3.0, 0.0) == 2.0
    assert float(cone_distance(1.0, 2.0, 0.5)) == pytest.approx(math.sqrt(5 - 4 * math.cosh(0.5)), abs=1e-15)
    assert float(cone_distance(1.0, 2.0, 0.5)) == pytest.approx(0.699640, abs=1e-6)
    assert cone_distance(1.0, 2.0, 1.0) == 0.0
    assert cone_distance(0.0, 2.0, 5.0) == 2.0


@settings(max_examples=200, deadline=None)
@given(ra=st.floats(0.01, 10), lam=st.floats(0, 3), D=st.floats(0, 3))
def test_cone_distance_matches_cosh_law(ra, lam, D):
    # squares avoid the oracle's own cancellation near the null cone
    rb = ra * math.exp(lam)
    expect = cosh_law_squared(ra, rb, D)
    got = float(cone_distance(ra, rb, D))
    assert got * got == pytest.approx(expect, rel=1e-9, abs=1e-12 * rb * rb)


@settings(max_examples=100, deadline=None)
@given(ra=st.floats(0.0, 10), drb=st.floats(0, 10))
def test_same_ray_is_exact_difference(ra, drb):
    rb = ra + drb
    assert float(cone_distance(ra, rb, 0.0)) == rb - ra


@settings(max_examples=100, deadline=None)
@given(ra=st.floats(0.2, 5), lam=st.floats(0.05, 2), frac=st.floats(0, 0.5), delta=st.floats(1e-6, 1e-3))
def test_cone_distance_continuity(ra, lam, frac, delta):
    # the radial derivative is unbounded at the null cone, so only deep timelike pairs (D <= lam/2)
    D = frac * lam
    rb = ra * math.exp(lam)
    d0 = float(cone_distance(ra, rb, D))
    d1 = float(cone_distance(ra, rb + delta, D))
    d2 = float(cone_distance(ra - delta, rb, D))
    bound = delta * (math.cosh(D) + 1) + 1e-9
    assert abs(d1 - d0) <= bound
    assert abs(d2 - d0) <= bound


def test_cone_causal_condition():
    assert cone_causal(1.0, math.e, 1.0)
    assert not cone_causal(1.0, 2.0, 1.0)
    assert cone_causal(0.0, 1.0, 3.0)


def test_cone_model_reverse_triangle(cone2, rng):
    n = cone2.n_vertices
    P = np.column_stack([rng.integers(n, size=60), np.exp(rng.uniform(-1, 2, size=60))])
    P = np.vstack([[0, 0.0], P])
    D = cone2.dist_matrix(P, P)
    C = cone2.causal_matrix(P, P)
    tol = cone2.tolerance
    lhs = D[:, :, None] + D[None, :, :]
    mask = C[:, :, None] & C[None, :, :]
    excess = np.where(mask, lhs - D[:, None, :], -np.inf)
    assert excess.max() <= tol * max(1.0, D.max())


def test_cone_model_rejects_bad_points(cone2):
    with pytest.raises(InputError):
        cone2.dist_matrix([[0, -1.0]], [[0, 1.0]])
    with pytest.raises(InputError):
        cone2.dist_matrix([[cone2.n_vertices, 1.0]], [[0, 1.0]])


def test_apex_is_causal_boundary(cone2):
    assert cone2.in_causal_boundary(ConeModel.apex(), "past")
    assert not cone2.in_causal_boundary([[0, 1.0]], "past")
    assert not cone2.in_causal_boundary(ConeModel.apex(), "future")


# -- Minkowski and strip -------------------------------------------------------------


@pytest.mark.parametrize("a, b, d", [((0, 0), (2, 1), math.sqrt(3)), ((0, 0), (1, 1), 0.0), ((0, 0), (-1, 0), 0.0)])
def test_minkowski_distance_examples(a, b, d):
    assert float(minkowski_distance(np.array(a, float), np.array(b, float))) == pytest.approx(d, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(
    pts=st.lists(
        st.tuples(st.fractions(-20, 20, max_denominator=16), st.fractions(-20, 20, max_denominator=16)),
        min_size=3,
        max_size=3,
    )
)
def test_minkowski_reverse_triangle_on_rationals(pts):
    x, y, z = (np.array([float(t), float(s)]) for t, s in pts)
    m = MinkowskiModel()
    C = m.causal_matrix(np.array([x, y]), np.array([y, z]))
    if C[0, 0] and C[1, 1]:
        lhs = float(minkowski_distance(x, y) + minkowski_distance(y, z))
        assert lhs <= float(minkowski_distance(x, z)) + 1e-9


def test_strip_slice_grid():
    np.testing.assert_array_equal(strip_slice(0.5, (-1, 1), 3), [[0.5, -1], [0.5, 0], [0.5, 1]])
    with pytest.raises(InputError):
        strip_slice(1.0)
    assert minkowski_slice(0.0).shape == (21, 2)


def test_vertical_pair_distance():
    m = StripModel()
    assert float(m.dist_matrix([[0.2, 0.0]], [[0.7, 0.0]])[0, 0]) == pytest.approx(0.5, abs=1e-15)


def test_strip_contains():
    m = StripModel()
    np.testing.assert_array_equal(m.contains([[0.5, 3], [0.0, 0], [1.0, 0], [0.02, 0]], 0.05), [True, False, False, False])
