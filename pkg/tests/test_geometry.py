import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysmooth import ElementKind
from polysmooth.errors import DegenerateElement, InvalidPolygon
from polysmooth.fdcheck import fd_gradient, relative_error
from polysmooth.generators import (
    icosahedron_polyhedron,
    random_element_coords,
    random_rotation,
    regular_element_coords,
)
from polysmooth.geometry import (
    FACES,
    element_field,
    element_iq,
    element_iq_gradient,
    element_mean_boundary_area,
    element_mean_volume,
    polygon_normal,
    polyhedron_iq,
    polyhedron_iq_gradient,
    polyhedron_mean_area,
    polyhedron_mean_volume,
    polyhedron_volume_gradient,
    tet_signed_volume,
)

ALL_KINDS = list(ElementKind)

coords3 = st.tuples(
    st.floats(-10, 10, allow_nan=False), st.floats(-10, 10), st.floats(-10, 10)
)


# -- generalized face normal -------------------------------------------------


def test_triangle_normal():
    nu = polygon_normal([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    assert np.allclose(nu, [0, 0, 1], atol=1e-15)


def test_unit_square_normal_is_twice_area():
    nu = polygon_normal([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)])
    assert np.allclose(nu, [0, 0, 2], atol=1e-15)


def test_planar_polygon_norm_is_twice_enclosed_area():
    # irregular planar pentagon; shoelace area as the oracle
    pts2d = np.array([[0, 0], [2, 0], [2.5, 1.2], [1, 2.4], [-0.5, 1.0]])
    shoelace = 0.5 * abs(
        sum(
            pts2d[i, 0] * pts2d[(i + 1) % 5, 1] - pts2d[(i + 1) % 5, 0] * pts2d[i, 1]
            for i in range(5)
        )
    )
    pts = np.column_stack([pts2d, np.zeros(5)])
    nu = polygon_normal(pts)
    assert np.isclose(np.linalg.norm(nu), 2 * shoelace, rtol=1e-13)
    assert nu[2] > 0  # right-hand rule for counterclockwise traversal


@settings(deadline=None, max_examples=40)
@given(st.lists(coords3, min_size=3, max_size=7), coords3)
def test_polygon_normal_translation_invariant(points, shift):
    pts = np.asarray(points, dtype=float)
    t = np.asarray(shift, dtype=float)
    a = polygon_normal(pts)
    b = polygon_normal(pts + t)
    assert np.allclose(a, b, atol=1e-10 * max(1.0, np.abs(pts).max() * np.abs(t).max()))


def test_polygon_normal_needs_three_points():
    with pytest.raises(InvalidPolygon):
        polygon_normal([(0, 0, 0), (1, 0, 0)])


# -- signed volume -------------------------------------------------------------


def test_unit_tet_volume():
    x = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert tet_signed_volume(x) == pytest.approx(1 / 6, rel=1e-15)


def test_coplanar_tet_volume_zero():
    x = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]
    assert tet_signed_volume(x) == 0.0


def test_swap_reverses_sign():
    x = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], dtype=float)
    swapped = x[[0, 1, 3, 2]]
    assert tet_signed_volume(swapped) == pytest.approx(-1 / 6, rel=1e-15)


# -- mean volumes --------------------------------------------------------------


def test_unit_pyramid_mean_volume():
    x = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0.5, 0.5, 1)]
    assert element_mean_volume(ElementKind.PYRAMID, x) == pytest.approx(1 / 3, rel=1e-14)


def test_unit_prism_mean_volume():
    x = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)]
    assert element_mean_volume(ElementKind.PRISM, x) == pytest.approx(1 / 2, rel=1e-14)


def test_unit_cube_mean_volume():
    cube = regular_element_coords(ElementKind.HEXA)
    assert element_mean_volume(ElementKind.HEXA, cube) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_mean_volume_translation_invariant_and_cubic(kind, rng):
    x = random_element_coords(kind, rng)
    v = element_mean_volume(kind, x)
    assert element_mean_volume(kind, x + np.array([3.0, -7.0, 11.0])) == pytest.approx(v, rel=1e-10)
    assert element_mean_volume(kind, 2.0 * x) == pytest.approx(8.0 * v, rel=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_mean_volume_matches_divergence_form(kind, rng):
    # independent route: divergence-theorem volume over the mean-triangulated
    # boundary faces must reproduce the per-kind definitions
    for _ in range(20):
        x = random_element_coords(kind, rng)
        assert polyhedron_mean_volume(FACES[kind], x) == pytest.approx(
            element_mean_volume(kind, x), rel=1e-12, abs=1e-15
        )


# -- transformation field ------------------------------------------------------


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_field_is_six_times_volume_gradient(kind, rng):
    for _ in range(10):
        x = random_element_coords(kind, rng)
        fd = fd_gradient(lambda y: element_mean_volume(kind, y), x)
        assert relative_error(element_field(kind, x) / 6.0, fd) < 1e-6


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_field_degree_two_homogeneity(kind, rng):
    x = random_element_coords(kind, rng)
    assert np.allclose(element_field(kind, 2.0 * x), 4.0 * element_field(kind, x), rtol=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_field_translation_invariant(kind, rng):
    x = random_element_coords(kind, rng)
    f = element_field(kind, x)
    g = element_field(kind, x + np.array([5.0, -2.0, 9.0]))
    assert np.allclose(f, g, atol=1e-11 * max(1.0, np.abs(f).max()))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_field_rotation_equivariant(kind, rng):
    x = random_element_coords(kind, rng)
    r = random_rotation(rng)
    assert np.allclose(element_field(kind, x @ r.T), element_field(kind, x) @ r.T, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_euler_identity(kind, rng):
    for _ in range(25):
        x = random_element_coords(kind, rng)
        lhs = float(np.sum(x * element_field(kind, x)))
        rhs = 18.0 * element_mean_volume(kind, x)
        assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_field_jacobian_symmetric(kind, rng):
    x = random_element_coords(kind, rng, transform=False)
    n = x.size
    h = 1e-6
    jac = np.empty((n, n))
    flat = x.reshape(-1)
    for k in range(n):
        plus, minus = flat.copy(), flat.copy()
        plus[k] += h
        minus[k] -= h
        jac[:, k] = (
            element_field(kind, plus.reshape(-1, 3)) - element_field(kind, minus.reshape(-1, 3))
        ).reshape(-1) / (2 * h)
    asym = np.abs(jac - jac.T).max() / np.abs(jac).max()
    assert asym < 1e-6


def test_regular_tet_field_is_radial():
    x = regular_element_coords(ElementKind.TETRA)
    xc = x - x.mean(axis=0)
    f = element_field(ElementKind.TETRA, xc)
    # parallel to the centered coordinates with one positive factor
    factors = np.linalg.norm(f, axis=1) / np.linalg.norm(xc, axis=1)
    assert np.allclose(factors, factors[0], rtol=1e-12)
    assert np.einsum("ij,ij->i", f, xc).min() > 0
    cross = np.cross(f, xc)
    assert np.abs(cross).max() < 1e-14


# -- mean boundary area --------------------------------------------------------


def test_cube_area_six():
    cube = regular_element_coords(ElementKind.HEXA)
    assert element_mean_boundary_area(ElementKind.HEXA, cube) == pytest.approx(6.0, rel=1e-14)


def test_regular_tet_area_sqrt3():
    x = regular_element_coords(ElementKind.TETRA)
    assert element_mean_boundary_area(ElementKind.TETRA, x) == pytest.approx(math.sqrt(3), rel=1e-13)


def test_planar_quad_mean_area_exact(rng):
    # planar quads: both diagonal splits agree, the mean equals the exact area
    base = np.array([[0, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]], dtype=float)
    pyramid = np.vstack([base, [1.0, 0.5, 3.0]])
    area = element_mean_boundary_area(ElementKind.PYRAMID, pyramid)
    tris = area - 2.0  # quad base contributes its exact area 2
    by_halves = sum(
        0.5 * np.linalg.norm(polygon_normal(pyramid[list(f)]))
        for f in FACES[ElementKind.PYRAMID][1:]
    )
    assert tris == pytest.approx(by_halves, rel=1e-13)


# -- isoperimetric quotient ------------------------------------------------------


def test_cube_iq_exact():
    cube = regular_element_coords(ElementKind.HEXA)
    assert element_iq(ElementKind.HEXA, cube) == pytest.approx(math.sqrt(math.pi / 6.0), rel=1e-12)


def test_regular_tet_iq_from_formula():
    # oracle: direct evaluation from exact unit-edge quantities
    vol = math.sqrt(2) / 12
    area = math.sqrt(3)
    expected = 6 * math.sqrt(math.pi) * vol / area**1.5
    x = regular_element_coords(ElementKind.TETRA)
    assert element_iq(ElementKind.TETRA, x) == pytest.approx(expected, rel=1e-13)
    assert expected < 1.0


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_iq_scale_invariant(kind, rng):
    x = random_element_coords(kind, rng)
    v = element_iq(kind, x)
    assert element_iq(kind, 3.7 * x) == pytest.approx(v, rel=1e-12)
    assert v < 1.0


def test_iq_degenerate_raises():
    flat = np.zeros((8, 3))
    with pytest.raises(DegenerateElement):
        element_iq(ElementKind.HEXA, flat)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_iq_gradient_matches_fd(kind, rng):
    for _ in range(5):
        x = random_element_coords(kind, rng)
        fd = fd_gradient(lambda y: element_iq(kind, y), x)
        assert relative_error(element_iq_gradient(kind, x), fd) < 1e-6


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_iq_gradient_euler_degree_zero(kind, rng):
    x = random_element_coords(kind, rng)
    g = element_iq_gradient(kind, x)
    assert abs(float(np.sum(x * g))) < 1e-12 * max(1.0, np.abs(g).max() * np.abs(x).max())


# -- generic polyhedron ----------------------------------------------------------


def test_icosahedron_iq_gradient_vanishes_at_regular():
    coords, faces = icosahedron_polyhedron()
    g = polyhedron_iq_gradient(faces, coords)
    assert np.abs(g).max() < 1e-14


def test_icosahedron_volume_and_area_closed_forms():
    coords, faces = icosahedron_polyhedron()
    a = 2.0  # edge length
    vol = 5.0 / 12.0 * (3.0 + math.sqrt(5.0)) * a**3
    area = 5.0 * math.sqrt(3.0) * a**2
    assert polyhedron_mean_volume(faces, coords) == pytest.approx(vol, rel=1e-13)
    assert polyhedron_mean_area(faces, coords) == pytest.approx(area, rel=1e-13)


def test_polyhedron_volume_gradient_matches_fd(rng):
    coords, faces = icosahedron_polyhedron()
    x = coords + rng.uniform(-0.1, 0.1, coords.shape)
    fd = fd_gradient(lambda y: polyhedron_mean_volume(faces, y), x)
    assert relative_error(polyhedron_volume_gradient(faces, x), fd) < 1e-6


def test_polyhedron_iq_gradient_matches_fd(rng):
    coords, faces = icosahedron_polyhedron()
    x = coords + rng.uniform(-0.1, 0.1, coords.shape)
    fd = fd_gradient(lambda y: polyhedron_iq(faces, y), x)
    assert relative_error(polyhedron_iq_gradient(faces, x), fd) < 1e-6


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_kind_faces_reproduce_element_iq(kind, rng):
    x = random_element_coords(kind, rng)
    assert polyhedron_iq(FACES[kind], x) == pytest.approx(element_iq(kind, x), rel=1e-12)
