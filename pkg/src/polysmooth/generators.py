"""Built-in test meshes: single elements, structured grids, perturbations.

``regular_element`` returns the stationary shape of the volume-ascent flow
for each kind: the regular tetrahedron and the cube, and for pyramid and
prism the aspect ratios at which the transformation field is exactly radial
(apex height sqrt(5)/2 for a unit base edge, prism height sqrt(2/3) for a
unit triangle edge). Equal-edge pyramids and prisms are not stationary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .mesh import Element, ElementKind, Mesh, make_mesh

_S3 = math.sqrt(3.0)
_PHI = (1.0 + math.sqrt(5.0)) / 2.0

REGULAR_TETRA = np.array(
    [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, _S3 / 2.0, 0.0],
        [0.5, _S3 / 6.0, math.sqrt(6.0) / 3.0],
    ]
)

_ICOSA_VERTICES = np.array(
    [
        [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
        [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
        [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
    ],
    dtype=float,
)

_ICOSA_FACES = (
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
)


def unit_element(kind: ElementKind) -> Mesh:
    """Axis-aligned unit element: tetra vol 1/6, pyramid 1/3, prism 1/2, cube 1."""
    if kind is ElementKind.TETRA:
        pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    elif kind is ElementKind.PYRAMID:
        pts = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0.5, 0.5, 1]]
    elif kind is ElementKind.PRISM:
        pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1]]
    else:
        pts = [
            [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
            [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
        ]
    return make_mesh(np.asarray(pts, dtype=float), [Element(kind, range(len(pts)))])


def regular_element_coords(kind: ElementKind) -> np.ndarray:
    if kind is ElementKind.TETRA:
        return REGULAR_TETRA.copy()
    if kind is ElementKind.PYRAMID:
        h = math.sqrt(5.0) / 2.0
        return np.array(
            [[-0.5, -0.5, 0], [0.5, -0.5, 0], [0.5, 0.5, 0], [-0.5, 0.5, 0], [0, 0, h]]
        )
    if kind is ElementKind.PRISM:
        h = math.sqrt(2.0 / 3.0)
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, _S3 / 2.0]])
        tri -= tri.mean(axis=0)
        bottom = np.hstack([tri, np.full((3, 1), -h / 2.0)])
        top = np.hstack([tri, np.full((3, 1), h / 2.0)])
        return np.vstack([bottom, top])
    return unit_element(ElementKind.HEXA).vertices.copy()


def regular_element(kind: ElementKind) -> Mesh:
    pts = regular_element_coords(kind)
    return make_mesh(pts, [Element(kind, range(len(pts)))])


def tet_with_inner_vertex(inner=None) -> Mesh:
    """Regular unit-edge tetrahedron split into four tets by one inner vertex."""
    outer = REGULAR_TETRA.copy()
    if inner is None:
        inner = outer.mean(axis=0)
    pts = np.vstack([outer, np.asarray(inner, dtype=float)])
    conn = [(0, 1, 2, 4), (0, 3, 1, 4), (0, 2, 3, 4), (1, 3, 2, 4)]
    return make_mesh(pts, [Element(ElementKind.TETRA, c) for c in conn])


def _grid_points(k: int) -> tuple[np.ndarray, callable]:
    axis = np.linspace(0.0, 1.0, k + 1)
    zz, yy, xx = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])

    def vid(ix, iy, iz):
        return ix + iy * (k + 1) + iz * (k + 1) ** 2

    return pts, vid


def hex_grid(k: int) -> Mesh:
    """Structured k x k x k hexahedral grid on the unit cube."""
    if k < 1:
        raise InvalidSpec(f"grid size must be positive, got {k}")
    pts, vid = _grid_points(k)
    elems = []
    for cz in range(k):
        for cy in range(k):
            for cx in range(k):
                b = [vid(cx, cy, cz), vid(cx + 1, cy, cz), vid(cx + 1, cy + 1, cz), vid(cx, cy + 1, cz)]
                t = [v + (k + 1) ** 2 for v in b]
                elems.append(Element(ElementKind.HEXA, b + t))
    return make_mesh(pts, elems)


def tet_grid(k: int) -> Mesh:
    """Structured tetrahedral grid: each cube cell split into six tets.

    All cells use the same main-diagonal split, so shared faces carry
    matching diagonals and the mesh is conforming.
    """
    if k < 1:
        raise InvalidSpec(f"grid size must be positive, got {k}")
    pts, vid = _grid_points(k)
    basis = np.eye(3, dtype=int)
    elems = []
    for cz in range(k):
        for cy in range(k):
            for cx in range(k):
                c0 = np.array([cx, cy, cz])
                for perm in itertools.permutations(range(3)):
                    a = c0 + basis[perm[0]]
                    b = a + basis[perm[1]]
                    quad = [c0, a, b, c0 + 1]
                    parity = sum(
                        1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j]
                    )
                    if parity % 2:
                        quad[1], quad[2] = quad[2], quad[1]
                    elems.append(Element(ElementKind.TETRA, [vid(*q) for q in quad]))
    return make_mesh(pts, elems)


def icosahedron_polyhedron() -> tuple[np.ndarray, tuple[tuple[int, ...], ...]]:
    """Regular icosahedron (edge length 2) as a closed triangulated surface."""
    return _ICOSA_VERTICES.copy(), _ICOSA_FACES


def icosahedron_mesh() -> Mesh:
    """Icosahedron volume mesh: 20 tets fanning out from the centroid."""
    pts = np.vstack([_ICOSA_VERTICES, np.zeros(3)])
    # outward surface faces leave the centroid on their negative side
    elems = [Element(ElementKind.TETRA, (a, c, b, 12)) for a, b, c in _ICOSA_FACES]
    return make_mesh(pts, elems)


def perturb_mesh(mesh: Mesh, eps: float, seed: int = 0, fix_boundary: bool = True) -> Mesh:
    """Displace vertices by at most ``eps`` each; ``eps == 0`` is the identity."""
    if eps < 0:
        raise InvalidSpec(f"perturbation amplitude must be >= 0, got {eps}")
    pts = np.array(mesh.vertices)
    if eps > 0:
        rng = np.random.default_rng(seed)
        direction = rng.standard_normal(pts.shape)
        norms = np.linalg.norm(direction, axis=1, keepdims=True)
        norms[norms < 1e-300] = 1.0
        step = direction / norms * rng.uniform(0.0, eps, size=(pts.shape[0], 1))
        if fix_boundary:
            step[mesh.boundary] = 0.0
        pts += step
    return make_mesh(pts, mesh.elements)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random proper rotation matrix."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_element_coords(
    kind: ElementKind,
    rng: np.random.Generator,
    jitter: float = 0.25,
    transform: bool = True,
) -> np.ndarray:
    """Random valid element coordinates: jittered regular shape, optionally
    rotated, scaled and translated. Resamples until comfortably non-degenerate."""
    from . import geometry

    base = regular_element_coords(kind)
    vol0 = geometry.element_mean_volume(kind, base)
    while True:
        x = base + rng.uniform(-jitter, jitter, size=base.shape)
        if geometry.element_mean_volume(kind, x) > 0.2 * vol0:
            break
    if transform:
        x = x @ random_rotation(rng).T
        x *= rng.uniform(0.5, 2.0)
        x += rng.uniform(-1.0, 1.0, size=3)
    return x


def _house_mesh() -> Mesh:
    """Unit cube with a pyramid on its top face (smallest mixed mesh)."""
    cube = unit_element(ElementKind.HEXA).vertices
    pts = np.vstack([cube, [0.5, 0.5, 1.7]])
    return make_mesh(
        pts,
        [Element(ElementKind.HEXA, range(8)), Element(ElementKind.PYRAMID, (4, 5, 6, 7, 8))],
    )


def random_valid_mesh(rng: np.random.Generator) -> Mesh:
    """Small random mesh with every element valid (positive mean volume).

    Draws from a zoo: single elements of every kind, the inner-vertex tet
    split, a mixed cube+pyramid pair, and perturbed 2x2x2 grids.
    """
    from . import geometry

    pick = rng.integers(0, 8)
    if pick < 4:
        kind = list(ElementKind)[pick]
        return make_mesh(
            random_element_coords(kind, rng), [Element(kind, range(kind.vertex_count))]
        )
    if pick == 4:
        centroid = REGULAR_TETRA.mean(axis=0)
        mesh = tet_with_inner_vertex(centroid + rng.uniform(-0.12, 0.12, size=3))
        base, eps = mesh, 0.05
    elif pick == 5:
        base, eps = _house_mesh(), 0.1
    elif pick == 6:
        base, eps = tet_grid(2), 0.08
    else:
        base, eps = hex_grid(2), 0.08
    for attempt in range(100):
        mesh = perturb_mesh(base, eps, seed=int(rng.integers(2**31)), fix_boundary=False)
        vols = _all_mean_volumes(mesh, geometry)
        if np.all(vols > 0):
            return mesh
    raise RuntimeError("could not draw a valid random mesh")  # pragma: no cover


def _all_mean_volumes(mesh: Mesh, geometry) -> np.ndarray:
    from .mesh import kind_groups

    vols = np.empty(mesh.n_elements)
    for kind, (ids, conn) in kind_groups(mesh).items():
        vols[ids] = geometry.element_mean_volumes(kind, mesh.vertices[conn])
    return vols


@dataclass(frozen=True)
class GeneratorSpec:
    """Named mesh recipe with optional perturbation.

    ``inner`` positions the inner vertex of the ``inner-tet`` configuration;
    ``size`` is the cells-per-side of the structured grids.
    """

    name: str
    size: int = 2
    seed: int = 0
    perturb: float = 0.0
    fix_boundary: bool = True
    inner: tuple[float, float, float] | None = None


GENERATOR_NAMES = tuple(
    [f"unit-{k.value}" for k in ElementKind]
    + [f"regular-{k.value}" for k in ElementKind]
    + ["inner-tet", "tet-cube", "hex-cube", "icosahedron"]
)


def generate(spec: GeneratorSpec) -> Mesh:
    """Build the mesh named by ``spec``, applying any requested perturbation."""
    name = spec.name
    if name.startswith("unit-"):
        mesh = unit_element(_kind_from(name.removeprefix("unit-")))
    elif name.startswith("regular-"):
        mesh = regular_element(_kind_from(name.removeprefix("regular-")))
    elif name == "inner-tet":
        mesh = tet_with_inner_vertex(spec.inner)
    elif name == "tet-cube":
        mesh = tet_grid(spec.size)
    elif name == "hex-cube":
        mesh = hex_grid(spec.size)
    elif name == "icosahedron":
        mesh = icosahedron_mesh()
    else:
        raise InvalidSpec(f"unknown generator {name!r}; expected one of {GENERATOR_NAMES}")
    if spec.perturb:
        mesh = perturb_mesh(mesh, spec.perturb, seed=spec.seed, fix_boundary=spec.fix_boundary)
    return mesh


def _kind_from(token: str) -> ElementKind:
    for kind in ElementKind:
        if kind.value == token:
            return kind
    raise InvalidSpec(f"unknown element kind {token!r}")
