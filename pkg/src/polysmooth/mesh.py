"""Mesh data model: element kinds, canonical orderings, adjacency.

Canonical vertex orderings (0-based in code):

* tetra    -- (0,1,2,3), positive signed volume when valid
* pyramid  -- base (0,1,2,3) counterclockwise seen from the apex, apex 4
* prism    -- bottom triangle (0,1,2), top (3,4,5), vertical edges i <-> i+3
* hexa     -- bottom (0,1,2,3), top (4,5,6,7), vertical edges i <-> i+4

A mesh is immutable once built: coordinate and adjacency arrays are marked
read-only, smoothing works on detached coordinate arrays.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidElement, InvalidSpec


class ElementKind(Enum):
    TETRA = "tetra"
    PYRAMID = "pyramid"
    PRISM = "prism"
    HEXA = "hexa"

    @property
    def vertex_count(self) -> int:
        return _VERTEX_COUNT[self]


_VERTEX_COUNT = {
    ElementKind.TETRA: 4,
    ElementKind.PYRAMID: 5,
    ElementKind.PRISM: 6,
    ElementKind.HEXA: 8,
}

# Boundary faces per kind, outward-oriented for a positively oriented element.
FACES: dict[ElementKind, tuple[tuple[int, ...], ...]] = {
    ElementKind.TETRA: ((0, 2, 1), (0, 1, 3), (1, 2, 3), (0, 3, 2)),
    ElementKind.PYRAMID: ((0, 3, 2, 1), (0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)),
    ElementKind.PRISM: ((0, 2, 1), (3, 4, 5), (0, 1, 4, 3), (1, 2, 5, 4), (2, 0, 3, 5)),
    ElementKind.HEXA: (
        (0, 3, 2, 1),
        (4, 5, 6, 7),
        (0, 1, 5, 4),
        (1, 2, 6, 5),
        (2, 3, 7, 6),
        (3, 0, 4, 7),
    ),
}


@dataclass(frozen=True)
class Element:
    """One volume cell: a kind plus its ordered vertex indices."""

    kind: ElementKind
    vertices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        n = self.kind.vertex_count
        if len(self.vertices) != n:
            raise InvalidElement(
                f"{self.kind.value} needs {n} vertices, got {len(self.vertices)}"
            )
        if len(set(self.vertices)) != n:
            raise InvalidElement(f"repeated vertex index in {self.vertices}")

    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Boundary faces as global vertex indices, outward-oriented."""
        v = self.vertices
        return tuple(tuple(v[i] for i in face) for face in FACES[self.kind])


@dataclass(frozen=True)
class Mesh:
    """Vertex coordinates, typed elements and precomputed adjacency.

    ``valence[i]`` counts the elements containing vertex i; ``boundary[i]``
    is True when vertex i lies on a face owned by exactly one element.
    """

    vertices: np.ndarray
    elements: tuple[Element, ...]
    valence: np.ndarray
    boundary: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_elements(self) -> int:
        return len(self.elements)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def make_mesh(points, elements) -> Mesh:
    """Build a mesh from raw coordinates and elements, computing adjacency."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidSpec(f"points must have shape (n, 3), got {pts.shape}")
    if not np.isfinite(pts).all():
        raise InvalidSpec("vertex coordinates must be finite")
    elems = tuple(elements)
    n = pts.shape[0]
    for e in elems:
        if min(e.vertices) < 0 or max(e.vertices) >= n:
            raise InvalidElement(f"vertex index out of range in {e.vertices}")

    valence = np.zeros(n, dtype=np.int64)
    face_count: Counter = Counter()
    face_example: dict[tuple[int, ...], tuple[int, ...]] = {}
    for e in elems:
        for v in e.vertices:
            valence[v] += 1
        for face in e.faces():
            key = tuple(sorted(face))
            face_count[key] += 1
            face_example.setdefault(key, face)

    boundary = np.zeros(n, dtype=bool)
    for key, count in face_count.items():
        if count == 1:
            boundary[list(key)] = True

    return Mesh(_freeze(pts), elems, _freeze(valence), _freeze(boundary))


def build_adjacency(mesh: Mesh) -> Mesh:
    """Recompute valence and boundary flags; idempotent."""
    return make_mesh(np.array(mesh.vertices), mesh.elements)


def boundary_faces(mesh: Mesh) -> list[tuple[int, ...]]:
    """Oriented faces incident to exactly one element."""
    seen: Counter = Counter()
    oriented: dict[tuple[int, ...], tuple[int, ...]] = {}
    for e in mesh.elements:
        for face in e.faces():
            key = tuple(sorted(face))
            seen[key] += 1
            oriented.setdefault(key, face)
    return [oriented[key] for key, count in seen.items() if count == 1]


def kind_groups(mesh: Mesh) -> dict[ElementKind, tuple[np.ndarray, np.ndarray]]:
    """Group elements by kind for batched geometry.

    Returns ``{kind: (element_ids, connectivity)}`` where ``connectivity``
    has shape (m, n_e). Element ids refer to positions in ``mesh.elements``.
    """
    ids: dict[ElementKind, list[int]] = {}
    conn: dict[ElementKind, list[tuple[int, ...]]] = {}
    for i, e in enumerate(mesh.elements):
        ids.setdefault(e.kind, []).append(i)
        conn.setdefault(e.kind, []).append(e.vertices)
    return {
        kind: (np.asarray(ids[kind], dtype=np.int64), np.asarray(conn[kind], dtype=np.int64))
        for kind in ids
    }
