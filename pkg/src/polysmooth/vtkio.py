"""Legacy ASCII unstructured-grid files (the single interchange format).

Cell type codes: 10 tetra, 12 hexahedron, 13 wedge (prism), 14 pyramid. The
file-local vertex orderings of all four types match the canonical orderings
in :mod:`polysmooth.mesh` directly (the wedge's bottom/top triangles pair
vertically i <-> i+3), so only the 0-based indexing carries over.

Output is byte-stable: fixed section order, 17-significant-digit floats, LF
line endings. Writing and re-reading a mesh reproduces coordinates bit for
bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedFile, UnsupportedCellType
from .mesh import Element, ElementKind, Mesh, make_mesh

CELL_TYPE_BY_KIND = {
    ElementKind.TETRA: 10,
    ElementKind.HEXA: 12,
    ElementKind.PRISM: 13,
    ElementKind.PYRAMID: 14,
}
KIND_BY_CELL_TYPE = {code: kind for kind, code in CELL_TYPE_BY_KIND.items()}


@dataclass
class MeshDocument:
    """Parsed file content before mesh assembly."""

    points: np.ndarray
    cells: list[tuple[int, ...]]
    cell_types: list[int]
    point_data: dict[str, np.ndarray] = field(default_factory=dict)
    cell_data: dict[str, np.ndarray] = field(default_factory=dict)


class _Tokens:
    """Whitespace token stream that remembers line numbers for diagnostics."""

    def __init__(self, text: str, first_line: int = 1):
        self.items: list[tuple[str, int]] = []
        for lineno, line in enumerate(text.splitlines(), first_line):
            for tok in line.split():
                self.items.append((tok, lineno))
        self.pos = 0
        self.last_line = first_line

    def next(self, what: str) -> str:
        if self.pos >= len(self.items):
            raise MalformedFile(f"unexpected end of file, expected {what}", self.last_line)
        tok, line = self.items[self.pos]
        self.pos += 1
        self.last_line = line
        return tok

    def next_int(self, what: str) -> int:
        tok = self.next(what)
        try:
            return int(tok)
        except ValueError:
            raise MalformedFile(f"expected integer {what}, got {tok!r}", self.last_line) from None

    def next_float(self, what: str) -> float:
        tok = self.next(what)
        try:
            return float(tok)
        except ValueError:
            raise MalformedFile(f"expected number {what}, got {tok!r}", self.last_line) from None

    def exhausted(self) -> bool:
        return self.pos >= len(self.items)


def read_document(path) -> MeshDocument:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# vtk DataFile Version"):
        raise MalformedFile("missing '# vtk DataFile Version' header", 1)
    if len(lines) < 2:
        raise MalformedFile("missing title line", 2)
    body = _Tokens("\n".join(lines[2:]), first_line=3)

    def fail(msg: str):
        raise MalformedFile(msg, body.last_line)

    if body.next("format") != "ASCII":
        fail("only ASCII files are supported")
    if body.next("DATASET keyword") != "DATASET" or body.next("dataset type") != "UNSTRUCTURED_GRID":
        fail("expected DATASET UNSTRUCTURED_GRID")

    if body.next("POINTS keyword") != "POINTS":
        fail("expected POINTS section")
    n_points = body.next_int("point count")
    dtype = body.next("point data type")
    if dtype not in ("float", "double"):
        fail(f"unsupported point type {dtype!r}")
    points = np.empty((n_points, 3))
    for i in range(n_points):
        for j in range(3):
            points[i, j] = body.next_float("point coordinate")

    if body.next("CELLS keyword") != "CELLS":
        fail("expected CELLS section")
    n_cells = body.next_int("cell count")
    total = body.next_int("cell list size")
    cells: list[tuple[int, ...]] = []
    consumed = 0
    for _ in range(n_cells):
        arity = body.next_int("cell arity")
        cells.append(tuple(body.next_int("cell vertex") for _ in range(arity)))
        consumed += arity + 1
    if consumed != total:
        fail(f"CELLS advertised {total} integers but contained {consumed}")

    if body.next("CELL_TYPES keyword") != "CELL_TYPES":
        fail("expected CELL_TYPES section")
    if body.next_int("cell type count") != n_cells:
        fail("CELL_TYPES count differs from CELLS count")
    cell_types = [body.next_int("cell type") for _ in range(n_cells)]

    doc = MeshDocument(points=points, cells=cells, cell_types=cell_types)
    while not body.exhausted():
        section = body.next("data section")
        if section == "POINT_DATA":
            count, store = body.next_int("point data count"), doc.point_data
            if count != n_points:
                fail("POINT_DATA count differs from point count")
        elif section == "CELL_DATA":
            count, store = body.next_int("cell data count"), doc.cell_data
            if count != n_cells:
                fail("CELL_DATA count differs from cell count")
        else:
            fail(f"unexpected section {section!r}")
        while not body.exhausted():
            peek, _ = body.items[body.pos]
            if peek in ("POINT_DATA", "CELL_DATA"):
                break
            if body.next("SCALARS keyword") != "SCALARS":
                fail("only SCALARS data arrays are supported")
            name = body.next("array name")
            body.next("array type")
            comps_or_table = body.next("components or LOOKUP_TABLE")
            if comps_or_table != "LOOKUP_TABLE":
                if comps_or_table != "1":
                    fail("only single-component scalars are supported")
                if body.next("LOOKUP_TABLE keyword") != "LOOKUP_TABLE":
                    fail("expected LOOKUP_TABLE after SCALARS")
            body.next("lookup table name")
            store[name] = np.array([body.next_float("scalar value") for _ in range(count)])
    return doc


def mesh_from_document(doc: MeshDocument) -> Mesh:
    elements = []
    for i, (cell, code) in enumerate(zip(doc.cells, doc.cell_types)):
        kind = KIND_BY_CELL_TYPE.get(code)
        if kind is None:
            raise UnsupportedCellType(f"cell {i} has unsupported type {code}")
        if len(cell) != kind.vertex_count:
            raise MalformedFile(f"cell {i} of type {code} has {len(cell)} vertices", 0)
        elements.append(Element(kind, cell))
    return make_mesh(doc.points, elements)


def read_mesh(path) -> Mesh:
    """Read a mesh, converting file cells to canonical elements."""
    return mesh_from_document(read_document(path))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_mesh(mesh: Mesh, path, coords=None, point_data=None, cell_data=None) -> None:
    """Write the mesh (optionally with replacement coordinates) byte-stably.

    ``point_data`` / ``cell_data`` are name -> 1d-array mappings emitted as
    scalar arrays in sorted name order.
    """
    coords = mesh.vertices if coords is None else np.asarray(coords, dtype=float)
    out = []
    out.append("# vtk DataFile Version 3.0")
    out.append("polysmooth mesh")
    out.append("ASCII")
    out.append("DATASET UNSTRUCTURED_GRID")
    out.append(f"POINTS {len(coords)} double")
    for p in coords:
        out.append(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    total = sum(len(e.vertices) + 1 for e in mesh.elements)
    out.append(f"CELLS {mesh.n_elements} {total}")
    for e in mesh.elements:
        out.append(" ".join([str(len(e.vertices))] + [str(v) for v in e.vertices]))
    out.append(f"CELL_TYPES {mesh.n_elements}")
    for e in mesh.elements:
        out.append(str(CELL_TYPE_BY_KIND[e.kind]))
    for keyword, count, data in (
        ("POINT_DATA", mesh.n_vertices, point_data),
        ("CELL_DATA", mesh.n_elements, cell_data),
    ):
        if not data:
            continue
        out.append(f"{keyword} {count}")
        for name in sorted(data):
            values = np.asarray(data[name], dtype=float)
            if values.shape != (count,):
                raise ValueError(f"{keyword} array {name!r} must have shape ({count},)")
            out.append(f"SCALARS {name} double 1")
            out.append("LOOKUP_TABLE default")
            for v in values:
                out.append(_fmt(v))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
