"""Field assembly, scale normalization, the step operator and the driver.

The driver performs ascent on a global quality objective: evaluate the
measure's gradient-direction field, zero it on vertices frozen by the
boundary policy, normalize it so the step commutes with scaling, then
backtrack the step size until the objective strictly increases. For the
product measure the driver tracks the logarithm of the product, which has
the same maximizers and an identical gradient direction but cannot
underflow on large meshes.

Per-element work is pure and accumulated in fixed element order, so results
are bit-reproducible run to run.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Callable

import numpy as np

from . import geometry
from .errors import (
    DegenerateMesh,
    InvalidDegree,
    InvalidSpec,
    IsolatedVertex,
    NonHomogeneous,
    NonPositiveVolume,
    ZeroField,
)
from .mesh import Mesh, boundary_faces
from .quality import (
    Combiner,
    Measure,
    QualityMeasureSpec,
    compute_volume_shift,
    mesh_mean_volumes,
    scatter_element_fields,
)


class Assembly(Enum):
    RAW_SUM = "raw"
    VALENCE_AVERAGED = "averaged"


class BoundaryPolicy(Enum):
    FIX_BOUNDARY = "fix"
    PROJECT_TO_ORIGINAL_BOUNDARY = "project"
    FREE = "free"


class Termination(Enum):
    FIELD_BELOW_TOL = "field_below_tol"
    QUALITY_STALLED = "quality_stalled"
    MAX_ITERATIONS = "max_iterations"
    BACKTRACKING_FAILED = "backtracking_failed"


@dataclass(frozen=True)
class SmoothingConfig:
    """Driver parameters; defaults suit desk-scale meshes."""

    measure: QualityMeasureSpec = dc_field(
        default_factory=lambda: QualityMeasureSpec(Measure.PRODUCT_SQUARED)
    )
    assembly: Assembly = Assembly.RAW_SUM
    sigma0: float = 0.1
    max_iterations: int = 100
    quality_tol: float = 0.0
    field_tol: float = 1e-12
    boundary_policy: BoundaryPolicy = BoundaryPolicy.FIX_BOUNDARY
    shrink: float = 0.5
    max_halvings: int = 40

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise InvalidSpec("sigma0 must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise InvalidSpec("shrink factor must lie in (0, 1)")
        if self.max_iterations < 0 or self.max_halvings < 0:
            raise InvalidSpec("iteration and halving caps must be >= 0")
        if self.field_tol < 0 or self.quality_tol < 0:
            raise InvalidSpec("tolerances must be >= 0")


@dataclass
class SmoothingReport:
    """Per-iteration history of one driver run.

    ``quality[i]`` is the objective after accepted step i (the log objective
    for the product measure); the sequence is strictly increasing until
    termination.
    """

    iterations: int
    quality: list[float]
    sigma: list[float]
    field_norm: list[float]
    termination: Termination
    initial_quality: float

    def to_json_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "termination": self.termination.value,
            "initial_quality": self.initial_quality,
            "quality": self.quality,
            "sigma": self.sigma,
            "field_norm": self.field_norm,
        }

    def to_csv_text(self) -> str:
        lines = ["iteration,quality,sigma,field_norm"]
        for i, (q, s, f) in enumerate(zip(self.quality, self.sigma, self.field_norm), 1):
            lines.append(f"{i},{q!r},{s!r},{f!r}")
        return "\n".join(lines) + "\n"


def assemble_field(mesh: Mesh, coords=None, assembly: Assembly = Assembly.RAW_SUM,
                   element_field_fn=None) -> np.ndarray:
    """Scatter per-element fields to vertices and sum; optionally average.

    ``element_field_fn(kind, batch)`` defaults to the transformation field.
    Valence averaging divides vertex i's total by the number of elements
    containing it and is undefined on isolated vertices.
    """
    coords = mesh.vertices if coords is None else np.asarray(coords, dtype=float)
    if element_field_fn is None:
        out = scatter_element_fields(mesh, coords)
    else:
        from .mesh import kind_groups

        out = np.zeros_like(coords)
        for kind, (ids, conn) in kind_groups(mesh).items():
            np.add.at(out, conn.ravel(), np.asarray(element_field_fn(kind, coords[conn])).reshape(-1, 3))
    if assembly is Assembly.VALENCE_AVERAGED:
        if np.any(mesh.valence == 0):
            raise IsolatedVertex("valence averaging undefined on isolated vertices")
        out = out / mesh.valence[:, None]
    return out


def project_shape(coords) -> np.ndarray:
    """Quotient out translation and scale: center on the vertex centroid and
    divide by the Frobenius norm of the centered coordinates."""
    coords = np.asarray(coords, dtype=float)
    centered = coords - coords.mean(axis=0)
    norm = float(np.linalg.norm(centered))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateMesh("all vertices coincide; shape projection undefined")
    return centered / norm


def homogeneity_degree(field_fn: Callable[[np.ndarray], np.ndarray], coords) -> float:
    """Estimate the scaling degree d with ``field(s*x) = s^d field(x)``.

    Probes s = 1/2 and s = 2; the two estimates must agree to 1e-8.
    """
    coords = np.asarray(coords, dtype=float)
    base = float(np.linalg.norm(field_fn(coords)))
    if base == 0.0:
        raise ZeroField("cannot measure the degree of the zero field")
    estimates = []
    for s in (0.5, 2.0):
        scaled = float(np.linalg.norm(field_fn(s * coords)))
        if scaled <= 0.0 or not np.isfinite(scaled):
            raise NonHomogeneous(f"field norm degenerated under scaling by {s}")
        estimates.append(np.log(scaled / base) / np.log(s))
    if abs(estimates[0] - estimates[1]) > 1e-8:
        raise NonHomogeneous(
            f"degree estimates disagree: {estimates[0]!r} vs {estimates[1]!r}"
        )
    return float(np.mean(estimates))


def scale_normalize(field, degree: float) -> np.ndarray:
    """Rescale a degree-d homogeneous field to homogeneity degree 1.

    Multiplies by ``|field|^((1-d)/d)``; the zero field maps to zero.
    """
    if abs(degree) < 1e-9:
        raise InvalidDegree("scale normalization undefined for degree 0")
    field = np.asarray(field, dtype=float)
    norm = float(np.linalg.norm(field))
    if norm == 0.0:
        return np.zeros_like(field)
    return norm ** ((1.0 - degree) / degree) * field


# -- driver ------------------------------------------------------------------


@dataclass
class _Flow:
    objective: Callable[[np.ndarray], float]
    field: Callable[[np.ndarray], np.ndarray]
    mask: np.ndarray | None
    policy: BoundaryPolicy
    boundary_tris: np.ndarray | None
    min_volume: Callable[[np.ndarray], float] | None

    def masked_field(self, coords) -> np.ndarray:
        f = np.asarray(self.field(coords), dtype=float)
        if self.mask is not None:
            f = f.copy()
            f[self.mask] = 0.0
        return f


def _measure_functions(mesh: Mesh, spec: QualityMeasureSpec, assembly: Assembly):
    m = spec.measure
    shift = spec.volume_shift or 0.0

    def averaged(f: np.ndarray) -> np.ndarray:
        if assembly is Assembly.VALENCE_AVERAGED:
            if np.any(mesh.valence == 0):
                raise IsolatedVertex("valence averaging undefined on isolated vertices")
            return f / mesh.valence[:, None]
        return f

    if m is Measure.MEAN_VOLUME_SUM:
        def objective(c):
            return float(mesh_mean_volumes(mesh, c).sum())

        def field(c):
            return averaged(scatter_element_fields(mesh, c) / 6.0)

    elif m is Measure.PRODUCT_SQUARED:
        def objective(c):
            v = mesh_mean_volumes(mesh, c) + shift
            if np.any(v <= 0.0):
                return -np.inf
            return float(2.0 * np.log(v).sum())

        def field(c):
            v = mesh_mean_volumes(mesh, c) + shift
            bad = np.nonzero(v <= 0.0)[0]
            if bad.size:
                raise NonPositiveVolume(int(bad[0]), float(v[bad[0]]))
            return averaged(scatter_element_fields(mesh, c, per_element_scale=1.0 / v) / 3.0)

    elif m is Measure.INVERSE_SQUARED_SUM:
        def objective(c):
            v = mesh_mean_volumes(mesh, c) + shift
            if np.any(v <= 0.0):
                return -np.inf
            return float(-np.sum(v**-2))

        def field(c):
            v = mesh_mean_volumes(mesh, c) + shift
            bad = np.nonzero(v <= 0.0)[0]
            if bad.size:
                raise NonPositiveVolume(int(bad[0]), float(v[bad[0]]))
            return averaged(scatter_element_fields(mesh, c, per_element_scale=v**-3) / 3.0)

    elif m is Measure.ISOPERIMETRIC_QUOTIENT:
        from .quality import _per_element_values, _scatter_iq_gradients

        iq_spec = QualityMeasureSpec(Measure.ISOPERIMETRIC_QUOTIENT, Combiner.SUM)

        def objective(c):
            return float(_per_element_values(mesh, c, iq_spec).sum())

        def field(c):
            return averaged(_scatter_iq_gradients(mesh, c))

    else:
        raise InvalidSpec(f"no smoothing field is defined for measure {m.value!r}")

    return objective, field


def _boundary_triangles(mesh: Mesh, coords: np.ndarray) -> np.ndarray:
    """Boundary surface as triangles; quads split along their shorter diagonal."""
    tris = []
    for face in boundary_faces(mesh):
        if len(face) == 3:
            tris.append(face)
        else:
            a, b, c, d = face
            if np.linalg.norm(coords[a] - coords[c]) <= np.linalg.norm(coords[b] - coords[d]):
                tris += [(a, b, c), (a, c, d)]
            else:
                tris += [(a, b, d), (b, c, d)]
    if not tris:
        return np.zeros((0, 3, 3))
    return coords[np.asarray(tris, dtype=np.int64)]


def _closest_on_triangles(tris: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Closest point to p over a triangle soup (T, 3, 3)."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, ac = b - a, c - a
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    def safe(x, cond):
        return np.where(cond, x, 1.0)

    on_a = (d1 <= 0) & (d2 <= 0)
    on_b = (d3 >= 0) & (d4 <= d3)
    on_c = (d6 >= 0) & (d5 <= d6)
    on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    on_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)

    t_ab = d1 / safe(d1 - d3, on_ab)
    t_ac = d2 / safe(d2 - d6, on_ac)
    t_bc = (d4 - d3) / safe((d4 - d3) + (d5 - d6), on_bc)
    denom = safe(va + vb + vc, ~(on_a | on_b | on_c | on_ab | on_ac | on_bc))
    v_face = vb / denom
    w_face = vc / denom

    cand = a + v_face[:, None] * ab + w_face[:, None] * ac
    cand = np.where(on_bc[:, None], b + t_bc[:, None] * (c - b), cand)
    cand = np.where(on_ac[:, None], a + t_ac[:, None] * ac, cand)
    cand = np.where(on_ab[:, None], a + t_ab[:, None] * ab, cand)
    cand = np.where(on_c[:, None], c, cand)
    cand = np.where(on_b[:, None], b, cand)
    cand = np.where(on_a[:, None], a, cand)

    dist = np.linalg.norm(cand - p, axis=1)
    return cand[int(np.argmin(dist))]


def _apply_step(coords: np.ndarray, direction: np.ndarray, sigma: float, flow: _Flow,
                boundary_mask: np.ndarray | None) -> np.ndarray:
    moved = coords + sigma * direction
    if flow.policy is BoundaryPolicy.FREE:
        return project_shape(moved)
    if flow.policy is BoundaryPolicy.PROJECT_TO_ORIGINAL_BOUNDARY and flow.boundary_tris is not None:
        idx = np.nonzero(boundary_mask)[0]
        for i in idx:
            moved[i] = _closest_on_triangles(flow.boundary_tris, moved[i])
    return moved


def _field_degree(flow: _Flow, coords: np.ndarray) -> float:
    try:
        return homogeneity_degree(flow.masked_field, coords)
    except (NonHomogeneous, NonPositiveVolume):
        # shifted measures are not homogeneous; fall back to the raw field
        return 1.0


def _drive(coords: np.ndarray, flow: _Flow, config: SmoothingConfig,
           boundary_mask: np.ndarray | None) -> tuple[np.ndarray, SmoothingReport]:
    coords = np.array(coords, dtype=float)
    if flow.policy is BoundaryPolicy.FREE:
        coords = project_shape(coords)
    q0 = q = flow.objective(coords)
    quality_hist: list[float] = []
    sigma_hist: list[float] = []
    norm_hist: list[float] = []
    termination = Termination.MAX_ITERATIONS
    degree = None

    for _ in range(config.max_iterations):
        f = flow.masked_field(coords)
        fnorm = float(np.linalg.norm(f))
        if fnorm < config.field_tol:
            termination = Termination.FIELD_BELOW_TOL
            break
        if degree is None:
            degree = _field_degree(flow, coords)
        direction = scale_normalize(f, degree)

        sigma = config.sigma0
        accepted = None
        for _h in range(config.max_halvings + 1):
            cand = _apply_step(coords, direction, sigma, flow, boundary_mask)
            if flow.min_volume is not None and not flow.min_volume(cand) > 0.0:
                qc = -np.inf
            else:
                qc = flow.objective(cand)
            if qc > q:
                accepted = (cand, qc, sigma)
                break
            sigma *= config.shrink
        if accepted is None:
            termination = Termination.BACKTRACKING_FAILED
            break

        coords, qc, sigma = accepted
        quality_hist.append(qc)
        sigma_hist.append(sigma)
        norm_hist.append(fnorm)
        gain = qc - q
        q = qc
        if gain < config.quality_tol:
            termination = Termination.QUALITY_STALLED
            break

    report = SmoothingReport(
        iterations=len(quality_hist),
        quality=quality_hist,
        sigma=sigma_hist,
        field_norm=norm_hist,
        termination=termination,
        initial_quality=q0,
    )
    return coords, report


def _build_flow(mesh: Mesh, config: SmoothingConfig, coords0: np.ndarray) -> _Flow:
    spec = config.measure
    if spec.measure in (Measure.PRODUCT_SQUARED, Measure.INVERSE_SQUARED_SUM):
        if spec.volume_shift is None:
            shift = compute_volume_shift(mesh, coords0)
            if shift > 0.0:
                spec = dataclasses.replace(spec, volume_shift=shift)
        v = mesh_mean_volumes(mesh, coords0) + (spec.volume_shift or 0.0)
        bad = np.nonzero(v <= 0.0)[0]
        if bad.size:
            raise NonPositiveVolume(int(bad[0]), float(v[bad[0]]))
    objective, field_fn = _measure_functions(mesh, spec, config.assembly)
    policy = config.boundary_policy
    mask = mesh.boundary if policy is BoundaryPolicy.FIX_BOUNDARY else None
    tris = (
        _boundary_triangles(mesh, coords0)
        if policy is BoundaryPolicy.PROJECT_TO_ORIGINAL_BOUNDARY
        else None
    )
    guard = bool(np.all(mesh_mean_volumes(mesh, coords0) > 0.0))
    min_volume = (lambda c: float(mesh_mean_volumes(mesh, c).min())) if guard else None
    return _Flow(objective, field_fn, mask, policy, tris, min_volume)


def smoothing_step(mesh: Mesh, coords, config: SmoothingConfig, sigma: float) -> np.ndarray:
    """One smoothing step with a fixed step size (no backtracking).

    Free policy expects coordinates on the shape sphere (see
    :func:`project_shape`) and returns coordinates on it; a zero step size or
    a vanishing field returns the input unchanged.
    """
    coords = np.array(coords, dtype=float)
    flow = _build_flow(mesh, config, coords)
    f = flow.masked_field(coords)
    if sigma == 0.0 or not np.any(f):
        return coords
    degree = _field_degree(flow, coords)
    direction = scale_normalize(f, degree)
    boundary_mask = mesh.boundary if flow.policy is BoundaryPolicy.PROJECT_TO_ORIGINAL_BOUNDARY else None
    return _apply_step(coords, direction, sigma, flow, boundary_mask)


def smooth(mesh: Mesh, config: SmoothingConfig | None = None, coords=None) -> tuple[np.ndarray, SmoothingReport]:
    """Ascend the configured quality measure until a stopping rule fires.

    The driver optimizes the sum form of the measure (the log product for the
    product measure). Every accepted step strictly increases the objective;
    with all elements initially valid, steps that would invert an element are
    rejected during backtracking.
    """
    config = config or SmoothingConfig()
    coords0 = np.array(mesh.vertices if coords is None else coords, dtype=float)
    flow = _build_flow(mesh, config, coords0)
    boundary_mask = mesh.boundary if config.boundary_policy is BoundaryPolicy.PROJECT_TO_ORIGINAL_BOUNDARY else None
    return _drive(coords0, flow, config, boundary_mask)


def smooth_polyhedron(coords, faces, config: SmoothingConfig | None = None) -> tuple[np.ndarray, SmoothingReport]:
    """Roundness ascent for one closed polyhedron.

    Maximizes the isoperimetric quotient of the surface given by ``faces``
    under the free policy; the measure and boundary settings of ``config``
    are ignored, only its numeric knobs apply.
    """
    config = config or SmoothingConfig()
    flow = _Flow(
        objective=lambda c: geometry.polyhedron_iq(faces, c),
        field=lambda c: geometry.polyhedron_iq_gradient(faces, c),
        mask=None,
        policy=BoundaryPolicy.FREE,
        boundary_tris=None,
        min_volume=lambda c: geometry.polyhedron_mean_volume(faces, c),
    )
    return _drive(np.array(coords, dtype=float), flow, config, None)
