#!/usr/bin/env python3
"""Contrast two flows on the tetrahedron-with-inner-vertex configuration.

The raw mean-volume field leaves the inner vertex exactly where it is (its
four incident face normals cancel), while the product measure pulls it to
the centroid of the outer tetrahedron. This script prints both trajectories.
"""

import argparse

import numpy as np

import polysmooth as ps
from polysmooth.quality import Combiner, Measure, QualityMeasureSpec
from polysmooth.smoothing import BoundaryPolicy, SmoothingConfig


def run(measure, inner, max_iter):
    mesh = ps.tet_with_inner_vertex(inner)
    centroid = mesh.vertices[:4].mean(axis=0)
    cfg = SmoothingConfig(
        measure=QualityMeasureSpec(measure, Combiner.SUM),
        boundary_policy=BoundaryPolicy.FIX_BOUNDARY,
        max_iterations=1,
        field_tol=1e-14,
    )
    coords = np.array(mesh.vertices)
    print(f"-- measure {measure.value}")
    print(f"{'iter':>4} {'distance to centroid':>22} {'objective':>22}")
    for it in range(max_iter):
        coords, report = ps.smooth(mesh, cfg, coords=coords)
        dist = np.linalg.norm(coords[4] - centroid)
        if report.iterations == 0:
            print(f"{it:4d} {dist:22.3e}  <field vanished: {report.termination.value}>")
            break
        print(f"{it:4d} {dist:22.3e} {report.quality[-1]:22.12f}")
        if dist < 1e-9:
            break
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--inner", default="0.5,0.35,0.30", help="starting inner vertex x,y,z")
    parser.add_argument("--max-iter", type=int, default=30)
    args = parser.parse_args()
    inner = np.array([float(p) for p in args.inner.split(",")])

    run(Measure.MEAN_VOLUME_SUM, inner, args.max_iter)
    run(Measure.PRODUCT_SQUARED, inner, args.max_iter)


if __name__ == "__main__":
    main()
