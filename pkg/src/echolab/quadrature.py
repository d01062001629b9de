"""Deterministic interior quadrature grids (midpoint tensor rule)."""

from __future__ import annotations

import math

import numpy as np


def spacing_for(k_max: float, points_per_half_wavelength: float) -> float:
    """Grid spacing resolving oscillations at wavenumber ``k_max``."""
    return math.pi / (points_per_half_wavelength * k_max)


def quarter_grid(inside_fn, x_extent: float, y_extent: float, h: float):
    """Midpoint grid over the first quadrant clipped by ``inside_fn``.

    Returns (points, cell_weight); the integral of f over the region is
    approximately cell_weight * sum(f(points)).
    """
    # Tile the bounding box exactly (per-axis spacing <= h): straight walls on
    # the box edges then never cut cells, which keeps the h-dependence of the
    # error smooth enough for Richardson extrapolation.
    nx = int(math.ceil(x_extent / h))
    ny = int(math.ceil(y_extent / h))
    hx = x_extent / nx
    hy = y_extent / ny
    x = (np.arange(nx) + 0.5) * hx
    y = (np.arange(ny) + 0.5) * hy
    xx, yy = np.meshgrid(x, y, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    mask = inside_fn(pts)
    return pts[mask], hx * hy
