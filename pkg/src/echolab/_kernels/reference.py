"""Pure-NumPy evaluation kernels (fallback backend).

Chunked so the (points x waves) trigonometric tables never exceed a few
megabytes at a time.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 8192


def states_on_points(x, y, kx, ky, sin_x, sin_y, coeffs):
    """Evaluate plane-wave combinations at many points.

    Parameters
    ----------
    x, y : (P,) point coordinates
    kx, ky : (N,) wave-vector components
    sin_x, sin_y : bool -- use sin (odd parity) instead of cos along each axis
    coeffs : (N, S) coefficient matrix, one column per state

    Returns
    -------
    (P, S) array of state values.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    kx = np.ascontiguousarray(kx, dtype=np.float64)
    ky = np.ascontiguousarray(ky, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    fx = np.sin if sin_x else np.cos
    fy = np.sin if sin_y else np.cos
    out = np.empty((x.size, coeffs.shape[1]), dtype=np.float64)
    for lo in range(0, x.size, _CHUNK):
        hi = min(lo + _CHUNK, x.size)
        phi = fx(np.outer(x[lo:hi], kx))
        phi *= fy(np.outer(y[lo:hi], ky))
        out[lo:hi] = phi @ coeffs
    return out
