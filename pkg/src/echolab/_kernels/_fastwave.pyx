# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluation kernel for plane-wave state sums.

Builds the fused sin/cos product table chunk by chunk in C (a single pass,
no large temporaries) and leaves the coefficient contraction to BLAS.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def states_on_points(object x, object y, object kx, object ky,
                     bint sin_x, bint sin_y, object coeffs):
    """Same contract as echolab._kernels.reference.states_on_points."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] kxv = np.ascontiguousarray(kx, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] kyv = np.ascontiguousarray(ky, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cv
    c_arr = np.asarray(coeffs, dtype=np.float64)
    if c_arr.ndim == 1:
        c_arr = c_arr[:, None]
    cv = np.ascontiguousarray(c_arr)

    cdef Py_ssize_t n_pts = xv.shape[0]
    cdef Py_ssize_t n_waves = kxv.shape[0]
    cdef Py_ssize_t n_states = cv.shape[1]
    if cv.shape[0] != n_waves:
        raise ValueError("coefficient rows must match wave count")

    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_pts, n_states))
    cdef Py_ssize_t chunk = 4096
    cdef cnp.ndarray[cnp.float64_t, ndim=2] phi = np.empty((min(chunk, n_pts), n_waves))
    cdef Py_ssize_t lo, hi, p, j
    cdef double tx, ty, xp, yp

    lo = 0
    while lo < n_pts:
        hi = min(lo + chunk, n_pts)
        for p in range(lo, hi):
            xp = xv[p]
            yp = yv[p]
            if sin_x and sin_y:
                for j in range(n_waves):
                    phi[p - lo, j] = sin(kxv[j] * xp) * sin(kyv[j] * yp)
            elif sin_x:
                for j in range(n_waves):
                    phi[p - lo, j] = sin(kxv[j] * xp) * cos(kyv[j] * yp)
            elif sin_y:
                for j in range(n_waves):
                    phi[p - lo, j] = cos(kxv[j] * xp) * sin(kyv[j] * yp)
            else:
                for j in range(n_waves):
                    phi[p - lo, j] = cos(kxv[j] * xp) * cos(kyv[j] * yp)
        np.matmul(phi[: hi - lo], cv, out=out[lo:hi])
        lo = hi
    return out
