"""Parity-adapted real plane-wave trial basis for the quarter-domain problem.

Basis function j at wavenumber k:

    phi_j(x, y) = fx(k cos(theta_j) x) * fy(k sin(theta_j) y)

with fx = sin for odd x-parity (Dirichlet on the y-axis) else cos, and
likewise fy.  Every phi_j solves the Helmholtz equation at wavenumber k and
satisfies the symmetry-line conditions of the parity class exactly, so only
the physical wall needs to be enforced numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import BoundarySamples, FundamentalDomain, SymmetryClass


@dataclass
class PlaneWaveBasis:
    k: float
    cls: SymmetryClass
    kx: np.ndarray = field(repr=False)
    ky: np.ndarray = field(repr=False)

    @property
    def sin_x(self) -> bool:
        return self.cls.px < 0

    @property
    def sin_y(self) -> bool:
        return self.cls.py < 0

    @property
    def n_waves(self) -> int:
        return len(self.kx)

    @classmethod
    def for_domain(cls, domain: FundamentalDomain, k: float, basis_factor: float) -> "PlaneWaveBasis":
        """Size the basis from the quarter-domain perimeter in wavelengths."""
        n = math.ceil(basis_factor * domain.perimeter * k / (2.0 * math.pi))
        theta = (np.arange(n) + 0.5) * (math.pi / 2.0) / n
        return cls(k=k, cls=domain.cls, kx=k * np.cos(theta), ky=k * np.sin(theta))

    # -- boundary matrices ---------------------------------------------------

    def _tables(self, points: np.ndarray):
        ax = np.outer(points[:, 0], self.kx)
        ay = np.outer(points[:, 1], self.ky)
        fx, dfx = (np.sin(ax), np.cos(ax)) if self.sin_x else (np.cos(ax), -np.sin(ax))
        fy, dfy = (np.sin(ay), np.cos(ay)) if self.sin_y else (np.cos(ay), -np.sin(ay))
        return fx, dfx, fy, dfy

    def boundary_matrix(self, points: np.ndarray) -> np.ndarray:
        """Values phi_j(p_i) as an (M, N) matrix."""
        fx, _, fy, _ = self._tables(points)
        return fx * fy

    def boundary_matrices_with_k_derivative(self, points: np.ndarray):
        """(B, dB/dk) at fixed propagation directions."""
        fx, dfx, fy, dfy = self._tables(points)
        b = fx * fy
        # d/dk [fx(k cos(t) x)] = x cos(t) fx' = (x kx / k) fx'
        bk = (np.outer(points[:, 0], self.kx) * dfx * fy + np.outer(points[:, 1], self.ky) * fx * dfy) / self.k
        return b, bk

    def gradient_matrices(self, points: np.ndarray):
        """(dB/dx, dB/dy) value matrices."""
        fx, dfx, fy, dfy = self._tables(points)
        return self.kx[None, :] * dfx * fy, self.ky[None, :] * fx * dfy

    def normal_derivative(self, samples: BoundarySamples, coeffs: np.ndarray) -> np.ndarray:
        """d(psi)/dn at boundary samples for one or more coefficient columns."""
        gx, gy = self.gradient_matrices(samples.positions)
        c = coeffs if coeffs.ndim == 2 else coeffs[:, None]
        out = (samples.normals[:, 0:1] * (gx @ c)) + (samples.normals[:, 1:2] * (gy @ c))
        return out if coeffs.ndim == 2 else out[:, 0]

    # -- bulk evaluation (hot path, kernel-backed) ---------------------------

    def evaluate(self, points: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """State values at many points; (P, S) for an (N, S) coefficient matrix."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return _kernels.states_on_points(
            points[:, 0], points[:, 1], self.kx, self.ky, self.sin_x, self.sin_y, coeffs
        )
