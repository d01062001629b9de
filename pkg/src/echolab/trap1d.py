"""1D gravito-optical trap models: eigensolver and split-step propagator.

Models the vertical axis of the trap in dimensionless units (hbar = m = 1 by
default, g and trap parameters configurable).  The hyperfine-state-dependent
perturbation multiplies only the optical part of the potential — gravity is
state independent — so V2 = (1 + eta) V_optical + m g x.

The eigensolver diagonalizes the Fourier-grid Hamiltonian: the exact kinetic
operator of the periodic grid (diagonal in the discrete Fourier basis) plus
the diagonal potential.  This Hamiltonian is exactly the generator of the
split-step propagator as dt -> 0, which makes spectral-vs-propagator
comparisons meaningful at tight tolerance.  A second-order finite-difference
path (`method="fd"`) with a Richardson check is kept as a cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import (
    GridLeakageError,
    InsufficientBoundStatesError,
    InvalidParameterError,
    NoMinimumError,
    StepSizeError,
)

__all__ = [
    "Grid1D",
    "GaussianTrap",
    "EvanescentTrap",
    "HarmonicTrap",
    "Spectrum1D",
    "eigensolve_1d",
    "build_pair",
    "propagate",
    "oscillation_period",
    "bounce_period",
    "physical_to_scaled",
]

_LEAK_TOL = 1e-8


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial grid on [x_min, x_max) with n points (n >= 256)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 256:
            raise InvalidParameterError(f"grid needs at least 256 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise InvalidParameterError("grid extent is empty")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n, d=self.dx)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n}


# ---------------------------------------------------------------------------
# trap models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _TrapBase:
    g: float = 0.0
    m: float = 1.0
    eta: float = 0.0  # relative optical-potential difference between manifolds

    def optical(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def potential(self, x, perturbed: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        factor = 1.0 + self.eta if perturbed else 1.0
        return factor * self.optical(x) + self.m * self.g * x

    def to_dict(self) -> dict:
        d = {"type": type(self).__name__.replace("Trap", "").lower(),
             "g": self.g, "m": self.m, "eta": self.eta}
        d.update(self._params())
        return d


@dataclass(frozen=True)
class GaussianTrap(_TrapBase):
    """Red-detuned Gaussian dipole trap: V = -U exp(-2 x^2 / w^2) + m g x."""

    U: float = 1.0
    w: float = 1.0

    def __post_init__(self):
        if self.U <= 0 or self.w <= 0:
            raise InvalidParameterError("Gaussian trap needs U > 0 and w > 0")

    def optical(self, x):
        return -self.U * np.exp(-2.0 * np.asarray(x, dtype=float) ** 2 / self.w**2)

    def optical_curvature(self, x: float) -> float:
        e = math.exp(-2.0 * x * x / self.w**2)
        return self.U * e * (4.0 / self.w**2 - 16.0 * x * x / self.w**4)

    def optical_slope(self, x: float) -> float:
        return self.U * math.exp(-2.0 * x * x / self.w**2) * 4.0 * x / self.w**2

    def _params(self):
        return {"U": self.U, "w": self.w}


@dataclass(frozen=True)
class EvanescentTrap(_TrapBase):
    """Evanescent-wave wall plus gravity: V = U exp(-kappa x) + m g x.

    Scaling the wall intensity U -> cU only translates the potential by
    ln(c)/kappa and adds the constant (m g / kappa) ln c, so every eigenenergy
    shifts by the same amount: the dephasing-free configuration.
    """

    U: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.U <= 0 or self.kappa <= 0 or self.g <= 0:
            raise InvalidParameterError("evanescent trap needs U, kappa, g > 0")

    def optical(self, x):
        return self.U * np.exp(-self.kappa * np.asarray(x, dtype=float))

    def _params(self):
        return {"U": self.U, "kappa": self.kappa}


@dataclass(frozen=True)
class HarmonicTrap(_TrapBase):
    """V = (1/2) m omega^2 (x - x0)^2 + m g x."""

    omega: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise InvalidParameterError("harmonic trap needs omega > 0")

    def optical(self, x):
        return 0.5 * self.m * self.omega**2 * (np.asarray(x, dtype=float) - self.x0) ** 2

    def _params(self):
        return {"omega": self.omega, "x0": self.x0}


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------


@dataclass
class Spectrum1D:
    """Lowest eigenpairs of one trap Hamiltonian on a grid.

    psi rows are real, grid-orthonormal (sum psi_i psi_j dx = delta_ij).
    """

    energies: np.ndarray
    psi: np.ndarray = field(repr=False)  # (n_states, grid.n)
    grid: Grid1D
    model: _TrapBase
    perturbed: bool = False

    @property
    def n_states(self) -> int:
        return len(self.energies)


def _fourier_hamiltonian(grid: Grid1D, v: np.ndarray, m: float) -> np.ndarray:
    """Dense Fourier-grid Hamiltonian: exact periodic kinetic + diagonal V."""
    kinetic_diag = grid.wavenumbers**2 / (2.0 * m)
    # first column of the circulant kinetic matrix
    col = np.real(np.fft.ifft(kinetic_diag))
    idx = np.abs(np.subtract.outer(np.arange(grid.n), np.arange(grid.n)))
    h = col[idx]
    h[np.diag_indices_from(h)] += v
    return h


def _fd_hamiltonian(grid: Grid1D, v: np.ndarray, m: float) -> np.ndarray:
    n, dx = grid.n, grid.dx
    h = np.zeros((n, n))
    off = -1.0 / (2.0 * m * dx * dx)
    i = np.arange(n - 1)
    h[i, i + 1] = off
    h[i + 1, i] = off
    h[np.diag_indices_from(h)] = -2.0 * off + v
    return h


def eigensolve_1d(
    model: _TrapBase,
    grid: Grid1D,
    n_states: int,
    perturbed: bool = False,
    method: str = "fourier",
) -> Spectrum1D:
    """Lowest ``n_states`` bound eigenpairs of -psi''/(2m) + V(x) psi.

    Bound means below the potential rim (the lower grid-edge potential value);
    raises if not enough exist, or if a retained state touches a grid edge.
    """
    x = grid.x
    v = model.potential(x, perturbed=perturbed)
    if method == "fourier":
        h = _fourier_hamiltonian(grid, v, model.m)
    elif method == "fd":
        h = _fd_hamiltonian(grid, v, model.m)
    else:
        raise InvalidParameterError(f"unknown eigensolve method {method!r}")

    energies, vecs = scipy.linalg.eigh(h, subset_by_index=(0, n_states - 1))

    rim = min(float(v[0]), float(v[-1]))
    n_bound = int(np.sum(energies < rim))
    if n_bound < n_states:
        raise InsufficientBoundStatesError(
            f"only {n_bound} bound states below the potential rim {rim:.6g}, "
            f"requested {n_states}"
        )

    psi = vecs.T / math.sqrt(grid.dx)
    # deterministic sign gauge: first significant component positive
    for row in psi:
        j = np.argmax(np.abs(row) > 1e-8 * np.max(np.abs(row)))
        if row[j] < 0:
            row *= -1.0

    edge = np.maximum(np.abs(psi[:, 0]), np.abs(psi[:, -1])) * math.sqrt(grid.dx)
    worst = float(edge.max())
    if worst > _LEAK_TOL:
        raise GridLeakageError(
            f"retained eigenfunction reaches the grid edge with amplitude "
            f"{worst:.2e} (tolerance {_LEAK_TOL}); enlarge the grid"
        )
    return Spectrum1D(energies=energies, psi=psi, grid=grid, model=model,
                      perturbed=perturbed)


def build_pair(model: _TrapBase, grid: Grid1D, n_states: int,
               method: str = "fourier") -> Tuple[Spectrum1D, Spectrum1D, np.ndarray]:
    """Spectra of the two internal-state potentials plus their overlap matrix.

    Returns (spectrum1, spectrum2, O) with O[m, n] = <psi2_m | psi1_n>.
    The constant hyperfine splitting is *not* added to spectrum2; it cancels
    in the echo and is carried symbolically by the spectroscopy module.
    """
    s1 = eigensolve_1d(model, grid, n_states, perturbed=False, method=method)
    s2 = eigensolve_1d(model, grid, n_states, perturbed=True, method=method)
    o = (s2.psi @ s1.psi.T) * grid.dx
    return s1, s2, o


# ---------------------------------------------------------------------------
# split-step propagator
# ---------------------------------------------------------------------------

# Yoshida's triple-jump coefficients turn one Strang step into 4th order
_YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA_W0 = 1.0 - 2.0 * _YOSHIDA_W1


def propagate(
    psi: np.ndarray,
    model: _TrapBase,
    grid: Grid1D,
    t: float,
    dt: float,
    perturbed: bool = False,
    e_max: Optional[float] = None,
    order: int = 4,
) -> np.ndarray:
    """Unitary split-step (FFT) evolution of a grid wavefunction by time t.

    Strang splitting (order=2) or its Yoshida 4th-order composition
    (order=4, default).  If ``e_max`` is given, dt must resolve it:
    dt <= 0.1 / e_max.
    """
    if t < 0 or dt <= 0:
        raise InvalidParameterError("need t >= 0 and dt > 0")
    if e_max is not None and dt > 0.1 / abs(e_max):
        raise StepSizeError(
            f"dt = {dt:.3e} too coarse for retained energies up to {e_max:.6g} "
            f"(need dt <= {0.1 / abs(e_max):.3e})"
        )
    if order not in (2, 4):
        raise InvalidParameterError("order must be 2 or 4")
    if t == 0.0:
        return np.array(psi, dtype=complex)

    n_steps = max(1, int(math.ceil(t / dt)))
    step = t / n_steps
    v = model.potential(grid.x, perturbed=perturbed)
    kin = grid.wavenumbers**2 / (2.0 * model.m)

    def strang(phi: np.ndarray, h: float) -> np.ndarray:
        phi = np.exp(-0.5j * h * v) * phi
        phi = np.fft.ifft(np.exp(-1j * h * kin) * np.fft.fft(phi))
        return np.exp(-0.5j * h * v) * phi

    substeps = [step] if order == 2 else [
        _YOSHIDA_W1 * step, _YOSHIDA_W0 * step, _YOSHIDA_W1 * step
    ]
    phi = np.array(psi, dtype=complex)
    for _ in range(n_steps):
        for h in substeps:
            phi = strang(phi, h)
    return phi


# ---------------------------------------------------------------------------
# characteristic periods
# ---------------------------------------------------------------------------


def _potential_minimum(model: _TrapBase) -> float:
    """Location of the V1 minimum (including gravity)."""
    if isinstance(model, HarmonicTrap):
        return model.x0 - model.g / model.omega**2
    if isinstance(model, EvanescentTrap):
        # U kappa e^(-kappa x) = m g  =>  x = ln(U kappa / (m g)) / kappa
        return math.log(model.U * model.kappa / (model.m * model.g)) / model.kappa
    if isinstance(model, GaussianTrap):
        # V'(x) = optical_slope(x) + m g = 0; the well minimum sits inside
        # |x| < w/2 (beyond that the Gaussian slope decays and gravity wins)
        if model.g == 0.0:
            return 0.0
        slope_peak = model.optical_slope(-0.5 * model.w)  # most negative slope
        if model.m * model.g >= -slope_peak:
            raise NoMinimumError("gravitational tilt removes the Gaussian trap minimum")
        return brentq(lambda x: model.optical_slope(x) + model.m * model.g,
                      -0.5 * model.w, 0.0, xtol=1e-14)
    raise NoMinimumError(f"no minimum rule for {type(model).__name__}")


def _curvature_at_minimum(model: _TrapBase, x0: float) -> float:
    """V1''(x_min); gravity is linear so only the optical part contributes."""
    if isinstance(model, HarmonicTrap):
        return model.m * model.omega**2
    if isinstance(model, EvanescentTrap):
        # at the minimum U kappa e^(-kappa x0) = m g, so V'' = kappa m g
        return model.kappa * model.m * model.g
    if isinstance(model, GaussianTrap):
        return model.optical_curvature(x0)
    raise NoMinimumError(f"no curvature rule for {type(model).__name__}")


def oscillation_period(model: _TrapBase) -> float:
    """T_osc = 2 pi / sqrt(V''(x_min) / m) at the V1 minimum."""
    if isinstance(model, HarmonicTrap):
        return 2.0 * math.pi / model.omega
    x0 = _potential_minimum(model)
    curv = _curvature_at_minimum(model, x0)
    if curv <= 0:
        raise NoMinimumError("potential has no quadratic minimum")
    return 2.0 * math.pi / math.sqrt(curv / model.m)


def bounce_period(model: _TrapBase, energy: float, n_nodes: int = 4096) -> float:
    """Classical oscillation period at the given energy (turning-point integral).

    T = 2 integral dx / sqrt(2 (E - V) / m) between the classical turning
    points, evaluated with Gauss-Chebyshev nodes that absorb the inverse-
    square-root endpoint singularities.
    """
    x0 = _potential_minimum(model)
    v0 = float(model.potential(x0))
    if energy <= v0:
        raise InvalidParameterError(f"energy {energy} not above the potential minimum {v0}")

    def f(x):
        return float(model.potential(x)) - energy

    span = 1.0
    while f(x0 - span) < 0:
        span *= 2.0
        if span > 1e9:
            raise NoMinimumError("no inner turning point")
    x_lo = brentq(f, x0 - span, x0, xtol=1e-14)
    span = 1.0
    while f(x0 + span) < 0:
        span *= 2.0
        if span > 1e9:
            raise NoMinimumError("no outer turning point")
    x_hi = brentq(f, x0, x0 + span, xtol=1e-14)

    mid, half = 0.5 * (x_lo + x_hi), 0.5 * (x_hi - x_lo)
    theta = (np.arange(n_nodes) + 0.5) * math.pi / n_nodes
    ts = np.cos(theta)
    xs = mid + half * ts
    vr = energy - model.potential(xs)
    vr = np.maximum(vr, 0.0)
    integrand = np.sqrt(1.0 - ts**2) / np.sqrt(2.0 * vr / model.m)
    return float(2.0 * half * math.pi / n_nodes * np.sum(integrand))


# ---------------------------------------------------------------------------
# unit mapping
# ---------------------------------------------------------------------------

_HBAR = 1.054_571_817e-34       # J s
_KB = 1.380_649e-23             # J / K
_G_EARTH = 9.806_65             # m / s^2


def physical_to_scaled(depth_microkelvin: float, waist_micrometer: float,
                       mass_kg: float, g: float = _G_EARTH) -> dict:
    """Map a physical Gaussian trap to the dimensionless hbar = m = 1 units.

    The length unit is the waist, the energy unit hbar^2 / (m w^2); returns
    the scaled {U, w, g} ready for `GaussianTrap` (w == 1 by construction).
    Example: a ~30 uK deep trap with ~50 um waist for a Rb-85 atom.
    """
    w_m = waist_micrometer * 1e-6
    e_unit = _HBAR**2 / (mass_kg * w_m**2)
    t_unit = _HBAR / e_unit
    u_scaled = depth_microkelvin * 1e-6 * _KB / e_unit
    g_scaled = g * mass_kg * w_m / e_unit
    return {"U": u_scaled, "w": 1.0, "g": g_scaled,
            "time_unit_seconds": t_unit, "energy_unit_joule": e_unit}
