"""Overlaps between eigenstates of perturbed and unperturbed billiards.

Overlaps are interior integrals over the intersection of the two domains
(hard walls force zero extension outside each domain).  They are computed
on a midpoint tensor grid with one half-spacing refinement; the refined
pair doubles as a convergence check and a Richardson extrapolation.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from .errors import QuadratureError
from .geometry import desymmetrize
from .quadrature import quarter_grid, spacing_for
from .solver import EigenBasis, EigenState, evaluate_states

__all__ = ["OverlapConfig", "OverlapMatrix", "overlap", "overlap_matrix"]


@dataclass(frozen=True)
class OverlapConfig:
    points_per_half_wavelength: float = 12.0
    richardson: bool = True
    tolerance: float = 1e-4       # allowed |I_h - I_{h/2}| before giving up
    degeneracy_tol: float = 1e-6  # |dk| grouping degenerate levels
    # Slack on |O| <= 1 and column deficiency >= 0.  Bounded below by the
    # states' own accuracy: the Rellich norm inherits the wall residual and
    # the solver's Gram correction leaves residual mutual tilts measured at
    # up to ~3.5e-4 (99th percentile ~1e-4) for wide stadium windows at
    # k ~ 100, so a column of a genuinely complete row set can exceed unit
    # sum-of-squares at that scale with perfect quadrature.
    entry_slack: float = 3e-4
    # "area": interior tensor-grid quadrature (reference).  "boundary": wall
    # integral via Green's identity, orders of magnitude faster for large
    # windows but needs one domain to contain the other; nearly resonant
    # pairs fall back to area quadrature automatically.
    method: str = "area"
    # |k_a^2 - k_b^2| below which entries use area quadrature.  The wall
    # integral divides by this difference, which amplifies not only quadrature
    # noise but also each state's irreducible wall residual (an error the
    # two-density disagreement check cannot see because it is common to both
    # densities), so the threshold must stay well above that residual scale.
    boundary_k2_tol: float = 1.0
    # Quadrature density for that near-resonant area fallback.  Those are a
    # handful of accidental pairs; a coarser grid than the reference area
    # method keeps them cheap, and the Richardson disagreement check still
    # guards the result.
    fallback_points_per_half_wavelength: float = 6.0

    def to_dict(self) -> dict:
        return {
            "points_per_half_wavelength": self.points_per_half_wavelength,
            "richardson": self.richardson,
            "tolerance": self.tolerance,
            "degeneracy_tol": self.degeneracy_tol,
            "method": self.method,
        }


@dataclass
class OverlapMatrix:
    """entries[m, n] = <state m of basis_b | state n of basis_a>."""

    entries: np.ndarray = field(repr=False)
    ks_a: np.ndarray = field(repr=False)
    ks_b: np.ndarray = field(repr=False)
    quadrature_disagreement: float = 0.0

    @property
    def shape(self):
        return self.entries.shape

    def row_capture(self) -> np.ndarray:
        """Per-row sum of squares: how much of each perturbed state the
        unperturbed window captures."""
        return np.sum(self.entries**2, axis=1)

    def column_capture(self) -> np.ndarray:
        """Per-column sum of squares (<= 1 up to quadrature slack)."""
        return np.sum(self.entries**2, axis=0)

    def diagonal(self) -> np.ndarray:
        n = min(self.entries.shape)
        return np.array([self.entries[i, i] for i in range(n)])


def _intersection_grid(shape_a, shape_b, cls, h: float):
    dom_a = desymmetrize(shape_a, cls)
    dom_b = desymmetrize(shape_b, cls)

    def inside(pts):
        return dom_a.inside(pts) & dom_b.inside(pts)

    x_ext = min(shape_a.x_extent, shape_b.x_extent)
    y_ext = min(shape_a.y_extent, shape_b.y_extent)
    return quarter_grid(inside, x_ext, y_ext, h)


def _raw_matrix(states_a: List[EigenState], states_b: List[EigenState], h: float):
    shape_a, shape_b = states_a[0].shape, states_b[0].shape
    cls = states_a[0].cls
    pts, cw = _intersection_grid(shape_a, shape_b, cls, h)
    vals_a = evaluate_states(states_a, pts)
    vals_b = evaluate_states(states_b, pts)
    return 4.0 * cw * (vals_b.T @ vals_a)


def _integrate(states_a, states_b, k_max: float, cfg: OverlapConfig):
    """(matrix, |I_h - I_{h/2}| max) with optional Richardson extrapolation."""
    h = spacing_for(k_max, cfg.points_per_half_wavelength)
    coarse = _raw_matrix(states_a, states_b, h)
    if not cfg.richardson:
        return coarse, 0.0
    fine = _raw_matrix(states_a, states_b, h / 2.0)
    disagreement = float(np.max(np.abs(fine - coarse)))
    if disagreement > cfg.tolerance:
        raise QuadratureError(
            f"overlap quadrature did not converge: successive grids disagree "
            f"by {disagreement:.3e} (tolerance {cfg.tolerance:.3e})"
        )
    return (4.0 * fine - coarse) / 3.0, disagreement


def _states_on_wall(states: List[EigenState], samples):
    """Values and outward normal derivatives of each state at wall samples,
    batched over runs of states sharing a trial basis."""
    n_pts = len(samples.positions)
    vals = np.empty((n_pts, len(states)))
    derivs = np.empty_like(vals)
    i = 0
    while i < len(states):
        j = i
        basis = states[i].basis
        while j < len(states) and states[j].basis is basis:
            j += 1
        coeffs = np.column_stack([s.coeffs for s in states[i:j]])
        vals[:, i:j] = basis.boundary_matrix(samples.positions) @ coeffs
        derivs[:, i:j] = basis.normal_derivative(samples, coeffs)
        i = j
    return vals, derivs


def _inner_domain(states_a, states_b, k_max: float):
    """The desymmetrized domain contained in the other (QuadratureError if
    neither contains the other)."""
    shape_a, shape_b = states_a[0].shape, states_b[0].shape
    cls = states_a[0].cls
    dom_a = desymmetrize(shape_a, cls)
    dom_b = desymmetrize(shape_b, cls)
    probe_a = dom_a.wall_samples(3.0, max(k_max / 10.0, 1.0)).positions
    if np.all(shape_b.signed_distance(probe_a) <= 1e-12):
        return dom_a
    probe_b = dom_b.wall_samples(3.0, max(k_max / 10.0, 1.0)).positions
    if np.all(shape_a.signed_distance(probe_b) <= 1e-12):
        return dom_b
    raise QuadratureError(
        "boundary overlap method requires one domain to contain the other; "
        "use the area method for general intersections"
    )


def _boundary_raw(states_a, states_b, small, k_max: float, density: float):
    """Green's-identity overlap numerators and denominators on one wall grid.

    For eigenfunctions u (wavenumber k_u) and v (k_v) of the two shapes,
    (k_u^2 - k_v^2) Int_small u v = Contour_wall (u dv/dn - v du/dn): both
    sides satisfy their Helmholtz equations on the inner domain and the
    symmetry-line terms vanish identically for a shared parity class.
    """
    samples = small.wall_samples(density, k_max)
    ua, dua = _states_on_wall(states_a, samples)
    ub, dub = _states_on_wall(states_b, samples)
    w = samples.weights[:, None]
    # num[m, n] = contour( u_a[:,n] * d_n u_b[:,m] - u_b[:,m] * d_n u_a[:,n] )
    num = (dub * w).T @ ua - (ub * w).T @ dua
    ks_a = np.array([s.k for s in states_a])
    ks_b = np.array([s.k for s in states_b])
    den = ks_a[None, :] ** 2 - ks_b[:, None] ** 2
    return num, den


def _integrate_boundary(states_a, states_b, k_max: float, cfg: OverlapConfig):
    """Full overlap matrix via the wall integral, with nearly resonant pairs
    (small k^2 difference, where the division is ill-conditioned) recomputed
    by area quadrature over the involved states only."""
    small = _inner_domain(states_a, states_b, k_max)
    num1, den = _boundary_raw(states_a, states_b, small, k_max,
                              2.0 * cfg.points_per_half_wavelength)
    num2, _ = _boundary_raw(states_a, states_b, small, k_max,
                            4.0 * cfg.points_per_half_wavelength)
    safe = np.abs(den) >= cfg.boundary_k2_tol
    entries = np.zeros_like(num2)
    entries[safe] = 4.0 * num2[safe] / den[safe]
    disagreement = float(np.max(np.abs(num2[safe] - num1[safe]) / np.abs(den[safe]))) * 4.0 if safe.any() else 0.0
    if disagreement > cfg.tolerance:
        raise QuadratureError(
            f"wall-integral overlap did not converge: successive wall grids "
            f"disagree by {disagreement:.3e} (tolerance {cfg.tolerance:.3e})"
        )
    if not np.all(safe):
        rows, cols = np.nonzero(~safe)
        urows = sorted(set(rows.tolist()))
        ucols = sorted(set(cols.tolist()))
        sub_cfg = dataclasses.replace(
            cfg, points_per_half_wavelength=cfg.fallback_points_per_half_wavelength)
        sub, sub_dis = _integrate([states_a[j] for j in ucols],
                                  [states_b[i] for i in urows], k_max, sub_cfg)
        disagreement = max(disagreement, sub_dis)
        row_pos = {i: p for p, i in enumerate(urows)}
        col_pos = {j: p for p, j in enumerate(ucols)}
        for i, j in zip(rows, cols):
            entries[i, j] = sub[row_pos[i], col_pos[j]]
    return entries, disagreement


def _degenerate_groups(ks: np.ndarray, tol: float):
    groups, current = [], [0]
    for i in range(1, len(ks)):
        if ks[i] - ks[current[-1]] <= tol:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    return [g for g in groups if len(g) > 1]


def _align_degenerate(entries: np.ndarray, ks_a: np.ndarray, ks_b: np.ndarray,
                      tol: float) -> np.ndarray:
    """Gauge-fix degenerate subspaces: rotate each degenerate multiplet by the
    orthogonal transform maximizing the trace of its overlap block.

    Inside a degenerate level the solver's individual states are an arbitrary
    orthonormal mix, so per-state overlaps are gauge dependent; the trace-
    maximal (orthogonal Procrustes) rotation makes them well defined.
    """
    out = entries.copy()
    # rows (basis B multiplets)
    for g in _degenerate_groups(ks_b, tol):
        mass = np.sum(out[g, :] ** 2, axis=0)
        cols = np.sort(np.argsort(mass)[::-1][: len(g)])
        block = out[np.ix_(g, cols)]
        u, _, vt = scipy.linalg.svd(block)
        out[g, :] = (u @ vt).T @ out[g, :]
    # columns (basis A multiplets)
    for g in _degenerate_groups(ks_a, tol):
        mass = np.sum(out[:, g] ** 2, axis=1)
        rows = np.sort(np.argsort(mass)[::-1][: len(g)])
        block = out[np.ix_(rows, g)]
        u, _, vt = scipy.linalg.svd(block)
        out[:, g] = out[:, g] @ (vt.T @ u.T)
    return out


def overlap(state_a: EigenState, state_b: EigenState,
            cfg: OverlapConfig = OverlapConfig()) -> float:
    """<state_b | state_a> over the intersection of the two domains.

    States of different parity classes are orthogonal by symmetry; that case
    returns exactly 0 without quadrature.
    """
    if state_a.cls != state_b.cls:
        return 0.0
    k_max = max(state_a.k, state_b.k)
    m, _ = _integrate([state_a], [state_b], k_max, cfg)
    return float(m[0, 0])


def overlap_matrix(basis_a: EigenBasis, basis_b: EigenBasis,
                   cfg: OverlapConfig = OverlapConfig()) -> OverlapMatrix:
    """Full rectangular matrix of pairwise overlaps, degeneracy gauge-fixed.

    Cross-parity bases give an exactly zero matrix (parity is conserved by
    the parity-even perturbation families).
    """
    ks_a = basis_a.ks()
    ks_b = basis_b.ks()
    if basis_a.cls != basis_b.cls or len(ks_a) == 0 or len(ks_b) == 0:
        return OverlapMatrix(entries=np.zeros((len(ks_b), len(ks_a))),
                             ks_a=ks_a, ks_b=ks_b)
    k_max = float(max(ks_a.max(), ks_b.max()))
    if cfg.method == "boundary":
        entries, disagreement = _integrate_boundary(basis_a.states,
                                                    basis_b.states, k_max, cfg)
    elif cfg.method == "area":
        entries, disagreement = _integrate(basis_a.states, basis_b.states,
                                           k_max, cfg)
    else:
        raise QuadratureError(f"unknown overlap method {cfg.method!r}")
    entries = _align_degenerate(entries, ks_a, ks_b, cfg.degeneracy_tol)

    # Tie the unitarity checks to the measured quadrature accuracy: the wall
    # integral's entry error scales with 1/(k_a^2 - k_b^2) and can exceed the
    # area method's floor when the two shapes are nearly identical.
    slack = max(cfg.entry_slack, 10.0 * disagreement)
    worst = float(np.max(np.abs(entries)))
    if worst > 1.0 + slack:
        raise QuadratureError(f"overlap entry magnitude {worst:.8f} exceeds 1")
    deficiency = 1.0 - np.sum(entries**2, axis=0)
    if float(deficiency.min()) < -slack:
        raise QuadratureError(
            f"column sum of squares exceeds 1 by {-deficiency.min():.3e}; "
            "truncation may only lose probability"
        )
    return OverlapMatrix(entries=entries, ks_a=ks_a, ks_b=ks_b,
                         quadrature_disagreement=disagreement)
