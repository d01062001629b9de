"""Highly excited Dirichlet eigenstates of hard-wall billiards.

The reference solver is the scaling method: at a slice wavenumber k0 it
forms the boundary tension form F and its k-derivative F' over the
parity-adapted plane-wave basis and solves the single generalized
eigenproblem F x = lambda F' x.  For a scaling family of an eigenstate at
k_n the tension behaves as f(k) = 2 (k - k_n)^2, so lambda = (k0 - k_n)/2
and every state near k0 is recovered from one factorization.

A slower boundary-SVD wavenumber scan over the same trial basis
(`scan_window`) provides an independent cross-check of the eigenvalues.

States are normalized to unit L2 norm over the *full* domain using the
exact Rellich-type boundary identity

    \\int |psi|^2 dA = \\oint [ (r.n)(u_n^2 - u_s^2 + k^2 u^2)
                               + 2 (r.t) u_s u_n ] ds / (2 k^2),

(u_n, u_s: normal and tangential derivatives) which holds for any Helmholtz
solution, leaky or not.  Every added term vanishes on the symmetry lines for
every parity class, so integrating over the physical wall of the quarter
domain and multiplying by four is still exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
import scipy.linalg

from .basis import PlaneWaveBasis
from .errors import ConvergenceError, IncompleteBasisError
from .geometry import (
    BilliardShape,
    FundamentalDomain,
    SymmetryClass,
    desymmetrize,
)
from .quadrature import quarter_grid, spacing_for

__all__ = [
    "SolverConfig",
    "EigenState",
    "EigenBasis",
    "solve_window",
    "scan_window",
    "evaluate_states",
]


@dataclass(frozen=True)
class SolverConfig:
    basis_factor: float = 2.5
    points_per_wavelength: float = 12.0
    slice_width: float = 0.2
    whitening_cutoff: float = 1e-13
    quality_factor: float = 1e-8  # reject states with quality > factor * k^2
    weyl_tolerance: float = 2.0
    dedup_k_tol: float = 1e-4
    error_coefficient: float = 1.0  # bound on |k error| / |k - k0|^3 of one slice
    min_claim_margin: float = 1e-3  # floor on the coarse-estimate error budget
    refine: bool = True
    refine_offset: float = 0.005  # keep the refinement center off the estimate
    rescue_offset: float = 0.02   # re-estimation center for suspect estimates
    rescue_radius: float = 0.008  # how far a distorted estimate can wander
    # Interior Gram tilt above which states are orthogonalized.  Residual
    # tilts up to the threshold remain; 5e-4 keeps them an order below the
    # tightest downstream consumer (1e-3-scale cross-overlap checks) while
    # limiting the basis growth the correction causes (each corrected state
    # borrows its partners' wave sets).
    tilt_threshold: float = 5e-4
    raise_on_incomplete: bool = True

    def to_dict(self) -> dict:
        return {
            "basis_factor": self.basis_factor,
            "points_per_wavelength": self.points_per_wavelength,
            "slice_width": self.slice_width,
            "whitening_cutoff": self.whitening_cutoff,
            "quality_factor": self.quality_factor,
            "weyl_tolerance": self.weyl_tolerance,
            "dedup_k_tol": self.dedup_k_tol,
        }


@dataclass
class EigenState:
    """One normalized Dirichlet eigenstate of the desymmetrized billiard."""

    k: float
    cls: SymmetryClass
    coeffs: np.ndarray = field(repr=False)
    shape: BilliardShape
    quality: float
    basis: PlaneWaveBasis = field(repr=False)

    @property
    def energy(self) -> float:
        """E = k^2 in hbar = 2m = 1 units."""
        return self.k**2

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """psi at arbitrary points of the plane; exactly 0 outside the domain."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        vals = self.basis.evaluate(points, self.coeffs)[:, 0]
        vals[~self.shape.inside(points)] = 0.0
        return vals


@dataclass
class EigenBasis:
    shape: BilliardShape
    cls: SymmetryClass
    k_lo: float
    k_hi: float
    states: List[EigenState]
    weyl_expected: float
    weyl_found: int
    complete: bool

    def ks(self) -> np.ndarray:
        return np.array([s.k for s in self.states])

    def __len__(self) -> int:
        return len(self.states)


# ---------------------------------------------------------------------------
# scaling method
# ---------------------------------------------------------------------------


def _solve_slice(domain: FundamentalDomain, k0: float, keep_halfwidth: float, cfg: SolverConfig):
    """All eigen-k in [k0 - keep, k0 + keep] from one scaling-method solve.

    Returns (ks, coeff_matrix, basis, samples).
    """
    basis = PlaneWaveBasis.for_domain(domain, k0, cfg.basis_factor)
    samples = domain.wall_samples(cfg.points_per_wavelength, k0)
    rn = np.einsum("ij,ij->i", samples.positions, samples.normals)
    if np.any(rn <= 0):
        raise ConvergenceError("domain is not star-shaped about the origin")
    w = samples.weights / rn

    b, bk = basis.boundary_matrices_with_k_derivative(samples.positions)
    bw = b * w[:, None]
    f = b.T @ bw
    fp = bk.T @ bw + bw.T @ bk
    f = 0.5 * (f + f.T)
    fp = 0.5 * (fp + fp.T)

    s, v = scipy.linalg.eigh(f)
    keep = s > cfg.whitening_cutoff * s[-1]
    if keep.sum() < 4:
        raise ConvergenceError("tension form numerically rank deficient; enlarge the basis")
    white = v[:, keep] / np.sqrt(s[keep])[None, :]
    m = white.T @ fp @ white
    m = 0.5 * (m + m.T)
    mu, y = scipy.linalg.eigh(m)

    with np.errstate(divide="ignore"):
        ks = k0 - 2.0 / mu
    sel = np.isfinite(ks) & (np.abs(ks - k0) <= keep_halfwidth)
    coeffs = white @ y[:, sel]
    return ks[sel], coeffs, basis, samples


def _normalize_and_grade(domain: FundamentalDomain, basis: PlaneWaveBasis, ks, coeffs, cfg):
    """Rellich-normalize states (full-domain norm 1) and compute wall quality.

    The scaling method returns the state at k_n as a combination over the
    slice basis at k0 *of the scaled coordinates*: psi_n(x) = u(k_n x / k0).
    Equivalently the eigenfunction uses the same directions and coefficients
    with all wavevectors rescaled by k_n/k0, which is what each state's
    private basis stores.
    """
    states = []
    # Grade on a denser, independent wall sampling: at the solver's own
    # collocation points the residual is minimized and flatters both the
    # quality figure and the norm's leakage terms.
    samples = domain.wall_samples(2.0 * cfg.points_per_wavelength, basis.k)
    nx, ny = samples.normals[:, 0], samples.normals[:, 1]
    tx, ty = -ny, nx
    rn = samples.positions[:, 0] * nx + samples.positions[:, 1] * ny
    rt = samples.positions[:, 0] * tx + samples.positions[:, 1] * ty
    wall_len = samples.weights.sum()
    for i, k in enumerate(ks):
        scale = k / basis.k
        state_basis = PlaneWaveBasis(k=float(k), cls=basis.cls,
                                     kx=scale * basis.kx, ky=scale * basis.ky)
        # Exact boundary identity for the L2 norm of any Helmholtz solution
        # (the u and tangential-derivative terms matter because the trial
        # state does not vanish exactly on the wall).  Both extra terms are
        # zero on the symmetry lines for every parity class, so integrating
        # over the physical wall only is still correct.
        gx, gy = state_basis.gradient_matrices(samples.positions)
        ux, uy = gx @ coeffs[:, i], gy @ coeffs[:, i]
        uv = state_basis.boundary_matrix(samples.positions) @ coeffs[:, i]
        un = nx * ux + ny * uy
        us = tx * ux + ty * uy
        quarter_norm_sq = float(
            samples.weights @ (rn * (un**2 - us**2 + k * k * uv**2) + 2.0 * rt * us * un)
        ) / (2.0 * k * k)
        full_norm = math.sqrt(max(4.0 * quarter_norm_sq, 0.0))
        if full_norm == 0.0:
            continue
        c = coeffs[:, i] / full_norm
        bvals = uv / full_norm
        quality = float(samples.weights @ bvals**2) / wall_len
        if quality > cfg.quality_factor * k * k:
            continue
        states.append(
            EigenState(k=float(k), cls=domain.cls, coeffs=c, shape=domain.shape,
                       quality=quality, basis=state_basis)
        )
    return states


def _interior_gram(domain: FundamentalDomain, states: List[EigenState]) -> np.ndarray:
    """Quarter-domain Gram matrix of a few states (used for duplicate checks)."""
    k_max = max(s.k for s in states)
    pts, cw = quarter_grid(domain.inside, domain.shape.x_extent, domain.shape.y_extent,
                           spacing_for(k_max, 4.0))
    vals = np.column_stack([s.basis.evaluate(pts, s.coeffs)[:, 0] for s in states])
    return 4.0 * cw * (vals.T @ vals)


def _dedup(domain: FundamentalDomain, candidates, cfg: SolverConfig) -> List[EigenState]:
    """Merge slice results: cluster by k, keep the nearest slice's multiplet.

    candidates: list of (state, slice_center).
    """
    candidates = sorted(candidates, key=lambda t: t[0].k)
    clusters, current = [], []
    for item in candidates:
        if current and item[0].k - current[-1][0].k > cfg.dedup_k_tol:
            clusters.append(current)
            current = []
        current.append(item)
    if current:
        clusters.append(current)

    kept: List[EigenState] = []
    for cluster in clusters:
        by_slice: dict = {}
        for state, center in cluster:
            by_slice.setdefault(center, []).append(state)
        k_mean = sum(s.k for s, _ in cluster) / len(cluster)
        multiplicity = max(len(v) for v in by_slice.values())
        best_center = min(
            (c for c, v in by_slice.items() if len(v) == multiplicity),
            key=lambda c: abs(c - k_mean),
        )
        group = sorted(by_slice[best_center], key=lambda s: s.k)
        if multiplicity > 1:
            # genuine near-degenerate multiplet: make it L2-orthonormal so the
            # "two states with overlap > 0.99 are the same" invariant holds
            gram = _interior_gram(domain, group)
            evals, evecs = scipy.linalg.eigh(gram)
            good = evals > 1e-6 * evals[-1]
            loewdin = evecs[:, good] / np.sqrt(evals[good])[None, :]
            coeff_mat = np.column_stack([s.coeffs for s in group]) @ loewdin
            group = [replace(group[j], coeffs=coeff_mat[:, j]) for j in range(coeff_mat.shape[1])]
        kept.extend(group)
    return sorted(kept, key=lambda s: s.k)


def _orthonormalize_close(domain: FundamentalDomain, states: List[EigenState],
                          cfg: SolverConfig) -> List[EigenState]:
    """Repair mutual orthogonality of the returned states.

    States refined from different expansion centers tilt toward their
    neighbors by roughly (eigenvalue error)/(gap) -- up to ~0.1 for gaps of
    a few 1e-3 and still ~1e-2 an order of magnitude further out.  The
    measured interior Gram drives a symmetric (Loewdin) correction.  The
    correction term borrowed from a partner at wavenumber k_j is rebuilt at
    the host wavenumber k_i by rescaling the partner's wavevectors, so every
    corrected state remains a pure Helmholtz solution at its own k -- a
    property the boundary-integral overlap formula relies on.  The rescaling
    changes the borrowed function only at relative order |k_i - k_j| x
    domain size, leaving a correction residual of ~1e-2 of the tilt.

    Tilt decays with the level gap, but every *adjacent* pair exceeds any
    useful threshold, so the tilt graph of a dense window is one long chain.
    Correcting with the full connected-component basis would multiply every
    state's wave count by the component size; instead each host keeps only
    the borrowed terms whose Loewdin weight is significant, which in
    practice means its few genuine partners.
    """
    if len(states) < 2:
        return states
    gram = _interior_gram(domain, states)
    norms = np.sqrt(np.diag(gram))
    corr = gram / np.outer(norms, norms)

    # a pair overlapping at order one *and* agreeing in k is the same state
    # reached from two refinement centers: keep the better-graded copy.
    # The k gate matters: a badly contaminated refinement can overlap a
    # *distinct* neighbor a few 1e-3 away at order one, and that neighbor
    # must be orthogonalized, not discarded.
    dup_tol = 10.0 * cfg.dedup_k_tol
    keep: List[int] = []
    for i in range(len(states)):
        dup = next((j for j in keep if abs(corr[i, j]) > 0.8
                    and abs(states[i].k - states[j].k) < dup_tol), None)
        if dup is None:
            keep.append(i)
        elif states[i].quality < states[dup].quality:
            keep[keep.index(dup)] = i
    states = [states[i] for i in keep]
    gram = gram[np.ix_(keep, keep)]
    corr = corr[np.ix_(keep, keep)]

    # connected components of measurable tilt (well above the ~1e-5
    # quadrature noise of the Gram itself)
    n = len(states)
    adj = np.abs(corr) > cfg.tilt_threshold
    np.fill_diagonal(adj, False)
    out: List[Optional[EigenState]] = [None] * n
    seen = np.zeros(n, dtype=bool)
    for start in range(n):
        if seen[start]:
            continue
        comp, stack = [], [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in np.nonzero(adj[v])[0]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comp.sort()
        if len(comp) == 1:
            out[start] = states[start]
            continue
        sub = gram[np.ix_(comp, comp)]
        evals, evecs = scipy.linalg.eigh(sub)
        loewdin = (evecs / np.sqrt(evals)[None, :]) @ evecs.T
        members = [states[i] for i in comp]
        # borrowed weight ~ tilt/2; dropping sub-threshold terms leaves a
        # residual tilt no larger than the threshold itself
        cut = 0.5 * cfg.tilt_threshold
        for col, i in enumerate(comp):
            host = members[col]
            rows = [row for row in range(len(comp))
                    if row == col or abs(loewdin[row, col]) >= cut]
            part = [members[row] for row in rows]
            basis = PlaneWaveBasis(
                k=host.k, cls=host.basis.cls,
                kx=np.concatenate([(host.k / m.k) * m.basis.kx for m in part]),
                ky=np.concatenate([(host.k / m.k) * m.basis.ky for m in part]),
            )
            coeffs = np.concatenate(
                [loewdin[row, col] * members[row].coeffs for row in rows]
            )
            out[i] = replace(host, coeffs=coeffs, basis=basis)
    return [s for s in out if s is not None]


def _refine_estimate(domain: FundamentalDomain, k_est: float, bound: float,
                     cfg: SolverConfig, direction: float = 1.0):
    """Graded states from a narrow re-solve around one coarse estimate.

    Center the refinement a little off the estimate: a state that sits
    exactly at the expansion wavenumber has vanishing wall tension and
    would be swallowed by the whitening truncation.  ``direction`` picks
    which side the center moves to, so the caller can steer it away from a
    neighboring estimate -- a neighbor landing on the center gets swallowed
    the same way and bleeds into the refined state.
    """
    off = cfg.refine_offset * (1.0 if direction >= 0 else -1.0)
    rks, rcoeffs, rbasis, _ = _solve_slice(domain, k_est + off, abs(off) + 4 * bound, cfg)
    near = np.abs(rks - k_est) <= 2 * bound + cfg.error_coefficient * abs(off) ** 3
    return _normalize_and_grade(domain, rbasis, rks[near], rcoeffs[:, near], cfg)


def _suspected_gaps(ks: np.ndarray, k_lo: float, k_hi: float, mean_spacing: float):
    edges = np.concatenate([[k_lo], ks, [k_hi]])
    gaps = np.diff(edges)
    return [(float(edges[i]), float(edges[i + 1])) for i in np.nonzero(gaps > 3.0 * mean_spacing)[0]]


def solve_window(
    shape: BilliardShape,
    cls: SymmetryClass,
    k_center: float,
    half_width: float,
    cfg: SolverConfig = SolverConfig(),
) -> EigenBasis:
    """All Dirichlet eigenstates of the desymmetrized domain with
    k in [k_center - half_width, k_center + half_width]."""
    if k_center <= 0 or half_width <= 0:
        raise ValueError("k_center and half_width must be positive")
    domain = desymmetrize(shape, cls)
    k_lo, k_hi = k_center - half_width, k_center + half_width

    # shave an ulp-scale epsilon so float noise in the window width cannot
    # bump the slice count (and hence the error bound) discontinuously
    n_slices = max(1, math.ceil((k_hi - k_lo) / cfg.slice_width - 1e-9))
    width = (k_hi - k_lo) / n_slices
    # worst-case coarse eigenvalue error at the edge of a slice's claim region;
    # the cubic model is optimistic for shapes the plane-wave set represents
    # imperfectly (wall-curvature jumps), so never let the budget drop below
    # the floor that the width-0.2 default implies
    bound = max(cfg.error_coefficient * (0.5 * width) ** 3, cfg.min_claim_margin)
    candidates = []
    for i in range(n_slices):
        c_lo, c_hi = k_lo + i * width, k_lo + (i + 1) * width
        k0 = 0.5 * (c_lo + c_hi)
        if cfg.refine:
            # coarse pass: estimates only; overlap claims by the error bound so
            # no state near a partition line can fall through
            ks, coeffs, basis, samples = _solve_slice(domain, k0, 0.5 * width + 2 * bound, cfg)
            claim = (ks >= c_lo - bound) & (ks < c_hi + bound)

            def _clear_side(k_est, pool):
                # refine on the side with the larger gap to the next estimate
                others = pool[np.abs(pool - k_est) > 1e-9]
                above = others[others > k_est]
                below = others[others < k_est]
                up = float(above.min() - k_est) if len(above) else math.inf
                dn = float(k_est - below.max()) if len(below) else math.inf
                return 1.0 if up >= dn else -1.0

            for k_est in ks[claim]:
                direction = _clear_side(float(k_est), ks)
                states = _refine_estimate(domain, float(k_est), bound, cfg, direction)
                if not states:
                    # A state lying too close to the coarse expansion point has
                    # its tension direction swallowed by the whitening cutoff,
                    # and the recovered wavenumber can be off by a few 1e-3 --
                    # outside the refinement window, which then comes up empty.
                    # Re-estimate from a center well away from the suspect
                    # value, then refine each recovered estimate normally.
                    r_off = cfg.rescue_offset
                    rks, _, _, _ = _solve_slice(
                        domain, float(k_est) + r_off, r_off + cfg.rescue_radius, cfg
                    )
                    for k2 in rks[np.abs(rks - k_est) <= cfg.rescue_radius]:
                        states.extend(_refine_estimate(domain, float(k2), bound, cfg,
                                                       _clear_side(float(k2), rks)))
                candidates.extend((s, float(k_est)) for s in states)
        else:
            ks, coeffs, basis, samples = _solve_slice(domain, k0, 0.5 * width + 2 * bound, cfg)
            claim = (ks >= c_lo - bound) & (ks < c_hi + bound)
            states = _normalize_and_grade(domain, basis, ks[claim], coeffs[:, claim], cfg)
            candidates.extend((s, k0) for s in states)

    states = _dedup(domain, candidates, cfg)
    if cfg.tilt_threshold > 0.0:
        # do this before trimming to the window so a partner just outside
        # the requested range still participates in the correction
        states = _orthonormalize_close(domain, states, cfg)
    states = [s for s in states if k_lo <= s.k <= k_hi]

    expected = domain.weyl_count(k_hi) - domain.weyl_count(k_lo)
    mean_spacing = (k_hi - k_lo) / max(expected, 1.0)
    complete = abs(len(states) - expected) <= cfg.weyl_tolerance
    if not complete and cfg.raise_on_incomplete:
        raise IncompleteBasisError(
            f"Weyl audit: found {len(states)} states in [{k_lo}, {k_hi}] but expected "
            f"{expected:.1f} (tolerance {cfg.weyl_tolerance})",
            suspected_intervals=_suspected_gaps(np.array([s.k for s in states]), k_lo, k_hi, mean_spacing),
        )
    return EigenBasis(
        shape=shape, cls=cls, k_lo=k_lo, k_hi=k_hi, states=states,
        weyl_expected=expected, weyl_found=len(states), complete=complete,
    )


def evaluate_states(states: List[EigenState], points: np.ndarray) -> np.ndarray:
    """(P, S) values of many states, batching states that share a trial basis."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty((len(points), len(states)))
    by_basis: dict = {}
    for idx, s in enumerate(states):
        by_basis.setdefault(id(s.basis), (s.basis, []))[1].append(idx)
    for basis, idxs in by_basis.values():
        coeffs = np.column_stack([states[i].coeffs for i in idxs])
        out[:, idxs] = basis.evaluate(points, coeffs)
    return out


# ---------------------------------------------------------------------------
# fallback: boundary-SVD wavenumber scan (cross-validation path)
# ---------------------------------------------------------------------------


def _tension_factory(domain: FundamentalDomain, k_ref: float, cfg: SolverConfig):
    """Boundary-to-total norm angle of the best trial state, as a function of k.

    Stacks the weighted wall-value block on top of an interior-value block and
    orthonormalizes the columns with a pivoted QR; the smallest singular value
    of the wall block of Q is then the sine of the principal angle between the
    trial space and the space of functions vanishing on the wall.  Working on
    the stacked matrix (rather than its normal equations) keeps the
    conditioning of the ill-posed plane-wave set linear instead of squared,
    which is what makes the minima sharp enough to locate accurately.

    Boundary samples, interior points and the direction set are all frozen at
    k_ref so t(k) is a smooth function of k alone.
    """
    samples = domain.wall_samples(cfg.points_per_wavelength, k_ref)
    n = math.ceil(cfg.basis_factor * domain.perimeter * k_ref / (2.0 * math.pi))
    theta = (np.arange(n) + 0.5) * (math.pi / 2.0) / n
    pts, cw = quarter_grid(domain.inside, domain.shape.x_extent, domain.shape.y_extent,
                           spacing_for(k_ref, 3.0))
    sqrt_w = np.sqrt(samples.weights)
    n_wall = len(sqrt_w)

    def stacked_at(k: float) -> np.ndarray:
        basis = PlaneWaveBasis(k=k, cls=domain.cls, kx=k * np.cos(theta), ky=k * np.sin(theta))
        bnd = basis.boundary_matrix(samples.positions) * sqrt_w[:, None]
        interior = basis.evaluate(pts, np.eye(n)) * math.sqrt(cw)
        return np.vstack([bnd, interior])

    # Freeze the numerical rank at k_ref: re-deciding it at every k makes
    # t(k) jump whenever a pivot crosses the threshold, which manufactures
    # spurious local minima.
    _, r_ref, _ = scipy.linalg.qr(stacked_at(k_ref), mode="economic", pivoting=True)
    diag = np.abs(np.diag(r_ref))
    rank = int(np.sum(diag > 1e-14 * diag[0]))

    def tension(k: float) -> float:
        q, _, _ = scipy.linalg.qr(stacked_at(k), mode="economic", pivoting=True)
        sv = scipy.linalg.svd(q[:n_wall, :rank], compute_uv=False)
        return float(sv[-1])

    return tension


def scan_window(
    shape: BilliardShape,
    cls: SymmetryClass,
    k_lo: float,
    k_hi: float,
    cfg: SolverConfig = SolverConfig(),
    grid_factor: float = 8.0,
    accept_angle: float = 5e-3,
) -> np.ndarray:
    """Eigen-k via minima of the boundary angle t(k); independent of the
    scaling method's eigenproblem, same trial-basis family.

    Degenerate levels collapse to a single minimum, so the result lists
    *distinct* wavenumbers.  Accuracy is limited by how well the plane-wave
    family can represent the eigenfunctions at double precision: effectively
    exact (relative ~1e-8) for separable shapes, but only ~1e-5 relative for
    the stadium, whose wall-curvature jump leaves a residual floor that
    shifts the minima first-order.  The scaling method is immune to that
    floor (its eigenvalues are stationary points, so the error is second
    order) and remains the reference.
    """
    from scipy.optimize import minimize_scalar

    domain = desymmetrize(shape, cls)
    k_ref = k_hi
    tension = _tension_factory(domain, k_ref, cfg)
    density = max(domain.weyl_count(k_hi) - domain.weyl_count(k_lo), 1.0) / (k_hi - k_lo)
    step = 1.0 / (grid_factor * density)
    grid = np.arange(k_lo, k_hi + step, step)
    vals = np.array([tension(k) for k in grid])

    ks = []
    for i in range(1, len(grid) - 1):
        if vals[i] < vals[i - 1] and vals[i] < vals[i + 1]:
            res = minimize_scalar(tension, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                  options={"xatol": 1e-10})
            if res.fun < accept_angle:
                ks.append(res.x)
    return np.array(sorted(ks))
