"""Level tracking across a perturbation-strength grid.

Tracks a window of eigenstates through a family of deformed shapes by
maximal-overlap assignment between consecutive strength steps, bisecting
any step whose assignment is ambiguous, and annotates avoided crossings
as sufficiently deep local minima of adjacent-level gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AmbiguousTrackingError
from .geometry import BilliardShape, SymmetryClass, apply_perturbation
from .overlaps import OverlapConfig, overlap_matrix
from .solver import EigenBasis, SolverConfig, solve_window

__all__ = ["TrackingConfig", "AvoidedCrossing", "LevelTrack", "track_levels"]


@dataclass(frozen=True)
class TrackingConfig:
    min_overlap: float = 0.5      # below this a step is ambiguous and is bisected
    max_bisections: int = 6
    gap_fraction: float = 0.2     # avoided crossing: gap < fraction * mean spacing
    window_pad: float = 0.06      # extra half-width on the re-solve windows

    def to_dict(self) -> dict:
        return {
            "min_overlap": self.min_overlap,
            "max_bisections": self.max_bisections,
            "gap_fraction": self.gap_fraction,
            "window_pad": self.window_pad,
        }


@dataclass(frozen=True)
class AvoidedCrossing:
    """Local gap minimum between two adjacent tracked curves."""

    strength: float
    strength_index: int
    track_lo: int
    track_hi: int
    gap: float


@dataclass
class LevelTrack:
    strengths: np.ndarray
    bases: List[EigenBasis] = field(repr=False)
    # curves[t, i]: wavenumber of track t at strengths[i]
    curves: np.ndarray = field(repr=False)
    # step_overlaps[t, i]: |overlap| carried by track t across step i -> i+1
    step_overlaps: np.ndarray = field(repr=False)
    # state_indices[t, i]: index of track t's state inside bases[i]
    state_indices: np.ndarray = field(repr=False)
    crossings: List[AvoidedCrossing] = field(default_factory=list)

    @property
    def n_tracks(self) -> int:
        return self.curves.shape[0]


def _match(prev_states, prev_idx, basis_next, overlap_cfg):
    """Assign each tracked state to a distinct state of the next basis.

    Returns (new indices, |overlap| per track).
    """
    om = overlap_matrix(prev_states, basis_next, overlap_cfg)
    # rows: states of basis_next, cols: states of prev basis
    cost = -np.abs(om.entries[:, prev_idx])
    rows, cols = linear_sum_assignment(cost)
    order = np.argsort(cols)
    new_idx = rows[order]
    got = -cost[new_idx, np.arange(len(prev_idx))]
    return new_idx, got


def track_levels(
    shape: BilliardShape,
    cls: SymmetryClass,
    family: Callable[[float], object],
    strengths: Sequence[float],
    k_center: float,
    half_width: float,
    solver_cfg: SolverConfig = SolverConfig(),
    overlap_cfg: OverlapConfig = OverlapConfig(),
    cfg: TrackingConfig = TrackingConfig(),
) -> LevelTrack:
    """Track every state of the initial window across the strength grid.

    ``family`` maps a strength value to a perturbation (e.g. ``Dilation``).
    The solve window of each later step is recentered on the tracked states
    of the previous step so drifting spectra stay inside it.
    """
    strengths = [float(s) for s in strengths]
    if len(strengths) < 2:
        raise ValueError("need at least two strength values to track")

    def solve_at(strength: float, center: float, pad: float = 0.0) -> EigenBasis:
        deformed = apply_perturbation(shape, family(strength))
        return solve_window(deformed, cls, center, half_width + pad, solver_cfg)

    base0 = solve_at(strengths[0], k_center)
    if len(base0) == 0:
        raise AmbiguousTrackingError("initial window contains no states")

    grid = [strengths[0]]
    bases = [base0]
    indices = [np.arange(len(base0))]
    overlaps: List[np.ndarray] = []

    def advance(s_next: float, depth: int) -> None:
        prev_basis = bases[-1]
        prev_idx = indices[-1]
        # Predict where the tracked levels move (linear extrapolation from the
        # last step); without this a dilation step can shift the whole window
        # content past its own half-width.
        k_prev = prev_basis.ks()[prev_idx]
        if len(grid) >= 2:
            k_before = bases[-2].ks()[indices[-2]]
            slope = (k_prev - k_before) / (grid[-1] - grid[-2])
            predicted = k_prev + slope * (s_next - grid[-1])
        else:
            predicted = k_prev
        center = float(np.mean(predicted))
        # Padding keeps a tracked state that drifts slightly past the nominal
        # half-width (or whose position the extrapolation misjudges) inside
        # the re-solve window; losing it would make every bisection ambiguous.
        nxt = solve_at(s_next, center, cfg.window_pad)
        ambiguous = len(nxt) < len(prev_idx)
        if not ambiguous:
            new_idx, got = _match(prev_basis, prev_idx, nxt, overlap_cfg)
            ambiguous = got.min() < cfg.min_overlap
        if ambiguous:
            if depth >= cfg.max_bisections:
                raise AmbiguousTrackingError(
                    f"assignment ambiguous at strength {s_next} after "
                    f"{cfg.max_bisections} bisections"
                )
            mid = 0.5 * (grid[-1] + s_next)
            advance(mid, depth + 1)
            advance(s_next, depth + 1)
            return
        grid.append(s_next)
        bases.append(nxt)
        indices.append(new_idx)
        overlaps.append(got)

    for s in strengths[1:]:
        advance(s, 0)

    idx = np.vstack(indices).T                      # (n_tracks, n_steps)
    curves = np.vstack([b.ks()[indices[i]] for i, b in enumerate(bases)]).T
    step_overlaps = np.vstack(overlaps).T if overlaps else np.zeros((idx.shape[0], 0))

    track = LevelTrack(
        strengths=np.array(grid),
        bases=bases,
        curves=curves,
        step_overlaps=step_overlaps,
        state_indices=idx,
    )
    track.crossings = _find_crossings(track, cfg)
    return track


def _find_crossings(track: LevelTrack, cfg: TrackingConfig) -> List[AvoidedCrossing]:
    curves = track.curves
    n_tracks, n_steps = curves.shape
    if n_tracks < 2 or n_steps < 3:
        return []
    order = np.argsort(curves[:, 0])
    mean_spacing = float(np.mean(np.diff(np.sort(curves[:, 0])))) if n_tracks > 1 else math.inf
    found = []
    for a, b in zip(order[:-1], order[1:]):
        gap = np.abs(curves[b] - curves[a])
        for i in range(1, n_steps - 1):
            if gap[i] < gap[i - 1] and gap[i] <= gap[i + 1] and gap[i] < cfg.gap_fraction * mean_spacing:
                found.append(AvoidedCrossing(
                    strength=float(track.strengths[i]), strength_index=i,
                    track_lo=int(a), track_hi=int(b), gap=float(gap[i]),
                ))
    return sorted(found, key=lambda c: (c.strength_index, c.track_lo))
