"""Level-tracking tests on small windows of the rectangle and stadium."""

import numpy as np
import pytest

from echolab.errors import AmbiguousTrackingError
from echolab.geometry import Dilation, Rectangle, Stadium, Stretch, SymmetryClass
from echolab.overlaps import OverlapConfig
from echolab.solver import SolverConfig
from echolab.tracking import AvoidedCrossing, TrackingConfig, track_levels

CLS = SymmetryClass(-1, -1)
SOLVER = SolverConfig(weyl_tolerance=3.0)


def test_dilation_tracks_scale_exactly():
    strengths = np.array([0.0, 0.004, 0.008, 0.012])
    track = track_levels(
        Stadium(1.0, 2.0), CLS, lambda s: Dilation(1.0 + s), strengths,
        30.0, 0.5, SOLVER,
    )
    assert track.n_tracks >= 4
    assert track.curves.shape == (track.n_tracks, len(strengths))
    # k(s) * (1 + s) is invariant for a pure dilation
    invariant = track.curves * (1.0 + strengths)[None, :]
    rel = np.abs(invariant - invariant[:, :1]) / invariant[:, :1]
    # wavenumber accuracy follows state quality: tracks whose states the
    # plane-wave set represents well hold the invariant to ~1e-6, while a
    # poorly represented state (quality ~1e-6 at this low k) can wander by
    # a few 1e-3 in absolute k
    quality = np.array([
        max(basis.states[track.state_indices[t, i]].quality
            for i, basis in enumerate(track.bases))
        for t in range(track.n_tracks)
    ])
    good = quality < 1e-6
    assert np.count_nonzero(good) >= 4
    assert np.max(rel[good]) < 5e-6
    assert np.max(rel) < 5e-4
    # every step keeps almost the full overlap
    assert np.min(track.step_overlaps) > 0.99


def test_state_indices_address_bases():
    strengths = np.array([0.0, 0.005, 0.01])
    track = track_levels(
        Rectangle(1.0, 0.7), CLS, lambda s: Dilation(1.0 + s), strengths,
        20.0, 1.0, SOLVER,
    )
    for i, basis in enumerate(track.bases):
        ks = basis.ks()
        for t in range(track.n_tracks):
            assert track.curves[t, i] == ks[track.state_indices[t, i]]


def test_needs_at_least_two_strengths():
    with pytest.raises(ValueError):
        track_levels(Rectangle(1.0, 0.7), CLS, lambda s: Dilation(1.0 + s),
                     [0.0], 20.0, 1.0, SOLVER)


def test_large_step_is_bisected():
    # a coarse dilation grid (one step of 0.012) only succeeds through
    # bisection; forbidding bisection must raise the ambiguity error
    strengths = np.array([0.0, 0.012])
    kwargs = dict(k_center=30.0, half_width=0.5, solver_cfg=SOLVER)
    track = track_levels(Stadium(1.0, 2.0), CLS, lambda s: Dilation(1.0 + s),
                         strengths, cfg=TrackingConfig(min_overlap=0.97), **kwargs)
    assert np.min(track.step_overlaps) > 0.97
    with pytest.raises(AmbiguousTrackingError):
        track_levels(Stadium(1.0, 2.0), CLS, lambda s: Dilation(1.0 + s),
                     strengths, cfg=TrackingConfig(min_overlap=0.97, max_bisections=0),
                     **kwargs)


def test_stretch_finds_avoided_crossing():
    # the two stadium levels near k = 29.94/29.96 repel under a straight-
    # section length change, with the gap minimum near dl = -0.002; the
    # tracker must keep the curves sorted-crossing-free and report it
    strengths = np.linspace(-0.012, 0.008, 9)
    track = track_levels(
        Stadium(1.0, 2.0), CLS, lambda s: Stretch(s), strengths,
        30.0, 0.5, SOLVER, OverlapConfig(),
        TrackingConfig(gap_fraction=0.6),
    )
    assert track.crossings, "expected at least one avoided crossing"
    for c in track.crossings:
        assert isinstance(c, AvoidedCrossing)
        assert strengths[0] < c.strength < strengths[-1]
        assert c.strength == strengths[c.strength_index]
        gap = abs(track.curves[c.track_hi, c.strength_index]
                  - track.curves[c.track_lo, c.strength_index])
        assert gap == pytest.approx(c.gap)
