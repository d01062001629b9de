"""Overlap-matrix tests: unitarity, method agreement, and failure paths."""

import math

import numpy as np
import pytest

from echolab.errors import QuadratureError
from echolab.geometry import (
    Dilation,
    Rectangle,
    Stadium,
    Stretch,
    SymmetryClass,
    apply_perturbation,
)
from echolab.overlaps import OverlapConfig, OverlapMatrix, overlap, overlap_matrix
from echolab.solver import SolverConfig, solve_window

CLS = SymmetryClass(-1, -1)
CFG = SolverConfig(weyl_tolerance=3.0)


@pytest.fixture(scope="module")
def stadium_basis():
    return solve_window(Stadium(1.0, 2.0), CLS, 30.0, 0.6, CFG)


@pytest.fixture(scope="module")
def stretched_basis():
    shape = apply_perturbation(Stadium(1.0, 2.0), Stretch(0.01))
    return solve_window(shape, CLS, 30.0, 0.7, CFG)


def test_self_overlap_is_identity(stadium_basis):
    om = overlap_matrix(stadium_basis, stadium_basis)
    assert np.allclose(om.entries, np.eye(len(stadium_basis)), atol=5e-4)


def test_overlap_single_pair_matches_matrix(stadium_basis, stretched_basis):
    om = overlap_matrix(stadium_basis, stretched_basis)
    one = overlap(stadium_basis.states[0], stretched_basis.states[0])
    assert abs(one - om.entries[0, 0]) < 1e-6


def test_cross_parity_is_exactly_zero(stadium_basis):
    other = solve_window(Stadium(1.0, 2.0), SymmetryClass(1, 1), 30.0, 0.6, CFG)
    om = overlap_matrix(stadium_basis, other)
    assert np.all(om.entries == 0.0)
    assert overlap(stadium_basis.states[0], other.states[0]) == 0.0


def test_unitarity_bounds(stadium_basis, stretched_basis):
    om = overlap_matrix(stadium_basis, stretched_basis)
    assert np.max(np.abs(om.entries)) <= 1.0 + 1e-4
    assert np.max(om.column_capture()) <= 1.0 + 1e-4
    # the wider perturbed window captures nearly all of each base state
    # (edge states can shed a couple of percent past the window)
    assert np.min(om.column_capture()) > 0.95


def test_small_stretch_is_near_diagonal(stadium_basis, stretched_basis):
    om = overlap_matrix(stadium_basis, stretched_basis)
    n = len(stadium_basis)
    # rows are ordered by k; a gentle stretch keeps levels in order
    diag = np.abs(om.entries[:n, :n].diagonal())
    assert np.min(diag) > 0.9


def test_boundary_method_agrees_with_area(stadium_basis, stretched_basis):
    area = overlap_matrix(stadium_basis, stretched_basis)
    wall = overlap_matrix(stadium_basis, stretched_basis,
                          OverlapConfig(method="boundary"))
    assert np.max(np.abs(area.entries - wall.entries)) < 1e-4


def test_boundary_method_requires_nested_domains():
    a = solve_window(Rectangle(1.1, 0.9), CLS, 16.0, 2.0, CFG)
    b = solve_window(Rectangle(0.9, 1.1), CLS, 16.0, 2.0, CFG)
    assert len(a) and len(b)
    with pytest.raises(QuadratureError, match="contain"):
        overlap_matrix(a, b, OverlapConfig(method="boundary"))


def test_empty_basis_gives_empty_matrix():
    full = solve_window(Rectangle(1.1, 0.9), CLS, 16.0, 2.0, CFG)
    # the (-, -) class of this rectangle has no levels in [19, 21]
    empty = solve_window(Rectangle(1.1, 0.9), CLS, 20.0, 1.0, CFG)
    assert len(empty) == 0
    om = overlap_matrix(full, empty)
    assert om.shape == (0, len(full))


def test_unknown_method_rejected(stadium_basis):
    with pytest.raises(QuadratureError, match="unknown"):
        overlap_matrix(stadium_basis, stadium_basis, OverlapConfig(method="midpoint"))


def test_unconverged_quadrature_raises(stadium_basis, stretched_basis):
    with pytest.raises(QuadratureError, match="did not converge"):
        overlap_matrix(stadium_basis, stretched_basis, OverlapConfig(tolerance=1e-15))


def test_richardson_off_reports_zero_disagreement(stadium_basis):
    om = overlap_matrix(stadium_basis, stadium_basis, OverlapConfig(richardson=False))
    assert om.quadrature_disagreement == 0.0
    assert np.allclose(om.entries, np.eye(len(stadium_basis)), atol=1e-3)


def test_degenerate_multiplet_gauge_fixed():
    # square modes (1, 3)/(3, 1) are degenerate; after the Procrustes gauge
    # fix their overlap block with the dilated square must be diagonal
    square = Rectangle(1.0, 1.0)
    cls = SymmetryClass(1, 1)
    k_deg = math.pi * math.sqrt(10.0)
    base = solve_window(square, cls, k_deg, 0.4, CFG)
    s = 1.002
    pert = solve_window(apply_perturbation(square, Dilation(s)), cls, k_deg / s, 0.4, CFG)
    om = overlap_matrix(base, pert)
    off = om.entries - np.diag(np.diag(om.entries))
    assert np.max(np.abs(off)) < 1e-3
    assert np.min(np.abs(np.diag(om.entries))) > 0.99


def test_capture_helpers_shapes(stadium_basis, stretched_basis):
    om = overlap_matrix(stadium_basis, stretched_basis)
    assert om.shape == (len(stretched_basis), len(stadium_basis))
    assert om.row_capture().shape == (len(stretched_basis),)
    assert om.column_capture().shape == (len(stadium_basis),)
    assert len(om.diagonal()) == min(om.shape)


def test_dilation_overlap_against_separable_quadrature():
    # rectangle modes are products of sines, so the overlap with the dilated
    # rectangle factorizes into two 1-d integrals computable to near machine
    # precision
    a, b, s = 1.0, 0.7, 1.004
    cls = SymmetryClass(-1, -1)
    base = solve_window(Rectangle(a, b), cls, 20.0, 1.0, CFG)
    pert = solve_window(Rectangle(s * a, s * b), cls, 20.0 / s, 1.0, CFG)

    def sine_overlap(m, length):
        # both normalized 1-d modes on the intersection [-L/2, L/2]
        x = np.linspace(-0.5 * length, 0.5 * length, 20001)
        f = np.sin(m * np.pi * (x + 0.5 * length) / length)
        g = np.sin(m * np.pi * (x + 0.5 * s * length) / (s * length))
        return np.trapezoid(f * g, x) * 2.0 / (length * math.sqrt(s))

    # identify (m, n) for each unperturbed state directly from its k
    pairs = []
    for st in base.states:
        best = min(((m, n) for m in range(2, 16, 2) for n in range(2, 16, 2)),
                   key=lambda mn: abs(math.pi * math.hypot(mn[0] / a, mn[1] / b) - st.k))
        pairs.append(best)

    om = overlap_matrix(base, pert)
    for col, (m, n) in enumerate(pairs):
        row = int(np.argmax(np.abs(om.entries[:, col])))
        expected = sine_overlap(m, a) * sine_overlap(n, b)
        assert abs(abs(om.entries[row, col]) - abs(expected)) < 1e-5
