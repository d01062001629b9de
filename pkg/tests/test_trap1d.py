import math

import numpy as np
import pytest

from echolab.errors import (
    GridLeakageError,
    InsufficientBoundStatesError,
    InvalidParameterError,
    NoMinimumError,
    StepSizeError,
)
from echolab.trap1d import (
    EvanescentTrap,
    GaussianTrap,
    Grid1D,
    HarmonicTrap,
    bounce_period,
    build_pair,
    eigensolve_1d,
    oscillation_period,
    physical_to_scaled,
    propagate,
)

GRID = Grid1D(-12.0, 12.0, 512)


class TestGrid:
    def test_spacing_and_points(self):
        g = Grid1D(-1.0, 1.0, 256)
        assert g.dx == pytest.approx(2.0 / 256)
        assert g.x[0] == -1.0
        assert len(g.x) == 256
        assert g.x[-1] == pytest.approx(1.0 - g.dx)

    def test_too_few_points(self):
        with pytest.raises(InvalidParameterError):
            Grid1D(-1.0, 1.0, 100)

    def test_empty_extent(self):
        with pytest.raises(InvalidParameterError):
            Grid1D(1.0, 1.0, 256)

    def test_wavenumbers_match_fft_convention(self):
        g = Grid1D(-1.0, 1.0, 256)
        np.testing.assert_allclose(
            g.wavenumbers, 2.0 * math.pi * np.fft.fftfreq(256, d=g.dx)
        )


class TestTrapModels:
    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameterError):
            GaussianTrap(U=-1.0, w=1.0)
        with pytest.raises(InvalidParameterError):
            EvanescentTrap(U=1.0, kappa=0.0, g=1.0)
        with pytest.raises(InvalidParameterError):
            EvanescentTrap(U=1.0, kappa=1.0, g=0.0)
        with pytest.raises(InvalidParameterError):
            HarmonicTrap(omega=0.0)

    def test_perturbation_scales_optical_part_only(self):
        t = GaussianTrap(U=5.0, w=2.0, g=0.3, eta=0.1)
        x = np.linspace(-3.0, 3.0, 7)
        v1 = t.potential(x, perturbed=False)
        v2 = t.potential(x, perturbed=True)
        np.testing.assert_allclose(v2 - v1, 0.1 * t.optical(x), atol=1e-14)

    def test_to_dict_names(self):
        assert GaussianTrap(U=2.0, w=1.0).to_dict()["type"] == "gaussian"
        assert EvanescentTrap(U=1.0, kappa=1.0, g=1.0).to_dict()["type"] == "evanescent"
        assert HarmonicTrap().to_dict()["type"] == "harmonic"


class TestEigensolver:
    def test_harmonic_levels(self):
        s = eigensolve_1d(HarmonicTrap(omega=1.0), GRID, 10)
        np.testing.assert_allclose(s.energies, np.arange(10) + 0.5, atol=1e-9)

    def test_harmonic_with_gravity_is_shifted_oscillator(self):
        # completing the square: gravity displaces the well and lowers every
        # level by m g^2 / (2 omega^2)
        t0 = HarmonicTrap(omega=1.0)
        t1 = HarmonicTrap(omega=1.0, g=0.5)
        e0 = eigensolve_1d(t0, GRID, 8).energies
        e1 = eigensolve_1d(t1, GRID, 8).energies
        np.testing.assert_allclose(e1 - e0, -0.125, atol=1e-9)

    def test_orthonormality_and_gauge(self):
        s = eigensolve_1d(GaussianTrap(U=40.0, w=3.0, g=0.1), GRID, 6)
        gram = s.psi @ s.psi.T * s.grid.dx
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-10)
        for row in s.psi:
            j = np.argmax(np.abs(row) > 1e-8 * np.abs(row).max())
            assert row[j] > 0

    def test_fd_cross_validates_fourier(self):
        t = GaussianTrap(U=40.0, w=3.0)
        ef = eigensolve_1d(t, GRID, 5, method="fourier").energies
        ed = eigensolve_1d(t, GRID, 5, method="fd").energies
        # second-order differences: O(dx^2) accuracy only
        np.testing.assert_allclose(ed, ef, atol=0.05)

    def test_unknown_method(self):
        with pytest.raises(InvalidParameterError):
            eigensolve_1d(HarmonicTrap(), GRID, 3, method="magic")

    def test_too_few_bound_states(self):
        with pytest.raises(InsufficientBoundStatesError):
            eigensolve_1d(GaussianTrap(U=2.0, w=1.0), GRID, 40)

    def test_grid_leakage_detected(self):
        # a wide shallow well whose high states reach the box edge
        with pytest.raises((GridLeakageError, InsufficientBoundStatesError)):
            eigensolve_1d(GaussianTrap(U=30.0, w=10.0), Grid1D(-6.0, 6.0, 256), 12)

    def test_evanescent_intensity_rescaling_shifts_rigidly(self):
        grid = Grid1D(-2.0, 50.0, 1024)
        base = EvanescentTrap(U=500.0, kappa=1.0, g=1.0)
        up = EvanescentTrap(U=500.0 * 1.5, kappa=1.0, g=1.0)
        e0 = eigensolve_1d(base, grid, 12).energies
        e1 = eigensolve_1d(up, grid, 12).energies
        shift = e1 - e0
        expected = base.m * base.g / base.kappa * math.log(1.5)
        np.testing.assert_allclose(shift, expected, rtol=1e-9)


class TestBuildPair:
    def test_unperturbed_pair_is_identity(self):
        t = GaussianTrap(U=40.0, w=3.0, g=0.1, eta=0.0)
        s1, s2, o = build_pair(t, GRID, 6)
        np.testing.assert_allclose(o, np.eye(6), atol=1e-12)
        np.testing.assert_allclose(s1.energies, s2.energies, atol=1e-12)

    def test_small_perturbation_nearly_diagonal(self):
        t = GaussianTrap(U=40.0, w=3.0, g=0.1, eta=1e-3)
        _, _, o = build_pair(t, GRID, 6)
        assert np.abs(np.diag(o)).min() > 0.999
        assert np.abs(o - np.diag(np.diag(o))).max() < 0.05

    def test_overlap_rows_are_unit_norm(self):
        t = GaussianTrap(U=40.0, w=3.0, g=0.1, eta=0.05)
        _, _, o = build_pair(t, GRID, 6)
        # both manifolds solved on the same complete grid: O is a section of
        # an orthogonal matrix, its columns can only lose probability
        colsum = np.sum(o**2, axis=0)
        assert np.all(colsum <= 1.0 + 1e-12)


class TestPropagator:
    def test_eigenstate_acquires_pure_phase(self):
        t = GaussianTrap(U=40.0, w=3.0, g=0.1)
        s = eigensolve_1d(t, GRID, 3)
        tspan = 5.0
        phi = propagate(s.psi[2].astype(complex), t, GRID, tspan, dt=5e-3)
        expected = s.psi[2] * np.exp(-1j * s.energies[2] * tspan)
        assert np.max(np.abs(phi - expected)) < 1e-6

    def test_norm_preserved(self):
        t = GaussianTrap(U=40.0, w=3.0)
        s = eigensolve_1d(t, GRID, 2)
        psi = (s.psi[0] + s.psi[1]) / math.sqrt(2.0)
        phi = propagate(psi.astype(complex), t, GRID, 3.0, dt=1e-2)
        assert np.sum(np.abs(phi) ** 2) * GRID.dx == pytest.approx(1.0, abs=1e-12)

    def test_second_order_converges_slower(self):
        t = HarmonicTrap(omega=1.0)
        s = eigensolve_1d(t, GRID, 1)
        psi = s.psi[0].astype(complex)
        exact = psi * np.exp(-1j * s.energies[0] * 1.0)
        err2 = np.abs(propagate(psi, t, GRID, 1.0, 0.05, order=2) - exact).max()
        err4 = np.abs(propagate(psi, t, GRID, 1.0, 0.05, order=4) - exact).max()
        assert err4 < err2 / 10.0

    def test_zero_time_is_identity(self):
        psi = np.ones(GRID.n, dtype=complex)
        out = propagate(psi, HarmonicTrap(), GRID, 0.0, 1e-2)
        np.testing.assert_array_equal(out, psi)

    def test_step_size_guard(self):
        psi = np.ones(GRID.n, dtype=complex)
        with pytest.raises(StepSizeError):
            propagate(psi, HarmonicTrap(), GRID, 1.0, dt=0.1, e_max=100.0)

    def test_invalid_arguments(self):
        psi = np.ones(GRID.n, dtype=complex)
        with pytest.raises(InvalidParameterError):
            propagate(psi, HarmonicTrap(), GRID, -1.0, 1e-2)
        with pytest.raises(InvalidParameterError):
            propagate(psi, HarmonicTrap(), GRID, 1.0, 1e-2, order=3)


class TestPeriods:
    def test_harmonic_periods(self):
        t = HarmonicTrap(omega=2.5, g=0.3)
        assert oscillation_period(t) == pytest.approx(2.0 * math.pi / 2.5)
        # the harmonic bounce period is energy independent
        assert bounce_period(t, energy=1.7) == pytest.approx(
            2.0 * math.pi / 2.5, rel=1e-8
        )

    def test_evanescent_oscillation_period(self):
        t = EvanescentTrap(U=2000.0, kappa=1.0, g=1.0)
        assert oscillation_period(t) == pytest.approx(2.0 * math.pi, rel=1e-12)

    def test_evanescent_steep_wall_bouncer_limit(self):
        # for a near-hard wall the classical period approaches the ideal
        # gravity bouncer 2 sqrt(2 E / (m g^2))
        t = EvanescentTrap(U=1e8, kappa=20.0, g=1.0)
        e = 30.0
        ideal = 2.0 * math.sqrt(2.0 * e)
        assert bounce_period(t, e) == pytest.approx(ideal, rel=0.02)

    def test_gaussian_small_oscillation(self):
        t = GaussianTrap(U=50.0, w=2.0, g=0.0)
        assert oscillation_period(t) == pytest.approx(
            2.0 * math.pi / math.sqrt(4.0 * 50.0 / 4.0), rel=1e-12
        )

    def test_gravity_removes_gaussian_minimum(self):
        with pytest.raises(NoMinimumError):
            oscillation_period(GaussianTrap(U=1.0, w=1.0, g=10.0))

    def test_bounce_energy_below_minimum(self):
        with pytest.raises(InvalidParameterError):
            bounce_period(HarmonicTrap(omega=1.0), energy=-1.0)


class TestUnitMapping:
    def test_gaussian_mapping_identities(self):
        out = physical_to_scaled(30.0, 50.0, 1.41e-25)
        assert out["w"] == 1.0
        assert out["U"] > 0 and out["g"] > 0
        # energy and time units must be consistent: t = hbar / E
        assert out["time_unit_seconds"] * out["energy_unit_joule"] == pytest.approx(
            1.054571817e-34, rel=1e-12
        )

    def test_depth_scales_linearly(self):
        a = physical_to_scaled(10.0, 50.0, 1.41e-25)
        b = physical_to_scaled(20.0, 50.0, 1.41e-25)
        assert b["U"] == pytest.approx(2.0 * a["U"], rel=1e-12)
