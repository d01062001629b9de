import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echolab.errors import InvalidParameterError
from echolab.geometry import (
    Circle,
    Dilation,
    Physical,
    Rectangle,
    SymmetryClass,
    Stadium,
    Stretch,
    apply_perturbation,
    boundary_samples,
    desymmetrize,
    equivalent_displacement,
    perturbation_from_dict,
    shape_from_dict,
    shape_to_dict,
)

SHAPES = [Stadium(1.0, 2.0), Rectangle(2.0, 1.0), Circle(1.3)]


class TestShapes:
    def test_stadium_area_perimeter(self):
        s = Stadium(1.0, 2.0)
        assert s.area() == pytest.approx(math.pi + 4.0)
        assert s.perimeter() == pytest.approx(2.0 * math.pi + 4.0)

    def test_rectangle_area_perimeter(self):
        r = Rectangle(2.0, 1.0)
        assert r.area() == pytest.approx(2.0)
        assert r.perimeter() == pytest.approx(6.0)

    def test_circle_area_perimeter(self):
        c = Circle(1.3)
        assert c.area() == pytest.approx(math.pi * 1.69)
        assert c.perimeter() == pytest.approx(2.0 * math.pi * 1.3)

    @pytest.mark.parametrize("shape", SHAPES)
    def test_inside_matches_signed_distance(self, shape):
        rng = np.random.default_rng(7)
        pts = rng.uniform(-3.0, 3.0, size=(500, 2))
        sd = shape.signed_distance(pts)
        inside = shape.inside(pts)
        np.testing.assert_array_equal(inside, sd < 0.0)

    @pytest.mark.parametrize("shape", SHAPES)
    def test_extents_bound_the_shape(self, shape):
        rng = np.random.default_rng(3)
        pts = rng.uniform(-4.0, 4.0, size=(2000, 2))
        ins = pts[shape.inside(pts)]
        assert np.all(np.abs(ins[:, 0]) <= shape.x_extent + 1e-12)
        assert np.all(np.abs(ins[:, 1]) <= shape.y_extent + 1e-12)

    def test_invalid_parameters_raise(self):
        with pytest.raises(InvalidParameterError):
            Stadium(-1.0, 2.0)
        with pytest.raises(InvalidParameterError):
            Rectangle(0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            Circle(-0.1)

    @pytest.mark.parametrize("shape", SHAPES)
    def test_dict_roundtrip(self, shape):
        assert shape_from_dict(shape_to_dict(shape)) == shape


class TestPerturbations:
    def test_dilation_scales_stadium(self):
        d = apply_perturbation(Stadium(1.0, 2.0), Dilation(1.5))
        assert d == Stadium(1.5, 3.0)

    def test_stretch_extends_straight_section_only(self):
        d = apply_perturbation(Stadium(1.0, 2.0), Stretch(0.25))
        assert d == Stadium(1.0, 2.25)

    def test_physical_offsets_circle_radius(self):
        d = apply_perturbation(Circle(1.0), Physical(0.01))
        assert d == Circle(1.01)

    def test_identity_strengths(self):
        s = Stadium(1.0, 2.0)
        assert apply_perturbation(s, Dilation(1.0)) == s
        assert apply_perturbation(s, Stretch(0.0)) == s
        assert apply_perturbation(s, Physical(0.0)) == s

    def test_nonpositive_dilation_rejected(self):
        with pytest.raises(InvalidParameterError):
            apply_perturbation(Stadium(1.0, 2.0), Dilation(0.0))

    def test_equivalent_displacement_is_physical_d(self):
        # by construction (dA/P) reduces to exactly d for a normal offset,
        # to first order in d
        for shape in SHAPES:
            d = 1e-6
            eps = equivalent_displacement(shape, Physical(d))
            assert eps == pytest.approx(d, rel=1e-4)

    @given(s=st.floats(min_value=1.0, max_value=1.5))
    @settings(max_examples=30, deadline=None)
    def test_dilation_scales_area_quadratically(self, s):
        shp = Stadium(1.0, 2.0)
        d = apply_perturbation(shp, Dilation(s))
        assert d.area() == pytest.approx(s * s * shp.area(), rel=1e-12)
        assert d.perimeter() == pytest.approx(s * shp.perimeter(), rel=1e-12)

    @given(d=st.floats(min_value=0.0, max_value=0.2))
    @settings(max_examples=30, deadline=None)
    def test_outward_families_contain_the_original(self, d):
        shp = Stadium(1.0, 2.0)
        rng = np.random.default_rng(11)
        pts = rng.uniform(-2.5, 2.5, size=(400, 2))
        ins = pts[shp.inside(pts)]
        for pert in (Physical(d), Stretch(d), Dilation(1.0 + d)):
            new = apply_perturbation(shp, pert)
            assert np.all(new.inside(ins))

    def test_perturbation_dict_roundtrip(self):
        for pert in (Dilation(1.01), Stretch(2e-3), Physical(5e-4)):
            d = perturbation_from_dict(
                {"type": type(pert).__name__.lower(),
                 **{k: getattr(pert, k) for k in pert.__dataclass_fields__}}
            )
            assert d == pert


class TestSymmetry:
    def test_parity_string_roundtrip(self):
        for s in ("--", "-+", "+-", "++"):
            assert str(SymmetryClass.from_string(s)) == s

    def test_bad_parity_string(self):
        with pytest.raises(InvalidParameterError):
            SymmetryClass.from_string("+0")

    def test_all_classes(self):
        assert len(list(SymmetryClass.all_classes())) == 4

    @pytest.mark.parametrize("shape", SHAPES)
    def test_quarter_domain_area(self, shape):
        dom = desymmetrize(shape, SymmetryClass(-1, -1))
        assert dom.area == pytest.approx(shape.area() / 4.0)

    def test_weyl_counts_sum_over_classes(self):
        # summed over the four parity classes the smoothed counts reproduce
        # the full-domain Weyl law (area and full perimeter terms)
        shape = Stadium(1.0, 2.0)
        k = 80.0
        total = sum(
            desymmetrize(shape, c).weyl_count(k) for c in SymmetryClass.all_classes()
        )
        full = shape.area() * k * k / (4.0 * math.pi) - shape.perimeter() * k / (4.0 * math.pi)
        assert total == pytest.approx(full, rel=2e-3)

    def test_dirichlet_neumann_split(self):
        shape = Rectangle(2.0, 1.0)
        dom_dd = desymmetrize(shape, SymmetryClass(-1, -1))
        dom_nn = desymmetrize(shape, SymmetryClass(+1, +1))
        # odd parity puts Dirichlet on both symmetry axes
        assert dom_dd.dirichlet_length == pytest.approx(
            dom_dd.wall_length + dom_dd.x_axis_length + dom_dd.y_axis_length
        )
        assert dom_nn.neumann_length == pytest.approx(
            dom_nn.x_axis_length + dom_nn.y_axis_length
        )


class TestBoundarySamples:
    @pytest.mark.parametrize("shape", SHAPES)
    def test_weights_sum_to_perimeter(self, shape):
        s = boundary_samples(shape, 10.0, 50.0)
        assert s.weights.sum() == pytest.approx(shape.perimeter(), rel=1e-9)

    @pytest.mark.parametrize("shape", SHAPES)
    def test_normals_are_unit_and_outward(self, shape):
        s = boundary_samples(shape, 10.0, 50.0)
        np.testing.assert_allclose(np.linalg.norm(s.normals, axis=1), 1.0, atol=1e-12)
        outside = s.positions + 1e-6 * s.normals
        inside = s.positions - 1e-6 * s.normals
        assert not np.any(shape.inside(outside))
        assert np.all(shape.inside(inside))

    @pytest.mark.parametrize("shape", SHAPES)
    def test_quarter_wall_samples_cover_physical_wall(self, shape):
        dom = desymmetrize(shape, SymmetryClass(-1, +1))
        s = dom.wall_samples(10.0, 50.0)
        assert np.all(s.positions[:, 0] >= -1e-12)
        assert np.all(s.positions[:, 1] >= -1e-12)
        assert s.weights.sum() == pytest.approx(dom.wall_length, rel=1e-9)
