import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfs2d import (
    Circle,
    ConfigError,
    DegenerateCurveError,
    Point2,
    PolarCurve,
    boundary_point,
    check_source_constraint,
    curve_names,
    make_curve,
    max_boundary_radius,
    outward_normal,
    sample_collocation,
    sample_sources,
)
from mfs2d.geometry import SourceSet, _uniform_params

ALL_NAMES = ["circle", "ellipse", "star_kite", "gamma_blob", "osc_r1", "osc_art", "eta1", "eta2"]


def fd_normal(curve, t, h=1e-6):
    """Finite-difference oracle: central-difference tangent rotated by -pi/2."""
    d = (curve.point(t + h) - curve.point(t - h)) / (2 * h)
    n = np.array([d[1], -d[0]]) / np.hypot(d[0], d[1])
    out = curve.point(t) - curve.interior_point()
    return n if np.dot(n, out) >= 0 else -n


class TestBoundaryPoint:
    def test_circle_radius_two(self):
        p = boundary_point(make_curve("circle", radius=2.0), 0.0)
        assert (p.x, p.y) == (2.0, 0.0)

    def test_eta2_at_zero(self):
        p = boundary_point(make_curve("eta2"), 0.0)
        assert p.x == pytest.approx(1.0, abs=1e-15)
        assert p.y == pytest.approx(1.0 / 6.0, abs=1e-15)

    def test_star_kite_at_zero_high_precision(self):
        # independent arbitrary-precision evaluation of the radial formula
        expected = float((mpmath.cos(0) + mpmath.sqrt(mpmath.mpf(18) / 5 - mpmath.sin(0) ** 2)) ** (mpmath.mpf(1) / 3))
        p = boundary_point(make_curve("star_kite"), 0.0)
        assert p.x == pytest.approx(expected, rel=1e-15)
        assert p.y == 0.0

    def test_unknown_name_is_config_error(self):
        with pytest.raises(ConfigError):
            make_curve("nonagon")

    def test_unknown_param_is_config_error(self):
        with pytest.raises(ConfigError):
            make_curve("star_kite", radius=2.0)

    def test_offset_string_form(self):
        curve = make_curve("offset(eta1, rho=0.05)")
        base = make_curve("eta1")
        t = np.linspace(0.0, 2 * np.pi, 17)
        d = np.linalg.norm(curve.point(t) - base.point(t), axis=1)
        assert np.allclose(d, 0.05, atol=1e-15)

    def test_offset_bad_rho(self):
        with pytest.raises(ConfigError):
            make_curve("offset(eta1, rho=abc)")
        with pytest.raises(ValueError):
            make_curve("offset(eta1, rho=-0.1)")


class TestOutwardNormal:
    def test_unit_circle_top(self):
        n = outward_normal(make_curve("circle"), math.pi / 2)
        assert np.allclose(n, [0.0, 1.0], atol=1e-15)

    def test_ellipse_axis_point(self):
        n = outward_normal(make_curve("ellipse"), 0.0)
        assert np.allclose(n, [1.0, 0.0], atol=1e-15)

    def test_eta1_matches_finite_differences(self):
        curve = make_curve("eta1")
        n = outward_normal(curve, 0.7)
        assert np.allclose(n, fd_normal(curve, 0.7), atol=1e-8)

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_all_catalog_normals_match_finite_differences(self, name):
        curve = make_curve(name)
        for t in np.linspace(0.1, 2 * np.pi, 9):
            assert np.allclose(outward_normal(curve, t), fd_normal(curve, t), atol=1e-7)

    def test_unit_norm(self):
        curve = make_curve("gamma_blob")
        t = np.linspace(0.0, 2 * np.pi, 50)
        n = outward_normal(curve, t)
        assert np.allclose(np.linalg.norm(n, axis=1), 1.0, atol=1e-14)


class TestSampling:
    def test_circle_four_points(self):
        pts = sample_collocation(make_curve("circle"), 4).points
        expected = {(1, 0), (-1, 0), (0, 1), (0, -1)}
        got = {(round(x, 12), round(y, 12)) for x, y in pts}
        assert got == {(float(a), float(b)) for a, b in expected}

    def test_single_point_is_parameter_two_pi(self):
        cs = sample_collocation(make_curve("eta2"), 1)
        assert cs.params[0] == pytest.approx(2 * math.pi)
        assert np.allclose(cs.points[0], make_curve("eta2").point(0.0), atol=1e-12)

    def test_star_radii_match_formula(self):
        cs = sample_collocation(make_curve("star_kite"), 8)
        t = cs.params
        expected = (np.cos(4 * t) + np.sqrt(18 / 5 - np.sin(4 * t) ** 2)) ** (1 / 3)
        assert np.allclose(cs.radii, expected, rtol=1e-13)

    def test_nonpositive_count_rejected(self):
        with pytest.raises(ValueError):
            sample_collocation(make_curve("circle"), 0)
        with pytest.raises(ValueError):
            sample_sources(make_curve("circle"), -3)

    def test_points_reevaluate_at_stored_params(self):
        for name in ("star_kite", "gamma_blob", "offset(eta2, rho=0.05)"):
            curve = make_curve(name)
            cs = sample_collocation(curve, 13)
            assert np.array_equal(cs.points, curve.point(cs.params))

    def test_source_polar_data(self):
        ss = sample_sources(make_curve("circle", radius=2.0), 6)
        assert np.allclose(ss.radii, 2.0, atol=1e-14)
        assert np.all((0.0 <= ss.angles) & (ss.angles < 2 * np.pi))
        rebuilt = ss.radii[:, None] * np.stack([np.cos(ss.angles), np.sin(ss.angles)], axis=1)
        assert np.allclose(rebuilt, ss.points, atol=1e-12)


class TestMaxBoundaryRadius:
    def test_unit_circle(self):
        assert max_boundary_radius(make_curve("circle")) == pytest.approx(1.0, abs=1e-12)

    def test_ellipse(self):
        assert max_boundary_radius(make_curve("ellipse")) == pytest.approx(2.0, abs=1e-10)

    def test_star_kite_analytic_and_self_convergent(self):
        analytic = (1 + math.sqrt(18 / 5)) ** (1 / 3)
        coarse = max_boundary_radius(make_curve("star_kite"), samples=2048)
        fine = max_boundary_radius(make_curve("star_kite"), samples=4096)
        assert coarse == pytest.approx(analytic, rel=1e-12)
        assert abs(fine - coarse) <= 1e-10 * coarse

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError):
            max_boundary_radius(make_curve("circle"), samples=100)


class TestSourceConstraint:
    def test_disk_sources_outside(self):
        ss = sample_sources(make_curve("circle", radius=1.1), 16)
        check = check_source_constraint(ss, 1.0)
        assert check.ok
        assert check.margin == pytest.approx(1 - 1 / 1.1, abs=1e-12)

    def test_disk_sources_inside(self):
        ss = sample_sources(make_curve("circle", radius=0.9), 16)
        assert not check_source_constraint(ss, 1.0).ok

    def test_eta2_with_ellipse_sources(self):
        # margin computed directly from the sampled source radii
        ss = sample_sources(make_curve("ellipse"), 40)
        r = max_boundary_radius(make_curve("eta2"))
        check = check_source_constraint(ss, r)
        assert check.margin == pytest.approx(1 - r / np.min(ss.radii), abs=1e-14)
        assert check.ok

    @given(
        radius=st.floats(min_value=1.05, max_value=50.0),
        grow=st.floats(min_value=1.0, max_value=10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_moving_sources_outward_never_flips_ok(self, radius, grow):
        ss = sample_sources(make_curve("circle", radius=radius), 8)
        scaled = SourceSet(
            points=ss.points * grow,
            params=ss.params,
            radii=ss.radii * grow,
            angles=ss.angles,
        )
        before = check_source_constraint(ss, 1.0)
        after = check_source_constraint(scaled, 1.0)
        assert after.margin >= before.margin - 1e-15
        if before.ok:
            assert after.ok


class TestCurveProperties:
    @pytest.mark.parametrize("name", ALL_NAMES + ["offset(eta1, rho=0.1)"])
    def test_closed_2pi_periodic(self, name):
        curve = make_curve(name)
        t = np.linspace(0.0, 2 * np.pi, 37)
        assert np.allclose(curve.point(t), curve.point(t + 2 * np.pi), atol=1e-12)

    def test_offset_reconstruction(self):
        base = make_curve("eta2")
        off = make_curve("offset(eta2, rho=0.05)")
        t = np.linspace(0.0, 2 * np.pi, 29)
        delta = off.point(t) - base.point(t)
        assert np.allclose(delta, 0.05 * outward_normal(base, t), atol=1e-15)

    def test_degenerate_radial_curve_rejected(self):
        with pytest.raises(DegenerateCurveError):
            PolarCurve("bad", np.cos, lambda t: -np.sin(t))

    def test_zero_tangent_rejected(self):
        from mfs2d import ParametricCurve

        frozen = ParametricCurve(
            "frozen", np.cos, np.sin, lambda t: 0.0 * t, lambda t: 0.0 * t
        )
        with pytest.raises(DegenerateCurveError):
            outward_normal(frozen, 0.3)

    def test_nonpositive_circle_radius_rejected(self):
        with pytest.raises(ValueError):
            Circle(radius=0.0)

    def test_catalog_listing(self):
        assert set(ALL_NAMES) == set(curve_names())


class TestPoint2:
    def test_polar_form(self):
        p = Point2(0.0, -2.0)
        assert p.r == pytest.approx(2.0)
        assert p.theta == pytest.approx(3 * math.pi / 2)

    @given(st.floats(-10, 10), st.floats(-10, 10))
    @settings(max_examples=50, deadline=None)
    def test_theta_range(self, x, y):
        p = Point2(x, y)
        assert 0.0 <= p.theta < 2 * math.pi + 1e-12
        assert p.r == pytest.approx(math.hypot(x, y))


def test_uniform_params_exclude_zero_include_two_pi():
    t = _uniform_params(5)
    assert t[0] > 0.0
    assert t[-1] == pytest.approx(2 * math.pi)
