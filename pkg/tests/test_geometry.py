"""Polyline primitives: angles, arc length, curvature, resampling."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racelab import geometry


def regular_polygon(n: int, radius: float, phase: float = 0.0) -> np.ndarray:
    t = phase + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(t), radius * np.sin(t)])


class TestWrapAngle:
    @given(st.floats(-50.0, 50.0))
    def test_range_and_equivalence(self, a):
        w = geometry.wrap_angle(a)
        assert -math.pi < w <= math.pi
        # same angle modulo 2*pi
        assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)

    def test_boundary_maps_to_plus_pi(self):
        assert geometry.wrap_angle(math.pi) == math.pi
        assert geometry.wrap_angle(-math.pi) == math.pi
        assert geometry.wrap_angle(3.0 * math.pi) == pytest.approx(math.pi)

    def test_array_matches_scalar(self):
        a = np.linspace(-10.0, 10.0, 101)
        w = geometry.wrap_angle_array(a)
        assert np.allclose(w, [geometry.wrap_angle(v) for v in a], atol=0.0)


class TestArcLength:
    def test_cumulative_starts_at_zero_and_increases(self):
        pts = np.array([[0.0, 0.0], [3.0, 4.0], [3.0, 6.0]])
        s = geometry.cumulative_arclength(pts)
        assert s[0] == 0.0
        assert np.allclose(s, [0.0, 5.0, 7.0])

    def test_loop_length_unit_square(self):
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        assert geometry.loop_length(square) == pytest.approx(4.0)


class TestSignedCurvature:
    def test_circle_points_have_curvature_one_over_radius(self):
        # Menger curvature of any three points on a circle is exactly 1/R.
        for radius in (0.5, 3.0, 100.0):
            pts = regular_polygon(64, radius)
            kappa = geometry.signed_curvature(pts, closed=True)
            assert np.allclose(kappa, 1.0 / radius, atol=1e-12)

    def test_clockwise_circle_is_negative(self):
        pts = regular_polygon(64, 2.0)[::-1]
        kappa = geometry.signed_curvature(pts, closed=True)
        assert np.all(kappa < 0)
        assert np.allclose(kappa, -0.5, atol=1e-12)

    def test_collinear_points_have_zero_curvature(self):
        pts = np.column_stack([np.linspace(0, 9, 10), np.zeros(10)])
        kappa = geometry.signed_curvature(pts, closed=False)
        assert np.all(kappa == 0.0)

    def test_open_polyline_endpoints_are_zero(self):
        pts = regular_polygon(16, 1.0)
        kappa = geometry.signed_curvature(pts, closed=False)
        assert kappa[0] == 0.0 and kappa[-1] == 0.0
        assert np.allclose(kappa[1:-1], 1.0, atol=1e-12)


class TestResampleLoop:
    def test_even_spacing_and_closure(self):
        # spacing is uniform in arclength; chords across polygon vertices
        # come out marginally shorter, hence the loose band here
        pts = regular_polygon(50, 3.0)
        out = geometry.resample_loop(pts, 0.2)
        closed = np.vstack([out, out[:1]])
        gaps = np.hypot(*np.diff(closed, axis=0).T)
        assert np.allclose(gaps, 0.2, atol=5e-3)

    def test_exact_on_square_with_divisible_sides(self):
        # every sample lands on an edge and every chord runs along one,
        # so chord length equals the requested spacing exactly
        square = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
        out = geometry.resample_loop(square, 0.25)
        assert len(out) == 32
        closed = np.vstack([out, out[:1]])
        gaps = np.hypot(*np.diff(closed, axis=0).T)
        assert np.allclose(gaps, 0.25, atol=1e-12)
        on_boundary = (
            np.isclose(out, 0.0, atol=1e-12) | np.isclose(out, 2.0, atol=1e-12)
        ).any(axis=1)
        assert on_boundary.all()

    def test_drops_duplicate_closing_point(self):
        pts = regular_polygon(40, 2.0)
        explicit = np.vstack([pts, pts[:1]])
        a = geometry.resample_loop(pts, 0.3)
        b = geometry.resample_loop(explicit, 0.3)
        assert np.allclose(a, b, atol=0.0)

    def test_preserves_total_length(self):
        pts = regular_polygon(200, 5.0)
        out = geometry.resample_loop(pts, 0.1)
        assert geometry.loop_length(out) == pytest.approx(
            geometry.loop_length(pts), rel=1e-3
        )


class TestTangentsAndNormals:
    def test_ccw_circle_left_normals_point_inward(self):
        pts = regular_polygon(128, 2.0)
        normals = geometry.left_normals(geometry.loop_tangents(pts))
        # inward on a CCW circle means opposite the radial direction
        radial = pts / np.hypot(pts[:, 0], pts[:, 1])[:, None]
        assert np.all(np.einsum("ij,ij->i", normals, radial) < -0.99)

    def test_normals_are_unit(self):
        pts = regular_polygon(37, 1.3, phase=0.4)
        normals = geometry.left_normals(geometry.loop_tangents(pts))
        assert np.allclose(np.hypot(normals[:, 0], normals[:, 1]), 1.0, atol=1e-12)


class TestSignedLoopArea:
    def test_ccw_positive_cw_negative(self):
        square = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
        assert geometry.signed_loop_area(square) == pytest.approx(4.0)
        assert geometry.signed_loop_area(square[::-1]) == pytest.approx(-4.0)


class TestSmoothLoop:
    def test_fixed_point_on_circle_center(self):
        # smoothing is an average of symmetric neighbours: the centroid stays
        pts = regular_polygon(60, 1.0)
        out = geometry.smooth_loop(pts, window=5, passes=3)
        assert np.allclose(out.mean(axis=0), pts.mean(axis=0), atol=1e-12)
        # and a convex loop shrinks, never grows
        assert geometry.loop_length(out) < geometry.loop_length(pts)

    def test_small_input_returned_unchanged(self):
        pts = regular_polygon(4, 1.0)
        out = geometry.smooth_loop(pts, window=7)
        assert out is pts


class TestProjectToSegments:
    def test_projects_onto_interior(self):
        starts = np.array([[0.0, 0.0], [1.0, 0.0]])
        dirs = np.array([[1.0, 0.0], [0.0, 1.0]])
        len2 = np.array([1.0, 1.0])
        i, t, d2 = geometry.project_to_segments(
            np.array([0.25, 0.3]), starts, dirs, len2
        )
        assert i == 0 and t == pytest.approx(0.25) and d2 == pytest.approx(0.09)

    def test_clamps_to_endpoint(self):
        starts = np.array([[0.0, 0.0]])
        dirs = np.array([[1.0, 0.0]])
        i, t, d2 = geometry.project_to_segments(
            np.array([2.0, 1.0]), starts, dirs, np.array([1.0])
        )
        assert i == 0 and t == 1.0 and d2 == pytest.approx(2.0)

    def test_tie_picks_lowest_index(self):
        # two identical segments: the projection must be deterministic
        starts = np.array([[0.0, 0.0], [0.0, 0.0]])
        dirs = np.array([[1.0, 0.0], [1.0, 0.0]])
        i, _, _ = geometry.project_to_segments(
            np.array([0.5, 0.1]), starts, dirs, np.array([1.0, 1.0])
        )
        assert i == 0


class TestSegmentsIntersect:
    def test_crossing(self):
        assert geometry.segments_intersect(
            np.array([0.0, -1.0]), np.array([0.0, 1.0]),
            np.array([-1.0, 0.0]), np.array([1.0, 0.0]),
        )

    def test_disjoint(self):
        assert not geometry.segments_intersect(
            np.array([0.0, 0.0]), np.array([1.0, 0.0]),
            np.array([0.0, 1.0]), np.array([1.0, 1.0]),
        )

    def test_parallel_never_intersect(self):
        assert not geometry.segments_intersect(
            np.array([0.0, 0.0]), np.array([1.0, 0.0]),
            np.array([0.0, 0.5]), np.array([1.0, 0.5]),
        )


@settings(max_examples=50)
@given(
    n=st.integers(8, 64),
    radius=st.floats(0.5, 20.0),
    phase=st.floats(0.0, 6.0),
)
def test_curvature_scale_invariance(n, radius, phase):
    """kappa(c * pts) = kappa(pts) / c for any uniform scale."""
    pts = regular_polygon(n, radius, phase)
    k1 = geometry.signed_curvature(pts, closed=True)
    k2 = geometry.signed_curvature(2.0 * pts, closed=True)
    assert np.allclose(k1, 2.0 * k2, rtol=1e-9, atol=1e-12)
