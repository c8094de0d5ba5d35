"""Barrier geometry: values, gradients, Lipschitz data, and sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import safeflow as sf
from safeflow.barriers import Box

UNIT_CIRCLE = sf.BarrierSpec(
    kind="ellipse2d", center=np.zeros(2), semi_axes=np.ones(2)
)
AXIS_ELLIPSE = sf.BarrierSpec(
    kind="ellipse2d", center=np.zeros(2), semi_axes=np.array([2.0, 1.0])
)
ROTATED_ELLIPSE = sf.BarrierSpec(
    kind="ellipse2d",
    center=np.array([0.3, -0.2]),
    semi_axes=np.array([1.5, 0.7]),
    rotation=np.pi / 4,
)


def finite_difference_gradient(x, spec, eps=1e-6):
    grad = np.zeros_like(x, dtype=float)
    for i in range(x.size):
        step = np.zeros_like(grad)
        step[i] = eps
        grad[i] = (
            sf.barrier_value(x + step, spec) - sf.barrier_value(x - step, spec)
        ) / (2 * eps)
    return grad


class TestBarrierValue:
    def test_center_value_is_one(self):
        assert sf.barrier_value(ROTATED_ELLIPSE.center, ROTATED_ELLIPSE) == 1.0

    def test_boundary_value_is_zero(self):
        # Points on the (rotated) boundary: center + rot(angle) axis points.
        c, s = np.cos(ROTATED_ELLIPSE.rotation), np.sin(ROTATED_ELLIPSE.rotation)
        rot = np.array([[c, -s], [s, c]])
        for theta in np.linspace(0, 2 * np.pi, 17):
            local = ROTATED_ELLIPSE.semi_axes * np.array([np.cos(theta), np.sin(theta)])
            x = ROTATED_ELLIPSE.center + rot @ local
            assert abs(sf.barrier_value(x, ROTATED_ELLIPSE)) < 1e-12

    def test_unit_circle_value(self):
        assert sf.barrier_value(np.array([0.5, 0.0]), UNIT_CIRCLE) == pytest.approx(0.75)

    def test_batched_evaluation_matches_loop(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-2, 2, (40, 2))
        batched = sf.barrier_value(pts, ROTATED_ELLIPSE)
        single = [sf.barrier_value(p, ROTATED_ELLIPSE) for p in pts]
        np.testing.assert_allclose(batched, single, rtol=0, atol=1e-14)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(sf.InvalidInputError):
            sf.barrier_value(np.zeros(3), UNIT_CIRCLE)


class TestBarrierGradient:
    @pytest.mark.parametrize("spec", [UNIT_CIRCLE, AXIS_ELLIPSE, ROTATED_ELLIPSE])
    def test_matches_finite_differences(self, spec):
        rng = np.random.default_rng(42)
        for x in rng.uniform(-2, 2, (1000, 2)):
            grad = sf.barrier_gradient(x, spec)
            fd = finite_difference_gradient(x, spec)
            assert np.linalg.norm(grad - fd) <= 1e-6 * max(1.0, np.linalg.norm(fd))

    def test_unit_circle_closed_form(self):
        grad = sf.barrier_gradient(np.array([0.5, 0.0]), UNIT_CIRCLE)
        np.testing.assert_allclose(grad, [-1.0, 0.0], atol=1e-14)

    def test_zero_at_center(self):
        np.testing.assert_allclose(
            sf.barrier_gradient(ROTATED_ELLIPSE.center, ROTATED_ELLIPSE), 0.0, atol=1e-14
        )


class TestSpecValidation:
    def test_rejects_nonpositive_axes(self):
        with pytest.raises(sf.InvalidInputError):
            sf.BarrierSpec(kind="ellipse2d", center=np.zeros(2), semi_axes=np.array([1.0, 0.0]))

    def test_rejects_unknown_kind(self):
        with pytest.raises(sf.InvalidInputError):
            sf.BarrierSpec(kind="square", center=np.zeros(2), semi_axes=np.ones(2))

    def test_rejects_rotated_ellipsoid(self):
        with pytest.raises(sf.InvalidInputError):
            sf.BarrierSpec(
                kind="ellipsoidNd", center=np.zeros(3), semi_axes=np.ones(3), rotation=0.1
            )

    def test_ellipsoid_nd_supported(self):
        spec = sf.BarrierSpec(kind="ellipsoidNd", center=np.zeros(3), semi_axes=np.array([1.0, 2.0, 3.0]))
        assert sf.barrier_value(np.zeros(3), spec) == 1.0


class TestLipschitzConstants:
    def test_unit_circle_box_corners(self):
        box = Box(lo=np.array([-1.0, -1.0]), hi=np.array([1.0, 1.0]))
        lip = sf.lipschitz_constants(UNIT_CIRCLE, box)
        assert lip.l_h == pytest.approx(2 * np.sqrt(2))
        assert lip.l_dh == pytest.approx(2.0)

    def test_axis_ellipse_l_dh(self):
        box = Box(lo=np.array([-2.0, -1.0]), hi=np.array([2.0, 1.0]))
        lip = sf.lipschitz_constants(AXIS_ELLIPSE, box)
        assert lip.l_dh == pytest.approx(2.0)  # 2 * max(1/4, 1/1)

    def test_degenerate_box_floor(self):
        box = Box(lo=np.zeros(2), hi=np.zeros(2))
        lip = sf.lipschitz_constants(UNIT_CIRCLE, box)
        assert lip.l_h == pytest.approx(1e-6)

    def test_bounds_sampled_gradients(self):
        box = sf.working_box(ROTATED_ELLIPSE)
        lip = sf.lipschitz_constants(ROTATED_ELLIPSE, box)
        rng = np.random.default_rng(3)
        pts = box.lo + rng.random((10_000, 2)) * (box.hi - box.lo)
        norms = np.linalg.norm(sf.barrier_gradient(pts, ROTATED_ELLIPSE), axis=1)
        assert np.all(norms <= lip.l_h + 1e-9)


class TestWorkingBox:
    def test_encloses_safe_set(self):
        box = sf.working_box(ROTATED_ELLIPSE)
        rng = np.random.default_rng(5)
        pts = rng.uniform(-3, 3, (5000, 2))
        inside = pts[sf.barrier_value(pts, ROTATED_ELLIPSE) >= 0]
        assert all(box.contains(p) for p in inside)

    def test_inflation_factor(self):
        tight = sf.working_box(UNIT_CIRCLE, inflate=0.0)
        default = sf.working_box(UNIT_CIRCLE)
        np.testing.assert_allclose(tight.hi, [1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(default.hi, [1.2, 1.2], atol=1e-12)


class TestDefaultMargin:
    def test_five_percent_of_corner_extreme(self):
        box = Box(lo=np.array([-1.0, -1.0]), hi=np.array([1.0, 1.0]))
        # Corner (1,1): h = 1 - 2 = -1, so max |h| = 1.
        assert sf.default_margin(UNIT_CIRCLE, box) == pytest.approx(0.05)


class TestClassify:
    def test_three_regions(self):
        assert sf.classify(np.zeros(2), UNIT_CIRCLE) == "interior"
        assert sf.classify(np.array([2.0, 0.0]), UNIT_CIRCLE) == "exterior"
        assert sf.classify(np.array([1.0, 0.0]), UNIT_CIRCLE, tol=1e-12) == "boundary"

    def test_negative_tol_rejected(self):
        with pytest.raises(sf.InvalidInputError):
            sf.classify(np.zeros(2), UNIT_CIRCLE, tol=-1.0)


class TestSamplePlan:
    def test_rejects_unknown_strategy(self):
        with pytest.raises(sf.InvalidInputError):
            sf.SamplePlan(strategy="sobol")

    def test_rejects_nonpositive_tau(self):
        with pytest.raises(sf.InvalidInputError):
            sf.SamplePlan(strategy="grid", tau=0.0)


class TestSampleConstraintPoints:
    def test_random_count_and_collar_membership(self):
        box = sf.working_box(ROTATED_ELLIPSE)
        plan = sf.SamplePlan(strategy="uniform-random", count=500, margin=0.1, seed=9)
        pts = sf.sample_constraint_points(ROTATED_ELLIPSE, plan, box)
        assert pts.shape == (500, 2)
        assert np.all(sf.barrier_value(pts, ROTATED_ELLIPSE) >= -0.1)

    def test_random_sampling_deterministic(self):
        box = sf.working_box(UNIT_CIRCLE)
        plan = sf.SamplePlan(strategy="uniform-random", count=64, margin=0.05, seed=4)
        a = sf.sample_constraint_points(UNIT_CIRCLE, plan, box)
        b = sf.sample_constraint_points(UNIT_CIRCLE, plan, box)
        np.testing.assert_array_equal(a, b)

    def test_grid_points_on_lattice(self):
        box = sf.working_box(UNIT_CIRCLE, inflate=0.0)
        plan = sf.SamplePlan(strategy="grid", tau=0.25, margin=0.0)
        pts = sf.sample_constraint_points(UNIT_CIRCLE, plan, box)
        assert np.all(sf.barrier_value(pts, UNIT_CIRCLE) >= 0)
        # Every point sits on the lattice anchored at the box corner.
        offsets = (pts - box.lo) / 0.25
        np.testing.assert_allclose(offsets, np.round(offsets), atol=1e-9)

    def test_hopeless_acceptance_rate_raises(self):
        tiny = sf.BarrierSpec(
            kind="ellipse2d", center=np.zeros(2), semi_axes=np.array([1e-4, 1e-4])
        )
        huge = Box(lo=np.array([-50.0, -50.0]), hi=np.array([50.0, 50.0]))
        plan = sf.SamplePlan(strategy="uniform-random", count=100, margin=0.0, seed=0)
        with pytest.raises(sf.SamplingError):
            sf.sample_constraint_points(tiny, plan, huge)


@settings(max_examples=50, deadline=None)
@given(
    cx=st.floats(-2, 2),
    cy=st.floats(-2, 2),
    a=st.floats(0.1, 3),
    b=st.floats(0.1, 3),
    alpha=st.floats(0, np.pi),
)
def test_quad_matrix_spd_and_h_center(cx, cy, a, b, alpha):
    spec = sf.BarrierSpec(
        kind="ellipse2d",
        center=np.array([cx, cy]),
        semi_axes=np.array([a, b]),
        rotation=alpha,
    )
    q = spec.quad_matrix()
    np.testing.assert_allclose(q, q.T, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(q) > 0)
    assert sf.barrier_value(spec.center, spec) == 1.0
