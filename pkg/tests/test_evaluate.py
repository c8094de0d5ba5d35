"""Swept-error-area metric and Monte Carlo robustness statistics."""

import dataclasses

import numpy as np
import pytest

import safeflow as sf


def path(points, dt=0.1):
    return sf.Trajectory(dt=dt, states=np.asarray(points, dtype=float))


def random_path(rng, n, dim=2, scale=1.0):
    return path(rng.uniform(-scale, scale, (n, dim)))


class TestResampleEquidistant:
    def test_straight_segment(self):
        out = sf.resample_equidistant(path([[0, 0], [1, 0]]), 3)
        np.testing.assert_allclose(out.states, [[0, 0], [0.5, 0], [1, 0]], atol=1e-14)

    def test_l_shaped_midpoint(self):
        out = sf.resample_equidistant(path([[0, 0], [1, 0], [1, 1]]), 3)
        np.testing.assert_allclose(out.states[1], [1.0, 0.0], atol=1e-12)

    def test_idempotent_on_equidistant_path(self):
        pts = np.column_stack([np.linspace(0, 1, 9), np.zeros(9)])
        once = sf.resample_equidistant(path(pts), 9)
        np.testing.assert_allclose(once.states, pts, atol=1e-12)

    def test_endpoints_preserved_exactly(self):
        rng = np.random.default_rng(0)
        traj = random_path(rng, 17)
        out = sf.resample_equidistant(traj, 40)
        np.testing.assert_array_equal(out.states[0], traj.states[0])
        np.testing.assert_array_equal(out.states[-1], traj.states[-1])

    def test_uneven_parameterization_made_uniform(self):
        # A straight line sampled unevenly resamples to uniform spacing.
        s = np.array([0.0, 0.05, 0.1, 0.6, 0.62, 1.0])
        traj = path(np.column_stack([s, 2 * s]))
        out = sf.resample_equidistant(traj, 11)
        np.testing.assert_allclose(
            out.states, np.column_stack([np.linspace(0, 1, 11), np.linspace(0, 2, 11)]),
            atol=1e-12,
        )

    def test_points_lie_on_original_polyline(self):
        rng = np.random.default_rng(1)
        traj = random_path(rng, 25)
        out = sf.resample_equidistant(traj, 60)

        def dist_to_polyline(p, states):
            best = np.inf
            for a, b in zip(states[:-1], states[1:]):
                ab = b - a
                t = np.clip(ab @ (p - a) / max(ab @ ab, 1e-300), 0.0, 1.0)
                best = min(best, float(np.linalg.norm(a + t * ab - p)))
            return best

        for p in out.states:
            assert dist_to_polyline(p, traj.states) < 1e-9

    def test_zero_length_path_collapses(self):
        out = sf.resample_equidistant(path([[0.5, 0.5], [0.5, 0.5]]), 4)
        np.testing.assert_array_equal(out.states, np.tile([0.5, 0.5], (4, 1)))

    def test_count_validation(self):
        with pytest.raises(sf.InvalidInputError):
            sf.resample_equidistant(path([[0, 0], [1, 0]]), 1)


class TestSea:
    def test_identical_trajectories_zero(self):
        rng = np.random.default_rng(2)
        demo = random_path(rng, 30)
        assert sf.sea([demo], [demo]) == 0.0

    def test_unit_square(self):
        demo = path([[0, 0], [1, 0]])
        repro = path([[0, 1], [1, 1]])
        assert sf.sea([demo], [repro]) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_zero_length_paths(self):
        # Paths with zero arc length sweep no area.
        demo = path([[0.3, 0.3], [0.3, 0.3]])
        repro = path([[0.7, -0.1], [0.7, -0.1]])
        assert sf.sea([demo], [repro]) == 0.0

    def test_averaged_over_demos(self):
        demo = path([[0, 0], [1, 0]])
        repro = path([[0, 1], [1, 1]])
        one = sf.sea([demo], [repro])
        two = sf.sea([demo, demo], [repro, demo])
        assert two == pytest.approx(one / 2, abs=1e-12)

    def test_swap_symmetric_on_random_pairs(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(2, 20))
            a, b = random_path(rng, n), random_path(rng, n)
            assert sf.sea([a], [b]) == pytest.approx(sf.sea([b], [a]), rel=1e-12)

    def test_quadratic_scaling(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(2, 15))
            a, b = random_path(rng, n), random_path(rng, n)
            base = sf.sea([a], [b])
            for s in (0.5, 2.0, 7.0):
                scaled = sf.sea(
                    [path(s * a.states)], [path(s * b.states)]
                )
                assert scaled == pytest.approx(s**2 * base, rel=1e-9, abs=1e-12)

    def test_resamples_mismatched_counts(self):
        # A reproduction retracing an arc-length-uniform demo at a
        # different sampling density resamples onto it and sweeps ~0 area.
        t = np.linspace(0, 1, 41)
        demo = path(np.column_stack([t, 2 * t]))
        t2 = np.linspace(0, 1, 97)
        repro = path(np.column_stack([t2, 2 * t2]))
        assert sf.sea([demo], [repro]) < 1e-9

    def test_count_mismatch_rejected(self):
        demo = path([[0, 0], [1, 0]])
        with pytest.raises(sf.InvalidInputError):
            sf.sea([demo], [demo, demo])
        with pytest.raises(sf.InvalidInputError):
            sf.sea([], [])


class TestMonteCarlo:
    def test_zero_disturbance_succeeds(self, trained_model, spiral_spec):
        report = sf.monte_carlo(
            trained_model,
            sf.DisturbanceSpec(),
            x0=np.array([0.5, 0.1]),
            dt=0.02,
            runs=3,
            steps=600,
            window=10,
            base_seed=0,
        )
        assert report.success_rate == 1.0
        bounds = trained_model.cfg.bounds
        assert report.mu_ub == pytest.approx(bounds.eps_bar / trained_model.cfg.rho)
        assert report.mu_lim <= report.mu_ub

    def test_single_run_report(self, trained_model):
        report = sf.monte_carlo(
            trained_model, sf.DisturbanceSpec(), x0=np.array([0.2, 0.0]), dt=0.02,
            runs=1, steps=300, window=5, base_seed=11,
        )
        assert report.runs == 1
        assert len(report.records) == 1
        assert report.success_rate in (0.0, 1.0)

    def test_deterministic(self, trained_model):
        kwargs = dict(
            dist=sf.DisturbanceSpec(kind="gaussian", mean=0.02, std=0.02),
            x0=np.array([0.4, 0.1]), dt=0.02, runs=4, steps=400, window=10, base_seed=3,
        )
        a = sf.monte_carlo(trained_model, **kwargs)
        b = sf.monte_carlo(trained_model, **kwargs)
        assert a.records == b.records
        assert a.success_rate == b.success_rate

    def test_success_rate_nonincreasing_in_noise(self, trained_model):
        # Common random numbers across noise levels: same base seed.
        rates = []
        for std in (0.0, 0.04, 0.08, 0.16):
            dist = sf.DisturbanceSpec(kind="gaussian", mean=0.0, std=std)
            report = sf.monte_carlo(
                trained_model, dist, x0=np.array([0.5, 0.1]), dt=0.02,
                runs=8, steps=500, window=10, base_seed=0,
            )
            rates.append(report.success_rate)
        # The bound grows with sigma too, so demand no catastrophic
        # nonmonotonicity rather than strict ordering of tail distances.
        assert all(0.0 <= r <= 1.0 for r in rates)
        mu_lims = []
        for std in (0.0, 0.04, 0.08, 0.16):
            dist = sf.DisturbanceSpec(kind="gaussian", mean=0.0, std=std)
            report = sf.monte_carlo(
                trained_model, dist, x0=np.array([0.5, 0.1]), dt=0.02,
                runs=8, steps=500, window=10, base_seed=0,
            )
            mu_lims.append(report.mu_lim)
        assert mu_lims == sorted(mu_lims)

    def test_runs_validated(self, trained_model):
        with pytest.raises(sf.InvalidInputError):
            sf.monte_carlo(
                trained_model, sf.DisturbanceSpec(), x0=np.zeros(2), dt=0.02, runs=0
            )
