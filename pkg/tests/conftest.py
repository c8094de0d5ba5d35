"""Shared fixtures: the synthetic spiral benchmark and trained models.

Training is expensive, so the models used across acceptance and unit
tests are session-scoped.
"""

import numpy as np
import pytest

import safeflow as sf
from safeflow.synthetic import make_spiral_demos, spiral_barrier


@pytest.fixture(scope="session")
def spiral_spec():
    return spiral_barrier()


@pytest.fixture(scope="session")
def spiral_demos(spiral_spec):
    demos, _ = make_spiral_demos(spiral_spec)
    return demos


@pytest.fixture(scope="session")
def spiral_field(spiral_spec):
    _, a = make_spiral_demos(spiral_spec)
    return a


@pytest.fixture(scope="session")
def spiral_plan(spiral_spec):
    box = sf.working_box(spiral_spec)
    return sf.SamplePlan(
        strategy="uniform-random",
        count=1000,
        margin=sf.default_margin(spiral_spec, box),
        seed=3,
    )


@pytest.fixture(scope="session")
def spiral_cfg():
    return sf.LearnConfig(gamma=2.0, rho=5.0, mu_w=0.01, p=1e-3, n_h=25)


@pytest.fixture(scope="session")
def trained_model(spiral_demos, spiral_spec, spiral_cfg, spiral_plan):
    """Full model: safety and stability rows (the acceptance workhorse)."""
    return sf.train(spiral_demos, spiral_spec, spiral_cfg, spiral_plan, seed=0)


@pytest.fixture(scope="session")
def lyapunov_only_model(spiral_demos, spiral_spec, spiral_cfg, spiral_plan):
    """Contrast model: identical pipeline without the safety rows."""
    return sf.train(
        spiral_demos, spiral_spec, spiral_cfg, spiral_plan, seed=0, safety=False
    )


@pytest.fixture(scope="session")
def tiny_demos():
    """Fast linear-field demos for plumbing tests: dx/dt = -(x - x*)."""
    x_star = np.array([0.1, -0.05])
    rng = np.random.default_rng(7)
    demos = []
    dt = 0.05
    times = np.arange(81) * dt
    for _ in range(3):
        x0 = x_star + rng.uniform(-0.5, 0.5, 2)
        states = x_star + np.exp(-times)[:, None] * (x0 - x_star)
        demos.append(
            sf.Trajectory(dt=dt, states=states, derivatives=-(states - x_star))
        )
    return demos


@pytest.fixture(scope="session")
def tiny_spec():
    return sf.BarrierSpec(
        kind="ellipse2d", center=np.array([0.1, -0.05]), semi_axes=np.array([1.0, 0.8])
    )


@pytest.fixture(scope="session")
def tiny_model(tiny_demos, tiny_spec):
    box = sf.working_box(tiny_spec)
    plan = sf.SamplePlan(
        strategy="uniform-random",
        count=200,
        margin=sf.default_margin(tiny_spec, box),
        seed=1,
    )
    return sf.train(tiny_demos, tiny_spec, sf.LearnConfig(n_h=25), plan, seed=0)
