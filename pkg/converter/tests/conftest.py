"""Synthetic MAT fixtures following the public LASA layout."""

import numpy as np
import pytest
import scipy.io


def make_demo_struct(rng, n_points=120, dt=0.01):
    t = np.arange(n_points) * dt
    start = rng.uniform(20, 40, 2)
    # Smooth converging curve toward the origin, like a handwriting stroke.
    decay = np.exp(-t / t[-1] * 3.0)
    wiggle = 0.1 * np.sin(2 * np.pi * t / t[-1] * rng.uniform(1, 3))
    pos = np.outer(start, decay * (1 + wiggle))
    vel = np.gradient(pos, dt, axis=1)
    return {"pos": pos, "vel": vel, "t": t, "dt": dt}


def write_mat(path, n_demos=7, seed=0, drop_fields=(), name="SyntheticShape"):
    rng = np.random.default_rng(seed)
    demos = np.empty((1, n_demos), dtype=object)
    for i in range(n_demos):
        demo = make_demo_struct(rng)
        for field in drop_fields:
            demo.pop(field, None)
        demos[0, i] = demo
    scipy.io.savemat(path, {"demos": demos, "name": name})
    return path


@pytest.fixture
def lasa_mat(tmp_path):
    return write_mat(tmp_path / "shape.mat")
