"""Synthetic spiral demonstrations for tests, examples, and benchmarks.

The generator builds a linear spiral field whose orbits are ellipses
rotated against the safe set and scaled to just graze its boundary, so
demonstrations hug the boundary while converging to the equilibrium at
the origin.  Trajectories and derivatives are computed from the closed
form of the linear system, not by numerical integration.
"""

from __future__ import annotations

import numpy as np

from .barriers import BarrierSpec, barrier_value, working_box
from .trajectories import Trajectory

__all__ = [
    "spiral_barrier",
    "spiral_field_matrix",
    "make_spiral_demos",
    "sample_interior_starts",
    "sample_boundary_adjacent_starts",
]


def spiral_barrier(gamma: float = 2.0) -> BarrierSpec:
    """Default safe set for the spiral benchmark: unit-major-axis ellipse."""
    return BarrierSpec(
        kind="ellipse2d", center=np.zeros(2), semi_axes=np.array([1.0, 0.6]), rotation=0.0, gamma=gamma
    )


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _orbit_transform(
    spec: BarrierSpec,
    orbit_aspect: float,
    orbit_rotation: float,
    gap: float,
) -> np.ndarray:
    """T mapping the outermost orbit ellipse onto the unit circle.

    The orbit ellipse is scaled so its closest approach to the safe-set
    boundary leaves barrier value ``gap``.
    """
    rot = _rotation(orbit_rotation)
    theta = np.linspace(0.0, 2 * np.pi, 2048, endpoint=False)
    ring = rot @ np.vstack([np.cos(theta), np.sin(theta) / orbit_aspect])
    q = spec.quad_matrix()
    quad_max = float(np.max(np.einsum("ik,ij,jk->k", ring, q, ring)))
    scale = np.sqrt((1.0 - gap) / quad_max)
    semi = np.array([scale, scale / orbit_aspect])
    return np.diag(1.0 / semi) @ rot.T


def spiral_field_matrix(
    spec: BarrierSpec | None = None,
    decay: float = 0.4,
    omega: float = 3.0,
    orbit_aspect: float = 2.0,
    orbit_rotation: float = np.pi / 4,
    gap: float = 0.02,
) -> np.ndarray:
    """System matrix A of the spiral field dx/dt = A (x - center)."""
    spec = spec or spiral_barrier()
    t = _orbit_transform(spec, orbit_aspect, orbit_rotation, gap)
    s = np.array([[-decay, omega], [-omega, -decay]])
    return np.linalg.solve(t, s @ t)


def make_spiral_demos(
    spec: BarrierSpec | None = None,
    n_demos: int = 5,
    n_points: int = 401,
    dt: float = 0.02,
    decay: float = 0.4,
    omega: float = 3.0,
    orbit_aspect: float = 2.0,
    orbit_rotation: float = np.pi / 4,
    gap: float = 0.02,
    phase_offset: float = 0.3,
) -> tuple[list[Trajectory], np.ndarray]:
    """Spiral demonstrations with exact derivatives, plus the true field matrix.

    Starts are spread around the outermost orbit; every state stays
    inside the safe set and converges to the equilibrium at its center.
    """
    spec = spec or spiral_barrier()
    t = _orbit_transform(spec, orbit_aspect, orbit_rotation, gap)
    t_inv = np.linalg.inv(t)
    a = t_inv @ np.array([[-decay, omega], [-omega, -decay]]) @ t

    times = np.arange(n_points) * dt
    envelope = np.exp(-decay * times)
    cos_t, sin_t = np.cos(omega * times), np.sin(omega * times)
    demos = []
    for k in range(n_demos):
        theta = 2 * np.pi * k / n_demos + phase_offset
        y0 = np.array([np.cos(theta), np.sin(theta)])
        # y(t) = e^{-decay t} R(-omega t) y0 in orbit coordinates.
        y = envelope[:, None] * np.column_stack(
            [cos_t * y0[0] + sin_t * y0[1], -sin_t * y0[0] + cos_t * y0[1]]
        )
        states = y @ t_inv.T + spec.center
        derivs = (states - spec.center) @ a.T
        demos.append(Trajectory(dt=dt, states=states, derivatives=derivs, source="demonstration"))
    return demos, a


def _rejection_sample(spec: BarrierSpec, count: int, seed: int, accept) -> np.ndarray:
    rng = np.random.default_rng(seed)
    box = working_box(spec, inflate=0.0)
    out = []
    n_accepted = 0
    while n_accepted < count:
        pts = box.lo + rng.random((4 * count, spec.dim)) * (box.hi - box.lo)
        keep = pts[accept(barrier_value(pts, spec))]
        out.append(keep)
        n_accepted += keep.shape[0]
    return np.vstack(out)[:count]


def sample_interior_starts(spec: BarrierSpec, count: int, seed: int = 0) -> np.ndarray:
    """Uniform samples over the interior {h > 0}."""
    return _rejection_sample(spec, count, seed, lambda h: h > 0)


def sample_boundary_adjacent_starts(
    spec: BarrierSpec, count: int, seed: int = 0, h_max: float = 0.05
) -> np.ndarray:
    """Uniform samples over the boundary collar {0 < h <= h_max}."""
    return _rejection_sample(spec, count, seed, lambda h: (h > 0) & (h <= h_max))
