"""Time-stamped state sequences: the demonstration and rollout currency."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError

__all__ = ["Trajectory", "finite_difference_derivatives"]


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled state sequence with optional state derivatives."""

    dt: float
    states: np.ndarray  # (T, n)
    derivatives: np.ndarray | None = None  # (T, n) or None
    source: str = "demonstration"  # "demonstration" | "rollout"

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.dt <= 0:
            raise InvalidInputError("dt must be positive")
        if states.shape[0] < 2:
            raise InvalidInputError("a trajectory needs at least 2 states")
        if self.source not in ("demonstration", "rollout"):
            raise InvalidInputError(f"unknown trajectory source {self.source!r}")
        states.flags.writeable = False
        object.__setattr__(self, "states", states)
        if self.derivatives is not None:
            derivs = np.atleast_2d(np.asarray(self.derivatives, dtype=float))
            if derivs.shape != states.shape:
                raise InvalidInputError("derivatives must match states in shape")
            derivs.flags.writeable = False
            object.__setattr__(self, "derivatives", derivs)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]


def finite_difference_derivatives(traj: Trajectory) -> Trajectory:
    """Estimate derivatives by second-order finite differences.

    Central differences in the interior, one-sided second-order stencils
    at the endpoints; exact for paths quadratic in time.
    """
    if len(traj) < 3:
        raise InvalidInputError("finite differences need at least 3 states")
    derivs = np.gradient(traj.states, traj.dt, axis=0, edge_order=2)
    return replace(traj, derivatives=derivs)
