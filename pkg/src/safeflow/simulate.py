"""Forward integration of learned models and numerical safety certification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barriers import BarrierSpec, LipschitzData, barrier_gradient, barrier_value
from .elm import ElmParams, evaluate_batch
from .errors import BudgetError, DivergenceError, InvalidInputError
from .learner import LearnedModel
from .trajectories import Trajectory

__all__ = [
    "DisturbanceSpec",
    "CertReport",
    "UltimateBoundCheck",
    "rollout",
    "certify_invariance",
    "check_ultimate_bound",
    "disturbance_bound",
]

_MAX_GRID_POINTS = 2_000_000


@dataclass(frozen=True)
class DisturbanceSpec:
    """Additive disturbance model for rollouts.

    Gaussian noise enters the state derivative i.i.d. per component; the
    discrete push is a single additive jump applied to the state at the
    trigger step (drawn uniformly when unset).
    """

    kind: str = "none"  # "none" | "gaussian" | "discrete-push"
    mean: float = 0.0
    std: float = 0.0
    amplitude: float = 0.0
    direction: np.ndarray | None = None
    trigger_step: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "discrete-push"):
            raise InvalidInputError(f"unknown disturbance kind {self.kind!r}")
        if self.std < 0:
            raise InvalidInputError("std must be nonnegative")
        if self.direction is not None:
            direction = np.atleast_1d(np.asarray(self.direction, dtype=float))
            if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
                raise InvalidInputError("push direction must be a unit vector")
            direction.flags.writeable = False
            object.__setattr__(self, "direction", direction)
        elif self.kind == "discrete-push":
            raise InvalidInputError("discrete-push requires a direction")


def _as_field(model):
    """Accept a LearnedModel, bare ElmParams, or a callable vector field."""
    if isinstance(model, LearnedModel):
        params = model.params
        return lambda x: evaluate_batch(x[None], params)[0]
    if isinstance(model, ElmParams):
        return lambda x: evaluate_batch(x[None], model)[0]
    if callable(model):
        return model
    raise InvalidInputError("model must be a LearnedModel, ElmParams, or callable field")


def rollout(
    model,
    x0: np.ndarray,
    dt: float,
    steps: int,
    integrator: str = "rk4",
    dist: DisturbanceSpec | None = None,
) -> Trajectory:
    """Integrate the model field from ``x0`` for ``steps`` steps.

    Deterministic given the disturbance seed.  Raises
    :class:`DivergenceError` carrying the partial trajectory when a
    non-finite state appears.
    """
    if dt <= 0:
        raise InvalidInputError("dt must be positive")
    if steps < 1:
        raise InvalidInputError("steps must be >= 1")
    if integrator not in ("euler", "rk4"):
        raise InvalidInputError(f"unknown integrator {integrator!r}")
    field = _as_field(model)
    dist = dist or DisturbanceSpec()
    rng = np.random.default_rng(dist.seed)
    trigger = dist.trigger_step
    if dist.kind == "discrete-push" and trigger is None:
        trigger = int(rng.integers(0, steps))

    x = np.array(x0, dtype=float)
    states = [x.copy()]
    for step in range(steps):
        if dist.kind == "gaussian":
            d = rng.normal(dist.mean, dist.std, size=x.size)
            forced = lambda v: field(v) + d  # noqa: E731 - per-step closure
        else:
            forced = field
        if integrator == "euler":
            x = x + dt * forced(x)
        else:
            k1 = forced(x)
            k2 = forced(x + 0.5 * dt * k1)
            k3 = forced(x + 0.5 * dt * k2)
            k4 = forced(x + dt * k3)
            x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if dist.kind == "discrete-push" and step == trigger:
            x = x + dist.amplitude * dist.direction
        if not np.all(np.isfinite(x)):
            raise DivergenceError(
                f"non-finite state at step {step + 1}",
                partial_trajectory=Trajectory(dt=dt, states=np.array(states), source="rollout"),
            )
        states.append(x.copy())
    return Trajectory(dt=dt, states=np.array(states), source="rollout")


@dataclass(frozen=True)
class CertReport:
    """Dense-grid check of the barrier condition on the safe set."""

    min_slack: float
    argmin: np.ndarray
    passed: bool
    threshold: float
    n_points: int


def certify_invariance(
    model: LearnedModel,
    spec: BarrierSpec,
    lip: LipschitzData,
    pitch: float,
) -> CertReport:
    """Evaluate slack(x) = grad h(x)^T f(x) + gamma h(x) over {h >= 0}.

    The lattice has spacing ``pitch`` over the safe set's bounding box;
    the check passes when the minimum slack stays above the
    reconstruction-error allowance -eps_bar * L_h.
    """
    if pitch <= 0:
        raise InvalidInputError("pitch must be positive")
    bounds = model.cfg._require_bounds()
    q_inv = np.linalg.inv(spec.quad_matrix())
    half = np.sqrt(np.diag(q_inv))
    axes = [
        np.arange(spec.center[i] - half[i], spec.center[i] + half[i] + 0.5 * pitch, pitch)
        for i in range(spec.dim)
    ]
    total = int(np.prod([len(a) for a in axes]))
    if total > _MAX_GRID_POINTS:
        raise BudgetError(f"certification grid has {total} points (cap {_MAX_GRID_POINTS})")
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    h_vals = barrier_value(pts, spec)
    pts = pts[h_vals >= 0]
    h_vals = h_vals[h_vals >= 0]
    grads = barrier_gradient(pts, spec)
    flows = evaluate_batch(pts, model.params)
    slack = np.einsum("ij,ij->i", grads, flows) + model.cfg.gamma * h_vals
    idx = int(np.argmin(slack))
    threshold = -bounds.eps_bar * lip.l_h
    return CertReport(
        min_slack=float(slack[idx]),
        argmin=pts[idx].copy(),
        passed=bool(slack[idx] >= threshold),
        threshold=float(threshold),
        n_points=int(pts.shape[0]),
    )


@dataclass(frozen=True)
class UltimateBoundCheck:
    max_tail_dist: float
    passed: bool


def check_ultimate_bound(
    traj: Trajectory,
    x_star: np.ndarray,
    window: int,
    bound: float,
) -> UltimateBoundCheck:
    """Max distance to the equilibrium over the trajectory's last ``window`` states."""
    if window < 1 or window > len(traj):
        raise InvalidInputError("window must be between 1 and the trajectory length")
    tail = traj.states[-window:]
    max_tail = float(np.max(np.linalg.norm(tail - np.asarray(x_star, dtype=float), axis=1)))
    return UltimateBoundCheck(max_tail_dist=max_tail, passed=bool(max_tail <= bound))


def disturbance_bound(dist: DisturbanceSpec, dim: int) -> float:
    """Effective disturbance magnitude d_bar used in the robustness bound.

    Gaussian noise is summarized by its three-sigma envelope
    ||mean * 1|| + 3 sigma sqrt(n); the discrete push is a transient
    state jump, not a persistent derivative disturbance, and counts 0.
    """
    if dist.kind == "gaussian":
        return float(abs(dist.mean) * np.sqrt(dim) + 3.0 * dist.std * np.sqrt(dim))
    return 0.0
