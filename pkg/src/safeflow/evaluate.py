"""Reproduction-accuracy metric and the Monte Carlo robustness harness."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DivergenceError, InvalidInputError
from .learner import LearnedModel
from .simulate import DisturbanceSpec, disturbance_bound, rollout
from .trajectories import Trajectory

__all__ = ["MonteCarloReport", "resample_equidistant", "sea", "monte_carlo"]


def resample_equidistant(traj: Trajectory, count: int) -> Trajectory:
    """``count`` points equally spaced in arc length along the path.

    The first and last points are preserved exactly; a zero-length path
    collapses to ``count`` copies of its single location.
    """
    if count < 2:
        raise InvalidInputError("count must be >= 2")
    states = traj.states
    seg = np.linalg.norm(np.diff(states, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1]
    if total == 0.0:
        return replace(traj, states=np.repeat(states[:1], count, axis=0), derivatives=None)
    targets = np.linspace(0.0, total, count)
    out = np.empty((count, traj.dim))
    for d in range(traj.dim):
        out[:, d] = np.interp(targets, arc, states[:, d])
    out[0] = states[0]
    out[-1] = states[-1]
    return replace(traj, states=out, derivatives=None)


def _triangle_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    u, v = b - a, c - a
    if a.size == 2:
        return 0.5 * abs(u[0] * v[1] - u[1] * v[0])
    return 0.5 * float(np.linalg.norm(np.cross(u, v)))


def _quad_area(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    """Two-triangle area of the quadrilateral (a, b, c, d).

    Both diagonal splits are averaged: they agree on every simple
    quadrilateral, and averaging keeps the value unchanged when the
    demonstration and reproduction roles are swapped even for
    self-intersecting (bowtie) quadrilaterals.
    """
    split_1 = _triangle_area(a, b, c) + _triangle_area(a, c, d)
    split_2 = _triangle_area(b, c, d) + _triangle_area(b, d, a)
    return 0.5 * (split_1 + split_2)


def sea(demos: Sequence[Trajectory], reproductions: Sequence[Trajectory]) -> float:
    """Swept error area between demonstrations and their reproductions.

    A reproduction whose sample count differs from its demonstration's is
    first resampled equidistantly to the demonstration's count; the swept
    quadrilaterals between matched segments are then accumulated and
    averaged over demonstrations.  Units are squared state units.
    """
    if len(demos) != len(reproductions):
        raise InvalidInputError("demo and reproduction counts must match")
    if not demos:
        raise InvalidInputError("at least one demo/reproduction pair is required")
    total = 0.0
    for demo, repro in zip(demos, reproductions):
        t_n = len(demo)
        if t_n < 2 or len(repro) < 2:
            continue  # degenerate single-point trajectories sweep no area
        hat = repro.states if len(repro) == t_n else resample_equidistant(repro, t_n).states
        ref = demo.states
        for t in range(t_n - 1):
            total += _quad_area(hat[t], hat[t + 1], ref[t + 1], ref[t])
    return total / len(demos)


@dataclass(frozen=True)
class MonteCarloReport:
    """Aggregate statistics of repeated disturbed rollouts."""

    runs: int
    mu_ub: float  # mean robustness bound (eps_bar + d_bar) / rho
    mu_lim: float  # mean tail-window max distance to the equilibrium
    success_rate: float
    records: tuple  # per-run dicts

    def __post_init__(self):
        if self.runs < 1:
            raise InvalidInputError("runs must be >= 1")
        if not 0.0 <= self.success_rate <= 1.0:
            raise InvalidInputError("success_rate must lie in [0, 1]")


def monte_carlo(
    model: LearnedModel,
    dist: DisturbanceSpec,
    x0: np.ndarray,
    dt: float,
    runs: int = 100,
    steps: int = 1000,
    window: int = 10,
    base_seed: int = 0,
    integrator: str = "rk4",
) -> MonteCarloReport:
    """Repeated disturbed rollouts checked against the robustness bound.

    Run i uses seed ``base_seed + i``.  A run succeeds when the max
    distance to the equilibrium over the last ``window`` states stays
    within (eps_bar + d_bar) / rho; divergent rollouts count as failures.
    """
    if runs < 1:
        raise InvalidInputError("runs must be >= 1")
    bounds = model.cfg._require_bounds()
    x_star = model.cfg._require_x_star()
    d_bar = disturbance_bound(dist, x_star.size)
    bound = (bounds.eps_bar + d_bar) / model.cfg.rho

    records = []
    successes = 0
    tail_sum = 0.0
    for i in range(runs):
        run_dist = replace(dist, seed=base_seed + i)
        record = {"seed": base_seed + i, "bound": bound, "d_bar": d_bar}
        try:
            traj = rollout(model, x0, dt, steps, integrator=integrator, dist=run_dist)
        except DivergenceError:
            record.update(diverged=True, success=False, max_tail_dist=float("inf"))
            records.append(record)
            tail_sum += 0.0
            continue
        tail = traj.states[-window:]
        max_tail = float(np.max(np.linalg.norm(tail - x_star, axis=1)))
        success = max_tail <= bound
        successes += int(success)
        tail_sum += max_tail
        record.update(diverged=False, success=bool(success), max_tail_dist=max_tail)
        records.append(record)
    return MonteCarloReport(
        runs=runs,
        mu_ub=bound,
        mu_lim=tail_sum / runs,
        success_rate=successes / runs,
        records=tuple(records),
    )
