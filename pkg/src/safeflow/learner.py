"""Assembly and solution of the constrained ELM training problem.

The decision vector is vec(W) (row-major) with the relaxation scalar
delta appended.  The objective stacks the squared fitting error over all
demonstration samples, the ridge term, and the relaxation penalty
p * delta^2; the constraints stack one safety and one stability row per
sampled point plus delta >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .barriers import (
    BarrierSpec,
    SamplePlan,
    barrier_value,
    lipschitz_constants,
    sample_constraint_points,
    working_box,
)
from .constraints import LearnConfig, build_safety_row, build_stability_row
from .elm import (
    ElmParams,
    bip_pretrain,
    estimate_bounds,
    feature_matrix,
    random_init,
    ridge_fit,
)
from .errors import InvalidInputError, TrainingError
from .qp import QpProblem, QpSolution, solve_qp
from .trajectories import Trajectory

__all__ = ["LearnedModel", "assemble_qp", "train"]


@dataclass(frozen=True)
class LearnedModel:
    """Trained parameters plus the context needed to certify and simulate."""

    params: ElmParams
    delta_star: float
    cfg: LearnConfig
    spec: BarrierSpec
    diagnostics: dict

    def __post_init__(self):
        if self.delta_star < -1e-8:
            raise InvalidInputError("delta_star must be nonnegative")


def _stack_demos(demos: Sequence[Trajectory]) -> tuple[np.ndarray, np.ndarray]:
    if not demos:
        raise InvalidInputError("at least one demonstration is required")
    states, derivs = [], []
    for demo in demos:
        if demo.derivatives is None:
            raise InvalidInputError(
                "demonstration lacks derivatives; run finite_difference_derivatives first"
            )
        states.append(demo.states)
        derivs.append(demo.derivatives)
    x = np.vstack(states)
    dx = np.vstack(derivs)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(dx))):
        raise InvalidInputError("demonstrations contain non-finite values")
    return x, dx


def assemble_qp(
    demos: Sequence[Trajectory],
    params: ElmParams,
    spec: BarrierSpec,
    cfg: LearnConfig,
    sample_points: np.ndarray,
    safety: bool = True,
    stability: bool = True,
) -> QpProblem:
    """Build the training QP over z = vec(W) ++ [delta]."""
    states, targets = _stack_demos(demos)
    sample_points = np.atleast_2d(np.asarray(sample_points, dtype=float))
    if sample_points.shape[0] == 0:
        raise InvalidInputError("the constraint sample set is empty")
    n = params.n
    k = params.n_h + 1
    d = k * n + 1

    G = feature_matrix(states, params)
    gram = G.T @ G + cfg.mu_w * np.eye(k)
    H = np.zeros((d, d))
    H[: k * n, : k * n] = 2.0 * np.kron(gram, np.eye(n))
    H[-1, -1] = 2.0 * cfg.p
    f = np.zeros(d)
    f[: k * n] = -2.0 * (G.T @ targets).ravel()

    lip = lipschitz_constants(spec, working_box(spec))
    g_samples = feature_matrix(sample_points, params)
    rows_a = []
    rows_b = []
    for x_j, g_j in zip(sample_points, g_samples):
        if safety:
            row = build_safety_row(x_j, g_j, spec, cfg, lip)
            rows_a.append(np.concatenate([row.coeff_w.ravel(), [0.0]]))
            rows_b.append(row.rhs)
        if stability:
            row = build_stability_row(x_j, g_j, cfg)
            rows_a.append(np.concatenate([row.coeff_w.ravel(), [-row.delta_coeff]]))
            rows_b.append(row.rhs)
    # Relaxation sign constraint: -delta <= 0.
    delta_row = np.zeros(d)
    delta_row[-1] = -1.0
    rows_a.append(delta_row)
    rows_b.append(0.0)
    return QpProblem(H=H, f=f, A=np.vstack(rows_a), b=np.asarray(rows_b))


def train(
    demos: Sequence[Trajectory],
    spec: BarrierSpec,
    cfg: LearnConfig,
    plan: SamplePlan,
    seed: int = 0,
    safety: bool = True,
    stability: bool = True,
) -> LearnedModel:
    """Full training pipeline on demonstrations with derivatives.

    Random init, BIP pretraining on the demo states, ridge baseline,
    empirical bound estimation, constraint-point sampling, QP assembly,
    and the constrained solve.  Raises :class:`TrainingError` when the
    QP is infeasible.
    """
    states, targets = _stack_demos(demos)
    n = states.shape[1]
    if cfg.x_star is None:
        endpoints = np.vstack([demo.states[-1] for demo in demos])
        cfg = replace(cfg, x_star=endpoints.mean(axis=0))
    if barrier_value(cfg.x_star, spec) <= 0:
        raise InvalidInputError("equilibrium x_star must lie strictly inside the safe set")

    params = random_init(n, cfg.n_h, seed)
    params = bip_pretrain(params, states, mu_exp=cfg.mu_exp, seed=seed + 1)
    w_ridge = ridge_fit(feature_matrix(states, params), targets, cfg.mu_w)
    bounds = estimate_bounds(
        replace(params, W=w_ridge), demos, safety_factor=cfg.safety_factor
    )
    cfg = replace(cfg, bounds=bounds)

    box = working_box(spec)
    sample_points = sample_constraint_points(spec, plan, box)
    problem = assemble_qp(demos, params, spec, cfg, sample_points, safety=safety, stability=stability)
    solution = solve_qp(problem)
    if solution.status == "infeasible":
        raise TrainingError(
            "training QP is infeasible; try a larger safe set, a smaller rho, or more hidden neurons"
        )

    k = cfg.n_h + 1
    w_star = solution.z[: k * n].reshape(k, n)
    delta_star = max(float(solution.z[-1]), 0.0)
    params = replace(params, W=w_star)

    fit = feature_matrix(states, params) @ w_star - targets
    e_d = float(np.sum(fit**2) + cfg.mu_w * np.sum(w_star**2))
    diagnostics = {
        "objective": solution.objective,
        "e_d": e_d,
        "sample_points": int(sample_points.shape[0]),
        "qp_status": solution.status,
        "solver_iterations": solution.iterations,
        "safety_rows": bool(safety),
        "stability_rows": bool(stability),
    }
    return LearnedModel(
        params=params, delta_star=delta_star, cfg=cfg, spec=spec, diagnostics=diagnostics
    )
