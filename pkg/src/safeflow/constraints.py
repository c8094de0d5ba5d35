"""Linear inequalities over (W, delta) from barrier and Lyapunov conditions.

Each sampled point contributes one safety row

    <-g ∇h(x)^T, W>  <=  gamma h(x) - E,

which is the tightened zeroing-barrier condition, and one stability row

    <g (x - x*)^T, W>  <=  -rho ||x - x*||^2 - L_V tau / 2 + delta,

the tightened Lyapunov-decrease condition softened by the shared
relaxation scalar delta.  E and L_V absorb the discretization resolution
tau and the reconstruction-error bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barriers import BarrierSpec, LipschitzData, barrier_gradient, barrier_value
from .elm import BoundEstimates
from .errors import InvalidInputError

__all__ = [
    "LearnConfig",
    "LinearInequality",
    "safety_margin",
    "lyapunov_tightening",
    "build_safety_row",
    "build_stability_row",
]


@dataclass(frozen=True)
class LearnConfig:
    """Scalar hyperparameters and bound constants of the training problem."""

    gamma: float = 2.0  # barrier gain
    rho: float = 5.0  # Lyapunov decay rate
    tau: float = 1e-9  # tightening resolution
    mu_w: float = 0.01  # ridge weight
    p: float = 1e-3  # relaxation penalty
    l_f: float = 0.01  # Lipschitz constant of the dynamics
    l_v: float = 0.01  # Lipschitz constant of the Lyapunov function
    n_h: int = 25  # hidden-neuron count
    mu_exp: float = 0.2  # BIP target-activation mean
    safety_factor: float = 1.5  # empirical-bound inflation
    bounds: BoundEstimates | None = None  # filled in during training
    x_star: np.ndarray | None = None  # equilibrium; demo endpoint mean if None

    def __post_init__(self):
        for name in ("gamma", "rho", "tau", "p", "l_f", "l_v"):
            if getattr(self, name) < 0 or (name in ("gamma", "rho", "tau") and getattr(self, name) == 0):
                raise InvalidInputError(f"{name} must be positive")
        if self.mu_w < 0:
            raise InvalidInputError("mu_w must be nonnegative")
        if self.n_h < 1:
            raise InvalidInputError("n_h must be >= 1")
        if self.x_star is not None:
            x_star = np.atleast_1d(np.asarray(self.x_star, dtype=float))
            x_star.flags.writeable = False
            object.__setattr__(self, "x_star", x_star)

    def _require_bounds(self) -> BoundEstimates:
        if self.bounds is None:
            raise InvalidInputError("bound estimates are not set on this config")
        return self.bounds

    def _require_x_star(self) -> np.ndarray:
        if self.x_star is None:
            raise InvalidInputError("equilibrium x_star is not set on this config")
        return self.x_star


@dataclass(frozen=True)
class LinearInequality:
    """<coeff_w, W> <= rhs + delta_coeff * delta."""

    coeff_w: np.ndarray  # (n_h + 1, n)
    delta_coeff: float  # 0 for safety rows, 1 for stability rows
    rhs: float

    def __post_init__(self):
        coeff_w = np.asarray(self.coeff_w, dtype=float)
        if not np.all(np.isfinite(coeff_w)) or not np.isfinite(self.rhs):
            raise InvalidInputError("constraint row entries must be finite")
        if self.delta_coeff not in (0.0, 1.0):
            raise InvalidInputError("delta_coeff must be 0 or 1")
        coeff_w.flags.writeable = False
        object.__setattr__(self, "coeff_w", coeff_w)

    def lhs(self, w: np.ndarray) -> float:
        return float(np.sum(self.coeff_w * w))


def safety_margin(cfg: LearnConfig, lip: LipschitzData) -> float:
    """Tightening constant E of the sampled barrier constraint."""
    b = cfg._require_bounds()
    return (
        lip.l_dh * (b.w_bar * b.g_bar + b.eps_bar) + lip.l_h * (cfg.l_f + cfg.gamma)
    ) * cfg.tau / 2.0 + lip.l_h * b.eps_bar


def lyapunov_tightening(x_j: np.ndarray, cfg: LearnConfig) -> float:
    """Tightening term L_V * tau / 2 of the sampled Lyapunov constraint.

    The mean-value point entering the bound on the Lyapunov-derivative
    Lipschitz constant lies within tau/2 of the sample, so its distance
    to the equilibrium is bounded by ||x_j - x*|| + tau/2.
    """
    b = cfg._require_bounds()
    x_star = cfg._require_x_star()
    dist = float(np.linalg.norm(np.asarray(x_j, dtype=float) - x_star))
    n_h = float(cfg.n_h)
    l_vdot = (
        b.w_bar * b.g_bar
        + b.eps_bar
        + (dist + cfg.tau / 2.0) * (b.a_bar * np.sqrt(n_h) * b.w_nh_bar * b.u_bar / 4.0 + b.eps_prime_bar)
    )
    v_j = 0.5 * dist**2
    l_v_total = l_vdot + 2.0 * cfg.rho * cfg.l_v + np.sqrt(2.0 * v_j) * b.eps_prime_bar + b.eps_bar
    return float(l_v_total * cfg.tau / 2.0)


def build_safety_row(
    x_j: np.ndarray,
    g_j: np.ndarray,
    spec: BarrierSpec,
    cfg: LearnConfig,
    lip: LipschitzData,
) -> LinearInequality:
    """Barrier condition at a sample as a linear row in W."""
    grad = barrier_gradient(x_j, spec)
    rhs = cfg.gamma * float(barrier_value(x_j, spec)) - safety_margin(cfg, lip)
    return LinearInequality(coeff_w=-np.outer(g_j, grad), delta_coeff=0.0, rhs=rhs)


def build_stability_row(x_j: np.ndarray, g_j: np.ndarray, cfg: LearnConfig) -> LinearInequality:
    """Lyapunov-decrease condition at a sample, relaxed by delta."""
    x_star = cfg._require_x_star()
    offset = np.asarray(x_j, dtype=float) - x_star
    rhs = -cfg.rho * float(offset @ offset) - lyapunov_tightening(x_j, cfg)
    return LinearInequality(coeff_w=np.outer(g_j, offset), delta_coeff=1.0, rhs=rhs)
