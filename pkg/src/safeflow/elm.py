"""Extreme-learning-machine model core.

The network maps a state x to W^T g(x) where g(x) = [sigmoid(P x + b_p); 1]
is the hidden feature vector, P = diag(a_p) U^T collects randomly drawn
input weights scaled by per-neuron slopes, and only the output weights W
are trained.  The output bias is folded into the last row of W since the
feature vector's last entry is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.special import expit, logit

from .errors import InvalidInputError, SingularMatrixError
from .trajectories import Trajectory

__all__ = [
    "ElmParams",
    "BoundEstimates",
    "hidden_features",
    "feature_matrix",
    "evaluate",
    "evaluate_batch",
    "random_init",
    "bip_pretrain",
    "ridge_fit",
    "estimate_bounds",
]

# Sigmoid outputs are clipped into the open interval (0, 1) so the
# feature-range invariant survives float saturation at large inputs.
_SIG_LO = np.finfo(float).tiny
_SIG_HI = float(np.nextafter(1.0, 0.0))


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ElmParams:
    """Immutable ELM parameter bundle.

    U : (n, n_h) input weights; a_p, b_p : (n_h,) slopes and biases;
    W : (n_h + 1, n) output weights, last row is the output bias.
    """

    U: np.ndarray
    a_p: np.ndarray
    b_p: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        U = _as_readonly(self.U)
        a_p = _as_readonly(np.atleast_1d(self.a_p))
        b_p = _as_readonly(np.atleast_1d(self.b_p))
        W = _as_readonly(self.W)
        if U.ndim != 2 or W.ndim != 2:
            raise InvalidInputError("U and W must be matrices")
        n, n_h = U.shape
        if a_p.shape != (n_h,) or b_p.shape != (n_h,):
            raise InvalidInputError("a_p and b_p must have one entry per hidden neuron")
        if W.shape != (n_h + 1, n):
            raise InvalidInputError(f"W must be ({n_h + 1}, {n}), got {W.shape}")
        for arr in (U, a_p, b_p, W):
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError("ELM parameters must be finite")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "a_p", a_p)
        object.__setattr__(self, "b_p", b_p)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def n_h(self) -> int:
        return self.U.shape[1]

    @property
    def projection(self) -> np.ndarray:
        """P = diag(a_p) U^T, shape (n_h, n)."""
        return self.a_p[:, None] * self.U.T


@dataclass(frozen=True)
class BoundEstimates:
    """Empirical constants feeding the constraint-tightening formulas."""

    eps_bar: float  # reconstruction-error bound
    eps_prime_bar: float  # bound on the residual's state derivative
    w_bar: float  # Frobenius bound on output weights
    u_bar: float  # Frobenius norm of input weights
    a_bar: float  # Frobenius norm of diag(a_p)
    w_nh_bar: float  # bound on W with the bias row deleted
    g_bar: float  # sqrt(n_h + 1), exact

    def __post_init__(self):
        for name in ("eps_bar", "eps_prime_bar", "w_bar", "u_bar", "a_bar", "w_nh_bar", "g_bar"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be nonnegative")


def _check_state(x: np.ndarray, params: ElmParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != params.n:
        raise InvalidInputError(
            f"state dimension {x.shape[-1]} does not match model dimension {params.n}"
        )
    return x


def hidden_features(x: np.ndarray, params: ElmParams) -> np.ndarray:
    """Feature vector g(x) = [sigmoid(P x + b_p); 1] of length n_h + 1."""
    x = _check_state(x, params)
    act = expit(x @ params.projection.T + params.b_p)
    np.clip(act, _SIG_LO, _SIG_HI, out=act)
    ones = np.ones(act.shape[:-1] + (1,))
    return np.concatenate([act, ones], axis=-1)


def feature_matrix(states: np.ndarray, params: ElmParams) -> np.ndarray:
    """Feature rows for a batch of states, shape (T, n_h + 1)."""
    states = np.atleast_2d(states)
    return hidden_features(states, params)


def evaluate(x: np.ndarray, params: ElmParams) -> np.ndarray:
    """Model output W^T g(x), the estimated state derivative."""
    return hidden_features(x, params) @ params.W


def evaluate_batch(states: np.ndarray, params: ElmParams) -> np.ndarray:
    return feature_matrix(states, params) @ params.W


def random_init(n: int, n_h: int, seed: int) -> ElmParams:
    """Random input weights/biases in [-1, 1], unit slopes, zero W."""
    if n < 1 or n_h < 1:
        raise InvalidInputError("n and n_h must be >= 1")
    rng = np.random.default_rng(seed)
    return ElmParams(
        U=rng.uniform(-1.0, 1.0, size=(n, n_h)),
        a_p=np.ones(n_h),
        b_p=rng.uniform(-1.0, 1.0, size=n_h),
        W=np.zeros((n_h + 1, n)),
    )


def bip_pretrain(
    params: ElmParams,
    inputs: np.ndarray,
    mu_exp: float = 0.2,
    seed: int = 0,
) -> ElmParams:
    """Batch-intrinsic-plasticity pretraining of slopes and biases.

    Per neuron, sorted raw pre-activations U_i^T x are regressed onto the
    logits of sorted exponential targets (mean ``mu_exp``), so that the
    neuron's activations over the inputs become approximately
    exponentially distributed.  Neurons whose fit yields a nonpositive
    slope keep their slope and only refit the bias.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[0] < 2:
        raise InvalidInputError("BIP pretraining needs at least 2 inputs")
    if not 0.0 < mu_exp < 1.0:
        raise InvalidInputError("mu_exp must lie in (0, 1)")
    _check_state(inputs, params)

    rng = np.random.default_rng(seed)
    n_samples = inputs.shape[0]
    a_new = np.array(params.a_p)
    b_new = np.array(params.b_p)
    pre = inputs @ params.U  # (T, n_h) raw pre-activations
    for i in range(params.n_h):
        targets = np.clip(rng.exponential(mu_exp, size=n_samples), 1e-4, 1.0 - 1e-4)
        u = np.sort(pre[:, i])
        y = np.sort(logit(targets))
        a_i, b_i = _fit_slope_bias(u, y, fallback_slope=a_new[i])
        a_new[i] = a_i
        b_new[i] = b_i
    return replace(params, a_p=a_new, b_p=b_new)


def _fit_slope_bias(u: np.ndarray, y: np.ndarray, fallback_slope: float) -> tuple[float, float]:
    """Least squares for y ~ a*u + b, guarding degenerate/nonpositive slopes."""
    du = u - u.mean()
    var = float(du @ du)
    if var > 1e-12 * max(1.0, float(u @ u)):
        a = float(du @ (y - y.mean())) / var
        if a > 0.0:
            return a, float(y.mean() - a * u.mean())
    # Degenerate neuron: keep the slope, fit the bias alone.
    return fallback_slope, float(y.mean() - fallback_slope * u.mean())


def ridge_fit(features: np.ndarray, targets: np.ndarray, mu_w: float) -> np.ndarray:
    """Closed-form ridge solution of min ||G W - D||_F^2 + mu_w tr(W^T W)."""
    G = np.atleast_2d(np.asarray(features, dtype=float))
    D = np.atleast_2d(np.asarray(targets, dtype=float))
    if mu_w < 0:
        raise InvalidInputError("mu_w must be nonnegative")
    if G.shape[0] != D.shape[0]:
        raise InvalidInputError("features and targets must have equal sample counts")
    k = G.shape[1]
    normal = G.T @ G + mu_w * np.eye(k)
    if mu_w == 0.0 and np.linalg.matrix_rank(normal) < k:
        raise SingularMatrixError("normal matrix is singular; use mu_w > 0")
    return np.linalg.solve(normal, G.T @ D)


def estimate_bounds(
    params: ElmParams,
    demos: Sequence[Trajectory],
    safety_factor: float = 1.5,
) -> BoundEstimates:
    """Inflate empirical residual/weight maxima into bound constants.

    The residual bound is the worst model error over all demonstration
    samples; its derivative bound comes from finite differences of the
    residual along each demonstration.  ``safety_factor`` compensates for
    empirical maxima understating true suprema.
    """
    if not demos:
        raise InvalidInputError("at least one demonstration is required")
    if safety_factor < 1.0:
        raise InvalidInputError("safety_factor must be >= 1")
    eps = 0.0
    eps_prime = 0.0
    for demo in demos:
        if demo.derivatives is None:
            raise InvalidInputError(
                "demonstration lacks derivatives; run finite_difference_derivatives first"
            )
        residual = demo.derivatives - evaluate_batch(demo.states, params)
        eps = max(eps, float(np.max(np.linalg.norm(residual, axis=1))))
        dx = np.linalg.norm(np.diff(demo.states, axis=0), axis=1)
        dr = np.linalg.norm(np.diff(residual, axis=0), axis=1)
        moved = dx > 0
        if np.any(moved):
            eps_prime = max(eps_prime, float(np.max(dr[moved] / dx[moved])))
    return BoundEstimates(
        eps_bar=safety_factor * eps,
        eps_prime_bar=safety_factor * eps_prime,
        w_bar=safety_factor * float(np.linalg.norm(params.W, "fro")),
        u_bar=float(np.linalg.norm(params.U, "fro")),
        a_bar=float(np.linalg.norm(params.a_p)),
        w_nh_bar=safety_factor * float(np.linalg.norm(params.W[:-1], "fro")),
        g_bar=float(np.sqrt(params.n_h + 1)),
    )
