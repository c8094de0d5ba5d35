"""Parametric zeroing-barrier geometry for ellipse/ellipsoid safe sets.

A safe set is the zero-superlevel set {x : h(x) >= 0} of a concave
quadratic h with h = 1 at the set's center.  This module evaluates h and
its gradient, derives Lipschitz constants over a working box, classifies
points against the set, and draws constraint-sample point sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SamplingError

__all__ = [
    "Box",
    "BarrierSpec",
    "LipschitzData",
    "SamplePlan",
    "barrier_value",
    "barrier_gradient",
    "lipschitz_constants",
    "sample_constraint_points",
    "classify",
    "working_box",
    "default_margin",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by per-dimension lower/upper corners."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidInputError("box corners must be 1-D arrays of equal length")
        if np.any(hi < lo):
            raise InvalidInputError("box upper corner must dominate lower corner")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    def corners(self) -> np.ndarray:
        """All 2^dim corner points, one per row."""
        grids = np.meshgrid(*[(self.lo[i], self.hi[i]) for i in range(self.dim)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))


@dataclass(frozen=True)
class BarrierSpec:
    """Rotated-ellipse (2-D) or axis-aligned ellipsoid (n-D) barrier.

    h(x) = 1 - (x - center)^T Q (x - center) with Q positive definite,
    so h(center) = 1, h = 0 on the boundary and h > 0 inside.  ``gamma``
    is the gain of the linear extended class-K function used in the
    barrier condition dh/dt >= -gamma * h.
    """

    kind: str  # "ellipse2d" | "ellipsoidNd"
    center: np.ndarray
    semi_axes: np.ndarray
    rotation: float = 0.0
    gamma: float = 2.0

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        semi_axes = np.atleast_1d(np.asarray(self.semi_axes, dtype=float))
        if self.kind not in ("ellipse2d", "ellipsoidNd"):
            raise InvalidInputError(f"unknown barrier kind {self.kind!r}")
        if self.kind == "ellipse2d" and center.size != 2:
            raise InvalidInputError("ellipse2d requires a 2-D center")
        if center.size != semi_axes.size:
            raise InvalidInputError("center and semi_axes dimensions disagree")
        if np.any(semi_axes <= 0):
            raise InvalidInputError("semi-axes must be positive")
        if self.gamma <= 0:
            raise InvalidInputError("gamma must be positive")
        if self.kind == "ellipsoidNd" and self.rotation != 0.0:
            raise InvalidInputError("ellipsoidNd supports identity rotation only")
        center.flags.writeable = False
        semi_axes.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "semi_axes", semi_axes)

    @property
    def dim(self) -> int:
        return self.center.size

    def quad_matrix(self) -> np.ndarray:
        """Q such that h(x) = 1 - (x - center)^T Q (x - center)."""
        inv_sq = 1.0 / self.semi_axes**2
        if self.kind == "ellipse2d":
            c, s = np.cos(self.rotation), np.sin(self.rotation)
            # Rows are the rotated major/minor axis directions.
            rot = np.array([[c, s], [-s, c]])
            return rot.T @ np.diag(inv_sq) @ rot
        return np.diag(inv_sq)


@dataclass(frozen=True)
class LipschitzData:
    """Gradient bound L_h and gradient Lipschitz constant over a box."""

    l_h: float
    l_dh: float
    box: Box


@dataclass(frozen=True)
class SamplePlan:
    """How to draw constraint-sample points from the collar {h >= -margin}."""

    strategy: str = "uniform-random"  # "grid" | "uniform-random"
    tau: float = 1e-9  # grid pitch for the grid strategy
    count: int = 1000
    margin: float = 0.0  # kappa_d, extends the set outward
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("grid", "uniform-random"):
            raise InvalidInputError(f"unknown sampling strategy {self.strategy!r}")
        if self.tau <= 0:
            raise InvalidInputError("tau must be positive")
        if self.strategy == "uniform-random" and self.count < 1:
            raise InvalidInputError("count must be >= 1 for random sampling")
        if self.margin < 0:
            raise InvalidInputError("margin must be nonnegative")


def _check_dim(x: np.ndarray, spec: BarrierSpec) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.dim:
        raise InvalidInputError(
            f"state dimension {x.shape[-1]} does not match barrier dimension {spec.dim}"
        )
    return x

def barrier_value(x: np.ndarray, spec: BarrierSpec) -> float | np.ndarray:
    """h(x); accepts a single state (n,) or a batch (m, n)."""
    x = _check_dim(x, spec)
    delta = x - spec.center
    q = spec.quad_matrix()
    return 1.0 - np.einsum("...i,ij,...j->...", delta, q, delta)


def barrier_gradient(x: np.ndarray, spec: BarrierSpec) -> np.ndarray:
    """Analytic gradient of h; batched like :func:`barrier_value`."""
    x = _check_dim(x, spec)
    delta = x - spec.center
    return -2.0 * delta @ spec.quad_matrix()


def lipschitz_constants(spec: BarrierSpec, box: Box) -> LipschitzData:
    """Bound the gradient of h over ``box``.

    The gradient is affine, so its norm is maximized at a box corner.
    The gradient's own Lipschitz constant is 2 * ||Q||_2 everywhere.
    """
    grads = barrier_gradient(box.corners(), spec)
    l_h = float(np.max(np.linalg.norm(grads, axis=1)))
    if l_h < 1e-6:
        l_h = 1e-6  # degenerate box collapsed onto the center
    l_dh = 2.0 * float(np.linalg.norm(spec.quad_matrix(), 2))
    return LipschitzData(l_h=l_h, l_dh=l_dh, box=box)


def working_box(spec: BarrierSpec, inflate: float = 0.2) -> Box:
    """Axis-aligned box enclosing the safe set, inflated by ``inflate``."""
    # Half-widths of the AABB of {h >= 0} are sqrt(diag(Q^-1)).
    q_inv = np.linalg.inv(spec.quad_matrix())
    half = np.sqrt(np.diag(q_inv)) * (1.0 + inflate)
    return Box(lo=spec.center - half, hi=spec.center + half)


def default_margin(spec: BarrierSpec, box: Box, fraction: float = 0.05) -> float:
    """Collar width kappa_d = fraction * max |h| over the box corners."""
    vals = np.abs(barrier_value(box.corners(), spec))
    return float(fraction * np.max(vals))


def classify(x: np.ndarray, spec: BarrierSpec, tol: float = 0.0) -> str:
    """Classify ``x`` as "interior", "boundary" or "exterior"."""
    if tol < 0:
        raise InvalidInputError("tol must be nonnegative")
    val = float(barrier_value(x, spec))
    if abs(val) <= tol:
        return "boundary"
    return "interior" if val > tol else "exterior"


def sample_constraint_points(spec: BarrierSpec, plan: SamplePlan, box: Box) -> np.ndarray:
    """Points of {h >= -margin} per ``plan``; rows are states.

    Grid strategy returns every lattice point of pitch ``plan.tau``
    inside the collar; the random strategy rejection-samples
    ``plan.count`` points uniform over ``box`` into the collar.
    """
    if plan.strategy == "grid":
        axes = [np.arange(box.lo[i], box.hi[i] + 0.5 * plan.tau, plan.tau) for i in range(box.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        keep = barrier_value(pts, spec) >= -plan.margin
        return pts[keep]

    rng = np.random.default_rng(plan.seed)
    out = []
    accepted = 0
    tried = 0
    width = box.hi - box.lo
    while accepted < plan.count:
        batch = max(plan.count - accepted, 256)
        pts = box.lo + rng.random((batch, box.dim)) * width
        keep = pts[barrier_value(pts, spec) >= -plan.margin]
        tried += batch
        accepted += keep.shape[0]
        out.append(keep)
        if tried >= max(100_000, 1000 * plan.count) and accepted < 0.001 * tried:
            raise SamplingError(
                f"rejection acceptance rate {accepted / tried:.2e} below 0.1%"
            )
    return np.vstack(out)[: plan.count]
