"""Dense convex QP solver: min 1/2 z^T H z + f^T z  s.t.  A z <= b.

Operator-splitting (ADMM) iteration with over-relaxation, periodic
penalty rebalancing, and a final active-set polish that refines the
iterate to near machine precision.  Problem semantics stay out of this
module; it only sees matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InvalidInputError

__all__ = ["QpProblem", "QpSolution", "solve_qp"]

_SIGMA = 1e-6  # proximal regularization on z
_ALPHA = 1.6  # over-relaxation
_CHECK_EVERY = 25  # residual/termination check interval
_REBALANCE_EVERY = 100  # penalty adaptation interval


@dataclass(frozen=True)
class QpProblem:
    """Standard-form convex QP data."""

    H: np.ndarray  # (d, d) symmetric PSD
    f: np.ndarray  # (d,)
    A: np.ndarray  # (m, d)
    b: np.ndarray  # (m,)

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        f = np.atleast_1d(np.asarray(self.f, dtype=float))
        d = f.size
        A = np.asarray(self.A, dtype=float).reshape(-1, d)
        b = np.atleast_1d(np.asarray(self.b, dtype=float)) if np.size(self.b) else np.zeros(0)
        if H.shape != (d, d):
            raise InvalidInputError(f"H must be ({d}, {d}), got {H.shape}")
        if b.shape != (A.shape[0],):
            raise InvalidInputError("A and b row counts disagree")
        scale = max(1.0, float(np.max(np.abs(H))))
        if np.max(np.abs(H - H.T)) > 1e-10 * scale:
            raise InvalidInputError("H must be symmetric to 1e-10")
        for arr in (H, f, A, b):
            arr.flags.writeable = False
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.f.size

    @property
    def n_constraints(self) -> int:
        return self.b.size

    def objective(self, z: np.ndarray) -> float:
        return float(0.5 * z @ self.H @ z + self.f @ z)


@dataclass(frozen=True)
class QpSolution:
    z: np.ndarray
    status: str  # "optimal" | "max-iterations" | "infeasible"
    objective: float
    primal_residual: float
    dual_residual: float
    iterations: int
    # Fixed-point residual per recorded iteration; non-increasing between
    # penalty updates (Douglas-Rachford averaged-operator property).
    residual_history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    penalty_updates: tuple = ()


def _residuals(p: QpProblem, z: np.ndarray, s: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    az = p.A @ z
    r_prim = float(np.max(np.abs(az - s))) if p.n_constraints else 0.0
    r_dual = float(np.max(np.abs(p.H @ z + p.f + p.A.T @ y))) if p.n_constraints else float(
        np.max(np.abs(p.H @ z + p.f))
    )
    return r_prim, r_dual


def _equilibrate(p: QpProblem) -> tuple[QpProblem, np.ndarray, np.ndarray, float]:
    """Modified Ruiz equilibration of the KKT data plus cost scaling.

    Returns the scaled problem and (D, E, c) such that the scaled data is
    H' = c D H D, f' = c D f, A' = E A D, b' = E b; a scaled solution
    (z', y') maps back as z = D z', y = E y' / c.
    """
    d, m = p.dim, p.n_constraints
    big_d, big_e, c = np.ones(d), np.ones(m), 1.0
    h, f, a, b = p.H.copy(), p.f.copy(), p.A.copy(), p.b.copy()
    for _ in range(10):
        col_h = np.abs(h).max(axis=0)
        if m:
            col_h = np.maximum(col_h, np.abs(a).max(axis=0))
            row_a = np.abs(a).max(axis=1)
        else:
            row_a = np.zeros(0)
        dz = 1.0 / np.sqrt(np.where(col_h > 0, col_h, 1.0))
        de = 1.0 / np.sqrt(np.where(row_a > 0, row_a, 1.0))
        h = dz[:, None] * h * dz
        f = dz * f
        if m:
            a = de[:, None] * a * dz
            b = de * b
        big_d *= dz
        big_e *= de
        cost = max(float(np.mean(np.abs(h).max(axis=0))), float(np.max(np.abs(f), initial=0.0)))
        gamma = 1.0 / max(cost, 1e-12)
        h *= gamma
        f *= gamma
        c *= gamma
    return QpProblem(h, f, a, b), big_d, big_e, c


def _polish(
    p: QpProblem, z: np.ndarray, y: np.ndarray, prim_tol: float, dual_tol: float
) -> tuple[np.ndarray, np.ndarray] | None:
    """Equality-constrained KKT solve on the detected active set."""
    slack = p.b - p.A @ z
    b_scale = 1.0 + np.abs(p.b)
    active = np.flatnonzero((slack <= prim_tol * b_scale) | (y > dual_tol))
    a_act = p.A[active]
    k = active.size
    d = p.dim
    kkt = np.zeros((d + k, d + k))
    kkt[:d, :d] = p.H
    kkt[:d, d:] = a_act.T
    kkt[d:, :d] = a_act
    rhs = np.concatenate([-p.f, p.b[active]])
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    z_new, nu = sol[:d], sol[d:]
    if np.any(nu < -1e-7 * (1.0 + float(np.max(nu, initial=0.0)))):
        return None
    y_new = np.zeros(p.n_constraints)
    y_new[active] = np.maximum(nu, 0.0)
    return z_new, y_new


def _accept_polish(
    p: QpProblem,
    z: np.ndarray,
    y: np.ndarray,
    prim_tol: float,
    dual_tol: float,
    eps_primal: float,
    eps_dual: float,
) -> tuple[np.ndarray, np.ndarray, float, float] | None:
    """Polish and keep the result only if it verifiably satisfies the KKT
    conditions to the requested tolerances."""
    polished = _polish(p, z, y, prim_tol, dual_tol)
    if polished is None:
        return None
    z_p, y_p = polished
    viol = float(np.max(p.A @ z_p - p.b, initial=0.0))
    if viol > eps_primal * (1.0 + float(np.max(np.abs(p.b), initial=0.0))):
        return None
    r_dual = float(np.max(np.abs(p.H @ z_p + p.f + p.A.T @ y_p)))
    dual_ref = eps_dual * (1.0 + max(
        float(np.max(np.abs(p.H @ z_p))), float(np.max(np.abs(p.f))),
        float(np.max(np.abs(p.A.T @ y_p))),
    ))
    if r_dual > dual_ref:
        return None
    return z_p, y_p, max(viol, 0.0), r_dual


def solve_qp(
    p: QpProblem,
    eps_primal: float = 1e-8,
    eps_dual: float = 1e-8,
    max_iter: int = 50_000,
) -> QpSolution:
    """Solve the QP; deterministic, no randomness involved.

    Returns status "optimal" when both scaled residuals pass their
    tolerances, "infeasible" on a primal infeasibility certificate, and
    "max-iterations" (with the best iterate) at the iteration cap.
    """
    if eps_primal <= 0 or eps_dual <= 0:
        raise InvalidInputError("tolerances must be positive")
    d, m = p.dim, p.n_constraints

    if m == 0:
        z = np.linalg.solve(p.H + _SIGMA * np.eye(d), -p.f)
        # One Newton refinement removes the proximal bias when H is PD.
        try:
            z = np.linalg.solve(p.H, -p.f)
        except np.linalg.LinAlgError:
            pass
        r_prim, r_dual = _residuals(p, z, np.zeros(0), np.zeros(0))
        return QpSolution(z, "optimal", p.objective(z), r_prim, r_dual, 0)

    ps, big_d, big_e, c = _equilibrate(p)
    a_scale = max(1.0, float(np.linalg.norm(p.A, np.inf)))
    rho = 0.1

    zs = np.zeros(d)
    ss = np.minimum(np.zeros(m), ps.b)
    ys = np.zeros(m)
    eye = np.eye(d)
    factor = sla.cho_factor(ps.H + _SIGMA * eye + rho * (ps.A.T @ ps.A))

    history: list[float] = []
    penalty_updates: list[int] = []
    status = "max-iterations"
    it = 0
    for it in range(1, max_iter + 1):
        z_t = sla.cho_solve(factor, _SIGMA * zs - ps.f + ps.A.T @ (rho * ss - ys))
        az_t = ps.A @ z_t
        z_new = _ALPHA * z_t + (1 - _ALPHA) * zs
        v = _ALPHA * az_t + (1 - _ALPHA) * ss + ys / rho
        s_new = np.minimum(v, ps.b)
        y_new = rho * (v - s_new)

        fp = np.sqrt(
            np.linalg.norm(z_new - zs) ** 2
            + np.linalg.norm(s_new - ss) ** 2
            + np.linalg.norm((y_new - ys) / rho) ** 2
        )
        history.append(fp)
        dy = y_new - ys
        zs, ss, ys = z_new, s_new, y_new

        if it % _CHECK_EVERY == 0 or fp == 0.0:
            z, s, y = big_d * zs, ss / big_e, big_e * ys / c
            r_prim, r_dual = _residuals(p, z, s, y)
            prim_ref = eps_primal * (1.0 + max(
                float(np.max(np.abs(p.A @ z))), float(np.max(np.abs(s))), float(np.max(np.abs(p.b)))
            ))
            dual_ref = eps_dual * (1.0 + max(
                float(np.max(np.abs(p.H @ z))), float(np.max(np.abs(p.f))),
                float(np.max(np.abs(p.A.T @ y))),
            ))
            if r_prim <= prim_ref and r_dual <= dual_ref:
                status = "optimal"
                break
            if it % _REBALANCE_EVERY == 0:
                accepted = _accept_polish(
                    p, z, y,
                    prim_tol=max(100.0 * eps_primal, 10.0 * r_prim),
                    dual_tol=max(100.0 * eps_dual, 10.0 * r_dual),
                    eps_primal=eps_primal, eps_dual=eps_dual,
                )
                if accepted is not None:
                    zs = accepted[0] / big_d
                    ys = c * accepted[1] / big_e
                    status = "optimal"
                    break
            # Primal infeasibility certificate: A^T dy ~ 0, b^T dy < 0, dy >= 0.
            dy_u = big_e * dy
            dy_norm = float(np.max(np.abs(dy_u)))
            if dy_norm > 0:
                dy_n = dy_u / dy_norm
                if (
                    np.all(dy_n >= -1e-10)
                    and float(np.max(np.abs(p.A.T @ dy_n))) <= 1e-10 * a_scale
                    and float(p.b @ dy_n) < -1e-10
                ):
                    status = "infeasible"
                    break
            if it % _REBALANCE_EVERY == 0 and r_dual > 0 and r_prim > 0:
                ratio = np.sqrt(r_prim / r_dual)
                if ratio > 5.0 or ratio < 0.2:
                    rho *= float(np.clip(ratio, 1e-4, 1e4))
                    factor = sla.cho_factor(ps.H + _SIGMA * eye + rho * (ps.A.T @ ps.A))
                    penalty_updates.append(it)

    z, y = big_d * zs, big_e * ys / c
    r_prim, r_dual = _residuals(p, z, np.minimum(p.A @ z, p.b) if m else np.zeros(0), y)
    if status != "infeasible":
        accepted = _accept_polish(
            p, z, y,
            prim_tol=max(100.0 * eps_primal, 10.0 * r_prim),
            dual_tol=max(100.0 * eps_dual, 10.0 * r_dual),
            eps_primal=eps_primal, eps_dual=eps_dual,
        )
        if accepted is not None:
            z, y, r_prim, r_dual = accepted
            status = "optimal"

    return QpSolution(
        z=z,
        status=status,
        objective=p.objective(z),
        primal_residual=r_prim,
        dual_residual=r_dual,
        iterations=it,
        residual_history=np.asarray(history),
        penalty_updates=tuple(penalty_updates),
    )
