"""Train a safe model on the synthetic spiral benchmark and certify it.

Walks the full pipeline: generate spiral demonstrations that hug the
boundary of an elliptical safe set, learn the vector field under barrier
and Lyapunov constraints, certify forward invariance on a dense grid,
and roll the model out from a few interior points.

Run:  python3 demos/01_train_and_certify.py
"""

import numpy as np

import safeflow as sf
from safeflow.synthetic import make_spiral_demos, sample_interior_starts, spiral_barrier


def main():
    # --- problem setup: safe set + demonstrations --------------------------
    spec = spiral_barrier()  # ellipse, semi-axes (1.0, 0.6), gamma = 2
    demos, true_field = make_spiral_demos(spec)
    print(f"safe set: ellipse semi-axes {spec.semi_axes}, gamma={spec.gamma}")
    print(f"demonstrations: {len(demos)} x {len(demos[0])} points, dt={demos[0].dt}")

    # --- training -----------------------------------------------------------
    box = sf.working_box(spec)
    plan = sf.SamplePlan(
        strategy="uniform-random",
        count=1000,
        margin=sf.default_margin(spec, box),
        seed=3,
    )
    cfg = sf.LearnConfig(gamma=2.0, rho=5.0, mu_w=0.01, p=1e-3, n_h=25)
    model = sf.train(demos, spec, cfg, plan, seed=0)
    d = model.diagnostics
    print(
        f"trained: status={d['qp_status']}, iterations={d['solver_iterations']}, "
        f"E_D={d['e_d']:.4f}, delta*={model.delta_star:.3e}"
    )
    print(f"empirical bounds: eps_bar={model.cfg.bounds.eps_bar:.3f}")

    # --- certification -------------------------------------------------------
    lip = sf.lipschitz_constants(spec, box)
    pitch = 2 * float(np.max(spec.semi_axes)) / 400
    report = sf.certify_invariance(model, spec, lip, pitch)
    print(
        f"certification: min_slack={report.min_slack:.3f} at {report.argmin}, "
        f"threshold={report.threshold:.3f}, pass={report.passed} "
        f"({report.n_points} grid points)"
    )

    # --- rollouts -------------------------------------------------------------
    starts = sample_interior_starts(spec, 5, seed=11)
    bound = model.cfg.bounds.eps_bar / model.cfg.rho
    for x0 in starts:
        traj = sf.rollout(model, x0, dt=0.02, steps=1000)
        min_h = float(np.min(sf.barrier_value(traj.states, spec)))
        end_dist = float(np.linalg.norm(traj.states[-1] - model.cfg.x_star))
        print(
            f"  rollout from {np.round(x0, 3)}: min h = {min_h:.4f}, "
            f"final |x - x*| = {end_dist:.4f} (ultimate bound {bound:.4f})"
        )


if __name__ == "__main__":
    main()
