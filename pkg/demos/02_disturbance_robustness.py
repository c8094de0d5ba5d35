"""Monte Carlo robustness of a trained model under disturbances.

Trains the spiral benchmark model, then stresses it with (a) Gaussian
noise injected into the state derivative and (b) a discrete push applied
to the state mid-trajectory, reporting success rates against the
theoretical ultimate bound (eps_bar + d_bar) / rho.

Run:  python3 demos/02_disturbance_robustness.py
"""

import numpy as np

import safeflow as sf
from safeflow.synthetic import make_spiral_demos, spiral_barrier


def main():
    spec = spiral_barrier()
    demos, _ = make_spiral_demos(spec)
    box = sf.working_box(spec)
    plan = sf.SamplePlan(
        strategy="uniform-random", count=1000, margin=sf.default_margin(spec, box), seed=3
    )
    model = sf.train(demos, spec, sf.LearnConfig(n_h=25), plan, seed=0)
    print(f"trained (status {model.diagnostics['qp_status']}); "
          f"eps_bar={model.cfg.bounds.eps_bar:.3f}, rho={model.cfg.rho}")

    # --- Gaussian noise at increasing levels ---------------------------------
    states = np.vstack([d.states for d in demos])
    scale = float(np.max(np.ptp(states, axis=0)))
    x0 = np.array([0.5, 0.1])
    print("\nGaussian disturbance (mean = std = level):")
    for level in (0.01, 0.02, 0.05):
        dist = sf.DisturbanceSpec(kind="gaussian", mean=level, std=level)
        report = sf.monte_carlo(model, dist, x0, dt=0.02, runs=50, steps=1000)
        print(
            f"  level {level:.2f} ({level / scale * 100:.1f}% of data scale): "
            f"success {report.success_rate:.2f}, "
            f"bound {report.mu_ub:.4f}, mean tail distance {report.mu_lim:.4f}"
        )

    # --- discrete push ---------------------------------------------------------
    print("\nDiscrete push (applied to the state at step 200):")
    for amplitude in (0.05, 0.15):
        dist = sf.DisturbanceSpec(
            kind="discrete-push",
            amplitude=amplitude,
            direction=np.array([0.0, 1.0]),
            trigger_step=200,
        )
        traj = sf.rollout(model, x0, dt=0.02, steps=1000, dist=dist)
        min_h = float(np.min(sf.barrier_value(traj.states, spec)))
        end = float(np.linalg.norm(traj.states[-1] - model.cfg.x_star))
        print(
            f"  amplitude {amplitude:.2f}: min h after push = {min_h:.4f}, "
            f"final |x - x*| = {end:.4f}"
        )


if __name__ == "__main__":
    main()
