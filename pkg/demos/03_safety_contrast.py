"""Why the barrier rows matter: Lyapunov-only vs. full training.

Trains the spiral benchmark twice with identical seeds — once with only
the Lyapunov (stability) constraint rows, once with barrier (safety)
rows as well — then rolls both out from starts just inside the safe-set
boundary and counts boundary crossings.  Plot data for both phase
portraits is written under demos/out/.

Run:  python3 demos/03_safety_contrast.py
"""

from pathlib import Path

import numpy as np

import safeflow as sf
from safeflow.io import emit_plot_data
from safeflow.synthetic import (
    make_spiral_demos,
    sample_boundary_adjacent_starts,
    spiral_barrier,
)


def count_exits(model, spec, starts):
    exits = 0
    for x0 in starts:
        traj = sf.rollout(model, x0, dt=0.02, steps=500)
        if np.min(sf.barrier_value(traj.states, spec)) < 0:
            exits += 1
    return exits


def main():
    spec = spiral_barrier()
    demos, _ = make_spiral_demos(spec)
    box = sf.working_box(spec)
    plan = sf.SamplePlan(
        strategy="uniform-random", count=1000, margin=sf.default_margin(spec, box), seed=3
    )
    cfg = sf.LearnConfig(n_h=25)

    print("training with Lyapunov rows only ...")
    lyap_only = sf.train(demos, spec, cfg, plan, seed=0, safety=False)
    print("training with Lyapunov + barrier rows ...")
    full = sf.train(demos, spec, cfg, plan, seed=0)

    starts = sample_boundary_adjacent_starts(spec, 100, seed=31, h_max=0.05)
    print(f"\n100 rollouts from starts with 0 < h <= 0.05:")
    print(f"  Lyapunov-only model: {count_exits(lyap_only, spec, starts)} leave the safe set")
    print(f"  full model:          {count_exits(full, spec, starts)} leave the safe set")

    out_root = Path(__file__).parent / "out"
    for name, model in (("lyapunov_only", lyap_only), ("full", full)):
        rollouts = [sf.rollout(model, x0, dt=0.02, steps=500) for x0 in starts[:10]]
        written = emit_plot_data(model, spec, 60, rollouts, out_root / name)
        print(f"  wrote {len(written)} plot files to {out_root / name}")


if __name__ == "__main__":
    main()
