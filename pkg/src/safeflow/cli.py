"""Command-line surface: train, rollout, certify, sea, montecarlo, plot.

Exit codes: 0 success, 1 invalid input, 2 infeasible training / failed
certification, 3 I/O failure.  Errors are emitted as JSON on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import io
from .barriers import default_margin, lipschitz_constants, working_box
from .errors import (
    BudgetError,
    InvalidInputError,
    SafeflowError,
    SamplingError,
    TrainingError,
)
from .evaluate import monte_carlo, resample_equidistant, sea
from .learner import train
from .simulate import DisturbanceSpec, certify_invariance, rollout
from .trajectories import finite_difference_derivatives

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse vector {text!r}") from exc


def _load_demos_with_derivatives(path):
    demos = io.load_demos(path)
    return [
        d if d.derivatives is not None else finite_difference_derivatives(d) for d in demos
    ]


def _default_pitch(spec) -> float:
    diameter = 2.0 * float(np.max(spec.semi_axes))
    return diameter / 400.0


def _cmd_train(args) -> int:
    demos = _load_demos_with_derivatives(args.demos)
    spec = io.load_barrier(args.barrier)
    cfg, plan, margin_given = io.load_config(args.config)
    if not margin_given:
        plan = dataclasses.replace(plan, margin=default_margin(spec, working_box(spec)))
    model = train(demos, spec, cfg, plan, seed=args.seed)
    diagnostics = dict(model.diagnostics)
    diagnostics["demo_dt"] = demos[0].dt
    model = dataclasses.replace(model, diagnostics=diagnostics)
    io.save_model(model, args.out)
    return EXIT_OK


def _cmd_rollout(args) -> int:
    model = io.load_model(args.model)
    dist = io.load_disturbance(args.disturbance) if args.disturbance else DisturbanceSpec()
    dt = args.dt if args.dt is not None else float(model.diagnostics.get("demo_dt", 0.02))
    traj = rollout(model, _parse_vector(args.x0), dt, args.steps, integrator=args.integrator, dist=dist)
    io.save_trajectory(traj, args.out)
    return EXIT_OK


def _cmd_certify(args) -> int:
    model = io.load_model(args.model)
    pitch = args.pitch if args.pitch is not None else _default_pitch(model.spec)
    lip = lipschitz_constants(model.spec, working_box(model.spec))
    report = certify_invariance(model, model.spec, lip, pitch)
    io.save_report(report, args.out)
    return EXIT_OK if report.passed else EXIT_INFEASIBLE


def _cmd_sea(args) -> int:
    model = io.load_model(args.model)
    demos = io.load_demos(args.demos)
    reproductions = [
        rollout(model, demo.states[0], demo.dt, len(demo) - 1) for demo in demos
    ]
    value = sea(demos, reproductions)
    io.save_report({"kind": "sea", "sea": value, "demonstrations": len(demos)}, args.out)
    return EXIT_OK


def _cmd_montecarlo(args) -> int:
    model = io.load_model(args.model)
    dist = io.load_disturbance(args.disturbance)
    x0 = _parse_vector(args.x0) if args.x0 else np.array(model.spec.center)
    dt = args.dt if args.dt is not None else float(model.diagnostics.get("demo_dt", 0.02))
    report = monte_carlo(
        model,
        dist,
        x0,
        dt,
        runs=args.runs,
        steps=args.steps,
        window=args.window,
        base_seed=args.seed,
    )
    io.save_report(report, args.out)
    return EXIT_OK


def _cmd_plot(args) -> int:
    model = io.load_model(args.model)
    rollouts = [io.load_trajectory(path) for path in args.rollouts]
    io.emit_plot_data(model, model.spec, args.grid_res, rollouts, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="safeflow",
        description="Learn, simulate, certify, and evaluate safe dynamical-system models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="learn a model from demonstrations")
    p.add_argument("--demos", required=True)
    p.add_argument("--barrier", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("rollout", help="integrate a learned model forward")
    p.add_argument("--model", required=True)
    p.add_argument("--x0", required=True, help="comma-separated initial state")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--integrator", choices=("euler", "rk4"), default="rk4")
    p.add_argument("--disturbance", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rollout)

    p = sub.add_parser("certify", help="dense-grid barrier-condition check")
    p.add_argument("--model", required=True)
    p.add_argument("--pitch", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("sea", help="swept-error-area of reproductions vs demos")
    p.add_argument("--model", required=True)
    p.add_argument("--demos", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sea)

    p = sub.add_parser("montecarlo", help="disturbed-rollout robustness statistics")
    p.add_argument("--model", required=True)
    p.add_argument("--disturbance", required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--x0", default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("plot", help="emit vector-field and rollout plot data")
    p.add_argument("--model", required=True)
    p.add_argument("--rollouts", nargs="*", default=[])
    p.add_argument("--grid-res", type=int, default=60)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    return parser


def _emit_error(kind: str, message: str) -> None:
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        _emit_error("io", str(exc))
        return EXIT_IO
    except TrainingError as exc:
        _emit_error("infeasible", str(exc))
        return EXIT_INFEASIBLE
    except (InvalidInputError, SamplingError, BudgetError) as exc:
        _emit_error("invalid-input", str(exc))
        return EXIT_INVALID
    except SafeflowError as exc:
        _emit_error("error", str(exc))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
