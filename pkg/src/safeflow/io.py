"""JSON/CSV file formats, model serialization, and plot-data emission.

All artifacts are JSON with full-precision floats (lossless round-trip);
plot grids are CSV.  Outputs carry no timestamps so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .barriers import Box, BarrierSpec, SamplePlan, barrier_value, working_box
from .constraints import LearnConfig
from .elm import BoundEstimates, ElmParams, evaluate_batch
from .errors import InvalidInputError
from .learner import LearnedModel
from .simulate import CertReport, DisturbanceSpec
from .evaluate import MonteCarloReport
from .trajectories import Trajectory

__all__ = [
    "FORMAT_VERSION",
    "save_demos",
    "load_demos",
    "save_model",
    "load_model",
    "save_barrier",
    "load_barrier",
    "load_config",
    "load_disturbance",
    "save_trajectory",
    "load_trajectory",
    "report_to_dict",
    "save_report",
    "emit_plot_data",
]

FORMAT_VERSION = "safeflow/1"


def _dump(payload: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _load(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- demonstrations ----------------------------------------------------------

def save_demos(demos: list[Trajectory], path) -> None:
    if not demos:
        raise InvalidInputError("cannot save an empty demonstration set")
    dt = demos[0].dt
    dims = demos[0].dim
    if any(d.dt != dt or d.dim != dims for d in demos):
        raise InvalidInputError("all demonstrations must share dt and dims")
    entries = []
    for demo in demos:
        entry = {"states": demo.states.tolist()}
        if demo.derivatives is not None:
            entry["derivatives"] = demo.derivatives.tolist()
        entries.append(entry)
    _dump({"dt": dt, "dims": dims, "demonstrations": entries}, path)


def load_demos(path) -> list[Trajectory]:
    doc = _load(path)
    try:
        dt = float(doc["dt"])
        dims = int(doc["dims"])
        entries = doc["demonstrations"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed demo file: {exc}") from exc
    demos = []
    for entry in entries:
        states = np.asarray(entry["states"], dtype=float)
        if states.ndim != 2 or states.shape[1] != dims:
            raise InvalidInputError("demonstration states do not match the declared dims")
        derivs = entry.get("derivatives")
        demos.append(
            Trajectory(
                dt=dt,
                states=states,
                derivatives=None if derivs is None else np.asarray(derivs, dtype=float),
                source="demonstration",
            )
        )
    return demos


# -- trajectories ------------------------------------------------------------

def save_trajectory(traj: Trajectory, path) -> None:
    payload = {
        "dt": traj.dt,
        "source": traj.source,
        "states": traj.states.tolist(),
    }
    if traj.derivatives is not None:
        payload["derivatives"] = traj.derivatives.tolist()
    _dump(payload, path)


def load_trajectory(path) -> Trajectory:
    doc = _load(path)
    derivs = doc.get("derivatives")
    return Trajectory(
        dt=float(doc["dt"]),
        states=np.asarray(doc["states"], dtype=float),
        derivatives=None if derivs is None else np.asarray(derivs, dtype=float),
        source=doc.get("source", "rollout"),
    )


# -- barrier specs -----------------------------------------------------------

def _barrier_to_dict(spec: BarrierSpec) -> dict:
    return {
        "kind": spec.kind,
        "center": spec.center.tolist(),
        "semi_axes": spec.semi_axes.tolist(),
        "rotation": spec.rotation,
        "gamma": spec.gamma,
    }


def _barrier_from_dict(doc: dict) -> BarrierSpec:
    return BarrierSpec(
        kind=doc["kind"],
        center=np.asarray(doc["center"], dtype=float),
        semi_axes=np.asarray(doc["semi_axes"], dtype=float),
        rotation=float(doc.get("rotation", 0.0)),
        gamma=float(doc.get("gamma", 2.0)),
    )


def save_barrier(spec: BarrierSpec, path) -> None:
    _dump(_barrier_to_dict(spec), path)


def load_barrier(path) -> BarrierSpec:
    try:
        return _barrier_from_dict(_load(path))
    except KeyError as exc:
        raise InvalidInputError(f"malformed barrier file: missing {exc}") from exc


# -- learn config + sample plan ----------------------------------------------

def load_config(path) -> tuple[LearnConfig, SamplePlan, bool]:
    """Read hyperparameters and the constraint-sampling plan.

    Returns (config, plan, margin_given); when the file omits the
    sampling margin, the caller should substitute the default collar
    for the barrier at hand (see :func:`safeflow.barriers.default_margin`).
    """
    doc = _load(path)
    cfg_keys = (
        "gamma", "rho", "tau", "mu_w", "p", "l_f", "l_v",
        "n_h", "mu_exp", "safety_factor",
    )
    kwargs = {k: doc[k] for k in cfg_keys if k in doc}
    if doc.get("x_star") is not None:
        kwargs["x_star"] = np.asarray(doc["x_star"], dtype=float)
    cfg = LearnConfig(**kwargs)
    plan_doc = doc.get("sampling", {})
    margin = plan_doc.get("margin")
    plan = SamplePlan(
        strategy=plan_doc.get("strategy", "uniform-random"),
        tau=float(plan_doc.get("tau", 0.05)),
        count=int(plan_doc.get("count", 1000)),
        margin=float(margin) if margin is not None else 0.0,
        seed=int(plan_doc.get("seed", 0)),
    )
    return cfg, plan, margin is not None


# -- disturbances ------------------------------------------------------------

def load_disturbance(path) -> DisturbanceSpec:
    doc = _load(path)
    direction = doc.get("direction")
    return DisturbanceSpec(
        kind=doc.get("kind", "none"),
        mean=float(doc.get("mean", 0.0)),
        std=float(doc.get("std", 0.0)),
        amplitude=float(doc.get("amplitude", 0.0)),
        direction=None if direction is None else np.asarray(direction, dtype=float),
        trigger_step=doc.get("trigger_step"),
        seed=int(doc.get("seed", 0)),
    )


# -- models ------------------------------------------------------------------

def save_model(model: LearnedModel, path) -> None:
    cfg = model.cfg
    bounds = cfg.bounds
    payload = {
        "format_version": FORMAT_VERSION,
        "params": {
            "U": model.params.U.tolist(),
            "a_p": model.params.a_p.tolist(),
            "b_p": model.params.b_p.tolist(),
            "W": model.params.W.tolist(),
        },
        "barrier": _barrier_to_dict(model.spec),
        "config": {
            "gamma": cfg.gamma,
            "rho": cfg.rho,
            "tau": cfg.tau,
            "mu_w": cfg.mu_w,
            "p": cfg.p,
            "l_f": cfg.l_f,
            "l_v": cfg.l_v,
            "n_h": cfg.n_h,
            "mu_exp": cfg.mu_exp,
            "safety_factor": cfg.safety_factor,
            "x_star": None if cfg.x_star is None else cfg.x_star.tolist(),
        },
        "bounds": None
        if bounds is None
        else {
            "eps_bar": bounds.eps_bar,
            "eps_prime_bar": bounds.eps_prime_bar,
            "w_bar": bounds.w_bar,
            "u_bar": bounds.u_bar,
            "a_bar": bounds.a_bar,
            "w_nh_bar": bounds.w_nh_bar,
            "g_bar": bounds.g_bar,
        },
        "delta_star": model.delta_star,
        "diagnostics": model.diagnostics,
    }
    _dump(payload, path)


def load_model(path) -> LearnedModel:
    doc = _load(path)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise InvalidInputError(f"unsupported model format version {version!r}")
    p = doc["params"]
    params = ElmParams(
        U=np.asarray(p["U"], dtype=float),
        a_p=np.asarray(p["a_p"], dtype=float),
        b_p=np.asarray(p["b_p"], dtype=float),
        W=np.asarray(p["W"], dtype=float),
    )
    c = doc["config"]
    b = doc.get("bounds")
    bounds = None if b is None else BoundEstimates(**b)
    cfg = LearnConfig(
        gamma=c["gamma"],
        rho=c["rho"],
        tau=c["tau"],
        mu_w=c["mu_w"],
        p=c["p"],
        l_f=c["l_f"],
        l_v=c["l_v"],
        n_h=c["n_h"],
        mu_exp=c["mu_exp"],
        safety_factor=c["safety_factor"],
        bounds=bounds,
        x_star=None if c.get("x_star") is None else np.asarray(c["x_star"], dtype=float),
    )
    return LearnedModel(
        params=params,
        delta_star=float(doc["delta_star"]),
        cfg=cfg,
        spec=_barrier_from_dict(doc["barrier"]),
        diagnostics=doc.get("diagnostics", {}),
    )


# -- reports -----------------------------------------------------------------

def report_to_dict(report) -> dict:
    if isinstance(report, CertReport):
        return {
            "kind": "certification",
            "min_slack": report.min_slack,
            "argmin": report.argmin.tolist(),
            "pass": report.passed,
            "threshold": report.threshold,
            "n_points": report.n_points,
        }
    if isinstance(report, MonteCarloReport):
        return {
            "kind": "monte-carlo",
            "runs": report.runs,
            "mu_ub": report.mu_ub,
            "mu_lim": report.mu_lim,
            "success_rate": report.success_rate,
            "records": list(report.records),
        }
    raise InvalidInputError(f"unknown report type {type(report).__name__}")


def save_report(report, path) -> None:
    _dump(report_to_dict(report) if not isinstance(report, dict) else report, path)


# -- plot data ----------------------------------------------------------------

def _marching_squares(xs: np.ndarray, ys: np.ndarray, values: np.ndarray, level: float = 0.0):
    """Level-set segments of a scalar grid, chained into polylines."""
    segments = []

    def interp(p1, p2, v1, v2):
        t = (level - v1) / (v2 - v1)
        return (p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))

    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            corners = [
                ((xs[i], ys[j]), values[i, j]),
                ((xs[i + 1], ys[j]), values[i + 1, j]),
                ((xs[i + 1], ys[j + 1]), values[i + 1, j + 1]),
                ((xs[i], ys[j + 1]), values[i, j + 1]),
            ]
            crossings = []
            for k in range(4):
                (p1, v1), (p2, v2) = corners[k], corners[(k + 1) % 4]
                if (v1 - level) * (v2 - level) < 0:
                    crossings.append(interp(p1, p2, v1, v2))
            if len(crossings) == 2:
                segments.append(tuple(crossings))
            elif len(crossings) == 4:  # saddle cell: pair consecutive edges
                segments.append((crossings[0], crossings[1]))
                segments.append((crossings[2], crossings[3]))

    # Chain segments into polylines by matching endpoints.
    paths = []
    remaining = list(segments)
    while remaining:
        a, b = remaining.pop()
        path = [a, b]
        grown = True
        while grown:
            grown = False
            for idx, (p, q) in enumerate(remaining):
                tol = 1e-9
                if np.hypot(p[0] - path[-1][0], p[1] - path[-1][1]) < tol:
                    path.append(q)
                elif np.hypot(q[0] - path[-1][0], q[1] - path[-1][1]) < tol:
                    path.append(p)
                elif np.hypot(p[0] - path[0][0], p[1] - path[0][1]) < tol:
                    path.insert(0, q)
                elif np.hypot(q[0] - path[0][0], q[1] - path[0][1]) < tol:
                    path.insert(0, p)
                else:
                    continue
                remaining.pop(idx)
                grown = True
                break
        paths.append(path)
    return paths


def _svg_polyline(points, stroke, width, closed=False, transform=None) -> str:
    pts = [transform(p) if transform else p for p in points]
    coords = " ".join(f"{x:.4f},{y:.4f}" for x, y in pts)
    tag = "polygon" if closed else "polyline"
    return f'<{tag} points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'


def emit_plot_data(
    model: LearnedModel,
    spec: BarrierSpec,
    grid_res: int,
    rollouts: list[Trajectory],
    path,
    svg: bool = True,
) -> list[str]:
    """Write vector-field grid CSV, per-rollout CSVs, and an overview SVG.

    Returns the list of files written (relative to ``path``).
    """
    if grid_res < 2:
        raise InvalidInputError("grid_res must be >= 2")
    if spec.dim != 2:
        raise InvalidInputError("plot emission supports 2-D models only")
    out_dir = Path(path)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    box = working_box(spec)
    xs = np.linspace(box.lo[0], box.hi[0], grid_res)
    ys = np.linspace(box.lo[1], box.hi[1], grid_res)
    mesh_x, mesh_y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([mesh_x.ravel(), mesh_y.ravel()])
    flows = evaluate_batch(pts, model.params)
    h_vals = barrier_value(pts, spec)

    grid_file = out_dir / "field_grid.csv"
    with open(grid_file, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "dx1", "dx2", "h"])
        for point, flow, h in zip(pts, flows, h_vals):
            writer.writerow([repr(float(v)) for v in (point[0], point[1], flow[0], flow[1], h)])
    written.append(grid_file.name)

    for idx, traj in enumerate(rollouts):
        name = f"rollout_{idx:02d}.csv"
        with open(out_dir / name, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x1", "x2"])
            for step, state in enumerate(traj.states):
                writer.writerow([repr(float(step * traj.dt)), repr(float(state[0])), repr(float(state[1]))])
        written.append(name)

    if svg:
        values = h_vals.reshape(grid_res, grid_res)
        paths = _marching_squares(xs, ys, values, level=0.0)
        size = 640
        span = max(box.hi - box.lo)

        def to_px(p):
            return (
                (p[0] - box.lo[0]) / span * size,
                size - (p[1] - box.lo[1]) / span * size,
            )

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">'
        ]
        for boundary in paths:
            closed = np.hypot(
                boundary[0][0] - boundary[-1][0], boundary[0][1] - boundary[-1][1]
            ) < 1e-6
            pts_draw = boundary[:-1] if closed else boundary
            parts.append(_svg_polyline(pts_draw, "black", 2, closed=closed, transform=to_px))
        for traj in rollouts:
            parts.append(
                _svg_polyline([tuple(s) for s in traj.states], "steelblue", 1, transform=to_px)
            )
        parts.append("</svg>")
        svg_file = out_dir / "phase_portrait.svg"
        svg_file.write_text("\n".join(parts) + "\n")
        written.append(svg_file.name)
    return written
