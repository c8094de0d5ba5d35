"""Read LASA handwriting MAT-files and emit demonstration JSON.

The public LASA layout is a top-level ``demos`` array of structs, each
carrying ``pos`` (2 x T), ``vel`` (2 x T), and either a scalar ``dt`` or
a time vector ``t``.  The emitted JSON follows the demonstration-file
schema of the learning pipeline: ``{"dt", "dims", "demonstrations":
[{"states", "derivatives"}]}`` with states = pos transposed and
derivatives = vel transposed, values preserved to double precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.io

__all__ = ["LasaShape", "SchemaError", "read_lasa_mat", "convert"]

EXPECTED_DEMO_COUNT = 7


class SchemaError(ValueError):
    """The MAT-file does not follow the expected LASA layout."""


@dataclass(frozen=True)
class LasaShape:
    """One handwriting shape: per-demo positions, velocities, and the shared dt."""

    name: str
    dt: float
    positions: tuple  # of (2, T) float arrays
    velocities: tuple  # of (2, T) float arrays

    @property
    def n_demos(self) -> int:
        return len(self.positions)


def _field(entry, name):
    """Fetch a struct field whether scipy produced an object or a record."""
    if hasattr(entry, name):
        return getattr(entry, name)
    try:
        return entry[name]
    except (KeyError, IndexError, TypeError, ValueError):
        return None


def _entry_fields(entry) -> list[str]:
    if hasattr(entry, "_fieldnames"):
        return list(entry._fieldnames)
    if hasattr(entry, "dtype") and entry.dtype.names:
        return list(entry.dtype.names)
    return []


def _demo_dt(entry) -> float | None:
    dt = _field(entry, "dt")
    if dt is not None:
        dt = np.asarray(dt, dtype=float).ravel()
        if dt.size == 1:
            return float(dt[0])
    t = _field(entry, "t")
    if t is not None:
        t = np.asarray(t, dtype=float).ravel()
        if t.size >= 2:
            return float(np.median(np.diff(t)))
    return None


def read_lasa_mat(mat_path, allow_any_count: bool = False) -> LasaShape:
    """Parse a LASA shape MAT-file into arrays.

    Raises :class:`SchemaError` (listing the fields actually found) when
    the layout does not match, including a demonstration count other
    than 7 unless ``allow_any_count`` is set.
    """
    doc = scipy.io.loadmat(mat_path, squeeze_me=True, struct_as_record=False)
    data_keys = [k for k in doc if not k.startswith("__")]
    if "demos" not in doc:
        raise SchemaError(
            f"no 'demos' entry in {mat_path}; found top-level fields: {sorted(data_keys)}"
        )
    demos = np.atleast_1d(np.asarray(doc["demos"], dtype=object)).ravel()
    if demos.size == 0:
        raise SchemaError(f"'demos' in {mat_path} is empty")
    if not allow_any_count and demos.size != EXPECTED_DEMO_COUNT:
        raise SchemaError(
            f"expected {EXPECTED_DEMO_COUNT} demonstrations, found {demos.size} "
            f"(pass --allow-any-count to accept)"
        )

    positions, velocities, dts = [], [], []
    for i, entry in enumerate(demos):
        pos = _field(entry, "pos")
        vel = _field(entry, "vel")
        dt = _demo_dt(entry)
        if pos is None or vel is None or dt is None:
            raise SchemaError(
                f"demo {i} lacks pos/vel/dt; found fields: {sorted(_entry_fields(entry))}"
            )
        pos = np.asarray(pos, dtype=float)
        vel = np.asarray(vel, dtype=float)
        if pos.ndim != 2 or pos.shape != vel.shape:
            raise SchemaError(
                f"demo {i}: pos shape {pos.shape} and vel shape {vel.shape} disagree"
            )
        positions.append(pos)
        velocities.append(vel)
        dts.append(dt)
    if len(set(dts)) != 1:
        raise SchemaError(f"demonstrations disagree on dt: {sorted(set(dts))}")
    dims = {p.shape[0] for p in positions}
    if len(dims) != 1:
        raise SchemaError(f"demonstrations disagree on state dimension: {sorted(dims)}")
    name = _field(doc, "name")
    return LasaShape(
        name=str(name) if name is not None else "",
        dt=dts[0],
        positions=tuple(positions),
        velocities=tuple(velocities),
    )


def convert(mat_path, out_json_path, allow_any_count: bool = False) -> dict:
    """Convert a LASA MAT-file to a demonstration JSON file.

    Returns the emitted document.  States are positions transposed to
    time-major order; derivatives are the matching velocities.
    """
    shape = read_lasa_mat(mat_path, allow_any_count=allow_any_count)
    doc = {
        "dt": shape.dt,
        "dims": int(shape.positions[0].shape[0]),
        "demonstrations": [
            {"states": pos.T.tolist(), "derivatives": vel.T.tolist()}
            for pos, vel in zip(shape.positions, shape.velocities)
        ],
    }
    with open(out_json_path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return doc
