"""Readers for the solver's on-disk output formats.

The plotting side of the project is deliberately decoupled from the solver:
everything here works from the files a run directory contains, so figures
can be regenerated on a machine that only has the outputs.  The formats:

* ``sweep.csv`` / ``dn_reference.csv`` / ``pareto.csv`` — one row per grid
  point with the exact header ``alpha12_bar,alpha21_bar,beta12,beta21,
  eps_avg,mean_iterations,wall_time_s,converged``.  ``eps_avg`` is empty
  for rows that did not converge; ``converged`` is ``true``/``false``.
* ``errors.csv`` — per-step error history with header ``step_index,
  time_s,eps_sub1,eps_sub2,eps_total``.
* field files — ``<name>.bin`` holds float64 little-endian values in
  column-major order (all nodes of state 0, then state 1, ...), and the
  ``<name>.json`` sidecar carries the grid metadata (``n_nodes``,
  ``n_states``, ``dt``, ``t0``, ``x_left``, ``x_right``).  Single-domain
  trajectories store ``u``/``v``/``a``; coupled runs store
  ``u_sub1`` ... ``a_sub2``.
* ``fig8.json`` — index written by the long-horizon preset, naming the
  configuration subdirectories and the training cutoff.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

SWEEP_COLUMNS = ("alpha12_bar", "alpha21_bar", "beta12", "beta21",
                 "eps_avg", "mean_iterations", "wall_time_s", "converged")
ERROR_COLUMNS = ("step_index", "time_s", "eps_sub1", "eps_sub2", "eps_total")


def _check_header(path, frame: pd.DataFrame, expected) -> None:
    missing = [c for c in expected if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")


def read_sweep(path) -> pd.DataFrame:
    """Sweep-format table as a DataFrame; raises ValueError on a missing
    column or an empty table."""
    frame = pd.read_csv(path)
    _check_header(path, frame, SWEEP_COLUMNS)
    if len(frame) == 0:
        raise ValueError(f"{path}: no records")
    if frame["converged"].dtype != bool:
        frame["converged"] = frame["converged"].astype(str) == "true"
    return frame


def read_record(path) -> dict:
    """The single row of a sweep-format file (e.g. ``dn_reference.csv``)."""
    frame = read_sweep(path)
    if len(frame) != 1:
        raise ValueError(f"{path}: expected exactly one record, "
                         f"got {len(frame)}")
    return frame.iloc[0].to_dict()


def read_errors(path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    _check_header(path, frame, ERROR_COLUMNS)
    return frame


def load_field(out_dir, name: str) -> tuple[np.ndarray, np.ndarray, dict]:
    """One stored field as ``(x, values, sidecar)``.

    ``values`` has shape (n_nodes, n_states); ``x`` are the node
    coordinates reconstructed from the sidecar's uniform-grid metadata.
    """
    out_dir = Path(out_dir)
    meta = json.loads((out_dir / f"{name}.json").read_text())
    rows, cols = meta["n_nodes"], meta["n_states"]
    flat = np.fromfile(out_dir / f"{name}.bin", dtype="<f8")
    if flat.size != rows * cols:
        raise ValueError(f"{out_dir / (name + '.bin')}: expected "
                         f"{rows}x{cols} values, got {flat.size}")
    values = flat.reshape((cols, rows)).T
    x = np.linspace(meta["x_left"], meta["x_right"], rows)
    return x, values, meta


def state_times(meta: dict) -> np.ndarray:
    return meta["t0"] + meta["dt"] * np.arange(meta["n_states"])


def load_solution(out_dir, suffix: str = "") -> dict:
    """The u/v/a fields of a trajectory (``suffix=""``) or of one coupled
    subdomain (``suffix="_sub1"`` or ``"_sub2"``), keyed by field name,
    plus ``"x"`` and ``"times"``."""
    out = {}
    for name in ("u", "v", "a"):
        x, values, meta = load_field(out_dir, name + suffix)
        out[name] = values
    out["x"] = x
    out["times"] = state_times(meta)
    return out


def read_history_index(out_dir) -> tuple[dict[str, Path], float]:
    """The long-horizon preset's index: ordered ``{name: errors.csv path}``
    plus the training cutoff time in seconds."""
    out_dir = Path(out_dir)
    doc = json.loads((out_dir / "fig8.json").read_text())
    series = {name: out_dir / name / "errors.csv"
              for name in doc["configurations"]}
    return series, float(doc["training_cutoff_s"])
