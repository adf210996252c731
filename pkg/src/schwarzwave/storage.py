"""File formats for runs, bases, operators, and diagnostics.

Field histories go to raw little-endian float64 binaries in column order
(one column per recorded state) next to a JSON sidecar carrying the grid
metadata; per-step diagnostics go to CSV; reduced operators go to JSON.
Every command's output directory gets a ``manifest.json`` listing the files
produced with their content hashes, written last, so a readable manifest
implies the run finished.

Schema/consistency violations raise ``ValueError`` (bad inputs); missing or
unreadable files surface as ``OSError``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
from pathlib import Path

import numpy as np

from .fem1d import MaterialParams
from .metrics import ErrorReport
from .monolithic import ProblemConfig, Trajectory
from .pod import PodBasis
from .opinf import RomOperators
from .schwarz import SchwarzRun

SWEEP_COLUMNS = ("alpha12_bar", "alpha21_bar", "beta12", "beta21",
                 "eps_avg", "mean_iterations", "wall_time_s", "converged")


# -- raw arrays ---------------------------------------------------------------

def write_array(path, arr: np.ndarray) -> None:
    np.asarray(arr, dtype="<f8").T.tofile(path)  # .T: emit column-major


def read_array(path, rows: int, cols: int) -> np.ndarray:
    flat = np.fromfile(path, dtype="<f8")
    if flat.size != rows * cols:
        raise ValueError(f"{path}: expected {rows}x{cols} values, "
                         f"got {flat.size}")
    return flat.reshape((cols, rows)).T


def _field_sidecar(name: str, arr: np.ndarray, cfg: ProblemConfig,
                   x_left: float, x_right: float) -> dict:
    rows, cols = (arr.shape if arr.ndim == 2 else (1, arr.size))
    return {"field": name, "n_nodes": rows, "n_states": cols,
            "n_steps": cols - 1, "dt": cfg.dt, "t0": cfg.t0,
            "x_left": x_left, "x_right": x_right, "h": cfg.h}


def _write_field(out_dir: Path, name: str, arr: np.ndarray,
                 cfg: ProblemConfig, x_left: float, x_right: float) -> None:
    write_array(out_dir / f"{name}.bin", np.atleast_2d(arr))
    (out_dir / f"{name}.json").write_text(json.dumps(
        _field_sidecar(name, arr, cfg, x_left, x_right), indent=1))


def _read_field(out_dir: Path, name: str) -> tuple[np.ndarray, dict]:
    meta = json.loads((out_dir / f"{name}.json").read_text())
    arr = read_array(out_dir / f"{name}.bin", meta["n_nodes"],
                     meta["n_states"])
    return arr, meta


# -- trajectories and coupled runs --------------------------------------------

def save_trajectory(out_dir, traj: Trajectory) -> None:
    """One binary+sidecar per field: u, v, a, g_gamma, t_gamma."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = traj.config
    for name in ("u", "v", "a"):
        _write_field(out_dir, name, getattr(traj, name), cfg,
                     traj.mesh.x_left, traj.mesh.x_right)
    _write_field(out_dir, "g_gamma", traj.g_gamma, cfg,
                 cfg.interface_coordinate, cfg.interface_coordinate)
    _write_field(out_dir, "t_gamma", traj.t_gamma, cfg,
                 cfg.interface_coordinate, cfg.interface_coordinate)


def load_trajectory(out_dir, cfg: ProblemConfig) -> Trajectory:
    """Rebuild a trajectory saved by ``save_trajectory``.

    The caller supplies the problem config (the sidecars carry only grid
    metadata); mismatches between the two are rejected.
    """
    out_dir = Path(out_dir)
    u, meta = _read_field(out_dir, "u")
    mesh = cfg.mesh()
    if (meta["n_nodes"] != mesh.n_nodes or meta["h"] != cfg.h
            or meta["dt"] != cfg.dt or meta["x_left"] != mesh.x_left
            or meta["x_right"] != mesh.x_right):
        raise ValueError(f"{out_dir}: trajectory grid does not match the "
                         "supplied config")
    v, _ = _read_field(out_dir, "v")
    a, _ = _read_field(out_dir, "a")
    g, _ = _read_field(out_dir, "g_gamma")
    t, _ = _read_field(out_dir, "t_gamma")
    n = u.shape[1]
    times = cfg.t0 + cfg.dt * np.arange(n)
    return Trajectory(times=times, u=u, v=v, a=a, g_gamma=g.ravel(),
                      t_gamma=t, mesh=mesh, config=cfg)


def save_run(out_dir, run: SchwarzRun) -> None:
    """Coupled-run fields (when stored) in the trajectory format, per
    subdomain, plus iterations.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if run.u is not None:
        for k in (0, 1):
            mesh = run.meshes[k]
            for name in ("u", "v", "a"):
                _write_field(out_dir, f"{name}_sub{k + 1}",
                             getattr(run, name)[k], run.config,
                             mesh.x_left, mesh.x_right)
    write_iterations_csv(out_dir / "iterations.csv", run)


def write_iterations_csv(path, run: SchwarzRun) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(("step_index", "time_s", "iterations"))
        for i, count in enumerate(run.iterations):
            w.writerow((i + 1, repr(float(run.times[i + 1])), int(count)))


def write_errors_csv(path, times: np.ndarray, report: ErrorReport) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(("step_index", "time_s", "eps_sub1", "eps_sub2",
                    "eps_total"))
        for i in range(report.eps_steps.shape[0]):
            w.writerow((i + 1, repr(float(times[i + 1])),
                        repr(float(report.eps_steps[i, 0])),
                        repr(float(report.eps_steps[i, 1])),
                        repr(float(report.eps_total_steps[i]))))


def write_summary(path, report: ErrorReport, cfg: ProblemConfig,
                  extra: dict | None = None) -> None:
    doc = {"eps_avg": report.eps_avg,
           "mean_iterations": report.mean_iterations,
           "wall_time_s": report.wall_time_s,
           "config_hash": config_hash(cfg)}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=1))


# -- sweep tables --------------------------------------------------------------

def write_sweep_csv(path, records) -> None:
    """Exact header: alpha12_bar,alpha21_bar,beta12,beta21,eps_avg,
    mean_iterations,wall_time_s,converged.  eps_avg is left empty for
    records that did not converge."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SWEEP_COLUMNS)
        for r in records:
            w.writerow((repr(float(r.alpha_12_bar)),
                        repr(float(r.alpha_21_bar)), repr(float(r.beta_12)),
                        repr(float(r.beta_21)),
                        repr(float(r.eps_avg)) if r.converged else "",
                        repr(float(r.mean_iterations)),
                        repr(float(r.wall_time_s)),
                        "true" if r.converged else "false"))


def read_sweep_csv(path):
    """Rows back as a list of dicts with floats (eps_avg None if empty)."""
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
            raise ValueError(f"{path}: unexpected sweep header")
        for row in reader:
            rows.append({
                "alpha12_bar": float(row["alpha12_bar"]),
                "alpha21_bar": float(row["alpha21_bar"]),
                "beta12": float(row["beta12"]),
                "beta21": float(row["beta21"]),
                "eps_avg": float(row["eps_avg"]) if row["eps_avg"] else None,
                "mean_iterations": float(row["mean_iterations"]),
                "wall_time_s": float(row["wall_time_s"]),
                "converged": row["converged"] == "true",
            })
    return rows


# -- bases and reduced operators ----------------------------------------------

def save_basis(prefix, basis: PodBasis, energy_target: float | None = None,
               source_hash: str | None = None) -> None:
    """``prefix``.bin holds Phi_r (column-major); ``prefix``.json the rest."""
    prefix = Path(prefix)
    write_array(prefix.with_suffix(".bin"), basis.Phi_r)
    doc = {"n": basis.n, "r": basis.r, "rank": basis.R,
           "singular_values": [repr(float(s)) for s in basis.singular_values],
           "captured_energy": float(basis.captured_energy),
           "energy_target": energy_target,
           "source_trajectory_hash": source_hash}
    prefix.with_suffix(".json").write_text(json.dumps(doc, indent=1))


def load_basis(prefix) -> PodBasis:
    prefix = Path(prefix)
    doc = json.loads(prefix.with_suffix(".json").read_text())
    Phi = read_array(prefix.with_suffix(".bin"), doc["n"], doc["r"])
    sv = np.array([float(s) for s in doc["singular_values"]])
    return PodBasis(Phi_r=Phi, singular_values=sv, r=doc["r"],
                    R=doc["rank"], captured_energy=doc["captured_energy"])


def save_operators(path, ops: RomOperators, basis_ref: str,
                   source_hash: str | None = None) -> None:
    doc = {"r": ops.r, "lambda_reg": ops.lambda_reg,
           "sigma_max": repr(float(ops.sigma_max)),
           "transmission_kind": ops.kind,
           "alpha_bar": ops.alpha_bar, "beta": ops.beta,
           "basis": basis_ref, "training_trajectory_hash": source_hash}
    for name in ("K", "B", "H", "S", "R"):
        arr = getattr(ops, name)
        doc[name] = None if arr is None else [[repr(float(x)) for x in row]
                                              for row in np.atleast_2d(arr)]
    Path(path).write_text(json.dumps(doc, indent=1))


def load_operators(path) -> tuple[RomOperators, str]:
    """Returns the operators and the basis file reference stored with them."""
    doc = json.loads(Path(path).read_text())

    def mat(name):
        rows = doc[name]
        if rows is None:
            return None
        return np.array([[float(x) for x in row] for row in rows])

    ops = RomOperators(K=mat("K"), B=mat("B"), H=mat("H"), S=mat("S"),
                       R=mat("R"), kind=doc["transmission_kind"],
                       lambda_reg=doc["lambda_reg"],
                       sigma_max=float(doc["sigma_max"]),
                       alpha_bar=doc["alpha_bar"], beta=doc["beta"])
    return ops, doc["basis"]


# -- config files ---------------------------------------------------------------

_CONFIG_KEYS = {f.name: f.type for f in dataclasses.fields(ProblemConfig)
                if f.name != "material"}
_MATERIAL_KEYS = {f.name: f.type for f in dataclasses.fields(MaterialParams)}


def _parse_typed(key: str, text: str, type_name: str):
    if type_name == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"config key {key}: expected true/false, "
                             f"got {text!r}")
        return text == "true"
    if type_name == "int":
        return int(text)
    if type_name == "float":
        return float(text)
    return text


def parse_config(path) -> ProblemConfig:
    """Flat ``key = value`` file; keys mirror the problem fields plus
    ``youngs_modulus``/``density``.  Blank lines and ``#`` comments are
    skipped; unknown keys and malformed values are hard errors; every key
    is optional (defaults are the benchmark setting)."""
    kwargs, material = {}, {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key = value")
        key, _, text = (s.strip() for s in line.partition("="))
        if key in _MATERIAL_KEYS:
            material[key] = _parse_typed(key, text, _MATERIAL_KEYS[key])
        elif key in _CONFIG_KEYS:
            kwargs[key] = _parse_typed(key, text, _CONFIG_KEYS[key])
        else:
            raise ValueError(f"{path}:{ln}: unknown config key {key!r}")
    if material:
        kwargs["material"] = MaterialParams(**{
            "youngs_modulus": material.get("youngs_modulus", 1e9),
            "density": material.get("density", 1000.0)})
    return ProblemConfig(**kwargs)


def config_hash(cfg: ProblemConfig) -> str:
    items = []
    for f in dataclasses.fields(ProblemConfig):
        v = getattr(cfg, f.name)
        if f.name == "material":
            items.append(f"youngs_modulus={v.youngs_modulus!r}")
            items.append(f"density={v.density!r}")
        else:
            items.append(f"{f.name}={v!r}")
    return hashlib.sha256("\n".join(sorted(items)).encode()).hexdigest()


# -- manifests -------------------------------------------------------------------

def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir, command: str, config_path=None,
                   preset: str | None = None) -> None:
    """Hash every file under ``out_dir`` and write manifest.json last."""
    out_dir = Path(out_dir)
    files = sorted(p for p in out_dir.rglob("*")
                   if p.is_file() and p.name != "manifest.json")
    doc = {
        "command": command,
        "config": str(config_path) if config_path else None,
        "output_directory": str(out_dir),
        "preset": preset,
        "determinism": "seed-free: outputs depend only on the command and "
                       "config (wall-time fields excepted)",
        "files": [{"path": str(p.relative_to(out_dir)),
                   "sha256": file_sha256(p)} for p in files],
    }
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=1))
