"""Error and iteration statistics for coupled runs.

Per-step subdomain errors weigh displacement, velocity, and acceleration
differences as ``|du| + dt*|dv| + dt^2/2*|da|`` (each a Euclidean norm); the
time-averaged error sums them over both subdomains and all stepped states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fem1d import Mesh1D
from .monolithic import Trajectory
from .schwarz import SchwarzRun


def state_error(du: np.ndarray, dv: np.ndarray, da: np.ndarray,
                dt: float) -> float:
    """Kinematic error of one subdomain state against the reference."""
    return float(np.linalg.norm(du) + dt * np.linalg.norm(dv)
                 + 0.5 * dt * dt * np.linalg.norm(da))


def step_error(u, v, a, u_ref, v_ref, a_ref, dt: float) -> float:
    """state_error of (u, v, a) against an already-restricted reference."""
    return state_error(np.asarray(u) - u_ref, np.asarray(v) - v_ref,
                       np.asarray(a) - a_ref, dt)


def average_error(eps_steps: np.ndarray, n_states: int) -> float:
    """Time-averaged coupled error.

    ``eps_steps`` holds per-step errors for the stepped states only (shape
    (n_states - 1, n_subdomains)); the initial state is excluded by
    construction.  ``n_states`` counts all recorded states including t0, so
    the normalization is 1/(n_states - 1).
    """
    if n_states < 2:
        raise ValueError("need at least two recorded states")
    eps_steps = np.atleast_2d(np.asarray(eps_steps, dtype=float))
    if np.any(eps_steps < 0):
        raise ValueError("per-step errors must be nonnegative")
    return float(eps_steps.sum() / (n_states - 1))


def iteration_stats(run: SchwarzRun) -> float:
    """Arithmetic mean of per-window Schwarz iteration counts."""
    return run.mean_iterations


def restriction_offset(ref_mesh: Mesh1D, sub_mesh: Mesh1D) -> int:
    """Index of the subdomain's first node within the reference mesh.

    Matches by exact node coordinates; raises if the subdomain grid does not
    embed in the reference grid.
    """
    off = int(round((sub_mesh.x_left - ref_mesh.x_left) / ref_mesh.h))
    if (off < 0 or off + sub_mesh.n_nodes > ref_mesh.n_nodes
            or not np.allclose(ref_mesh.node_coords[off:off + sub_mesh.n_nodes],
                               sub_mesh.node_coords, rtol=0.0, atol=1e-12)):
        raise ValueError("subdomain nodes do not match the reference grid")
    return off


@dataclass(frozen=True)
class ErrorReport:
    """Per-step and aggregate error/iteration diagnostics of a coupled run."""

    eps_steps: np.ndarray       # (n_steps, 2): per stepped state, per subdomain
    eps_total_steps: np.ndarray  # (n_steps,): summed over subdomains
    eps_avg: float
    mean_iterations: float
    wall_time_s: float

    def __post_init__(self):
        if np.any(self.eps_steps < 0):
            raise ValueError("errors must be nonnegative")


def error_report(run: SchwarzRun, reference: Trajectory) -> ErrorReport:
    """Compare a coupled run against the monolithic reference.

    Uses the error series accumulated online during the run when present;
    otherwise restricts the reference to each subdomain's nodes (the interface
    node is shared and counted on both sides) and evaluates per-step errors
    from the stored state histories.
    """
    n_steps = run.iterations.size
    if run.eps is not None:
        eps = run.eps
    else:
        if run.u is None:
            raise ValueError("run stored neither states nor an error series")
        dt = run.config.dt
        eps = np.zeros((n_steps, 2))
        for k in (0, 1):
            off = restriction_offset(reference.mesh, run.meshes[k])
            sl = slice(off, off + run.meshes[k].n_nodes)
            ru, rv, ra = reference.u[sl], reference.v[sl], reference.a[sl]
            for n in range(1, n_steps + 1):
                eps[n - 1, k] = state_error(run.u[k][:, n] - ru[:, n],
                                            run.v[k][:, n] - rv[:, n],
                                            run.a[k][:, n] - ra[:, n], dt)
    return ErrorReport(eps_steps=eps, eps_total_steps=eps.sum(axis=1),
                       eps_avg=average_error(eps, n_steps + 1),
                       mean_iterations=run.mean_iterations,
                       wall_time_s=run.wall_time_s)
