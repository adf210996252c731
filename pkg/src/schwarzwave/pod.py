"""Proper orthogonal decomposition of subdomain snapshot data.

Snapshot matrices are built from recorded full-order trajectories restricted
to a subdomain's free degrees of freedom, decomposed with a thin SVD, and
truncated either at a fixed mode count or at the smallest count capturing a
requested fraction of statistical energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .monolithic import ProblemConfig, Trajectory
from .transmission import TransmissionSpec


@dataclass(frozen=True)
class SnapshotSet:
    """Training data for one subdomain.

    Parameters
    ----------
    U : ndarray, shape (N, tau)
        Displacement snapshots over the subdomain's free DOFs.
    A : ndarray, shape (N, tau)
        Acceleration snapshots (recorded, not finite-differenced).
    V : ndarray, shape (N, tau)
        Velocity snapshots; carried for completeness.
    g : ndarray, shape (tau,)
        Interface displacement series at the snapshot instants.
    t : ndarray, shape (tau,)
        Interface traction series, in the subdomain's outward normal.
    free : ndarray
        Local indices of the free DOFs within the subdomain mesh.
    offset : int
        Global node index of the subdomain's first node.
    """

    U: np.ndarray
    A: np.ndarray
    V: np.ndarray
    g: np.ndarray
    t: np.ndarray
    free: np.ndarray
    offset: int

    def __post_init__(self):
        tau = self.U.shape[1]
        for name in ("A", "V"):
            if getattr(self, name).shape != self.U.shape:
                raise ValueError(f"{name} does not match U's shape")
        if self.g.shape != (tau,) or self.t.shape != (tau,):
            raise ValueError("interface series length must equal snapshot count")

    @property
    def tau(self) -> int:
        return self.U.shape[1]


def subdomain_free_nodes(cfg: ProblemConfig, spec: TransmissionSpec,
                         k: int) -> tuple[np.ndarray, int, int]:
    """Free-DOF layout of subdomain ``k`` under a transmission spec.

    Returns ``(free, offset, n_nodes)``: local free node indices, the global
    index of the subdomain's first node, and the subdomain node count.  The
    outer clamped end is always constrained; the interface node is
    additionally constrained when the subdomain receives a Dirichlet datum.
    """
    j = cfg.interface_node()
    n_total = int(round((cfg.x_right - cfg.x_left) / cfg.h)) + 1
    if k == 1:
        offset, n = 0, j + 1
        outer, gamma = 0, n - 1
    elif k == 2:
        offset, n = j, n_total - j
        outer, gamma = n - 1, 0
    else:
        raise ValueError("subdomain index must be 1 or 2")
    constrained = {outer}
    if spec.receives_dirichlet(k):
        constrained.add(gamma)
    free = np.array([i for i in range(n) if i not in constrained])
    return free, offset, n


def gather_snapshots(traj: Trajectory, spec: TransmissionSpec, k: int,
                     n_states: int | None = None) -> SnapshotSet:
    """Restrict a monolithic trajectory to subdomain ``k``'s training data.

    ``n_states`` limits training to the first so-many recorded states (used
    when the trajectory extends beyond the training horizon).
    """
    cfg = traj.config
    free, offset, _ = subdomain_free_nodes(cfg, spec, k)
    rows = offset + free
    sl = slice(0, n_states)
    return SnapshotSet(U=traj.u[rows, sl], A=traj.a[rows, sl],
                       V=traj.v[rows, sl], g=traj.g_gamma[sl],
                       t=traj.t_gamma[k - 1, sl], free=free, offset=offset)


@dataclass(frozen=True)
class PodBasis:
    """Truncated POD basis with its singular-value spectrum.

    ``singular_values`` holds all values above the numerical-rank cutoff
    (descending); ``r`` of them are retained in ``Phi_r``.
    """

    Phi_r: np.ndarray
    singular_values: np.ndarray
    r: int
    R: int
    captured_energy: float

    def __post_init__(self):
        if not 0 < self.r <= self.R:
            raise ValueError("need 0 < r <= rank")
        if np.any(np.diff(self.singular_values) > 0):
            raise ValueError("singular values must be non-increasing")

    @property
    def n(self) -> int:
        return self.Phi_r.shape[0]


def compute_basis(snapshots: SnapshotSet | np.ndarray,
                  energy: float | None = None,
                  r: int | None = None) -> PodBasis:
    """POD basis of the displacement snapshots.

    Exactly one of ``energy`` (fraction in (0, 1]) or ``r`` (fixed mode
    count) selects the truncation.  The rank is the number of singular
    values above ``1e-12`` times the largest; the captured energy is the
    ratio of retained to total squared singular values over that rank.

    Raises
    ------
    ValueError
        If the snapshot matrix is zero, or the selector is missing/invalid.
    """
    U = snapshots.U if isinstance(snapshots, SnapshotSet) else np.asarray(snapshots)
    if (energy is None) == (r is None):
        raise ValueError("give exactly one of energy or r")
    Phi, s, _ = np.linalg.svd(U, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise ValueError("snapshot matrix is zero")
    R = int(np.count_nonzero(s > 1e-12 * s[0]))
    s = s[:R]
    energies = np.cumsum(s**2) / np.sum(s**2)
    if r is None:
        if not 0.0 < energy <= 1.0:
            raise ValueError("energy target must lie in (0, 1]")
        r = int(np.searchsorted(energies, energy - 1e-15) + 1)
        r = min(r, R)
    elif not 1 <= r <= R:
        raise ValueError(f"r must lie in [1, {R}]")
    return PodBasis(Phi_r=Phi[:, :r].copy(), singular_values=s, r=int(r), R=R,
                    captured_energy=float(energies[r - 1]))


def project_state(basis: PodBasis, full: np.ndarray) -> np.ndarray:
    """Reduced coordinates of a full-space vector: Phi_r^T u."""
    return basis.Phi_r.T @ full


def reconstruct_state(basis: PodBasis, reduced: np.ndarray) -> np.ndarray:
    """Full-space representative of reduced coordinates: Phi_r u_hat."""
    return basis.Phi_r @ reduced
