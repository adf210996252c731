"""Non-intrusive reduced operators learned from trajectory data.

The reduced dynamics are ``u_hat'' + K~ u_hat = inputs``, with the inverse
reduced mass baked into every learned (tilde) operator.  Operators are found
by a ridge-regularized least squares over recorded snapshots; only the
operators demanded by the subdomain's transmission kind are learned:

* Dirichlet-receiving:  ``K~`` and ``B~`` (boundary displacements at the
  outer clamp and the interface),
* Neumann-receiving:    ``K~``, ``H~`` (scaled interface traction) and
  ``B~`` (outer clamp only),
* Robin-receiving:      ``K~``, ``S~`` (interface stiffness), ``R~`` (scaled
  Robin datum) and ``B~`` (outer clamp only).

The Robin residual couples ``K~`` and ``S~`` only through the fixed
combination ``Q = K~ + (beta/alpha) S~``; the regression therefore solves for
``Q`` with an adjusted ridge weight and splits it afterwards, which is
algebraically identical to the joint penalized problem (minimizing
``|K|^2 + |S|^2`` over a fixed sum  gives ``K = Q/(1+q^2)``, ``S = qQ/(1+q^2)``).

A ``RomSubdomain`` wraps the operators behind the same protocol the coupling
driver uses for full-order subdomains: project the converged window state,
step in reduced coordinates, reconstruct, impose Dirichlet data strongly,
and report convergence measured on the full-space state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fem1d import build_uniform_mesh
from .monolithic import ProblemConfig, Trajectory
from .newmark import KinematicState, NewmarkParams
from .pod import PodBasis, compute_basis, gather_snapshots, subdomain_free_nodes
from .schwarz import convergence_measure
from .transmission import SIDE_LEFT, SIDE_RIGHT, TransmissionSpec

KIND_DIRICHLET = "dirichlet"
KIND_NEUMANN = "neumann"
KIND_ROBIN = "robin"


def receive_kind(spec: TransmissionSpec, k: int) -> str:
    """How subdomain ``k`` consumes its interface datum under ``spec``."""
    alpha_bar, beta = spec.coefficients_for(k)
    if alpha_bar == 0.0:
        return KIND_DIRICHLET
    return KIND_NEUMANN if beta == 0.0 else KIND_ROBIN


@dataclass(frozen=True)
class TrainingSet:
    """Reduced states plus the boundary series the regression consumes.

    Parameters
    ----------
    u_hat, a_hat : ndarray, shape (r, P)
        Projected displacement and acceleration snapshots.
    g : ndarray, shape (m, P)
        Dirichlet boundary series (outer clamp first; interface value
        appended for Dirichlet-receiving subdomains).
    t : ndarray, shape (1, P) or None
        Interface traction series pre-scaled by 1/sigma_max (Neumann only).
    c : ndarray, shape (1, P) or None
        Robin datum series alpha*t + beta*g_Gamma, pre-scaled by 1/sigma_max
        (Robin only).
    """

    u_hat: np.ndarray
    a_hat: np.ndarray
    g: np.ndarray
    t: np.ndarray | None
    c: np.ndarray | None
    kind: str
    alpha_bar: float
    beta: float
    sigma_max: float

    def __post_init__(self):
        P = self.u_hat.shape[1]
        if self.a_hat.shape != self.u_hat.shape:
            raise ValueError("u_hat and a_hat shapes differ")
        for name in ("g", "t", "c"):
            arr = getattr(self, name)
            if arr is not None and (arr.ndim != 2 or arr.shape[1] != P):
                raise ValueError(f"{name} must be 2-D with {P} columns")

    @property
    def P(self) -> int:
        return self.u_hat.shape[1]

    @property
    def r(self) -> int:
        return self.u_hat.shape[0]


@dataclass(frozen=True)
class RomOperators:
    """Learned reduced operators for one subdomain.

    ``S`` and ``R`` are present only for Robin training; ``H`` only for
    Neumann.  ``alpha_bar``/``beta`` record the training-time coefficients
    (runtime coefficients may differ; they multiply at step time).
    """

    K: np.ndarray
    B: np.ndarray
    H: np.ndarray | None
    S: np.ndarray | None
    R: np.ndarray | None
    kind: str
    lambda_reg: float
    sigma_max: float
    alpha_bar: float
    beta: float

    def __post_init__(self):
        for name in ("K", "B", "H", "S", "R"):
            arr = getattr(self, name)
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValueError(f"operator {name} has non-finite entries")
        r = self.K.shape[0]
        if self.K.shape != (r, r):
            raise ValueError("K must be square")
        for name in ("B", "H", "S", "R"):
            arr = getattr(self, name)
            if arr is not None and arr.shape[0] != r:
                raise ValueError(f"operator {name} row count must be {r}")

    @property
    def r(self) -> int:
        return self.K.shape[0]


def build_training_set(traj: Trajectory, spec: TransmissionSpec, k: int,
                       basis: PodBasis,
                       n_states: int | None = None) -> TrainingSet:
    """Project a monolithic trajectory into subdomain ``k``'s training data.

    Snapshot columns are the first ``n_states`` recorded states (default: all
    but the final one, so a run of N steps trains on N samples including the
    initial condition).  Traction-like series are scaled by 1/sigma_max.
    """
    if spec.sigma_max <= 0:
        raise ValueError("sigma_max must be positive")
    if n_states is None:
        n_states = traj.n_states - 1
    snaps = gather_snapshots(traj, spec, k, n_states)
    if basis.n != snaps.U.shape[0]:
        raise ValueError("basis does not match the subdomain's free DOFs")
    u_hat = basis.Phi_r.T @ snaps.U
    a_hat = basis.Phi_r.T @ snaps.A

    kind = receive_kind(spec, k)
    alpha_bar, beta = spec.coefficients_for(k)
    P = snaps.tau
    outer = np.zeros((1, P))  # clamped outer boundary
    t = c = None
    if kind == KIND_DIRICHLET:
        g = np.vstack([outer, snaps.g[None, :]])
    elif kind == KIND_NEUMANN:
        g = outer
        t = snaps.t[None, :] / spec.sigma_max
    else:
        g = outer
        alpha = spec.internal_alpha(k)
        c = (alpha * snaps.t + beta * snaps.g)[None, :] / spec.sigma_max
    return TrainingSet(u_hat=u_hat, a_hat=a_hat, g=g, t=t, c=c, kind=kind,
                       alpha_bar=alpha_bar, beta=beta, sigma_max=spec.sigma_max)


def infer_operators(train: TrainingSet, lambda_reg: float) -> RomOperators:
    """Solve the regularized operator regression for one subdomain.

    Stacks all operator blocks into a single multi-right-hand-side least
    squares ``[D; lambda*W] Theta = [Y; 0]`` solved by SVD (never via normal
    equations), where D holds the per-sample regressors and W carries the
    per-block ridge weights.
    """
    for arr in (train.u_hat, train.a_hat, train.g, train.t, train.c):
        if arr is not None and not np.all(np.isfinite(arr)):
            raise ValueError("training data has non-finite entries")
    r, P = train.r, train.P

    blocks = [-train.u_hat.T]  # K~ block (sign folds the +K~ u residual term)
    weights = [np.full(r, lambda_reg)]
    q = 0.0
    if train.kind == KIND_ROBIN:
        alpha = train.alpha_bar / train.sigma_max
        q = train.beta / alpha
        # Q-substitution: learn Q = K~ + q S~ with ridge lambda/sqrt(1+q^2)
        weights = [np.full(r, lambda_reg / np.sqrt(1.0 + q * q))]
    blocks.append(train.g.T)
    weights.append(np.full(train.g.shape[0], lambda_reg))
    if train.kind == KIND_NEUMANN:
        blocks.append(train.t.T)
        weights.append(np.full(train.t.shape[0], lambda_reg))
    elif train.kind == KIND_ROBIN:
        alpha = train.alpha_bar / train.sigma_max
        blocks.append(train.c.T / alpha)
        weights.append(np.full(train.c.shape[0], lambda_reg))

    D = np.hstack(blocks)
    n_unknown = D.shape[1]
    if P < n_unknown:
        warnings.warn(f"only {P} samples for {n_unknown} regressor columns; "
                      "the ridge term dominates the under-determined part",
                      stacklevel=2)
    w = np.concatenate(weights)
    D_aug = np.vstack([D, np.diag(w)])
    Y_aug = np.vstack([train.a_hat.T, np.zeros((n_unknown, r))])
    Theta, *_ = np.linalg.lstsq(D_aug, Y_aug, rcond=None)

    K = Theta[:r].T
    m = train.g.shape[0]
    B = Theta[r:r + m].T
    H = S = R = None
    if train.kind == KIND_NEUMANN:
        H = Theta[r + m:].T
    elif train.kind == KIND_ROBIN:
        R = Theta[r + m:].T
        Q = K
        K = Q / (1.0 + q * q)
        S = q * Q / (1.0 + q * q)
    return RomOperators(K=K, B=B, H=H, S=S, R=R, kind=train.kind,
                        lambda_reg=lambda_reg, sigma_max=train.sigma_max,
                        alpha_bar=train.alpha_bar, beta=train.beta)


def effective_stiffness(ops: RomOperators, alpha_bar: float | None = None,
                        beta: float | None = None) -> np.ndarray:
    """K~ plus the Robin shift (beta/alpha) S~ under runtime coefficients."""
    if ops.kind != KIND_ROBIN:
        return ops.K
    alpha_bar = ops.alpha_bar if alpha_bar is None else alpha_bar
    beta = ops.beta if beta is None else beta
    alpha = alpha_bar / ops.sigma_max
    return ops.K + (beta / alpha) * ops.S


def rom_step(ops: RomOperators, state: KinematicState, p: NewmarkParams,
             g: np.ndarray | None = None, t: np.ndarray | None = None,
             c: np.ndarray | None = None, alpha_bar: float | None = None,
             beta: float | None = None) -> KinematicState:
    """One Newmark step of the identity-mass reduced system.

    Boundary inputs must be pre-scaled exactly as in training (tractions and
    Robin data divided by sigma_max).  Robin runs may override the training
    ``alpha_bar``/``beta`` — the coefficients multiply at step time.
    """
    a0 = 1.0 / (p.beta * p.dt**2)
    a1 = 1.0 / (p.beta * p.dt)
    a2 = 1.0 / (2.0 * p.beta) - 1.0
    K_total = effective_stiffness(ops, alpha_bar, beta)
    f = np.zeros(ops.r)
    if g is not None:
        f += ops.B @ g
    if t is not None:
        f += ops.H @ t
    if c is not None:
        ab = ops.alpha_bar if alpha_bar is None else alpha_bar
        f += (ops.sigma_max / ab) * (ops.R @ c)
    pred = a0 * state.u + a1 * state.v + a2 * state.a
    lhs = K_total + a0 * np.eye(ops.r)
    u_next = np.linalg.solve(lhs, f + pred)
    a_next = a0 * u_next - pred
    v_next = state.v + p.dt * ((1.0 - p.gamma) * state.a + p.gamma * a_next)
    return KinematicState(u=u_next, v=v_next, a=a_next, t=state.t + p.dt)


class RomSubdomain:
    """Reduced subdomain model honoring the coupling driver's protocol.

    State lives in reduced coordinates between windows; each Schwarz iterate
    advances the reduced system one step under the current interface datum,
    tracks the strongly imposed boundary values as scalars, and measures
    convergence on the concatenation of reduced and imposed entries — which
    equals the full-space measure exactly, because the basis is orthonormal
    and the imposed nodes are disjoint from the spanned free set.  The full
    vectors ``u``/``v``/``a`` are reconstructed once per window by
    ``finalize_window``, so the per-iterate cost stays O(r^2).
    """

    def __init__(self, cfg: ProblemConfig, spec: TransmissionSpec, k: int,
                 basis: PodBasis, ops: RomOperators):
        if receive_kind(spec, k) != ops.kind:
            raise ValueError(f"operators were trained for a "
                             f"{ops.kind}-receiving subdomain")
        self.cfg = cfg
        self.spec = spec
        self.k = k
        self.side = SIDE_LEFT if k == 1 else SIDE_RIGHT
        self.basis = basis
        self.ops = ops
        self.kind = ops.kind

        free, offset, n = subdomain_free_nodes(cfg, spec, k)
        if basis.n != free.size:
            raise ValueError("basis size does not match the free-DOF count")
        x_lo = cfg.x_left + offset * cfg.h
        self.mesh = build_uniform_mesh(x_lo, x_lo + (n - 1) * cfg.h, cfg.h)
        self.free = free
        self.n_nodes = n
        self.gamma_local = n - 1 if k == 1 else 0
        outer = 0 if k == 1 else n - 1
        self.outer_value = cfg.dirichlet_left if k == 1 else cfg.dirichlet_right
        self.i_d = np.array(sorted({outer} | (
            {self.gamma_local} if self.kind == KIND_DIRICHLET else set())))
        self._gamma_pos = (int(np.searchsorted(self.i_d, self.gamma_local))
                           if self.kind == KIND_DIRICHLET else -1)

        self.alpha_bar, self.beta = spec.coefficients_for(k)
        self.params = NewmarkParams(dt=cfg.dt)
        p = self.params
        self.a0 = 1.0 / (p.beta * p.dt**2)
        self.a1 = 1.0 / (p.beta * p.dt)
        self.a2 = 1.0 / (2.0 * p.beta) - 1.0
        K_total = effective_stiffness(ops, self.alpha_bar, self.beta)
        # identity reduced mass: the effective operator is a0*I + K_total,
        # overwhelmingly diagonally dominant at this dt, so a precomputed
        # inverse is safe and keeps the per-iterate cost at one r x r matvec
        self._lhs_inv = np.linalg.inv(K_total + self.a0 * np.eye(ops.r))

        # constant and datum-proportional parts of the reduced force
        if self.kind == KIND_DIRICHLET:
            self._f0 = ops.B[:, 0] * self.outer_value
            self._fcol = ops.B[:, 1] / self.beta
        elif self.kind == KIND_NEUMANN:
            self._f0 = ops.B[:, 0] * self.outer_value
            self._fcol = ops.H[:, 0] / self.alpha_bar
        else:
            self._f0 = ops.B[:, 0] * self.outer_value
            self._fcol = ops.R[:, 0] / self.alpha_bar

        # O(r) readouts: basis rows at the interface node and its neighbor
        Phi = basis.Phi_r
        mat = cfg.material
        scale = mat.youngs_modulus / self.mesh.h
        inner = n - 2 if k == 1 else 1
        row_inner = Phi[int(np.searchsorted(free, inner))]
        if self.kind == KIND_DIRICHLET:
            self._phi_gamma = None
            # traction = E/h * (u_Gamma - u_inner) with u_Gamma imposed
            self._t_inner = scale * row_inner
        else:
            self._phi_gamma = Phi[int(np.searchsorted(free, self.gamma_local))]
            self._t_vec = scale * (self._phi_gamma - row_inner)

        self.u = np.zeros(n)
        self.v = np.zeros(n)
        self.a = np.zeros(n)
        self._uh = np.zeros(ops.r)
        self._vh = np.zeros(ops.r)
        self._ah = np.zeros(ops.r)
        self._uimp = np.zeros(self.i_d.size)
        self._vimp = np.zeros(self.i_d.size)
        self._aimp = np.zeros(self.i_d.size)
        self._win = None

    # -- protocol -----------------------------------------------------------

    def set_initial_state(self, u, v, a):
        self.u = np.array(u, dtype=float)
        self.v = np.array(v, dtype=float)
        self.a = np.array(a, dtype=float)
        Phi, fr, i_d = self.basis.Phi_r, self.free, self.i_d
        self._uh, self._vh, self._ah = Phi.T @ self.u[fr], Phi.T @ self.v[fr], \
            Phi.T @ self.a[fr]
        self._uimp, self._vimp, self._aimp = self.u[i_d].copy(), \
            self.v[i_d].copy(), self.a[i_d].copy()

    def begin_window(self):
        pred = self.a0 * self._uh + self.a1 * self._vh + self.a2 * self._ah
        self._win = {"v_hat": self._vh, "a_hat": self._ah, "pred": pred,
                     "uimp": self._uimp, "vimp": self._vimp,
                     "aimp": self._aimp}

    def iterate(self, lam: float) -> float:
        w = self._win
        pred = w["pred"]
        u_hat = self._lhs_inv @ (self._f0 + lam * self._fcol + pred)
        a_hat = self.a0 * u_hat - pred
        dt, gamma = self.params.dt, self.params.gamma
        v_hat = w["v_hat"] + dt * ((1 - gamma) * w["a_hat"] + gamma * a_hat)

        u_imp = np.full(self.i_d.shape, self.outer_value, dtype=float)
        if self.kind == KIND_DIRICHLET:
            u_imp[self._gamma_pos] = lam / self.beta
        a_imp = self.a0 * (u_imp - w["uimp"]) - self.a1 * w["vimp"] \
            - self.a2 * w["aimp"]
        v_imp = w["vimp"] + dt * ((1 - gamma) * w["aimp"] + gamma * a_imp)

        m = convergence_measure(
            np.concatenate([u_hat - self._uh, u_imp - self._uimp]),
            np.concatenate([v_hat - self._vh, v_imp - self._vimp]),
            np.concatenate([a_hat - self._ah, a_imp - self._aimp]),
            np.concatenate([self._uh, self._uimp]),
            np.concatenate([self._vh, self._vimp]),
            np.concatenate([self._ah, self._aimp]), dt)
        self._uh, self._vh, self._ah = u_hat, v_hat, a_hat
        self._uimp, self._vimp, self._aimp = u_imp, v_imp, a_imp
        return m

    def finalize_window(self):
        Phi, fr, i_d = self.basis.Phi_r, self.free, self.i_d
        self.u[fr] = Phi @ self._uh
        self.v[fr] = Phi @ self._vh
        self.a[fr] = Phi @ self._ah
        self.u[i_d], self.v[i_d], self.a[i_d] = self._uimp, self._vimp, \
            self._aimp

    def trace_displacement(self) -> float:
        if self.kind == KIND_DIRICHLET:
            return float(self._uimp[self._gamma_pos])
        return float(self._phi_gamma @ self._uh)

    def trace_traction(self) -> float:
        # reduced models reconstruct displacements, so traction always comes
        # from the adjacent element's stress
        if self.kind == KIND_DIRICHLET:
            scale = self.cfg.material.youngs_modulus / self.mesh.h
            u_gamma = self._uimp[self._gamma_pos]
            return float(scale * u_gamma - self._t_inner @ self._uh)
        return float(self._t_vec @ self._uh)


def train_reduced_model(traj: Trajectory, spec: TransmissionSpec, k: int,
                        r: int | None = None, energy: float | None = None,
                        n_states: int | None = None,
                        lambda_reg: float | None = None
                        ) -> tuple[PodBasis, RomOperators]:
    """Basis + operator regression for subdomain ``k`` in one call.

    ``r``/``energy`` select the basis truncation; ``n_states`` limits the
    training window (default: all but the final recorded state);
    ``lambda_reg`` defaults to the trajectory config's value.
    """
    if n_states is None:
        n_states = traj.n_states - 1
    snaps = gather_snapshots(traj, spec, k, n_states)
    basis = compute_basis(snaps, energy=energy, r=r)
    train = build_training_set(traj, spec, k, basis, n_states)
    if lambda_reg is None:
        lambda_reg = traj.config.lambda_reg
    return basis, infer_operators(train, lambda_reg)
