"""Alternating two-subdomain coupling driver.

Each time window is solved by a multiplicative sweep: the left subdomain
solves with interface data taken from the right subdomain's latest iterate,
the right subdomain then solves against the left subdomain's fresh result,
and the pair repeats until successive iterates of both subdomains agree in a
relative kinematic norm.  Subdomain models are duck-typed: anything exposing
``set_initial_state`` / ``begin_window`` / ``iterate`` / trace accessors can
participate (full-order and reduced models both do).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .fem1d import (
    Mesh1D,
    assemble_system,
    build_uniform_mesh,
    gaussian_ic,
    partition_system,
)
from .monolithic import ProblemConfig
from .newmark import KinematicState, NewmarkOperator, NewmarkParams, initial_acceleration
from .transmission import (
    SIDE_LEFT,
    SIDE_RIGHT,
    InterfaceState,
    TransmissionSpec,
    extract_traction,
    relax_lambda,
)


class SchwarzDivergenceError(RuntimeError):
    """A time window exhausted max_iters without meeting the tolerance."""

    def __init__(self, step_index: int, time_s: float, iterations: int,
                 measures: tuple[float, float]):
        self.step_index = step_index
        self.time_s = time_s
        self.iterations = iterations
        self.measures = measures
        super().__init__(
            f"window {step_index} (t = {time_s:.6e} s) failed to converge "
            f"after {iterations} iterations; last measures "
            f"({measures[0]:.3e}, {measures[1]:.3e})")


def _combined_norm(u, v, a, dt):
    return float(np.linalg.norm(u + dt * v + 0.5 * dt * dt * a))


def convergence_measure(du, dv, da, u_prev, v_prev, a_prev, dt) -> float:
    """Relative change of the combined kinematic vector between iterates.

    Falls back to the absolute numerator when the previous iterate is
    numerically zero.
    """
    num = _combined_norm(du, dv, da, dt)
    den = _combined_norm(u_prev, v_prev, a_prev, dt)
    if den < 1e-14 * max(1.0, num):
        return num
    return num / den


def check_convergence(prev: KinematicState, nxt: KinematicState, dt: float,
                      delta: float) -> bool:
    """True when the relative iterate-to-iterate change falls below delta."""
    m = convergence_measure(nxt.u - prev.u, nxt.v - prev.v, nxt.a - prev.a,
                            prev.u, prev.v, prev.a, dt)
    return m < delta


class FomSubdomain:
    """Full-order subdomain model on one side of the interface.

    Owns its mesh and assembled system, imposes the interface datum either as
    a Dirichlet value (datum alpha = 0) or through the weak form (Robin
    stiffness shift plus interface force), and re-solves a single time step
    from the stored window-start state on every Schwarz iterate.
    """

    def __init__(self, cfg: ProblemConfig, spec: TransmissionSpec, k: int):
        if k not in (1, 2):
            raise ValueError("subdomain index must be 1 or 2")
        self.cfg = cfg
        self.spec = spec
        self.k = k
        self.side = SIDE_LEFT if k == 1 else SIDE_RIGHT
        if k == 1:
            x_lo, x_hi = cfg.x_left, cfg.interface_coordinate
            outer_value = cfg.dirichlet_left
        else:
            x_lo, x_hi = cfg.interface_coordinate, cfg.x_right
            outer_value = cfg.dirichlet_right
        self.mesh = build_uniform_mesh(x_lo, x_hi, cfg.h)
        n = self.mesh.n_nodes
        self.gamma_local = n - 1 if k == 1 else 0
        outer = 0 if k == 1 else n - 1
        self.outer_value = outer_value

        self.alpha_bar, self.beta = spec.coefficients_for(k)
        self.receives_dirichlet = spec.receives_dirichlet(k)
        i_d = sorted([outer, self.gamma_local]) if self.receives_dirichlet \
            else [outer]
        self.system = partition_system(*assemble_system(self.mesh, cfg.material),
                                       i_d)
        self.i_d = np.asarray(i_d)
        self.free = self.system.partition.free

        Kbar_total = self.system.Kbar
        self.gamma_row = None
        if not self.receives_dirichlet:
            # natural path: Robin stiffness shift on the interface free row
            # (beta = 0 degenerates to a pure imposed-traction condition)
            alpha = spec.internal_alpha(k)
            self.inv_alpha = 1.0 / alpha
            self.gamma_row = int(np.searchsorted(self.free, self.gamma_local))
            if self.beta != 0.0:
                Kbar_total = Kbar_total.copy()
                Kbar_total[self.gamma_row, self.gamma_row] += self.beta / alpha

        self.params = NewmarkParams(dt=cfg.dt)
        self.op = NewmarkOperator(self.system.Mbar, Kbar_total, self.params,
                                  bandwidth=1)

        # constant boundary force from the outer clamp; the interface column
        # (Dirichlet side only) is applied per iterate
        u_d0 = np.zeros(len(i_d))
        u_d0[list(i_d).index(outer)] = outer_value
        self.f_outer = self.system.Bbar @ u_d0
        self.gamma_col = None
        if self.receives_dirichlet:
            self.gamma_col = self.system.Bbar[:, list(i_d).index(self.gamma_local)]

        self.n_nodes = n
        self.u = np.zeros(n)
        self.v = np.zeros(n)
        self.a = np.zeros(n)
        self._win = None  # window-start snapshot + precomputed pieces

    # -- protocol -----------------------------------------------------------

    def set_initial_state(self, u, v, a):
        self.u = np.array(u, dtype=float)
        self.v = np.array(v, dtype=float)
        self.a = np.array(a, dtype=float)

    def begin_window(self):
        fr = self.free
        pred = self.op.predictor(self.u[fr], self.v[fr], self.a[fr])
        self._win = {
            "u": self.u.copy(), "v": self.v.copy(), "a": self.a.copy(),
            "pred": pred, "m_pred": self.op.apply_mass(pred),
        }

    def iterate(self, lam: float) -> float:
        """Re-solve this window's step under datum ``lam``; return the
        convergence measure against the previous iterate."""
        w = self._win
        fr = self.free
        if self.receives_dirichlet:
            f = self.f_outer + self.gamma_col * (lam / self.beta)
        else:
            f = self.f_outer.copy()
            f[self.gamma_row] += self.inv_alpha * lam
        u_f, v_f, a_f = self.op.step_from_predictor(
            w["pred"], w["m_pred"], f, w["v"][fr], w["a"][fr])

        u_new = np.empty(self.n_nodes)
        v_new = np.empty(self.n_nodes)
        a_new = np.empty(self.n_nodes)
        u_new[fr], v_new[fr], a_new[fr] = u_f, v_f, a_f

        # constrained nodes: imposed displacement with time-integrator
        # consistent velocity/acceleration recovered from the window start
        i_d = self.i_d
        u_imp = np.full(i_d.shape, self.outer_value, dtype=float)
        if self.receives_dirichlet:
            u_imp[list(self.i_d).index(self.gamma_local)] = lam / self.beta
        a0, a1, a2 = self.op.a0, self.op.a1, self.op.a2
        dt, gamma = self.params.dt, self.params.gamma
        a_imp = a0 * (u_imp - w["u"][i_d]) - a1 * w["v"][i_d] - a2 * w["a"][i_d]
        v_imp = w["v"][i_d] + dt * ((1 - gamma) * w["a"][i_d] + gamma * a_imp)
        u_new[i_d], v_new[i_d], a_new[i_d] = u_imp, v_imp, a_imp

        m = convergence_measure(u_new - self.u, v_new - self.v, a_new - self.a,
                                self.u, self.v, self.a, dt)
        self.u, self.v, self.a = u_new, v_new, a_new
        return m

    def finalize_window(self):
        """Full models keep their state current; nothing to reconstruct."""

    def trace_displacement(self) -> float:
        return float(self.u[self.gamma_local])

    def trace_traction(self) -> float:
        if self.cfg.traction_method == "residual-reaction":
            return extract_traction(self.mesh, self.cfg.material, self.u,
                                    self.side, "residual-reaction",
                                    system=self.system, accel=self.a)
        return extract_traction(self.mesh, self.cfg.material, self.u, self.side)


@dataclass
class SchwarzRun:
    """Result of a coupled run: per-step coupled states and diagnostics."""

    times: np.ndarray
    iterations: np.ndarray
    wall_time_s: float
    converged: bool
    meshes: tuple[Mesh1D, Mesh1D]
    config: ProblemConfig
    spec: TransmissionSpec
    u: tuple[np.ndarray, np.ndarray] | None = None
    v: tuple[np.ndarray, np.ndarray] | None = None
    a: tuple[np.ndarray, np.ndarray] | None = None
    eps: np.ndarray | None = field(default=None)  # (n_steps, 2) vs a reference

    @property
    def mean_iterations(self) -> float:
        return float(self.iterations.mean()) if self.iterations.size else 0.0


def advance_window(models, iface: InterfaceState, spec: TransmissionSpec,
                   delta: float, max_iters: int) -> int:
    """Run the multiplicative sweep for one window.

    Returns the iteration count on convergence, or -1 when max_iters is
    exhausted (the last per-subdomain measures are stashed on ``iface`` for
    the caller's diagnostic).
    """
    m1, m2 = models
    a12 = spec.internal_alpha(1)
    a21 = spec.internal_alpha(2)
    meas1 = meas2 = np.inf
    for s in range(1, max_iters + 1):
        # traction is produced in the neighbor's own outward normal; flip it
        # into this side's convention before forming the datum
        lam1 = relax_lambda(spec.theta_1, a12, spec.beta_12,
                            -m2.trace_traction(), m2.trace_displacement(),
                            iface.lambda_1)
        meas1 = m1.iterate(lam1)
        iface.lambda_1 = lam1
        lam2 = relax_lambda(spec.theta_2, a21, spec.beta_21,
                            -m1.trace_traction(), m1.trace_displacement(),
                            iface.lambda_2)
        meas2 = m2.iterate(lam2)
        iface.lambda_2 = lam2
        iface.u_gamma[:] = (m1.trace_displacement(), m2.trace_displacement())
        iface.t_gamma[:] = (m1.trace_traction(), m2.trace_traction())
        if meas1 < delta and meas2 < delta:
            return s
    iface.last_measures = (meas1, meas2)
    return -1


def _initial_global_state(cfg: ProblemConfig):
    """Initial displacement/velocity/acceleration of the full bar at t0."""
    mesh = build_uniform_mesh(cfg.x_left, cfg.x_right, cfg.h)
    M, K = assemble_system(mesh, cfg.material)
    sysm = partition_system(M, K, [0, mesh.n_nodes - 1])
    u0 = gaussian_ic(mesh, cfg.ic_amplitude, cfg.ic_center, cfg.ic_width)
    u0[0], u0[-1] = cfg.dirichlet_left, cfg.dirichlet_right
    v0 = np.zeros_like(u0)
    a0 = np.zeros_like(u0)
    f = sysm.Bbar @ np.array([cfg.dirichlet_left, cfg.dirichlet_right])
    fr = sysm.partition.free
    a0[fr] = initial_acceleration(sysm.Mbar, sysm.Kbar, f, u0[fr], v0[fr])
    return mesh, u0, v0, a0


def run_coupled(cfg: ProblemConfig, spec: TransmissionSpec,
                left="fom", right="fom", *, reference=None,
                store_states: bool = True) -> SchwarzRun:
    """Time loop of the coupled problem.

    ``left``/``right`` select the subdomain models: the string ``"fom"`` or a
    pre-built model object honoring the subdomain protocol (e.g. a reduced
    model).  When a monolithic ``reference`` trajectory is given, per-step
    kinematic errors against it are accumulated online into ``run.eps`` so
    sweeps can skip storing full state histories (``store_states=False``).
    Wall time covers the time loop only.
    """
    models = []
    for k, choice in ((1, left), (2, right)):
        models.append(FomSubdomain(cfg, spec, k) if choice == "fom" else choice)
    m1, m2 = models

    gmesh, u0, v0, a0 = _initial_global_state(cfg)
    offs = []
    for m in models:
        off = int(round((m.mesh.x_left - cfg.x_left) / cfg.h))
        if not np.allclose(gmesh.node_coords[off:off + m.mesh.n_nodes], m.mesh.node_coords,
                           rtol=0, atol=1e-12):
            raise ValueError("subdomain mesh does not embed in the global mesh")
        m.set_initial_state(u0[off:off + m.mesh.n_nodes],
                            v0[off:off + m.mesh.n_nodes],
                            a0[off:off + m.mesh.n_nodes])
        offs.append(off)

    n_steps = cfg.n_steps
    times = cfg.t0 + cfg.dt * np.arange(n_steps + 1)
    iters = np.zeros(n_steps, dtype=int)
    store = None
    if store_states:
        store = [[np.zeros((m.mesh.n_nodes, n_steps + 1)) for _ in range(3)]
                 for m in models]
        for i, m in enumerate(models):
            store[i][0][:, 0], store[i][1][:, 0], store[i][2][:, 0] = m.u, m.v, m.a

    ref_views = None
    eps = None
    state_error = None
    if reference is not None:
        from .metrics import state_error
        ref_views = []
        for m, off in zip(models, offs):
            sl = slice(off, off + m.mesh.n_nodes)
            if not np.allclose(reference.mesh.node_coords[sl], m.mesh.node_coords,
                               rtol=0, atol=1e-12):
                raise ValueError("reference mesh does not match the subdomains")
            ref_views.append((reference.u[sl], reference.v[sl], reference.a[sl]))
        eps = np.zeros((n_steps, 2))

    iface = InterfaceState()
    delta = cfg.schwarz_tolerance
    tic = time.perf_counter()
    for n in range(1, n_steps + 1):
        if not cfg.lambda_carryover:
            iface.reset_lambdas()
        m1.begin_window()
        m2.begin_window()
        count = advance_window(models, iface, spec, delta, cfg.max_schwarz_iters)
        if count < 0:
            raise SchwarzDivergenceError(n, float(times[n]),
                                         cfg.max_schwarz_iters,
                                         iface.last_measures)
        iters[n - 1] = count
        m1.finalize_window()
        m2.finalize_window()
        if store is not None:
            for i, m in enumerate(models):
                store[i][0][:, n], store[i][1][:, n], store[i][2][:, n] = m.u, m.v, m.a
        if ref_views is not None:
            for i, m in enumerate(models):
                ru, rv, ra = ref_views[i]
                eps[n - 1, i] = state_error(m.u - ru[:, n], m.v - rv[:, n],
                                            m.a - ra[:, n], cfg.dt)
    wall = time.perf_counter() - tic

    run = SchwarzRun(times=times, iterations=iters, wall_time_s=wall,
                     converged=True, meshes=(m1.mesh, m2.mesh), config=cfg,
                     spec=spec, eps=eps)
    if store is not None:
        run.u = (store[0][0], store[1][0])
        run.v = (store[0][1], store[1][1])
        run.a = (store[0][2], store[1][2])
    return run
