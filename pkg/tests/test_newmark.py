import numpy as np
import pytest

from schwarzwave.fem1d import MaterialParams, assemble_system, build_uniform_mesh, partition_system
from schwarzwave.newmark import (
    KinematicState,
    NewmarkOperator,
    NewmarkParams,
    initial_acceleration,
    newmark_step,
)


def _integrate_oscillator(m, k, dt, T):
    """Newmark history of m*u'' + k*u = 0, u(0)=1, v(0)=0."""
    p = NewmarkParams(dt=dt)
    M = np.array([[m]])
    K = np.array([[k]])
    a0 = initial_acceleration(M, K, np.zeros(1), np.ones(1), np.zeros(1))
    s = KinematicState(u=np.ones(1), v=np.zeros(1), a=a0, t=0.0)
    for _ in range(int(round(T / dt))):
        s = newmark_step(M, K, np.zeros(1), s, p)
    return s


# ------------------------------------------------------------- correctness


def test_order_two_convergence_against_analytic_oscillator():
    # u(t) = cos(w t) with w = sqrt(k/m); halving dt must quarter the error
    m, k, T = 2.0, 5.0, 1.0
    w = np.sqrt(k / m)
    errs = []
    for dt in (T / 100, T / 200, T / 400):
        s = _integrate_oscillator(m, k, dt, T)
        errs.append(abs(s.u[0] - np.cos(w * T)))
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(slopes - 2.0) <= 0.1)


def test_energy_conserved_in_free_vibration():
    # average acceleration is energy-conserving for undamped linear systems:
    # only round-off should accumulate over 1000 steps
    mesh = build_uniform_mesh(0.0, 1.0, 0.1)
    mat = MaterialParams(youngs_modulus=30.0, density=1.3)
    M, K = assemble_system(mesh, mat)
    sysm = partition_system(M, K, [0, mesh.n_nodes - 1])
    u0 = np.sin(np.pi * mesh.node_coords[1:-1])
    p = NewmarkParams(dt=1e-3)
    a0 = initial_acceleration(sysm.Mbar, sysm.Kbar, np.zeros(u0.size), u0,
                              np.zeros(u0.size))
    s = KinematicState(u=u0, v=np.zeros(u0.size), a=a0, t=0.0)

    def energy(s):
        return 0.5 * (s.v @ sysm.Mbar @ s.v + s.u @ sysm.Kbar @ s.u)

    e0 = energy(s)
    for _ in range(1000):
        s = newmark_step(sysm.Mbar, sysm.Kbar, np.zeros(u0.size), s, p)
    assert abs(energy(s) - e0) <= 1e-10 * e0


def test_free_flight_is_exact():
    # K = 0, f = 0: constant velocity, zero acceleration, linear drift
    p = NewmarkParams(dt=0.25)
    s = KinematicState(u=np.zeros(2), v=np.array([1.0, -2.0]), a=np.zeros(2),
                       t=0.0)
    M = np.diag([3.0, 4.0])
    for n in range(1, 5):
        s = newmark_step(M, np.zeros((2, 2)), np.zeros(2), s, p)
        assert np.allclose(s.u, [0.25 * n, -0.5 * n], rtol=1e-13)
        assert np.allclose(s.v, [1.0, -2.0], rtol=1e-13)
        assert np.allclose(s.a, 0.0, atol=1e-12)
    assert np.isclose(s.t, 1.0)


def test_initial_acceleration_closed_form():
    # M a0 = f0 - K u0 with M = diag(2), K = [[3]]
    a0 = initial_acceleration(np.array([[2.0]]), np.array([[3.0]]),
                              np.array([5.0]), np.array([1.0]),
                              np.zeros(1))
    assert np.isclose(a0[0], (5.0 - 3.0) / 2.0)


def test_single_step_hand_check():
    # one average-acceleration step of u'' = -u from (1, 0) with dt = 0.1:
    # u1 = (f + M*pred) / (M*a0 + K) with a0 = 400
    p = NewmarkParams(dt=0.1)
    s0 = KinematicState(u=np.ones(1), v=np.zeros(1), a=-np.ones(1), t=0.0)
    s1 = newmark_step(np.eye(1), np.eye(1), np.zeros(1), s0, p)
    pred = 400.0 * 1.0 + 0.0 + 1.0 * (-1.0)
    assert np.isclose(s1.u[0], pred / 401.0, rtol=1e-14)
    assert np.isclose(s1.a[0], 400.0 * s1.u[0] - pred, rtol=1e-12)
    assert np.isclose(s1.v[0], 0.5 * 0.1 * (-1.0 + s1.a[0]), rtol=1e-12)


# ------------------------------------------------------------- operator form


def test_banded_operator_matches_dense_reference():
    mesh = build_uniform_mesh(0.0, 1.0, 0.05)
    mat = MaterialParams(youngs_modulus=7.0, density=2.0)
    M, K = assemble_system(mesh, mat)
    sysm = partition_system(M, K, [0, mesh.n_nodes - 1])
    p = NewmarkParams(dt=1e-3)
    op = NewmarkOperator(sysm.Mbar, sysm.Kbar, p)

    rng = np.random.default_rng(7)
    u = rng.normal(size=sysm.Mbar.shape[0])
    v = rng.normal(size=u.size)
    f = rng.normal(size=u.size)
    a = initial_acceleration(sysm.Mbar, sysm.Kbar, np.zeros(u.size), u, v)
    ref = newmark_step(sysm.Mbar, sysm.Kbar, f, KinematicState(u, v, a, 0.0), p)

    pred = op.predictor(u, v, a)
    u1, v1, a1 = op.step_from_predictor(pred, op.apply_mass(pred), f, v, a)
    assert np.allclose(u1, ref.u, rtol=1e-12, atol=1e-14)
    assert np.allclose(v1, ref.v, rtol=1e-12, atol=1e-14)
    # a = a0*u - pred amplifies displacement round-off by a0 = 1/(beta dt^2)
    assert np.allclose(a1, ref.a, rtol=1e-9, atol=1e-8)


def test_dense_fallback_matches_banded():
    mesh = build_uniform_mesh(0.0, 1.0, 0.2)
    mat = MaterialParams(youngs_modulus=1.0, density=1.0)
    M, K = assemble_system(mesh, mat)
    sysm = partition_system(M, K, [0, mesh.n_nodes - 1])
    p = NewmarkParams(dt=0.01)
    banded = NewmarkOperator(sysm.Mbar, sysm.Kbar, p, bandwidth=1)
    dense = NewmarkOperator(sysm.Mbar, sysm.Kbar, p, bandwidth=None)
    rhs = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(banded.solve(rhs), dense.solve(rhs), rtol=1e-12)
    assert np.allclose(banded.apply_mass(rhs), dense.apply_mass(rhs),
                       rtol=1e-13)


def test_mass_application_matches_matvec():
    mesh = build_uniform_mesh(0.0, 1.0, 0.1)
    mat = MaterialParams(youngs_modulus=2.0, density=3.0)
    M, K = assemble_system(mesh, mat)
    sysm = partition_system(M, K, [0])
    op = NewmarkOperator(sysm.Mbar, sysm.Kbar, NewmarkParams(dt=0.1))
    x = np.linspace(-1.0, 1.0, sysm.Mbar.shape[0])
    assert np.allclose(op.apply_mass(x), sysm.Mbar @ x, rtol=1e-13)


# ------------------------------------------------------------- validation


def test_nonpositive_dt_rejected():
    with pytest.raises(ValueError):
        NewmarkParams(dt=0.0)
    with pytest.raises(ValueError):
        NewmarkParams(dt=-1e-6)


def test_state_copy_is_independent():
    s = KinematicState(u=np.zeros(2), v=np.zeros(2), a=np.zeros(2), t=0.0)
    c = s.copy()
    c.u[0] = 1.0
    assert s.u[0] == 0.0
