import numpy as np
import pytest

from schwarzwave.monolithic import ProblemConfig, compute_sigma_max, run_monolithic

# a fast setting sharing the benchmark's physics (coarser mesh, shorter
# horizon) for tests that do not need the published figures
FAST = ProblemConfig(h=0.005, dt=1.25e-6, tf=2.5e-4)


@pytest.fixture(scope="module")
def benchmark_traj():
    return run_monolithic(ProblemConfig())


# --------------------------------------------------------------- wave physics


def test_dalembert_pulse_split(benchmark_traj):
    # the released Gaussian splits into two half-amplitude pulses moving at
    # c = 1000 m/s; at t = 2.5e-4 s the peaks sit near x = 0.25 and 0.75
    traj = benchmark_traj
    n = int(round(2.5e-4 / traj.config.dt))
    u = traj.u[:, n]
    x = traj.mesh.node_coords
    for x_peak in (0.25, 0.75):
        window = np.abs(x - x_peak) <= 0.05
        assert np.isclose(u[window].max(), 0.0025, rtol=0.02)
    i_peak_left = np.argmax(u[x <= 0.5])
    assert abs(x[i_peak_left] - 0.25) <= 0.01


def test_mirror_symmetry(benchmark_traj):
    # symmetric IC + symmetric bar: u(x, t) = u(L - x, t) for all recorded t
    u = benchmark_traj.u
    assert np.max(np.abs(u - u[::-1, :])) <= 1e-9


def test_sigma_max_against_gaussian_stress_estimate(benchmark_traj):
    # the IC's max stress is a*E*exp(-1/2)/w; propagation keeps the recorded
    # maximum within a few percent of it
    expected = 0.005 * 1e9 * np.exp(-0.5) / 0.02
    smax = compute_sigma_max(benchmark_traj)
    assert np.isclose(smax, expected, rtol=0.02)
    # restricting to the first states can only lower the maximum
    assert compute_sigma_max(benchmark_traj, n_states=100) <= smax


def test_clamped_ends_stay_zero(benchmark_traj):
    assert np.all(benchmark_traj.u[0, :] == 0.0)
    assert np.all(benchmark_traj.u[-1, :] == 0.0)
    assert np.all(benchmark_traj.v[0, :] == 0.0)
    assert np.all(benchmark_traj.a[-1, :] == 0.0)


# ------------------------------------------------------------ recording rules


def test_recording_shapes_and_times(benchmark_traj):
    traj = benchmark_traj
    cfg = traj.config
    assert traj.u.shape == (1001, cfg.n_steps + 1)
    assert traj.n_states == cfg.n_steps + 1
    assert traj.times[0] == cfg.t0
    assert np.isclose(traj.times[-1], cfg.tf)
    assert np.allclose(np.diff(traj.times), cfg.dt, rtol=1e-12)
    # column 0 is the initial state: released from rest
    assert np.all(traj.v[:, 0] == 0.0)
    assert np.isclose(traj.u[500, 0], 0.005)


def test_interface_series_conventions(benchmark_traj):
    # g_gamma tracks the displacement at the interface node; t_gamma row k-1
    # is the stress of the element on the far side of the interface from
    # subdomain k, signed by subdomain k's outward normal
    traj = benchmark_traj
    cfg = traj.config
    i = cfg.interface_node()
    E, h = cfg.material.youngs_modulus, cfg.h
    assert np.array_equal(traj.g_gamma, traj.u[i, :])
    sig_right = E * (traj.u[i + 1, :] - traj.u[i, :]) / h
    sig_left = E * (traj.u[i, :] - traj.u[i - 1, :]) / h
    assert np.allclose(traj.t_gamma[0], sig_right, rtol=1e-12, atol=1e-3)
    assert np.allclose(traj.t_gamma[1], -sig_left, rtol=1e-12, atol=1e-3)


def test_zero_amplitude_stays_zero():
    cfg = ProblemConfig(h=0.01, dt=2.5e-6, tf=5e-5, ic_amplitude=0.0)
    traj = run_monolithic(cfg)
    assert np.all(traj.u == 0.0)
    assert np.all(traj.a == 0.0)
    assert compute_sigma_max(traj) == 0.0


def test_empty_horizon_records_single_state():
    cfg = ProblemConfig(h=0.01, dt=2.5e-6, tf=0.0)
    traj = run_monolithic(cfg)
    assert traj.n_states == 1
    assert np.isclose(traj.u[50, 0], 0.005)


# ------------------------------------------------------------- config checks


def test_config_rejects_bad_grids():
    with pytest.raises(ValueError):
        ProblemConfig(tf=-1e-3)
    with pytest.raises(ValueError):
        ProblemConfig(dt=3e-7)  # (tf - t0)/dt not an integer
    with pytest.raises(ValueError):
        ProblemConfig(interface_coordinate=0.60037)  # off the mesh
    with pytest.raises(ValueError):
        ProblemConfig(schwarz_tolerance=0.0)
    with pytest.raises(ValueError):
        ProblemConfig(traction_method="nodal-average")


def test_fast_setting_pulse_speed():
    # peak location after t = 2.5e-4 s is x = 0.5 +- c*t on the coarse mesh
    traj = run_monolithic(FAST)
    u = traj.u[:, -1]
    x = traj.mesh.node_coords
    i = np.argmax(u[x < 0.5])
    assert abs(x[i] - 0.25) <= 0.02
