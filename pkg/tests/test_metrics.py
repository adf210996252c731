import numpy as np
import pytest

from schwarzwave.fem1d import build_uniform_mesh
from schwarzwave.metrics import (
    ErrorReport,
    average_error,
    error_report,
    restriction_offset,
    state_error,
    step_error,
)
from schwarzwave.monolithic import ProblemConfig, run_monolithic
from schwarzwave.schwarz import TransmissionSpec, run_coupled

TINY = ProblemConfig(h=0.01, dt=2.5e-6, tf=5e-5)


# ----------------------------------------------------------------- per-step


def test_state_error_hand_case():
    # |du| + dt |dv| + dt^2/2 |da| with 3-4-5 vectors: 5 + 0.1*5 + 0.005*5
    du = np.array([3.0, 4.0])
    dv = np.array([0.0, 5.0])
    da = np.array([5.0, 0.0])
    assert np.isclose(state_error(du, dv, da, dt=0.1), 5.0 + 0.5 + 0.025)


def test_step_error_subtracts_reference():
    u = np.array([1.0, 2.0])
    ref = np.array([1.0, 2.0])
    z = np.zeros(2)
    assert step_error(u, z, z, ref, z, z, dt=0.1) == 0.0
    assert step_error(u + 3.0, z, z, ref, z, z, dt=0.1) \
        == np.linalg.norm([3.0, 3.0])


def test_average_error_normalization():
    # sums over subdomains and steps, divides by the stepped-state count
    eps = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    assert average_error(eps, n_states=4) == pytest.approx(21.0 / 3.0)
    with pytest.raises(ValueError):
        average_error(eps, n_states=1)
    with pytest.raises(ValueError):
        average_error(np.array([[1.0, -0.5]]), n_states=2)


# ------------------------------------------------------------------ restrict


def test_restriction_offset():
    ref = build_uniform_mesh(0.0, 1.0, 0.01)
    sub = build_uniform_mesh(0.6, 1.0, 0.01)
    assert restriction_offset(ref, sub) == 60
    assert restriction_offset(ref, ref) == 0
    with pytest.raises(ValueError):
        restriction_offset(ref, build_uniform_mesh(0.605, 1.0, 0.01))
    with pytest.raises(ValueError):
        restriction_offset(ref, build_uniform_mesh(0.6, 1.2, 0.01))
    with pytest.raises(ValueError):
        restriction_offset(ref, build_uniform_mesh(0.6, 1.0, 0.005))


# ------------------------------------------------------------------- reports


def test_error_report_online_and_stored_paths_agree():
    reference = run_monolithic(TINY)
    spec = TransmissionSpec.alternating_dn(1.5e8)
    online = run_coupled(TINY, spec, reference=reference, store_states=False)
    stored = run_coupled(TINY, spec, store_states=True)
    assert online.eps is not None and stored.eps is None
    rep_online = error_report(online, reference)
    rep_stored = error_report(stored, reference)
    assert np.allclose(rep_online.eps_steps, rep_stored.eps_steps, rtol=1e-12)
    assert np.isclose(rep_online.eps_avg, rep_stored.eps_avg, rtol=1e-12)
    assert rep_online.mean_iterations == rep_stored.mean_iterations
    # consistency of the aggregates
    rep = rep_online
    assert rep.eps_steps.shape == (TINY.n_steps, 2)
    assert np.allclose(rep.eps_total_steps, rep.eps_steps.sum(axis=1))
    assert np.isclose(rep.eps_avg,
                      rep.eps_steps.sum() / TINY.n_steps, rtol=1e-14)
    assert rep.wall_time_s > 0.0


def test_error_report_needs_states_or_series():
    spec = TransmissionSpec.alternating_dn(1.5e8)
    run = run_coupled(TINY, spec, store_states=False)  # no reference either
    assert run.eps is None and run.u is None
    with pytest.raises(ValueError):
        error_report(run, run_monolithic(TINY))


def test_error_report_rejects_negative_entries():
    with pytest.raises(ValueError):
        ErrorReport(eps_steps=np.array([[0.1, -0.1]]),
                    eps_total_steps=np.array([0.0]), eps_avg=0.0,
                    mean_iterations=2.0, wall_time_s=1.0)
