"""End-to-end figure checks on freshly generated solver outputs.

These regenerate the real artifacts through the solver's command line (the
full parameter-grid sweep, the long-horizon error study, and one coupled
run saved with states), then assert that the rendered figures carry the
expected content: the trade-off scatter's front, the annotated operating
point, the error-history layout, and the interface ringing visible in the
acceleration panels.  The sweep fixture runs the whole 625-point grid at
the benchmark resolution, so this module takes a while on first use.
"""

import subprocess
import sys

import numpy as np
import pytest

from wavefigs import (read_errors, read_history_index, read_record,
                      read_sweep, render_error_history, render_pareto,
                      render_snapshots)

LOWEST_ERROR_SET = (1e-3, 1e-3, 1.0, 1.0)
HIGHEST_ERROR_SET = (1e-1, 1.0, 1.0, 3.0)


def _solver(*args):
    proc = subprocess.run([sys.executable, "-m", "schwarzwave.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def sweep_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid")
    _solver("sweep", "--out", str(out))
    return out


@pytest.fixture(scope="session")
def history_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("predictive")
    _solver("preset", "fig8", "--out", str(out))
    return out


@pytest.fixture(scope="session")
def snapshot_dirs(tmp_path_factory):
    mono = tmp_path_factory.mktemp("mono")
    coupled = tmp_path_factory.mktemp("coupled")
    _solver("monolithic", "--out", str(mono))
    a12, a21, b12, b21 = HIGHEST_ERROR_SET
    _solver("couple", "--transmission", "rr",
            "--alpha12", str(a12), "--alpha21", str(a21),
            "--beta12", str(b12), "--beta21", str(b21),
            "--out", str(coupled))
    return coupled, mono


def _converged(frame):
    return frame[frame["converged"] & frame["eps_avg"].notna()]


def _non_dominated(frame):
    """Minimal independent front extraction over (eps_avg, iterations)."""
    pts = frame[["eps_avg", "mean_iterations"]].to_numpy()
    keep = []
    for i, (eps, iters) in enumerate(pts):
        dominated = np.any((pts[:, 0] <= eps) & (pts[:, 1] <= iters)
                           & ((pts[:, 0] < eps) | (pts[:, 1] < iters)))
        if not dominated:
            keep.append(i)
    return frame.iloc[keep]


def _select(frame, params):
    a12, a21, b12, b21 = params
    return frame[(frame["alpha12_bar"] == a12)
                 & (frame["alpha21_bar"] == a21)
                 & (frame["beta12"] == b12) & (frame["beta21"] == b21)]


def test_lowest_error_set_lies_on_the_front(sweep_dir):
    frame = _converged(read_sweep(sweep_dir / "sweep.csv"))
    front = _non_dominated(frame)
    assert len(_select(front, LOWEST_ERROR_SET)) == 1, (
        "the low-coefficient symmetric set should be non-dominated")
    # and the solver's own front table agrees
    stored = read_sweep(sweep_dir / "pareto.csv")
    assert len(_select(stored, LOWEST_ERROR_SET)) == 1


def test_front_extremes_use_displacement_dominated_data(sweep_dir):
    frame = _converged(read_sweep(sweep_dir / "sweep.csv"))
    front = _non_dominated(frame)
    best_eps = front.loc[front["eps_avg"].idxmin()]
    best_iters = front.loc[front["mean_iterations"].idxmin()]
    for row in (best_eps, best_iters):
        assert row["beta12"] / row["alpha12_bar"] >= 10.0, (
            "front endpoints should weight displacement far above traction")


def test_scatter_matches_the_sweep_table(sweep_dir, tmp_path):
    frame = read_sweep(sweep_dir / "sweep.csv")
    assert len(frame) == 625
    reference = read_record(sweep_dir / "dn_reference.csv")
    fig = render_pareto(sweep_dir / "sweep.csv", reference,
                        out=tmp_path / "tradeoff")
    ax = fig.axes[0]
    points, gray = ax.collections[:2]
    assert points.get_offsets().shape[0] == len(_converged(frame))
    assert tuple(gray.get_offsets()[0]) == (reference["mean_iterations"],
                                            reference["eps_avg"])
    assert (tmp_path / "tradeoff.png").exists()
    assert (tmp_path / "tradeoff.svg").exists()


def test_scatter_annotates_the_published_operating_point(sweep_dir):
    reference = read_record(sweep_dir / "dn_reference.csv")
    fig = render_pareto(sweep_dir / "sweep.csv", reference)
    note = fig.axes[0].texts[0]
    iters, eps = note.xy
    assert abs(iters - 2.66) <= 0.05 * 2.66, iters
    assert abs(eps - 2.57e-4) <= 0.10 * 2.57e-4, eps


def test_error_history_layout(history_dir, tmp_path):
    series, cutoff = read_history_index(history_dir)
    assert cutoff == pytest.approx(1e-3)
    assert list(series) == ["dn-fom-fom", "dn-opinf-opinf",
                            "rr-fom-fom", "rr-opinf-opinf"]
    fig = render_error_history(series, cutoff, out=tmp_path / "history")
    ax = fig.axes[0]
    assert ax.get_yscale() == "log"
    labels = [t.get_text() for t in ax.get_legend().get_texts()]
    assert labels == list(series)

    curves = [ln for ln in ax.lines if ln.get_label() in series]
    marker = [ln for ln in ax.lines if ln not in curves]
    assert len(curves) == len(series) and len(marker) == 1
    assert tuple(marker[0].get_xdata()) == (cutoff, cutoff)
    assert marker[0].get_linestyle() == "--"
    for line in curves:
        assert line.get_xdata()[-1] == pytest.approx(1e-2)
    # the first curve is the file's eps_total column, verbatim
    history = read_errors(series["dn-fom-fom"])
    assert np.array_equal(curves[0].get_ydata(),
                          history["eps_total"].to_numpy())


def test_acceleration_panels_show_the_interface_ringing(snapshot_dirs,
                                                        tmp_path):
    coupled, mono = snapshot_dirs
    fig = render_snapshots(coupled, mono, (2.5e-4, 7.5e-4),
                           out=tmp_path / "panels")
    assert len(fig.axes) == 6

    def local_max(line, center=0.6, width=0.05):
        x, y = np.asarray(line.get_xdata()), np.asarray(line.get_ydata())
        return np.abs(y[np.abs(x - center) <= width]).max()

    accel = fig.axes[2]  # acceleration column, first requested time
    reference, sub1, sub2 = accel.lines
    coupled_max = max(local_max(sub1), local_max(sub2))
    assert coupled_max > 3.0 * local_max(reference), (
        "the poorly tuned transmission set should ring near the interface")
