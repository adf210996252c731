"""The three figure kinds: trade-off scatter, solution snapshots, error
history.  Each renderer is a pure function of its input files and returns
the Figure; pass ``out`` to also write the image as both PNG and SVG.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import matplotlib
import numpy as np
from matplotlib.colors import LogNorm
from matplotlib.figure import Figure

from . import inputs

KINDS = ("pareto", "snapshots", "error-history")
SUB1_COLOR = "tab:blue"
SUB2_COLOR = "tab:red"
REFERENCE_GRAY = "0.45"


def save_figure(fig: Figure, out) -> list[Path]:
    """Write ``<out>.png`` and ``<out>.svg`` (an explicit .png/.svg suffix
    on ``out`` is stripped first).  Rendering is pinned so that re-saving
    the same figure reproduces the same bytes."""
    stem = Path(out)
    if stem.suffix in (".png", ".svg"):
        stem = stem.with_suffix("")
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    with matplotlib.rc_context({"svg.hashsalt": "wavefigs"}):
        for suffix in (".png", ".svg"):
            path = stem.with_suffix(suffix)
            fig.savefig(path, metadata={"Date": None} if suffix == ".svg"
                        else None)
            written.append(path)
    return written


def render_pareto(sweep_csv, dn_reference: Mapping[str, Any],
                  out=None) -> Figure:
    """Scatter of average error against mean Schwarz iterations, one point
    per converged grid record, colored by the beta12/alpha12_bar ratio on a
    log scale.  ``dn_reference`` is a sweep-format record (mapping with at
    least ``eps_avg`` and ``mean_iterations``) drawn in gray; the
    lowest-error point is annotated with its coordinates."""
    frame = inputs.read_sweep(sweep_csv)
    conv = frame[frame["converged"] & frame["eps_avg"].notna()]
    if len(conv) == 0:
        raise ValueError(f"{sweep_csv}: no converged records to plot")
    ratio = conv["beta12"] / conv["alpha12_bar"]

    fig = Figure(figsize=(6.4, 4.6), layout="constrained")
    ax = fig.add_subplot()
    points = ax.scatter(conv["mean_iterations"], conv["eps_avg"],
                        c=ratio, cmap="viridis",
                        norm=LogNorm(ratio.min(), ratio.max()),
                        s=22, linewidths=0, zorder=2)
    ax.scatter([dn_reference["mean_iterations"]], [dn_reference["eps_avg"]],
               color=REFERENCE_GRAY, marker="s", s=60, zorder=3,
               label="alternating reference")
    fig.colorbar(points, ax=ax, label="beta12 / alpha12_bar")

    best = conv.loc[conv["eps_avg"].idxmin()]
    ax.annotate(f"({best['mean_iterations']:.2f}, {best['eps_avg']:.2e})",
                xy=(best["mean_iterations"], best["eps_avg"]),
                xytext=(8, 8), textcoords="offset points", fontsize=8)

    ax.set_yscale("log")
    ax.set_xlabel("mean Schwarz iterations per step")
    ax.set_ylabel("average relative error")
    ax.legend(loc="upper right")
    if out is not None:
        save_figure(fig, out)
    return fig


def _snap_times(grid: np.ndarray, wanted) -> list[int]:
    picked = []
    for t in wanted:
        n = int(np.argmin(np.abs(grid - t)))
        if abs(grid[n] - t) > 1e-9 * max(1.0, abs(t)):
            warnings.warn(f"time {t:g} s is off the grid; snapped to "
                          f"{grid[n]:g} s", stacklevel=3)
        picked.append(n)
    return picked


def render_snapshots(run_dir, reference_dir, times, out=None) -> Figure:
    """Displacement/velocity/acceleration panels at the requested times:
    one row per time, subdomain 1 in blue, subdomain 2 in red, the
    single-domain reference dashed.  Times not on the stored grid snap to
    the nearest state (with a warning)."""
    sub1 = inputs.load_solution(run_dir, "_sub1")
    sub2 = inputs.load_solution(run_dir, "_sub2")
    ref = inputs.load_solution(reference_dir)
    picked = _snap_times(ref["times"], times)

    labels = (("u", "displacement (m)"), ("v", "velocity (m/s)"),
              ("a", "acceleration (m/s^2)"))
    fig = Figure(figsize=(11.0, 3.2 * len(picked)), layout="constrained")
    axes = fig.subplots(len(picked), 3, squeeze=False)
    for row, n in enumerate(picked):
        for col, (name, ylabel) in enumerate(labels):
            ax = axes[row][col]
            ax.plot(ref["x"], ref[name][:, n], "--", color="black",
                    linewidth=1.0, label="single domain")
            ax.plot(sub1["x"], sub1[name][:, n], color=SUB1_COLOR,
                    linewidth=1.2, label="subdomain 1")
            ax.plot(sub2["x"], sub2[name][:, n], color=SUB2_COLOR,
                    linewidth=1.2, label="subdomain 2")
            ax.set_title(f"{name} at t = {ref['times'][n]:g} s", fontsize=9)
            if row == len(picked) - 1:
                ax.set_xlabel("x (m)")
            if col == 0:
                ax.set_ylabel(ylabel)
    axes[0][0].legend(fontsize=7)
    if out is not None:
        save_figure(fig, out)
    return fig


def render_error_history(error_series: Mapping[str, Any], cutoff: float,
                         out=None) -> Figure:
    """Per-step total error over time, one curve per configuration, log
    error axis, with a vertical dashed line at the training cutoff."""
    fig = Figure(figsize=(6.4, 4.2), layout="constrained")
    ax = fig.add_subplot()
    for name, path in error_series.items():
        history = inputs.read_errors(path)
        ax.plot(history["time_s"], history["eps_total"], linewidth=1.1,
                label=name)
    ax.axvline(cutoff, color="0.5", linestyle="--", linewidth=1.0)
    ax.set_yscale("log")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("total relative error")
    ax.legend(fontsize=8)
    if out is not None:
        save_figure(fig, out)
    return fig


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: what to draw, from which files, to where.

    ``inputs`` holds the kind's positional input paths (pareto: sweep csv
    and reference-record csv; snapshots: run and reference directories;
    error-history: the preset output directory).  ``options`` carries the
    kind-specific extras (snapshots need ``times``).
    """

    kind: str
    inputs: tuple
    out: str
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {KINDS}")
        for path in self.inputs:
            if not Path(path).exists():
                raise ValueError(f"input {path} does not exist")


def render(spec: FigureSpec) -> Figure:
    if spec.kind == "pareto":
        sweep_csv, reference_csv = spec.inputs
        return render_pareto(sweep_csv, inputs.read_record(reference_csv),
                             out=spec.out)
    if spec.kind == "snapshots":
        run_dir, reference_dir = spec.inputs
        return render_snapshots(run_dir, reference_dir,
                                spec.options["times"], out=spec.out)
    series, cutoff = inputs.read_history_index(spec.inputs[0])
    return render_error_history(series, cutoff, out=spec.out)
