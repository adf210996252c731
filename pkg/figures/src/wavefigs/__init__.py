"""Plot regeneration for coupled wave-benchmark outputs."""

from .inputs import (load_field, load_solution, read_errors,
                     read_history_index, read_record, read_sweep)
from .render import (FigureSpec, render, render_error_history,
                     render_pareto, render_snapshots, save_figure)

__all__ = [
    "FigureSpec",
    "load_field",
    "load_solution",
    "read_errors",
    "read_history_index",
    "read_record",
    "read_sweep",
    "render",
    "render_error_history",
    "render_pareto",
    "render_snapshots",
    "save_figure",
]
