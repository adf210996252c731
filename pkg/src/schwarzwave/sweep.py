"""Robin-parameter grid study, Pareto extraction, and bundled experiments.

The sweep runs one coupled problem per grid tuple against a shared
monolithic reference (computed once; it depends only on the problem, not on
the transmission parameters).  Presets package the standard experiment
batteries: the named parameter-set comparison, the model-pairing table at
two basis sizes, the full Pareto grid, and the long-horizon predictive run.
"""

from __future__ import annotations

import itertools
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .metrics import error_report
from .monolithic import (ProblemConfig, Trajectory, compute_sigma_max,
                         run_monolithic)
from .opinf import RomSubdomain, train_reduced_model
from .schwarz import SchwarzDivergenceError, run_coupled
from .transmission import TransmissionSpec

ALPHA_AXIS = (1e-3, 1e-1, 1.0, 3.0, 5.0)
BETA_AXIS = (1e-3, 1e-1, 1.0, 3.0, 5.0)

# named parameter sets (alpha12_bar, alpha21_bar, beta12, beta21)
DN_REFERENCE = "alternating-dn"
NAMED_ROBIN_SETS = (
    ("lowest-error", (1e-3, 1e-3, 1.0, 1.0)),
    ("highest-error", (1e-1, 1.0, 1.0, 3.0)),
    ("lowest-iterations", (1e-3, 1e-3, 1e-1, 5.0)),
    ("highest-iterations", (1e-1, 1e-1, 1e-3, 3.0)),
)


@dataclass(frozen=True)
class SweepRecord:
    """One grid point's outcome.  ``eps_avg``/``mean_iterations`` are NaN
    when the run diverged (``converged`` False)."""

    alpha_12_bar: float
    alpha_21_bar: float
    beta_12: float
    beta_21: float
    eps_avg: float
    mean_iterations: float
    wall_time_s: float
    converged: bool


def generate_grid(*axes):
    """Cartesian product of the axis value lists, lexicographic order."""
    if not axes or any(len(ax) == 0 for ax in axes):
        raise ValueError("every axis needs at least one value")
    return list(itertools.product(*axes))


def benchmark_grid():
    """The full 5x5x5x5 coefficient grid swept by the benchmark preset."""
    return generate_grid(ALPHA_AXIS, ALPHA_AXIS, BETA_AXIS, BETA_AXIS)


def run_sweep(cfg: ProblemConfig, grid, *, jobs: int = 1,
              reference: Trajectory | None = None,
              sigma_max: float | None = None, sink=None) -> list[SweepRecord]:
    """One Robin-Robin FOM-FOM run per tuple; shared reference; divergent
    tuples are recorded with ``converged=False`` rather than aborting.

    ``sink(record)`` is called as each record completes (synchronized), so
    callers can stream results to disk.
    """
    if reference is None:
        reference = run_monolithic(cfg)
    if sigma_max is None:
        sigma_max = compute_sigma_max(reference)
    lock = threading.Lock()
    records: list[SweepRecord | None] = [None] * len(grid)

    def one(i, params):
        a12, a21, b12, b21 = params
        spec = TransmissionSpec.robin_robin(a12, a21, b12, b21, sigma_max)
        try:
            run = run_coupled(cfg, spec, reference=reference,
                              store_states=False)
            rep = error_report(run, reference)
            rec = SweepRecord(a12, a21, b12, b21, rep.eps_avg,
                              rep.mean_iterations, run.wall_time_s, True)
        except SchwarzDivergenceError:
            rec = SweepRecord(a12, a21, b12, b21, math.nan, math.nan,
                              math.nan, False)
        records[i] = rec
        if sink is not None:
            with lock:
                sink(rec)

    if jobs <= 1:
        for i, params in enumerate(grid):
            one(i, params)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(one, i, params)
                       for i, params in enumerate(grid)]
            for f in futures:
                f.result()
    return records


def pareto_front(records) -> list[SweepRecord]:
    """Non-dominated converged records under (eps_avg, mean_iterations)
    minimization; ties kept, input order preserved."""
    conv = [r for r in records if r.converged]
    if not conv:
        raise ValueError("no converged records")
    front = []
    for r in conv:
        dominated = any(
            o.eps_avg <= r.eps_avg and o.mean_iterations <= r.mean_iterations
            and (o.eps_avg < r.eps_avg or o.mean_iterations < r.mean_iterations)
            for o in conv)
        if not dominated:
            front.append(r)
    return front


# -- preset experiments -------------------------------------------------------


def _named_specs(sigma_max):
    specs = [(DN_REFERENCE, TransmissionSpec.alternating_dn(sigma_max))]
    for name, (a12, a21, b12, b21) in NAMED_ROBIN_SETS:
        specs.append((name, TransmissionSpec.robin_robin(a12, a21, b12, b21,
                                                         sigma_max)))
    return specs


def preset_table1(cfg: ProblemConfig, reference: Trajectory | None = None):
    """The named parameter-set comparison: the alternating reference plus
    the four named Robin sets.  Returns (rows, reference); each row is
    (name, spec, run, report)."""
    if reference is None:
        reference = run_monolithic(cfg)
    sigma_max = compute_sigma_max(reference)
    rows = []
    for name, spec in _named_specs(sigma_max):
        run = run_coupled(cfg, spec, reference=reference, store_states=False)
        rows.append((name, spec, run, error_report(run, reference)))
    return rows, reference


TABLE2_PAIRINGS = ((20, None), (None, 17), (20, 17),
                   (34, None), (None, 29), (34, 29))


def preset_table2(cfg: ProblemConfig, reference: Trajectory | None = None,
                  pairings=TABLE2_PAIRINGS):
    """Model-pairing study: FOM-FOM plus reduced/full pairings at the two
    basis sizes, under both the alternating and the lowest-error Robin
    transmission.  Returns (rows, reference); each row is
    (kind_name, r1, r2, run, report)."""
    if reference is None:
        reference = run_monolithic(cfg)
    sigma_max = compute_sigma_max(reference)
    specs = [(DN_REFERENCE, TransmissionSpec.alternating_dn(sigma_max)),
             ("lowest-error",
              TransmissionSpec.robin_robin(1e-3, 1e-3, 1.0, 1.0, sigma_max))]
    rows = []
    for kind_name, spec in specs:
        roms = {}
        for k, sizes in ((1, {r1 for r1, _ in pairings if r1}),
                         (2, {r2 for _, r2 in pairings if r2})):
            for r in sorted(sizes):
                basis, ops = train_reduced_model(reference, spec, k, r=r)
                roms[(k, r)] = (basis, ops)

        def model(k, r, spec=spec, roms=roms):
            if r is None:
                return "fom"
            basis, ops = roms[(k, r)]
            return RomSubdomain(cfg, spec, k, basis, ops)

        for r1, r2 in ((None, None),) + tuple(pairings):
            run = run_coupled(cfg, spec, model(1, r1), model(2, r2),
                              reference=reference, store_states=False)
            rows.append((kind_name, r1, r2, run,
                         error_report(run, reference)))
    return rows, reference


def preset_fig2(cfg: ProblemConfig, jobs: int = 1,
                reference: Trajectory | None = None):
    """Full Pareto grid plus the alternating reference record.

    Returns (records, front, dn_record, reference)."""
    if reference is None:
        reference = run_monolithic(cfg)
    sigma_max = compute_sigma_max(reference)
    dn_run = run_coupled(cfg, TransmissionSpec.alternating_dn(sigma_max),
                         reference=reference, store_states=False)
    dn_rep = error_report(dn_run, reference)
    dn_record = SweepRecord(0.0, 1.0, 1.0, 0.0, dn_rep.eps_avg,
                            dn_rep.mean_iterations, dn_run.wall_time_s, True)
    records = run_sweep(cfg, benchmark_grid(), jobs=jobs, reference=reference,
                        sigma_max=sigma_max)
    return records, pareto_front(records), dn_record, reference


PREDICTIVE_HORIZON = 1.0e-2
TRAINING_CUTOFF = 1.0e-3


def preset_fig8(cfg: ProblemConfig, r1: int = 34, r2: int = 29):
    """Long-horizon predictive study: train on the states up to the cutoff,
    couple over the full horizon, compare against the long reference.

    Returns (rows, times, cutoff) with one row per configuration:
    (name, run, report).
    """
    long_cfg = cfg.with_horizon(cfg.t0 + PREDICTIVE_HORIZON)
    cutoff = cfg.t0 + TRAINING_CUTOFF
    n_train = int(round(TRAINING_CUTOFF / long_cfg.dt))  # stepped states
    reference = run_monolithic(long_cfg)
    sigma_max = compute_sigma_max(reference, n_states=n_train + 1)
    dn = TransmissionSpec.alternating_dn(sigma_max)
    rr = TransmissionSpec.robin_robin(1e-3, 1e-3, 1.0, 1.0, sigma_max)

    def rom_pair(spec):
        models = []
        for k, r in ((1, r1), (2, r2)):
            basis, ops = train_reduced_model(reference, spec, k, r=r,
                                             n_states=n_train)
            models.append(RomSubdomain(long_cfg, spec, k, basis, ops))
        return models

    rows = []
    for name, spec, models in (
            ("dn-fom-fom", dn, ("fom", "fom")),
            ("dn-opinf-opinf", dn, rom_pair(dn)),
            ("rr-fom-fom", rr, ("fom", "fom")),
            ("rr-opinf-opinf", rr, rom_pair(rr))):
        run = run_coupled(long_cfg, spec, models[0], models[1],
                          reference=reference, store_states=False)
        rows.append((name, run, error_report(run, reference)))
    return rows, reference.times, cutoff
