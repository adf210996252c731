"""Command-line workflow: monolithic runs, training, coupling, sweeps.

Every command writes only inside its ``--out`` directory and finishes by
writing a ``manifest.json`` naming each produced file with its content
hash.  Exit codes: 0 success, 2 configuration/usage error, 3 solver
divergence, 4 I/O error.
"""

from __future__ import annotations

import csv
import json
import shlex
import sys
from pathlib import Path

import click

from . import storage
from .metrics import error_report
from .monolithic import ProblemConfig, compute_sigma_max, run_monolithic
from .opinf import RomSubdomain, train_reduced_model
from .schwarz import SchwarzDivergenceError, run_coupled
from .sweep import preset_fig2, preset_fig8, preset_table1, preset_table2
from .transmission import TransmissionSpec


def _load_config(path) -> ProblemConfig:
    return storage.parse_config(path) if path else ProblemConfig()


def _spec_for(kind: str, sigma_max: float, alpha12, alpha21, beta12, beta21,
              theta_1: float = 1.0, theta_2: float = 1.0) -> TransmissionSpec:
    coeffs = (alpha12, alpha21, beta12, beta21)
    if kind == "rr":
        a12, a21, b12, b21 = (c if c is not None else d for c, d in
                              zip(coeffs, (1e-3, 1e-3, 1.0, 1.0)))
        return TransmissionSpec.robin_robin(a12, a21, b12, b21, sigma_max,
                                            theta_1, theta_2)
    if any(c is not None for c in coeffs):
        raise click.UsageError(
            f"transmission {kind!r} has fixed coefficients; "
            "--alpha12/--alpha21/--beta12/--beta21 apply to rr only")
    if kind == "dn":
        return TransmissionSpec.alternating_dn(sigma_max, theta_1, theta_2)
    return TransmissionSpec.dirichlet_dirichlet(sigma_max, theta_1, theta_2)


def _argv_command() -> str:
    return "schwarzwave " + " ".join(shlex.quote(a) for a in sys.argv[1:])


_coeff_options = [
    click.option("--alpha12", type=float, default=None,
                 help="Robin coefficient for subdomain 1's datum."),
    click.option("--alpha21", type=float, default=None,
                 help="Robin coefficient for subdomain 2's datum."),
    click.option("--beta12", type=float, default=None,
                 help="Displacement weight for subdomain 1's datum."),
    click.option("--beta21", type=float, default=None,
                 help="Displacement weight for subdomain 2's datum."),
]


def _with_coeffs(f):
    for opt in reversed(_coeff_options):
        f = opt(f)
    return f


@click.group()
def cli():
    """Coupled full-order/reduced-order runs of the clamped-bar benchmark."""


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None, help="key = value file; defaults reproduce the "
                                 "benchmark.")
@click.option("--out", required=True, type=click.Path(file_okay=False))
def monolithic(config, out):
    """Run the single-domain problem and save its trajectory."""
    cfg = _load_config(config)
    traj = run_monolithic(cfg)
    out = Path(out)
    storage.save_trajectory(out, traj)
    storage.write_manifest(out, _argv_command(), config)
    click.echo(f"{traj.n_states} states ({traj.mesh.n_nodes} nodes) -> {out}")


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--trajectory", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory written by `monolithic`.")
@click.option("--subdomain", required=True, type=click.Choice(["1", "2"]))
@click.option("--energy", type=float, default=None,
              help="Basis energy fraction in (0, 1].")
@click.option("--modes", type=int, default=None, help="Fixed basis size.")
@click.option("--transmission", "kind", required=True,
              type=click.Choice(["dn", "rr", "dd"]))
@_with_coeffs
@click.option("--out", required=True, type=click.Path(file_okay=False))
def train(config, trajectory, subdomain, energy, modes, kind,
          alpha12, alpha21, beta12, beta21, out):
    """Learn reduced operators for one subdomain from a saved trajectory."""
    if (energy is None) == (modes is None):
        raise click.UsageError("pass exactly one of --energy/--modes")
    cfg = _load_config(config)
    traj = storage.load_trajectory(trajectory, cfg)
    spec = _spec_for(kind, compute_sigma_max(traj), alpha12, alpha21,
                     beta12, beta21, cfg.theta_1, cfg.theta_2)
    k = int(subdomain)
    basis, ops = train_reduced_model(traj, spec, k, r=modes, energy=energy)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    source = storage.file_sha256(Path(trajectory) / "u.bin")
    storage.save_basis(out / "basis", basis, energy_target=energy,
                       source_hash=source)
    storage.save_operators(out / "operators.json", ops, "basis",
                           source_hash=source)
    storage.write_manifest(out, _argv_command(), config)
    click.echo(f"subdomain {k} ({ops.kind}-receiving): {basis.r} modes, "
               f"captured energy {basis.captured_energy:.10f} -> {out}")


def _build_model(cfg, spec, k, choice):
    if choice == "fom":
        return "fom"
    if not choice.startswith("rom:"):
        raise click.UsageError(f"--left/--right must be 'fom' or 'rom:PATH', "
                               f"got {choice!r}")
    path = Path(choice[4:])
    ops, basis_ref = storage.load_operators(path / "operators.json")
    basis = storage.load_basis(path / basis_ref)
    return RomSubdomain(cfg, spec, k, basis, ops)


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--left", default="fom", help="'fom' or 'rom:PATH' (directory "
                                            "written by `train`).")
@click.option("--right", default="fom")
@click.option("--transmission", "kind", required=True,
              type=click.Choice(["dn", "rr", "dd"]))
@_with_coeffs
@click.option("--store-states/--no-store-states", default=True,
              help="Persist per-step subdomain fields (large).")
@click.option("--out", required=True, type=click.Path(file_okay=False))
def couple(config, left, right, kind, alpha12, alpha21, beta12, beta21,
           store_states, out):
    """Run the coupled problem and save diagnostics (and states)."""
    cfg = _load_config(config)
    reference = run_monolithic(cfg)
    spec = _spec_for(kind, compute_sigma_max(reference), alpha12, alpha21,
                     beta12, beta21, cfg.theta_1, cfg.theta_2)
    m1 = _build_model(cfg, spec, 1, left)
    m2 = _build_model(cfg, spec, 2, right)
    run = run_coupled(cfg, spec, m1, m2, reference=reference,
                      store_states=store_states)
    rep = error_report(run, reference)
    out = Path(out)
    storage.save_run(out, run)
    storage.write_errors_csv(out / "errors.csv", run.times, rep)
    storage.write_summary(out / "summary.json", rep, cfg,
                          extra={"transmission": spec.kind})
    storage.write_manifest(out, _argv_command(), config)
    click.echo(f"eps_avg {rep.eps_avg:.4e}, mean iterations "
               f"{rep.mean_iterations:.4f}, wall {rep.wall_time_s:.2f}s "
               f"-> {out}")


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--preset", type=click.Choice(["fig2"]), default="fig2",
              show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def sweep(config, preset, jobs, out):
    """Run the Robin-parameter grid and emit sweep/pareto tables."""
    cfg = _load_config(config)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    records, front, dn_record, _ = preset_fig2(cfg, jobs=jobs)
    storage.write_sweep_csv(out / "sweep.csv", records)
    storage.write_sweep_csv(out / "pareto.csv", front)
    storage.write_sweep_csv(out / "dn_reference.csv", [dn_record])
    n_conv = sum(r.converged for r in records)
    best = min((r for r in records if r.converged), key=lambda r: r.eps_avg)
    doc = {"grid_points": len(records), "converged": n_conv,
           "pareto_size": len(front),
           "dn_reference": {"eps_avg": dn_record.eps_avg,
                            "mean_iterations": dn_record.mean_iterations},
           "lowest_error": {"eps_avg": best.eps_avg,
                            "mean_iterations": best.mean_iterations},
           "config_hash": storage.config_hash(cfg)}
    (out / "summary.json").write_text(json.dumps(doc, indent=1))
    storage.write_manifest(out, _argv_command(), config, preset=preset)
    click.echo(f"{n_conv}/{len(records)} converged, front size {len(front)} "
               f"-> {out}")


def _write_named_rows(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


@cli.command("preset")
@click.argument("name", type=click.Choice(["table1", "table2", "fig8"]))
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def preset_cmd(name, config, out):
    """Run a bundled experiment battery."""
    cfg = _load_config(config)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if name == "table1":
        rows, _ = preset_table1(cfg)
        _write_named_rows(
            out / "table1.csv",
            ("name", "alpha12_bar", "alpha21_bar", "beta12", "beta21",
             "eps_avg", "mean_iterations", "wall_time_s"),
            [(n, repr(s.alpha_12), repr(s.alpha_21), repr(s.beta_12),
              repr(s.beta_21), repr(rep.eps_avg), repr(rep.mean_iterations),
              repr(rep.wall_time_s)) for n, s, _, rep in rows])
    elif name == "table2":
        rows, _ = preset_table2(cfg)
        _write_named_rows(
            out / "table2.csv",
            ("transmission", "model_1", "model_2", "modes_1", "modes_2",
             "eps_avg", "mean_iterations", "wall_time_s"),
            [(kind, "opinf" if r1 else "fom", "opinf" if r2 else "fom",
              r1 or "", r2 or "", repr(rep.eps_avg),
              repr(rep.mean_iterations), repr(rep.wall_time_s))
             for kind, r1, r2, _, rep in rows])
    else:
        rows, times, cutoff = preset_fig8(cfg)
        for cname, run, rep in rows:
            sub = out / cname
            sub.mkdir(parents=True, exist_ok=True)
            storage.write_errors_csv(sub / "errors.csv", times, rep)
            storage.write_summary(sub / "summary.json", rep, run.config)
        (out / "fig8.json").write_text(json.dumps(
            {"training_cutoff_s": cutoff,
             "horizon_s": float(times[-1]),
             "configurations": [cname for cname, _, _ in rows]}, indent=1))
    storage.write_manifest(out, _argv_command(), config, preset=name)
    click.echo(f"preset {name} -> {out}")


@cli.command()
@click.option("--in", "in_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
def report(in_dir):
    """Print the summaries and tables found under a run directory."""
    in_dir = Path(in_dir)
    found = False
    for path in sorted(in_dir.rglob("summary.json")):
        found = True
        click.echo(f"[{path.relative_to(in_dir)}]")
        for key, value in json.loads(path.read_text()).items():
            click.echo(f"  {key}: {value}")
    for csv_name in ("table1.csv", "table2.csv", "pareto.csv"):
        for path in sorted(in_dir.rglob(csv_name)):
            found = True
            click.echo(f"[{path.relative_to(in_dir)}]")
            with open(path, newline="") as f:
                for row in csv.reader(f):
                    click.echo("  " + "  ".join(f"{c:>14}" for c in row))
    for path in sorted(in_dir.rglob("sweep.csv")):
        found = True
        rows = storage.read_sweep_csv(path)
        n_conv = sum(r["converged"] for r in rows)
        click.echo(f"[{path.relative_to(in_dir)}] {len(rows)} records, "
                   f"{n_conv} converged")
    if not found:
        click.echo("nothing to report", err=True)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except SchwarzDivergenceError as e:
        click.echo(f"divergence: {e}", err=True)
        return 3
    except ValueError as e:
        click.echo(f"config error: {e}", err=True)
        return 2
    except OSError as e:
        click.echo(f"i/o error: {e}", err=True)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
