"""Command-line figure regeneration from run directories."""

from __future__ import annotations

import sys

import click

from .render import FigureSpec, render


def _emit(spec: FigureSpec) -> None:
    render(spec)
    stem = spec.out.removesuffix(".png").removesuffix(".svg")
    click.echo(f"wrote {stem}.png and {stem}.svg")


@click.group()
def cli():
    """Regenerate plots from saved solver outputs."""


@cli.command()
@click.option("--sweep", required=True, help="sweep.csv from a grid run.",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--dn-reference", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Single-record sweep-format csv for the gray marker.")
@click.option("--out", required=True)
def pareto(sweep, dn_reference, out):
    """Error/iteration trade-off scatter for a parameter sweep."""
    _emit(FigureSpec("pareto", (sweep, dn_reference), out))


@cli.command()
@click.option("--run", required=True, type=click.Path(exists=True,
                                                      file_okay=False),
              help="Coupled run directory saved with states.")
@click.option("--reference", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Single-domain trajectory directory.")
@click.option("--times", required=True,
              help="Comma-separated snapshot times in seconds.")
@click.option("--out", required=True)
def snapshots(run, reference, times, out):
    """Solution panels (u, v, a) at chosen times."""
    try:
        wanted = tuple(float(t) for t in times.split(","))
    except ValueError:
        raise click.UsageError(f"--times {times!r} is not a comma-separated "
                               "list of numbers")
    _emit(FigureSpec("snapshots", (run, reference), out,
                     {"times": wanted}))


@cli.command("error-history")
@click.option("--in", "in_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory written by the long-horizon preset.")
@click.option("--out", required=True)
def error_history(in_dir, out):
    """Per-configuration error evolution with the training cutoff marked."""
    _emit(FigureSpec("error-history", (in_dir,), out))


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
    except ValueError as e:
        click.echo(f"input error: {e}", err=True)
        return 2
    except OSError as e:
        click.echo(f"i/o error: {e}", err=True)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
