"""Main CLI application for chiral-diode."""

import sys

import click
import typer

from chiral_diode import __version__
from chiral_diode.commands.common import EXIT_CONFIG
from chiral_diode.commands.compare import compare_command
from chiral_diode.commands.oracle import oracle_command
from chiral_diode.commands.spectrum import spectrum_command
from chiral_diode.commands.sweep2d import sweep2d_command
from chiral_diode.commands.tune import tune_command
from chiral_diode.commands.validate import validate_command
from chiral_diode.config import load_environment
from chiral_diode.log import configure_logging


def version_callback(value: bool):
    """Prints the version of the package."""
    if value:
        print(f"chiral-diode version: {__version__}")
        raise typer.Exit()


app = typer.Typer(
    name="chiral-diode",
    help="Single-photon scattering, diode contrast and laser tuning for chiral waveguide emitters.",
    no_args_is_help=True,
    add_completion=False,
    rich_markup_mode="markdown",
)


@app.callback()
def root_callback(
    version: bool = typer.Option(
        None,
        "--version",
        "-V",
        help="Show the version and exit.",
        callback=version_callback,
        is_eager=True,
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug output to stderr."),
):
    """Compute and check single-photon transport past a chirally coupled emitter."""
    load_environment()
    configure_logging(verbose)


app.command(name="spectrum")(spectrum_command)
app.command(name="sweep2d")(sweep2d_command)
app.command(name="tune")(tune_command)
app.command(name="oracle")(oracle_command)
app.command(name="compare")(compare_command)
app.command(name="validate")(validate_command)


def main():
    """Entry point; usage errors exit with status 1 like configuration errors."""
    try:
        code = app(prog_name="chiral-diode", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(EXIT_CONFIG)
    except click.Abort:
        sys.exit(EXIT_CONFIG)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()
