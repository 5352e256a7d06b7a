"""Options and helpers shared by the CLI commands."""

import logging
from pathlib import Path
import time
from typing import Annotated, Any

from rich.console import Console
from rich.markup import escape
import typer

from chiral_diode.config import find_scenario_path, load_scenario, resolve_output_path
from chiral_diode.errors import ScenarioError
from chiral_diode.tables import ResultTable
from chiral_diode.utils import parse_grid
from chiral_diode.validation import Scenario

logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_TOLERANCE = 3

ConfigOption = Annotated[
    Path | None,
    typer.Option(
        "--config",
        "-c",
        help="Scenario TOML file. Defaults to $CHIRAL_DIODE_SCENARIO or a scenario.toml "
        "found in the working directory or a parent.",
        dir_okay=False,
    ),
]
OutOption = Annotated[
    Path | None,
    typer.Option("--out", "-o", help="Write the table to this file instead of stdout."),
]
FormatOption = Annotated[
    str | None,
    typer.Option("--format", "-f", help="Output format: csv or json."),
]
EmitterOption = Annotated[
    str | None,
    typer.Option("--emitter", help="Emitter kind: two-level or lambda."),
]
GammaLOption = Annotated[
    float | None, typer.Option("--gamma-l", help="Left-moving decay rate Γ_L.")
]
GammaAOption = Annotated[
    float | None, typer.Option("--gamma-a", help="Excited-state loss γ_a.")
]
GammaCOption = Annotated[
    float | None, typer.Option("--gamma-c", help="Metastable-state loss γ_c.")
]
OmegaOption = Annotated[float | None, typer.Option("--omega", help="Rabi frequency Ω.")]
DeltaLaserOption = Annotated[
    float | None, typer.Option("--delta-laser", help="Laser detuning Δ.")
]
DeltaKOption = Annotated[float | None, typer.Option("--delta-k", help="Photon detuning δ_k.")]
GridOption = Annotated[
    str | None,
    typer.Option("--grid", help="Detuning grid as start:stop:count, e.g. -4:4:801."),
]


def emitter_overrides(
    emitter: str | None = None,
    gamma_l: float | None = None,
    gamma_a: float | None = None,
    gamma_c: float | None = None,
    omega: float | None = None,
    delta_laser: float | None = None,
) -> dict[str, Any]:
    """Dotted-key overrides for the ``[emitter]`` table."""
    return {
        "emitter.kind": emitter,
        "emitter.gamma_L": gamma_l,
        "emitter.gamma_a": gamma_a,
        "emitter.gamma_c": gamma_c,
        "emitter.omega": omega,
        "emitter.delta_laser": delta_laser,
    }


def grid_override(text: str | None) -> dict[str, float | int] | None:
    """Parses a grid flag, exiting with a configuration error on bad input."""
    if text is None:
        return None
    try:
        return parse_grid(text)
    except ValueError as exc:
        console.print(f"[bold red]Error:[/] {escape(str(exc))}")
        raise typer.Exit(EXIT_CONFIG) from exc


def report_scenario_error(exc: ScenarioError) -> None:
    location = f" (line {exc.line})" if exc.line is not None else ""
    console.print(f"[bold red]❌ Scenario error{location}:[/] {escape(str(exc))}")
    for loc, message in exc.diagnostics:
        console.print(f"  - [bold cyan]{escape(loc)}[/bold cyan]: {escape(message)}")


def scenario_for(
    command: str, config: Path | None, overrides: dict[str, Any], fmt: str | None = None
) -> Scenario:
    """Loads the scenario for ``command`` or exits with status 1."""
    overrides = {**overrides, "output.format": fmt}
    try:
        return load_scenario(command, find_scenario_path(config), overrides)
    except ScenarioError as exc:
        report_scenario_error(exc)
        raise typer.Exit(EXIT_CONFIG) from exc


def fail(exc: Exception) -> typer.Exit:
    """Reports a domain error and returns the exit to raise."""
    notes = getattr(exc, "__notes__", [])
    detail = f" ({'; '.join(notes)})" if notes else ""
    console.print(f"[bold red]Error:[/] {escape(str(exc))}{escape(detail)}")
    return typer.Exit(EXIT_CONFIG)


def emit(table: ResultTable, command: str, scenario: Scenario, out: Path | None) -> Path | None:
    """Writes ``table`` where the scenario and flags say, or to stdout."""
    fmt = scenario.output.format
    path = resolve_output_path(command, scenario, out)
    if path is None:
        typer.echo(table.render(fmt), nl=False)
        return None
    table.write(path, fmt)
    console.print(f"Wrote {len(table.rows)} rows to [cyan]{path}[/cyan]")
    return path


class Stopwatch:
    """Logs the wall time of a command; kept out of result files."""

    def __init__(self, command: str):
        self.command = command

    def __enter__(self) -> "Stopwatch":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc_info) -> None:
        logger.info("%s finished in %.3f s", self.command, time.perf_counter() - self.start)
