"""CLI command for validating scenario files."""

from pathlib import Path

from rich.markup import escape
import typer

from chiral_diode.commands.common import (
    EXIT_CONFIG,
    ConfigOption,
    console,
    report_scenario_error,
)
from chiral_diode.config import find_scenario_path, read_scenario_file, validate_scenario
from chiral_diode.errors import ScenarioError


def validate_command(config: ConfigOption = None):
    """Validates the structure and content of a scenario file."""
    path: Path | None = find_scenario_path(config)
    if path is None:
        console.print("[bold red]Error:[/] No scenario file given or found.")
        raise typer.Exit(EXIT_CONFIG)
    console.print(f"Validating scenario at: [cyan]{escape(str(path))}[/cyan]")
    try:
        scenario = validate_scenario(read_scenario_file(path))
    except ScenarioError as exc:
        report_scenario_error(exc)
        raise typer.Exit(EXIT_CONFIG) from exc
    section = escape(f"[{scenario.kind}]")
    console.print(f"[bold green]✅ Success![/bold green] Scenario is valid ({section} sweep).")
