"""CLI command for the wavepacket oracle."""

from typing import Annotated

import typer

from chiral_diode import api
from chiral_diode.commands.common import (
    EXIT_TOLERANCE,
    ConfigOption,
    DeltaLaserOption,
    EmitterOption,
    FormatOption,
    GammaAOption,
    GammaCOption,
    GammaLOption,
    OmegaOption,
    OutOption,
    Stopwatch,
    console,
    emit,
    emitter_overrides,
    fail,
    scenario_for,
)
from chiral_diode.errors import ChiralDiodeError


def oracle_command(
    config: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
    emitter: EmitterOption = None,
    gamma_l: GammaLOption = None,
    gamma_a: GammaAOption = None,
    gamma_c: GammaCOption = None,
    omega: OmegaOption = None,
    delta_laser: DeltaLaserOption = None,
    carrier: Annotated[
        list[float] | None,
        typer.Option("--carrier", help="Carrier detuning; repeat for several carriers."),
    ] = None,
    direction: Annotated[
        str | None, typer.Option("--direction", help="Injection side: left or right.")
    ] = None,
    sigma_k: Annotated[
        float | None, typer.Option("--sigma-k", help="Spectral width of the wavepacket.")
    ] = None,
):
    """Scatters wavepackets numerically and compares with the closed-form probabilities.

    Exits with status 3 when any carrier misses the tolerance or fails to converge.
    """
    overrides = {
        **emitter_overrides(emitter, gamma_l, gamma_a, gamma_c, omega, delta_laser),
        "oracle.carriers": list(carrier) if carrier else None,
        "oracle.direction": direction,
        "oracle.sigma_k": sigma_k,
    }
    scenario = scenario_for("oracle", config, overrides, fmt)
    with Stopwatch("oracle"):
        try:
            report = api.oracle_report(scenario)
        except (ChiralDiodeError, ValueError) as exc:
            raise fail(exc) from exc
    table = api.oracle_table(report, scenario)
    emit(table, "oracle", scenario, out)
    if not table.passed:
        console.print(
            f"[bold red]Oracle check failed:[/] max |dT| = {report.max_T_error:.3e}, "
            f"max |dR| = {report.max_R_error:.3e} (tolerance {report.tolerance:g}), "
            f"converged = {report.all_converged}."
        )
        raise typer.Exit(EXIT_TOLERANCE)
