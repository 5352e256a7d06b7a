"""CLI command comparing the closed-form diode contrast with the amplitudes."""

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
    GridOption,
    OmegaOption,
    OutOption,
    Stopwatch,
    console,
    emit,
    emitter_overrides,
    fail,
    grid_override,
    scenario_for,
)
from chiral_diode.errors import ChiralDiodeError
from chiral_diode.scattering import EQUALITY_EPS


def compare_command(
    config: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
    emitter: EmitterOption = None,
    gamma_l: GammaLOption = None,
    gamma_a: GammaAOption = None,
    gamma_c: GammaCOption = None,
    omega: OmegaOption = None,
    delta_laser: DeltaLaserOption = None,
    grid: GridOption = None,
):
    """Checks the closed-form ΔT against |T_R − T_L| over a photon-detuning grid."""
    overrides = {
        **emitter_overrides(emitter, gamma_l, gamma_a, gamma_c, omega, delta_laser),
        "spectrum.grid": grid_override(grid),
    }
    scenario = scenario_for("compare", config, overrides, fmt)
    with Stopwatch("compare"):
        try:
            table = api.cmd_compare(scenario)
        except (ChiralDiodeError, ValueError) as exc:
            raise fail(exc) from exc
    emit(table, "compare", scenario, out)
    if not table.passed:
        console.print(
            f"[bold red]Closed form disagrees[/] with the amplitudes by more than {EQUALITY_EPS:g}."
        )
        raise typer.Exit(EXIT_TOLERANCE)
