"""CLI command for (Δ, Ω) maps at fixed photon detuning."""

from typing import Annotated

import typer

from chiral_diode import api
from chiral_diode.commands.common import (
    ConfigOption,
    DeltaKOption,
    FormatOption,
    GammaAOption,
    GammaCOption,
    GammaLOption,
    GridOption,
    OutOption,
    Stopwatch,
    emit,
    emitter_overrides,
    fail,
    grid_override,
    scenario_for,
)
from chiral_diode.errors import ChiralDiodeError


def sweep2d_command(
    config: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
    gamma_l: GammaLOption = None,
    gamma_a: GammaAOption = None,
    gamma_c: GammaCOption = None,
    delta_k: DeltaKOption = None,
    grid: GridOption = None,
    omega_grid: Annotated[
        str | None,
        typer.Option("--omega-grid", help="Rabi-frequency grid as start:stop:count."),
    ] = None,
):
    """Maps T_R, T_L and ΔT over laser detuning (--grid) and Rabi frequency (--omega-grid)."""
    overrides = {
        **emitter_overrides(gamma_l=gamma_l, gamma_a=gamma_a, gamma_c=gamma_c),
        "sweep2d.delta_k": delta_k,
        "sweep2d.delta_laser": grid_override(grid),
        "sweep2d.omega": grid_override(omega_grid),
    }
    scenario = scenario_for("sweep2d", config, overrides, fmt)
    with Stopwatch("sweep2d"):
        try:
            table = api.cmd_sweep2d(scenario)
        except (ChiralDiodeError, ValueError) as exc:
            raise fail(exc) from exc
    emit(table, "sweep2d", scenario, out)
