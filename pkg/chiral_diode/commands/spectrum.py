"""CLI command for photon-detuning spectra."""

from chiral_diode import api
from chiral_diode.commands.common import (
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
from chiral_diode.config import resolve_output_path
from chiral_diode.errors import ChiralDiodeError
from chiral_diode.tables import series_path


def spectrum_command(
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
    """Computes T_R, T_L, R, ΔT and the losses over a photon-detuning grid."""
    overrides = {
        **emitter_overrides(emitter, gamma_l, gamma_a, gamma_c, omega, delta_laser),
        "spectrum.grid": grid_override(grid),
    }
    scenario = scenario_for("spectrum", config, overrides, fmt)
    with Stopwatch("spectrum"):
        try:
            series = api.spectrum_series(scenario) if scenario.spectrum.gamma_L_series else None
            table = api.cmd_spectrum(scenario) if series is None else None
        except (ChiralDiodeError, ValueError) as exc:
            raise fail(exc) from exc

    if series is None:
        emit(table, "spectrum", scenario, out)
        return
    path = resolve_output_path("spectrum", scenario, out)
    for gamma_L, member in series:
        if path is None:
            emit(member, "spectrum", scenario, None)
        else:
            target = member.write(series_path(path, gamma_L), scenario.output.format)
            console.print(f"Wrote {len(member.rows)} rows to [cyan]{target}[/cyan]")
