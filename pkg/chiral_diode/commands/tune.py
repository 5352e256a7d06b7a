"""CLI command for laser settings that block, pass or switch a photon."""

from typing import Annotated

from rich.markup import escape
import typer

from chiral_diode import api
from chiral_diode.commands.common import (
    EXIT_INFEASIBLE,
    ConfigOption,
    DeltaKOption,
    FormatOption,
    GammaAOption,
    GammaCOption,
    GammaLOption,
    OutOption,
    Stopwatch,
    console,
    emit,
    emitter_overrides,
    fail,
    scenario_for,
)
from chiral_diode.errors import ChiralDiodeError
from chiral_diode.tuner import Infeasible, RequiresDecayMatch


def tune_command(
    config: ConfigOption = None,
    out: OutOption = None,
    fmt: FormatOption = None,
    gamma_l: GammaLOption = None,
    gamma_a: GammaAOption = None,
    gamma_c: GammaCOption = None,
    delta_k: DeltaKOption = None,
    mode: Annotated[
        str | None, typer.Option("--mode", help="Tune mode: block, pass or switch.")
    ] = None,
    omega: Annotated[
        float | None, typer.Option("--omega", help="Pin the Rabi frequency Ω.")
    ] = None,
    delta_laser: Annotated[
        float | None,
        typer.Option("--delta-laser", help="Pin the laser detuning Δ (block mode)."),
    ] = None,
):
    """Solves for the laser detuning and Rabi frequency that reach the target δ_k.

    Exits with status 2 when the target cannot be blocked.
    """
    overrides = {
        **emitter_overrides(gamma_l=gamma_l, gamma_a=gamma_a, gamma_c=gamma_c),
        "tune.delta_k": delta_k,
        "tune.mode": mode,
        "tune.omega": omega,
        "tune.delta_laser": delta_laser,
    }
    scenario = scenario_for("tune", config, overrides, fmt)
    with Stopwatch("tune"):
        try:
            plans = api.tune_plans(scenario)
        except (ChiralDiodeError, ValueError) as exc:
            raise fail(exc) from exc
    table = api.tune_table(plans, scenario)
    emit(table, "tune", scenario, out)

    for plan in plans:
        feasibility = plan.feasibility
        if isinstance(feasibility, RequiresDecayMatch):
            console.print(
                f"[yellow]Warning:[/] blocking needs gamma_a = {plan.required_gamma_a:g}; "
                f"the current value misses it by {feasibility.gap:.3g}."
            )
        elif isinstance(feasibility, Infeasible):
            console.print(f"[bold red]Infeasible:[/] {escape(feasibility.reason)}")
    if not table.passed:
        if not any(isinstance(plan.feasibility, Infeasible) for plan in plans):
            console.print(
                "[bold red]Degenerate target:[/] delta_k = 0 can only be blocked with the "
                "laser off (two-level diode)."
            )
        raise typer.Exit(EXIT_INFEASIBLE)
