"""Scenario-level operations: each takes a validated scenario and returns a table."""

import logging
from typing import Any

from chiral_diode import __version__
from chiral_diode.errors import NotApplicable
from chiral_diode.oracle import DiscrepancyReport, WavepacketSpec, compare_to_analytic
from chiral_diode.scattering import (
    EQUALITY_EPS,
    ScatteringResult,
    delta_T_closed_form,
    evaluate_grid,
    laser_map,
)
from chiral_diode.tables import ResultTable
from chiral_diode.tuner import (
    DegenerateTarget,
    Infeasible,
    RequiresDecayMatch,
    TuneMode,
    TunePlan,
    TuneTarget,
    plan,
    switch_plan,
)
from chiral_diode.validation import Scenario

logger = logging.getLogger(__name__)

TOOL_NAME = "chiral-diode"

SPECTRUM_COLUMNS = ["delta_k", "T_R", "T_L", "R", "Delta_T", "loss_R", "loss_L"]
SWEEP2D_COLUMNS = ["Delta", "Omega", "T_R", "T_L", "Delta_T"]
TUNE_COLUMNS = [
    "mode",
    "delta_k",
    "Delta",
    "Omega",
    "required_gamma_a",
    "feasibility",
    "gap",
    "T_R",
    "T_L",
    "R",
    "Delta_T",
    "loss_R",
    "loss_L",
    "blocked_direction",
]
ORACLE_COLUMNS = [
    "carrier",
    "T_oracle",
    "T_analytic",
    "R_oracle",
    "R_analytic",
    "loss",
    "converged",
]
COMPARE_COLUMNS = ["delta_k", "Delta_T_closed", "Delta_T_amplitude", "abs_diff", "applicable"]

SUMMARY_LABEL = "max_abs_diff"
"""``carrier`` value of the oracle table's summary row."""


def table_meta(command: str, scenario: Scenario, **extra: Any) -> dict[str, Any]:
    """Run metadata echoed at the top of every result file."""
    meta = {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "scenario": scenario.model_dump(mode="json", exclude_none=True),
    }
    meta.update(extra)
    return meta


def cmd_spectrum(scenario: Scenario, gamma_L: float | None = None) -> ResultTable:
    """Scattering probabilities over the scenario's δ_k grid.

    Args:
        scenario: A scenario with a ``[spectrum]`` section.
        gamma_L: Replaces ``emitter.gamma_L``, for one member of a Γ_L series.
    """
    settings = scenario.spectrum
    spec = scenario.emitter.spec(gamma_L)
    amplitudes = evaluate_grid(spec, settings.grid.values(scenario.scale))
    extra = {"gamma_L": gamma_L} if gamma_L is not None else {}
    table = ResultTable(SPECTRUM_COLUMNS, meta=table_meta("spectrum", scenario, **extra))
    for i in range(len(amplitudes)):
        table.append([float(amplitudes.delta_k[i]), *amplitudes.result(i).probabilities()])
    logger.info("Spectrum: %d points for a %s emitter", len(table.rows), spec.kind)
    return table


def spectrum_series(scenario: Scenario) -> list[tuple[float, ResultTable]]:
    """One spectrum per value of ``spectrum.gamma_L_series``."""
    return [
        (gamma_L, cmd_spectrum(scenario, gamma_L))
        for gamma_L in scenario.spectrum.gamma_L_series or []
    ]


def cmd_sweep2d(scenario: Scenario) -> ResultTable:
    """Transmission over a (Δ, Ω) grid at fixed δ_k, Δ as the outer index."""
    settings = scenario.sweep2d
    scale = scenario.scale
    result = laser_map(
        scenario.emitter.rates(),
        settings.delta_k / scale,
        settings.delta_laser.values(scale),
        settings.omega.values(scale),
    )
    amplitudes = result.amplitudes
    table = ResultTable(SWEEP2D_COLUMNS, meta=table_meta("sweep2d", scenario))
    for i in range(len(amplitudes)):
        table.append(
            [
                float(result.delta_laser[i]),
                float(result.omega[i]),
                float(amplitudes.T_R[i]),
                float(amplitudes.T_L[i]),
                float(amplitudes.delta_T[i]),
            ]
        )
    return table


def tune_plans(scenario: Scenario) -> list[TunePlan]:
    """Plans for the scenario's ``[tune]`` section; ``switch`` gives pass then block."""
    settings = scenario.tune
    scale = scenario.scale
    rates = scenario.emitter.rates()
    delta_k = settings.delta_k / scale
    omega = settings.omega / scale if settings.omega is not None else None
    if settings.mode == "switch":
        return list(switch_plan(delta_k, rates, omega))
    delta_laser = settings.delta_laser / scale if settings.delta_laser is not None else None
    target = TuneTarget(delta_k_target=delta_k, mode=TuneMode(settings.mode))
    return [plan(target, rates, omega, delta_laser_choice=delta_laser)]


def _predicted(result: ScatteringResult | None) -> list[float | None]:
    if result is None:
        return [None] * 6
    return list(result.probabilities())


def _gap(tune_plan: TunePlan) -> float | None:
    if isinstance(tune_plan.feasibility, RequiresDecayMatch | DegenerateTarget):
        return tune_plan.feasibility.gap
    if tune_plan.required_gamma_a is not None:
        return abs(tune_plan.rates.gamma_a - tune_plan.required_gamma_a)
    return None


def tune_table(plans: list[TunePlan], scenario: Scenario) -> ResultTable:
    table = ResultTable(TUNE_COLUMNS, meta=table_meta("tune", scenario))
    for tune_plan in plans:
        drive = tune_plan.drive
        table.append(
            [
                tune_plan.mode.value,
                tune_plan.delta_k,
                drive.delta_laser if drive is not None else None,
                drive.omega_rabi if drive is not None else None,
                tune_plan.required_gamma_a,
                tune_plan.feasibility.label,
                _gap(tune_plan),
                *_predicted(tune_plan.predicted),
                tune_plan.blocked_direction,
            ]
        )
    table.passed = not any(
        isinstance(p.feasibility, Infeasible | DegenerateTarget) for p in plans
    )
    return table


def cmd_tune(scenario: Scenario) -> ResultTable:
    """Laser settings for the tune target and their predicted scattering."""
    return tune_table(tune_plans(scenario), scenario)


def oracle_report(scenario: Scenario) -> DiscrepancyReport:
    """Runs the oracle over the scenario's carriers."""
    settings = scenario.oracle
    scale = scenario.scale
    spec = scenario.emitter.spec()
    template = WavepacketSpec(sigma_k=settings.sigma_k / scale, direction=settings.direction)
    return compare_to_analytic(
        spec,
        [carrier / scale for carrier in settings.carriers],
        template,
        span=settings.span / scale if settings.span is not None else None,
        n_modes=settings.n_modes,
        tolerance=settings.tolerance,
        check_convergence=settings.check_convergence,
        dt=settings.dt * scale if settings.dt is not None else None,
    )


def oracle_table(report: DiscrepancyReport, scenario: Scenario) -> ResultTable:
    table = ResultTable(ORACLE_COLUMNS, meta=table_meta("oracle", scenario))
    for row in report.rows:
        table.append(
            [
                row.carrier,
                row.T_oracle,
                row.T_analytic,
                row.R_oracle,
                row.R_analytic,
                row.loss,
                row.converged,
            ]
        )
    if report.rows:
        table.append(
            [
                SUMMARY_LABEL,
                report.max_T_error,
                None,
                report.max_R_error,
                None,
                None,
                report.all_converged,
            ]
        )
    table.passed = report.passed
    return table


def cmd_oracle(scenario: Scenario) -> ResultTable:
    """Oracle against closed-form probabilities, with a summary row of maxima."""
    return oracle_table(oracle_report(scenario), scenario)


def cmd_compare(scenario: Scenario) -> ResultTable:
    """Closed-form contrast ΔT against |T_R − T_L| from the amplitudes.

    Points where the closed form does not apply (dressed Λ emitter at Δ_k = 0 or
    with γ_c != 0) are reported with ``applicable=false`` and are not compared.
    """
    spec = scenario.emitter.spec()
    amplitudes = evaluate_grid(spec, scenario.spectrum.grid.values(scenario.scale))
    table = ResultTable(COMPARE_COLUMNS, meta=table_meta("compare", scenario))
    worst = 0.0
    for i in range(len(amplitudes)):
        delta_k = float(amplitudes.delta_k[i])
        from_amplitudes = float(amplitudes.delta_T[i])
        try:
            closed = delta_T_closed_form(spec, delta_k)
        except NotApplicable:
            table.append([delta_k, None, from_amplitudes, None, False])
            continue
        diff = abs(closed - from_amplitudes)
        worst = max(worst, diff)
        table.append([delta_k, closed, from_amplitudes, diff, True])
    table.passed = worst <= EQUALITY_EPS
    logger.info("Compared %d points; largest difference %.2e", len(table.rows), worst)
    return table
