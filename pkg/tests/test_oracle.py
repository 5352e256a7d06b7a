import math

import numpy as np
from pydantic import ValidationError
import pytest

from chiral_diode.errors import GridTooCoarse, NotConverged, StepRejected
from chiral_diode.models import CouplingRates, Lambda, LaserDrive, TwoLevel
from chiral_diode.oracle import (
    CarrierComparison,
    Direction,
    DiscrepancyReport,
    ModeGrid,
    OracleResult,
    OracleState,
    WavepacketSpec,
    build_dynamics,
    check_resolution,
    compare_to_analytic,
    evolve,
    fit_decay_rate,
    max_time_step,
    required_box_length,
    scatter_wavepacket,
    slowest_decay_rate,
    spontaneous_decay,
)
from chiral_diode.scattering import evaluate
from chiral_diode.tuner import dressed_states, tune_pass


DIODE = CouplingRates(gamma_L=0.1, gamma_a=0.9)
LOSSY = CouplingRates(gamma_L=0.4, gamma_a=0.3)
BALANCED_DRIVE = LaserDrive(omega_rabi=1.5, delta_laser=0.0)
LEFT, RIGHT = Direction.FROM_LEFT, Direction.FROM_RIGHT

STANDARD_SET = [
    pytest.param(TwoLevel(rates=DIODE), 0.0, LEFT, 0.05, id="critical-left"),
    pytest.param(TwoLevel(rates=DIODE), 0.0, RIGHT, 0.05, id="critical-right"),
    pytest.param(TwoLevel(rates=DIODE), -2.5, LEFT, 0.05, id="detuned-left"),
    pytest.param(TwoLevel(rates=LOSSY), 0.7, LEFT, 0.05, id="lossy-left"),
    pytest.param(TwoLevel(rates=LOSSY), 0.7, RIGHT, 0.05, id="lossy-right"),
    pytest.param(TwoLevel(rates=CouplingRates(gamma_L=1.0)), 0.0, LEFT, 0.05, id="symmetric"),
    pytest.param(Lambda(rates=DIODE, drive=BALANCED_DRIVE), 1.5, LEFT, 0.03, id="upper-left"),
    pytest.param(Lambda(rates=DIODE, drive=BALANCED_DRIVE), -1.5, LEFT, 0.03, id="lower-left"),
    pytest.param(Lambda(rates=DIODE, drive=BALANCED_DRIVE), 1.5, RIGHT, 0.03, id="upper-right"),
    pytest.param(Lambda(rates=DIODE, drive=BALANCED_DRIVE), -1.5, RIGHT, 0.03, id="lower-right"),
    pytest.param(Lambda(rates=DIODE, drive=BALANCED_DRIVE), 0.0, LEFT, 0.05, id="eit-left"),
    pytest.param(Lambda(rates=DIODE, drive=BALANCED_DRIVE), 0.0, RIGHT, 0.05, id="eit-right"),
]


def test_mode_grid_geometry():
    grid = ModeGrid(n_modes=101, span=5.0)
    assert grid.spacing == pytest.approx(0.1)
    assert grid.offsets[0] == -5.0
    assert grid.offsets[-1] == 5.0
    assert grid.offsets[50] == pytest.approx(0.0, abs=1e-15)
    assert grid.box_length == pytest.approx(2.0 * math.pi / 0.1)
    assert grid.refined() == ModeGrid(n_modes=202, span=5.0)


@pytest.mark.parametrize("kwargs", [{"n_modes": 63}, {"n_modes": 128, "span": 0.0}])
def test_mode_grid_validation(kwargs):
    with pytest.raises(ValidationError):
        ModeGrid(**kwargs)


def test_wavepacket_defaults():
    wp = WavepacketSpec()
    assert wp.carrier_detuning == 0.0
    assert wp.sigma_k == 0.02
    assert wp.direction is Direction.FROM_LEFT
    assert wp.x0 == pytest.approx(150.0)
    assert wp.sigma_x == pytest.approx(25.0)
    assert WavepacketSpec(launch_offset=40.0).x0 == 40.0
    with pytest.raises(ValidationError):
        WavepacketSpec(sigma_k=0.0)


@pytest.mark.parametrize("direction", list(Direction))
def test_launch_places_a_normalized_packet(direction):
    grid = ModeGrid(n_modes=256, span=6.0)
    state = OracleState.launch(WavepacketSpec(sigma_k=0.5, direction=direction), grid)
    assert state.norm == pytest.approx(1.0)
    assert state.beta_a == 0 and state.beta_c == 0
    if direction is Direction.FROM_LEFT:
        assert state.right_population == pytest.approx(1.0)
        assert state.left_population == 0.0
    else:
        assert state.left_population == pytest.approx(1.0)
        assert state.right_population == 0.0


def test_state_vector_layout():
    state = OracleState(np.array([1, 2], dtype=complex), np.array([3, 4], dtype=complex), 5j, 6j)
    vector = state.to_vector()
    assert vector.tolist() == [1, 2, 3, 4, 5j, 6j]
    again = OracleState.from_vector(vector)
    assert again.c_L.tolist() == [3, 4]
    assert again.beta_c == 6j


def test_undriven_lambda_never_populates_metastable_level():
    spec = Lambda(rates=CouplingRates(gamma_L=0.2, gamma_a=0.3), drive=LaserDrive(delta_laser=1.0))
    grid = ModeGrid(n_modes=128, span=6.0)
    dynamics = build_dynamics(spec, grid, WavepacketSpec())
    trajectory = evolve(OracleState.excited(grid.n_modes), dynamics, 0.01, 2.0, keep_states=True)
    assert all(state.beta_c == 0 for state in trajectory.states)
    assert trajectory.final.beta_c == 0


def test_lossless_generator_conserves_norm():
    """With real energies the derivative map is anti-Hermitian."""
    spec = Lambda(
        rates=CouplingRates(gamma_R=0.5, gamma_L=0.5),
        drive=LaserDrive(omega_rabi=1.0, delta_laser=0.3),
    )
    grid = ModeGrid(n_modes=128, span=6.0)
    dynamics = build_dynamics(spec, grid, WavepacketSpec(carrier_detuning=0.4))
    rng = np.random.default_rng(11)
    y = rng.normal(size=2 * 128 + 2) + 1j * rng.normal(size=2 * 128 + 2)
    assert np.vdot(y, dynamics(y)).real == pytest.approx(0.0, abs=1e-10)


def test_decoupled_direction_evolves_freely():
    """A packet moving against a Γ_L = 0 emitter only picks up phases."""
    spec = TwoLevel(rates=CouplingRates(gamma_L=0.0, gamma_a=0.2))
    grid = ModeGrid(n_modes=128, span=6.0)
    wp = WavepacketSpec(sigma_k=0.5, launch_offset=2.0, direction=Direction.FROM_RIGHT)
    state = OracleState.launch(wp, grid)
    dynamics = build_dynamics(spec, grid, wp)
    assert dynamics.g_L == 0.0
    final = evolve(state, dynamics, 0.01, 5.0).final
    assert np.allclose(np.abs(final.c_L), np.abs(state.c_L), atol=1e-5)
    assert final.beta_a == 0
    assert final.right_population == 0.0


def test_mirrored_rates_couple_the_physical_directions():
    grid = ModeGrid(n_modes=128, span=6.0)
    mirrored = TwoLevel(rates=CouplingRates(gamma_R=0.1, gamma_L=1.0))
    dynamics = build_dynamics(mirrored, grid, WavepacketSpec())
    assert dynamics.g_L > dynamics.g_R
    assert dynamics.g_L**2 / dynamics.g_R**2 == pytest.approx(10.0)


def test_spontaneous_decay_matches_total_width():
    """An excited emitter with no photon decays at γ_a + Γ_R + Γ_L."""
    spec = TwoLevel(rates=CouplingRates(gamma_R=1.0, gamma_L=0.5, gamma_a=0.5))
    grid = ModeGrid(n_modes=1601, span=200.0)
    times, populations = spontaneous_decay(spec, grid, 3.0)
    assert populations[0] == 1.0
    assert fit_decay_rate(times, populations) == pytest.approx(2.0, rel=1e-2)


def test_fit_decay_rate_on_exact_exponential():
    times = np.linspace(0.0, 4.0, 50)
    assert fit_decay_rate(times, 0.8 * np.exp(-1.3 * times)) == pytest.approx(1.3, rel=1e-6)


def test_unstable_step_is_rejected(diode_two_level):
    grid = ModeGrid(n_modes=64, span=6.0)
    dynamics = build_dynamics(diode_two_level, grid, WavepacketSpec())
    state = OracleState.vacuum(64)
    state.c_R = np.full(64, 1.0 / 8.0, dtype=complex)
    with pytest.raises(StepRejected) as excinfo:
        evolve(state, dynamics, 1.0, 5.0)
    assert excinfo.value.growth > 1e-6


def test_evolve_rejects_non_positive_times(diode_two_level):
    grid = ModeGrid(n_modes=64, span=6.0)
    dynamics = build_dynamics(diode_two_level, grid, WavepacketSpec())
    with pytest.raises(ValueError):
        evolve(OracleState.excited(64), dynamics, 0.0, 1.0)


def test_coarse_grids_are_rejected(diode_two_level):
    with pytest.raises(GridTooCoarse):
        build_dynamics(diode_two_level, ModeGrid(n_modes=64, span=100.0), WavepacketSpec())
    with pytest.raises(GridTooCoarse):
        check_resolution(
            diode_two_level, ModeGrid(n_modes=4096, span=6.0), WavepacketSpec(sigma_k=1.5)
        )
    with pytest.raises(GridTooCoarse):
        check_resolution(diode_two_level, ModeGrid(n_modes=256, span=6.0), WavepacketSpec())
    with pytest.raises(GridTooCoarse):
        ModeGrid.for_wavepacket(WavepacketSpec(sigma_k=1e-4), diode_two_level)


def test_sized_grid_holds_the_run(dressed_lambda):
    wp = WavepacketSpec(carrier_detuning=1.0, sigma_k=0.05)
    grid = ModeGrid.for_wavepacket(wp, dressed_lambda)
    check_resolution(dressed_lambda, grid, wp)
    root = dressed_states(dressed_lambda.drive).root_plus
    assert grid.span >= root - 1.0 + 4.0 * dressed_lambda.rates.total_width
    box = required_box_length(dressed_lambda, wp)
    assert box >= grid.box_length / 1.2
    assert grid.box_length >= box


def test_box_holds_launch_and_run_once(diode_two_level):
    wp = WavepacketSpec(sigma_k=0.05)
    reach = 3.0 / 0.05
    t_end = wp.x0 + reach + 10.0 / 2.0
    assert required_box_length(diode_two_level, wp) == pytest.approx(t_end - wp.x0 + reach)
    early = WavepacketSpec(sigma_k=0.05, launch_offset=400.0)
    assert required_box_length(diode_two_level, early) == pytest.approx(400.0 + reach)


def test_slowest_decay_rate(dressed_lambda, diode_two_level):
    assert slowest_decay_rate(diode_two_level) == pytest.approx(2.0)
    assert slowest_decay_rate(dressed_lambda, 1.0) == pytest.approx(0.75, abs=1e-2)


def test_time_step_limit(diode_two_level):
    grid = ModeGrid(n_modes=512, span=8.0)
    assert max_time_step(diode_two_level, grid) == pytest.approx(0.1 / 8.0)
    wp = WavepacketSpec(sigma_k=0.5)
    with pytest.raises(ValueError):
        scatter_wavepacket(diode_two_level, wp, grid, dt=0.1, check_convergence=False)


def test_critical_coupling_absorbs_forward_photon(diode_two_level):
    result = scatter_wavepacket(diode_two_level, WavepacketSpec(sigma_k=0.05))
    assert result.converged
    assert result.T == pytest.approx(0.0, abs=1e-2)
    assert result.R == pytest.approx(0.1, abs=1e-2)
    assert result.loss == pytest.approx(0.9, abs=1.5e-2)
    assert np.all(np.diff(result.norm_history) <= 1e-6)


def test_symmetric_coupling_reflects_packet():
    spec = TwoLevel(rates=CouplingRates(gamma_R=0.5, gamma_L=0.5))
    result = scatter_wavepacket(spec, WavepacketSpec(sigma_k=0.02))
    assert result.R == pytest.approx(1.0, abs=1e-2)
    assert result.norm_history[-1] == pytest.approx(1.0, abs=1e-6)


def test_eit_packet_is_transmitted(dressed_lambda):
    result = scatter_wavepacket(dressed_lambda, WavepacketSpec(carrier_detuning=1.0, sigma_k=0.05))
    assert result.converged
    assert result.T == pytest.approx(1.0, abs=1e-2)


def test_pass_plan_survives_the_oracle():
    tuned = tune_pass(-1.7, 0.4)
    spec = Lambda(rates=tuned.rates, drive=tuned.drive)
    result = scatter_wavepacket(
        spec, WavepacketSpec(carrier_detuning=-1.7, sigma_k=0.1), check_convergence=False
    )
    assert result.T == pytest.approx(1.0, abs=1e-2)
    assert abs(result.loss) < 1e-2


def test_injection_sides_are_mirror_images(diode_rates):
    forward = TwoLevel(rates=diode_rates)
    backward = TwoLevel(rates=CouplingRates(gamma_R=0.1, gamma_L=1.0, gamma_a=0.9))
    from_left = scatter_wavepacket(
        forward, WavepacketSpec(carrier_detuning=0.5, sigma_k=0.1), check_convergence=False
    )
    from_right = scatter_wavepacket(
        backward,
        WavepacketSpec(carrier_detuning=0.5, sigma_k=0.1, direction=Direction.FROM_RIGHT),
        check_convergence=False,
    )
    assert from_right.T == pytest.approx(from_left.T, abs=1e-10)
    assert from_right.R == pytest.approx(from_left.R, abs=1e-10)


def test_compare_without_carriers_passes(diode_two_level):
    report = compare_to_analytic(diode_two_level, [], WavepacketSpec())
    assert report.rows == []
    assert report.max_T_error == 0.0
    assert report.passed


@pytest.mark.parametrize("spec, carrier, direction, sigma_k", STANDARD_SET)
def test_oracle_agrees_with_closed_forms(spec, carrier, direction, sigma_k):
    report = compare_to_analytic(
        spec, [carrier], WavepacketSpec(sigma_k=sigma_k, direction=direction)
    )
    (row,) = report.rows
    expected = evaluate(spec, carrier)
    assert row.T_analytic == (expected.T_R if direction is LEFT else expected.T_L)
    assert row.R_analytic == expected.R
    assert row.converged
    assert report.direction is direction
    assert report.passed


def test_metastable_loss_through_the_oracle():
    spec = Lambda(
        rates=CouplingRates(gamma_L=0.3, gamma_a=0.5, gamma_c=0.05),
        drive=LaserDrive(omega_rabi=1.5, delta_laser=-0.8),
    )
    expected = evaluate(spec, 1.2)
    results = {
        direction: scatter_wavepacket(
            spec, WavepacketSpec(carrier_detuning=1.2, sigma_k=0.02, direction=direction)
        )
        for direction in Direction
    }
    assert all(result.converged for result in results.values())
    assert results[LEFT].T == pytest.approx(expected.T_R, abs=5e-3)
    assert results[RIGHT].T == pytest.approx(expected.T_L, abs=5e-3)
    assert results[LEFT].R == pytest.approx(expected.R, abs=5e-3)
    assert results[LEFT].R == pytest.approx(results[RIGHT].R, abs=2e-3)


def test_reflection_does_not_depend_on_the_injection_side():
    spec = TwoLevel(rates=LOSSY)
    reports = [
        compare_to_analytic(
            spec,
            [0.7],
            WavepacketSpec(sigma_k=0.05, direction=direction),
            check_convergence=False,
        )
        for direction in Direction
    ]
    from_left, from_right = (report.rows[0] for report in reports)
    assert from_left.R_oracle == pytest.approx(from_right.R_oracle, abs=2e-3)
    assert from_left.T_oracle != pytest.approx(from_right.T_oracle, abs=1e-2)
    assert all(report.passed for report in reports)


def test_narrower_packets_approach_the_closed_form():
    spec = TwoLevel(rates=LOSSY)
    errors = []
    for sigma_k in (0.1, 0.05, 0.025):
        report = compare_to_analytic(
            spec, [0.7], WavepacketSpec(sigma_k=sigma_k), check_convergence=False
        )
        errors.append(report.max_T_error)
    assert errors[1] < errors[0] / 2.0
    assert errors[2] < errors[1] / 2.0
    assert errors[2] < 1e-3


def test_report_fails_on_unconverged_rows():
    row = CarrierComparison(
        carrier=0.0,
        T_oracle=0.5,
        T_analytic=0.5,
        R_oracle=0.1,
        R_analytic=0.1,
        loss=0.4,
        converged=False,
    )
    checked = DiscrepancyReport(rows=[row], tolerance=1e-2, direction=Direction.FROM_LEFT)
    assert not checked.passed
    unchecked = DiscrepancyReport(
        rows=[row], tolerance=1e-2, direction=Direction.FROM_LEFT, check_convergence=False
    )
    assert unchecked.passed


def test_not_converged_keeps_both_results():
    coarse = OracleResult(T=0.5, R=0.1, loss=0.4, norm_history=np.ones(2))
    fine = OracleResult(T=0.52, R=0.1, loss=0.38, norm_history=np.ones(2))
    exc = NotConverged(coarse, fine, 5e-3)
    assert exc.fine is fine
    assert "2.000e-02" in str(exc)
