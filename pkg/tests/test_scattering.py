import math

import numpy as np
import pytest

from chiral_diode.errors import (
    ConsistencyError,
    DegenerateDenominator,
    GridError,
    NotApplicable,
)
from chiral_diode.models import CouplingRates, Detuning, Lambda, LaserDrive, TwoLevel
from chiral_diode.scattering import (
    EQUALITY_EPS,
    _clamp,
    amplitudes_lambda,
    amplitudes_two_level,
    decay_match,
    delta_T_closed_form,
    diode_contrast_peak,
    evaluate,
    evaluate_grid,
    laser_map,
    max_reflection,
    spectrum,
)

ROOT_PLUS = (1.0 + math.sqrt(17.0)) / 2.0
ROOT_MINUS = (1.0 - math.sqrt(17.0)) / 2.0


def test_two_level_critical_coupling(diode_rates):
    """At resonance with γ_a = Γ_R − Γ_L the forward photon is fully absorbed."""
    result = amplitudes_two_level(diode_rates, 0.0)
    assert result.T_R == pytest.approx(0.0, abs=1e-15)
    assert result.T_L == pytest.approx(0.81)
    assert result.R == pytest.approx(0.1)
    assert result.delta_T == pytest.approx(0.81)
    assert result.loss_R == pytest.approx(0.9)
    assert result.loss_L == pytest.approx(0.09)


def test_two_level_symmetric_coupling_reflects_fully():
    result = amplitudes_two_level(CouplingRates(gamma_R=0.5, gamma_L=0.5), 0.0)
    assert result.t_R == 0
    assert result.t_L == 0
    assert result.R == pytest.approx(1.0)
    assert result.delta_T == 0.0


@pytest.mark.parametrize("gamma_a", [0.0, 0.4, 3.0])
@pytest.mark.parametrize("delta_k", [-2.5, 0.0, 0.3])
def test_decoupled_direction_passes_untouched(gamma_a, delta_k):
    """With Γ_L = 0 a photon from the right never meets the emitter."""
    result = amplitudes_two_level(CouplingRates(gamma_L=0.0, gamma_a=gamma_a), delta_k)
    assert result.t_L == pytest.approx(1.0, abs=1e-15)
    assert result.r == 0
    assert result.loss_L == pytest.approx(0.0, abs=1e-15)


def test_detuning_wrapper_matches_plain_number(diode_rates):
    assert amplitudes_two_level(diode_rates, Detuning(delta_k=0.7)) == amplitudes_two_level(
        diode_rates, 0.7
    )


def test_non_finite_detuning_is_rejected(diode_rates):
    with pytest.raises(ValueError):
        amplitudes_two_level(diode_rates, float("nan"))


def test_probabilities_are_conserved_over_random_parameters():
    """T + R + loss = 1 in both directions; no loss without γ_a or γ_c."""
    rng = np.random.default_rng(7)
    for _ in range(300):
        gamma_L, gamma_a, gamma_c = rng.uniform(0.0, 1.0), rng.uniform(0.0, 2.0), rng.uniform(0, 1)
        rates = CouplingRates(gamma_L=gamma_L, gamma_a=gamma_a, gamma_c=gamma_c)
        drive = LaserDrive(omega_rabi=rng.uniform(0.0, 4.0), delta_laser=rng.uniform(-5.0, 5.0))
        delta_k = rng.uniform(-6.0, 6.0)
        result = amplitudes_lambda(rates, drive, delta_k)
        for value in result.probabilities():
            assert 0.0 <= value <= 1.0
        assert result.T_R + result.R + result.loss_R == pytest.approx(1.0, abs=1e-12)
        assert result.T_L + result.R + result.loss_L == pytest.approx(1.0, abs=1e-12)

        lossless = amplitudes_lambda(CouplingRates(gamma_L=gamma_L), drive, delta_k)
        assert lossless.loss_R == pytest.approx(0.0, abs=1e-12)
        assert lossless.loss_L == pytest.approx(0.0, abs=1e-12)


def test_lossless_scattering_is_conserved_and_reciprocal():
    """Without γ_a or γ_c: T + R = 1 and T_R = T_L, for both emitters and any chirality."""
    rng = np.random.default_rng(17)
    for _ in range(10_000):
        rates = CouplingRates(gamma_L=rng.uniform(0.0, 3.0))
        drive = LaserDrive(omega_rabi=rng.uniform(0.0, 4.0), delta_laser=rng.uniform(-5.0, 5.0))
        delta_k = rng.uniform(-6.0, 6.0)
        for result in (
            amplitudes_two_level(rates, delta_k),
            amplitudes_lambda(rates, drive, delta_k),
        ):
            assert result.T_R + result.R == pytest.approx(1.0, abs=1e-12)
            assert result.T_L + result.R == pytest.approx(1.0, abs=1e-12)
            assert result.T_R == pytest.approx(result.T_L, abs=1e-12)


def test_undriven_lambda_sweep_matches_two_level(diode_rates):
    grid = np.linspace(-5.0, 5.0, 1000)
    undriven = evaluate_grid(Lambda(rates=diode_rates, drive=LaserDrive(delta_laser=0.7)), grid)
    two_level = evaluate_grid(TwoLevel(rates=diode_rates), grid)
    for name in ("t_R", "t_L", "r", "T_R", "T_L", "R", "loss_R", "loss_L"):
        assert np.allclose(getattr(undriven, name), getattr(two_level, name), rtol=0.0, atol=1e-12)


@pytest.mark.parametrize("delta_k", [-3.0, -0.2, 0.0, 1.0, 2.5])
def test_undriven_lambda_is_two_level(diode_rates, delta_k):
    driven_off = LaserDrive(omega_rabi=0.0, delta_laser=1.0)
    assert amplitudes_lambda(diode_rates, driven_off, delta_k) == amplitudes_two_level(
        diode_rates, delta_k
    )


@pytest.mark.parametrize("omega", [0.3, 2.0, 5.0])
def test_eit_point_transmits_both_directions(diode_rates, omega):
    """Δ_k = 0 makes the emitter transparent whatever the chirality or loss."""
    drive = LaserDrive(omega_rabi=omega, delta_laser=1.0)
    result = amplitudes_lambda(diode_rates, drive, 1.0)
    assert result.t_R == pytest.approx(1.0, abs=1e-15)
    assert result.t_L == pytest.approx(1.0, abs=1e-15)
    assert result.r == 0
    assert result.delta_T == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("root", [ROOT_PLUS, ROOT_MINUS])
def test_dressed_resonances_block_the_forward_photon(dressed_lambda, root):
    result = evaluate(dressed_lambda, root)
    assert result.T_R == pytest.approx(0.0, abs=1e-12)
    assert result.T_L == pytest.approx(0.81, abs=1e-12)
    assert result.R == pytest.approx(0.1, abs=1e-12)
    assert delta_T_closed_form(dressed_lambda, root) == pytest.approx(0.81, abs=EQUALITY_EPS)


def test_metastable_loss_only_adds_loss():
    """γ_c moves the EIT window off unit transmission but keeps probabilities bounded."""
    rates = CouplingRates(gamma_L=0.3, gamma_a=0.5, gamma_c=0.05)
    drive = LaserDrive(omega_rabi=1.5, delta_laser=-0.8)
    at_eit = amplitudes_lambda(rates, drive, -0.8)
    assert at_eit.T_R < 1.0
    assert at_eit.loss_R > 0.0
    result = amplitudes_lambda(rates, drive, 1.2)
    assert result.T_R + result.R + result.loss_R == pytest.approx(1.0)


def test_mirrored_rates_report_physical_orientation(diode_rates):
    """Coupling mostly to the left blocks the photon injected from the right instead."""
    mirrored = CouplingRates(gamma_R=0.1, gamma_L=1.0, gamma_a=0.9)
    forward = amplitudes_two_level(diode_rates, 0.4)
    backward = amplitudes_two_level(mirrored, 0.4)
    assert backward.T_R == forward.T_L
    assert backward.T_L == forward.T_R
    assert backward.R == forward.R
    assert backward.loss_R == forward.loss_L


def test_closed_form_matches_amplitudes_two_level():
    rates = CouplingRates(gamma_L=0.4, gamma_a=0.3)
    spec = TwoLevel(rates=rates)
    for delta_k in np.linspace(-4.0, 4.0, 41):
        expected = amplitudes_two_level(rates, delta_k).delta_T
        assert delta_T_closed_form(spec, delta_k) == pytest.approx(expected, abs=EQUALITY_EPS)


def test_closed_form_matches_amplitudes_lambda(dressed_lambda):
    for delta_k in np.linspace(-4.0, 4.0, 40):
        expected = evaluate(dressed_lambda, delta_k).delta_T
        assert delta_T_closed_form(dressed_lambda, delta_k) == pytest.approx(
            expected, abs=EQUALITY_EPS
        )


def test_closed_form_vanishes_for_symmetric_coupling():
    spec = TwoLevel(rates=CouplingRates(gamma_R=1.0, gamma_L=1.0, gamma_a=0.5))
    for delta_k in (-2.0, 0.0, 1.5):
        assert delta_T_closed_form(spec, delta_k) == 0.0


def test_closed_form_not_applicable(diode_rates):
    eit = Lambda(rates=diode_rates, drive=LaserDrive(omega_rabi=2.0, delta_laser=1.0))
    with pytest.raises(NotApplicable):
        delta_T_closed_form(eit, 1.0)
    lossy = Lambda(
        rates=CouplingRates(gamma_L=0.1, gamma_a=0.9, gamma_c=0.01),
        drive=LaserDrive(omega_rabi=2.0, delta_laser=1.0),
    )
    with pytest.raises(NotApplicable):
        delta_T_closed_form(lossy, 0.5)
    undriven = Lambda(rates=diode_rates, drive=LaserDrive(omega_rabi=0.0, delta_laser=1.0))
    assert delta_T_closed_form(undriven, 1.0) == pytest.approx(
        amplitudes_two_level(diode_rates, 1.0).delta_T
    )


@pytest.mark.parametrize(
    ("rates", "expected"),
    [
        (CouplingRates(gamma_R=1.0, gamma_L=1.0), 1.0),
        (CouplingRates(gamma_L=0.0), 0.0),
        (CouplingRates(gamma_L=0.1), 0.4 / 1.21),
    ],
)
def test_max_reflection(rates, expected):
    assert max_reflection(rates) == pytest.approx(expected)
    grid = np.linspace(-4.0, 4.0, 8001)
    reflection = evaluate_grid(TwoLevel(rates=rates), grid).R
    assert reflection.max() == pytest.approx(expected, abs=1e-12)


def test_contrast_peak_and_decay_match(diode_rates):
    assert diode_contrast_peak(diode_rates) == pytest.approx(0.81)
    required, gap = decay_match(diode_rates)
    assert required == pytest.approx(0.9)
    assert gap == pytest.approx(0.0, abs=1e-15)
    _, gap = decay_match(CouplingRates(gamma_L=0.1, gamma_a=0.5))
    assert gap == pytest.approx(0.4)


def test_spectrum_empty_and_singleton(dressed_lambda):
    assert spectrum(dressed_lambda, []) == []
    ((delta_k, result),) = spectrum(dressed_lambda, [0.7])
    assert delta_k == 0.7
    assert result == evaluate(dressed_lambda, 0.7)


@pytest.mark.parametrize("gamma_L", [0.1, 0.3, 0.5, 1.0])
def test_lossless_reflection_is_lorentzian_at_resonance(gamma_L):
    rates = CouplingRates(gamma_L=gamma_L)
    grid = np.linspace(-4.0, 4.0, 801)
    rows = spectrum(TwoLevel(rates=rates), grid)
    reflection = np.array([result.R for _, result in rows])
    peak = int(np.argmax(reflection))
    assert rows[peak][0] == pytest.approx(0.0, abs=1e-12)
    assert reflection[peak] == pytest.approx(max_reflection(rates), abs=1e-9)
    assert np.allclose(reflection, reflection[::-1], atol=1e-12)


@pytest.mark.parametrize(
    "grid",
    [[0.0, 0.0], [1.0, 0.5], [0.0, float("nan")], [[0.0, 1.0]]],
)
def test_evaluate_grid_rejects_bad_grids(diode_two_level, grid):
    with pytest.raises(GridError):
        evaluate_grid(diode_two_level, grid)


def test_evaluate_grid_matches_spectrum(dressed_lambda):
    grid = np.linspace(-3.0, 3.0, 7)
    amplitudes = evaluate_grid(dressed_lambda, grid)
    assert len(amplitudes) == 7
    assert amplitudes.results() == [result for _, result in spectrum(dressed_lambda, grid)]


def test_clamp_absorbs_rounding_and_rejects_violations():
    delta_k = np.array([0.0, 1.0, 2.0])
    clamped = _clamp(np.array([-1e-13, 0.5, 1.0 + 1e-13]), "T_R", delta_k)
    assert clamped.tolist() == [0.0, 0.5, 1.0]
    with pytest.raises(ConsistencyError) as excinfo:
        _clamp(np.array([0.2, 1.1, 0.3]), "R", delta_k)
    assert excinfo.value.grid_index == 1
    assert "delta_k=1.0" in str(excinfo.value)


def test_degenerate_denominator_message():
    exc = DegenerateDenominator(0.5, 1e-16)
    assert exc.delta_k == 0.5
    assert "delta_k=0.5" in str(exc)


@pytest.mark.parametrize("delta_k", [3.0, -3.0])
def test_laser_map_follows_blocking_locus(diode_rates, delta_k):
    """T_R vanishes along Ω² = δ_k(δ_k − Δ)."""
    deltas = np.linspace(-6.0, 6.0, 101)
    omegas = np.linspace(0.0, 6.0, 101)
    result = laser_map(diode_rates, delta_k, deltas, omegas)
    assert len(result.amplitudes) == 101 * 101
    assert result.delta_laser[:3].tolist() == [-6.0, -6.0, -6.0]
    assert result.omega[:2].tolist() == [0.0, 0.06]

    T_R = result.amplitudes.T_R.reshape(101, 101)
    assert T_R.min() <= 1e-10
    assert T_R[50, 50] <= 1e-10

    step = omegas[1] - omegas[0]
    for row, delta_laser in enumerate(deltas):
        omega_sq = delta_k * (delta_k - delta_laser)
        if omega_sq < 1.5 or omega_sq > 35.0:
            continue
        locus = math.sqrt(omega_sq)
        assert abs(omegas[int(np.argmin(T_R[row]))] - locus) <= 2 * step


def test_laser_map_undriven_column_is_two_level(diode_rates):
    result = laser_map(diode_rates, 0.5, [-1.0, 2.0], [0.0, 1.0])
    undriven = amplitudes_two_level(diode_rates, 0.5)
    assert result.amplitudes.result(0) == undriven
    assert result.amplitudes.result(2) == undriven


def test_laser_map_rejects_negative_rabi_frequency(diode_rates):
    with pytest.raises(ValueError):
        laser_map(diode_rates, 1.0, [0.0, 1.0], [-1.0, 1.0])


def test_laser_map_limits_the_number_of_points(diode_rates):
    axis = np.linspace(0.0, 6.0, 1001)
    with pytest.raises(GridError, match="1001x1001"):
        laser_map(diode_rates, 3.0, axis, axis)
