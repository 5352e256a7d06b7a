"""Closed-form single-photon scattering amplitudes.

The amplitudes are evaluated by vectorized numpy kernels; the scalar operations
run the same kernels on one-element arrays, so a scalar evaluation and the
matching point of a batch evaluation are computed by identical operations.

Amplitudes are always computed with the oriented rates (Γ_R >= Γ_L) and then
reported for the physical orientation: when the rates were mirrored the
transmission amplitudes are swapped back.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from chiral_diode.errors import (
    ConsistencyError,
    DegenerateDenominator,
    GridError,
    NotApplicable,
)
from chiral_diode.models import (
    CouplingRates,
    Detuning,
    EmitterSpec,
    Lambda,
    LaserDrive,
    TwoLevel,
    chirality,
    detuning_value,
)
from chiral_diode.utils import MAX_GRID_POINTS, as_grid

logger = logging.getLogger(__name__)

DEGENERATE_EPS = 1e-14
"""Denominators below this magnitude (units of Γ_R) are treated as zero."""

EQUALITY_EPS = 1e-10
"""Agreement required between the closed-form ΔT and the amplitude path."""

PROBABILITY_SLACK = 1e-12
"""Probabilities this far outside [0, 1] are clamped; further out is an error."""


@dataclass(frozen=True, slots=True)
class ScatteringResult:
    """Scattering amplitudes and probabilities at one photon detuning.

    Attributes:
        t_R (complex): Transmission amplitude of a photon injected from the left.
        t_L (complex): Transmission amplitude of a photon injected from the right.
        r (complex): Reflection amplitude, shared by both directions.
        T_R (float): |t_R|².
        T_L (float): |t_L|².
        R (float): |r|².
        delta_T (float): Diode contrast |T_R − T_L|.
        loss_R (float): 1 − T_R − R.
        loss_L (float): 1 − T_L − R.
    """

    t_R: complex
    t_L: complex
    r: complex
    T_R: float
    T_L: float
    R: float
    delta_T: float
    loss_R: float
    loss_L: float

    def probabilities(self) -> tuple[float, float, float, float, float, float]:
        """The real-valued columns in table order."""
        return (self.T_R, self.T_L, self.R, self.delta_T, self.loss_R, self.loss_L)


@dataclass(frozen=True)
class AmplitudeGrid:
    """Elementwise scattering results over a batch of photon detunings."""

    delta_k: np.ndarray
    t_R: np.ndarray
    t_L: np.ndarray
    r: np.ndarray
    T_R: np.ndarray
    T_L: np.ndarray
    R: np.ndarray
    delta_T: np.ndarray
    loss_R: np.ndarray
    loss_L: np.ndarray

    def __len__(self) -> int:
        return int(self.delta_k.size)

    def result(self, index: int) -> ScatteringResult:
        """Extracts the scalar result at ``index``."""
        return ScatteringResult(
            t_R=complex(self.t_R[index]),
            t_L=complex(self.t_L[index]),
            r=complex(self.r[index]),
            T_R=float(self.T_R[index]),
            T_L=float(self.T_L[index]),
            R=float(self.R[index]),
            delta_T=float(self.delta_T[index]),
            loss_R=float(self.loss_R[index]),
            loss_L=float(self.loss_L[index]),
        )

    def results(self) -> list[ScatteringResult]:
        return [self.result(i) for i in range(len(self))]


@dataclass(frozen=True)
class LaserMap:
    """Scattering results over a (Δ, Ω) grid at a fixed photon detuning.

    Points are flattened row-major: Δ is the outer index, Ω the inner one.
    """

    delta_k: float
    delta_laser: np.ndarray
    omega: np.ndarray
    amplitudes: AmplitudeGrid


def _first_bad(mask: np.ndarray) -> int | None:
    bad = np.flatnonzero(mask)
    return int(bad[0]) if bad.size else None


def _raise_at(exc: Exception, index: int) -> None:
    exc.grid_index = index
    raise exc


def _two_level_kernel(
    rates: CouplingRates, delta_k: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    base = delta_k - 0.5j * rates.gamma_a
    denom = base - 0.5j * (rates.gamma_R + rates.gamma_L)
    contrast = 0.5j * (rates.gamma_R - rates.gamma_L)
    t_R = (base + contrast) / denom
    t_L = (base - contrast) / denom
    r = 1j * math.sqrt(rates.gamma_R * rates.gamma_L) / denom
    return t_R, t_L, r


def _lambda_kernel(
    rates: CouplingRates,
    omega: np.ndarray,
    delta_laser: np.ndarray,
    delta_k: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Ω = 0 is a removable 0/0 at Δ_k = 0; those points take the two-level values.
    shape = np.broadcast(omega, delta_laser, delta_k).shape
    two_level = _two_level_kernel(rates, np.broadcast_to(delta_k, shape))
    cap = (delta_laser - delta_k) + 0.5j * rates.gamma_c
    base = delta_k - 0.5j * rates.gamma_a
    contrast = 0.5j * (rates.gamma_R - rates.gamma_L)
    omega_sq = omega * omega
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = cap * (base - 0.5j * (rates.gamma_R + rates.gamma_L)) + omega_sq
        dressed = omega != 0.0
        magnitude = np.abs(denom)
        index = _first_bad(np.broadcast_to(dressed & (magnitude < DEGENERATE_EPS), shape))
        if index is not None:
            point = float(np.broadcast_to(delta_k, shape).flat[index])
            _raise_at(DegenerateDenominator(point, float(magnitude.flat[index])), index)
        t_R = (cap * (base + contrast) + omega_sq) / denom
        t_L = (cap * (base - contrast) + omega_sq) / denom
        r = 1j * math.sqrt(rates.gamma_R * rates.gamma_L) * cap / denom
    return (
        np.where(dressed, t_R, two_level[0]),
        np.where(dressed, t_L, two_level[1]),
        np.where(dressed, r, two_level[2]),
    )


def _clamp(values: np.ndarray, name: str, delta_k: np.ndarray) -> np.ndarray:
    outside = (values < -PROBABILITY_SLACK) | (values > 1.0 + PROBABILITY_SLACK)
    index = _first_bad(outside | ~np.isfinite(values))
    if index is not None:
        _raise_at(
            ConsistencyError(
                f"{name}={float(values.flat[index])!r} outside [0, 1] at "
                f"delta_k={float(delta_k.flat[index])!r}."
            ),
            index,
        )
    return np.clip(values, 0.0, 1.0)


def _assemble(
    rates: CouplingRates,
    delta_k: np.ndarray,
    t_R: np.ndarray,
    t_L: np.ndarray,
    r: np.ndarray,
) -> AmplitudeGrid:
    if rates.mirrored:
        t_R, t_L = t_L, t_R
    T_R = _clamp(t_R.real**2 + t_R.imag**2, "T_R", delta_k)
    T_L = _clamp(t_L.real**2 + t_L.imag**2, "T_L", delta_k)
    R = _clamp(r.real**2 + r.imag**2, "R", delta_k)
    return AmplitudeGrid(
        delta_k=delta_k,
        t_R=t_R,
        t_L=t_L,
        r=r,
        T_R=T_R,
        T_L=T_L,
        R=R,
        delta_T=np.abs(T_R - T_L),
        loss_R=_clamp(1.0 - T_R - R, "loss_R", delta_k),
        loss_L=_clamp(1.0 - T_L - R, "loss_L", delta_k),
    )


def _two_level_grid(rates: CouplingRates, delta_k: np.ndarray) -> AmplitudeGrid:
    return _assemble(rates, delta_k, *_two_level_kernel(rates, delta_k))


def _lambda_grid(rates: CouplingRates, drive: LaserDrive, delta_k: np.ndarray) -> AmplitudeGrid:
    if drive.omega_rabi == 0.0:
        return _two_level_grid(rates, delta_k)
    omega = np.full(delta_k.shape, drive.omega_rabi)
    delta_laser = np.full(delta_k.shape, drive.delta_laser)
    return _assemble(rates, delta_k, *_lambda_kernel(rates, omega, delta_laser, delta_k))


def _point(delta_k: Detuning | float) -> np.ndarray:
    value = detuning_value(delta_k)
    if not math.isfinite(value):
        raise ValueError(f"delta_k must be finite, got {value!r}.")
    return np.array([value], dtype=float)


def amplitudes_two_level(rates: CouplingRates, delta_k: Detuning | float) -> ScatteringResult:
    """Scattering by a two-level emitter (laser off).

    Args:
        rates (CouplingRates): Coupling and loss rates.
        delta_k (Detuning | float): Photon detuning δ_k.

    Returns:
        ScatteringResult: Amplitudes and probabilities at ``delta_k``.
    """
    return _two_level_grid(rates, _point(delta_k)).result(0)


def amplitudes_lambda(
    rates: CouplingRates, drive: LaserDrive, delta_k: Detuning | float
) -> ScatteringResult:
    """Scattering by a laser-dressed Λ emitter.

    The metastable-state loss enters through Δ_k → Δ_k + iγ_c/2 in every
    occurrence. With Ω = 0 the two-level formulas are used directly.

    Args:
        rates (CouplingRates): Coupling and loss rates.
        drive (LaserDrive): Rabi frequency and laser detuning.
        delta_k (Detuning | float): Photon detuning δ_k.

    Returns:
        ScatteringResult: Amplitudes and probabilities at ``delta_k``.

    Raises:
        DegenerateDenominator: If the denominator vanishes numerically.
    """
    return _lambda_grid(rates, drive, _point(delta_k)).result(0)


def evaluate(spec: EmitterSpec, delta_k: Detuning | float) -> ScatteringResult:
    """Dispatches to the amplitude operation matching the emitter variant."""
    if isinstance(spec, Lambda):
        return amplitudes_lambda(spec.rates, spec.drive, delta_k)
    return amplitudes_two_level(spec.rates, delta_k)


def evaluate_grid(spec: EmitterSpec, delta_k: np.ndarray | list[float]) -> AmplitudeGrid:
    """Evaluates an emitter over a strictly increasing detuning grid.

    Raises:
        GridError: If the grid is not finite and strictly increasing.
        ChiralDiodeError: Elementwise failures, with ``grid_index`` set and a note
            naming the offending detuning.
    """
    grid = as_grid(delta_k, name="delta_k")
    try:
        if isinstance(spec, Lambda):
            amplitudes = _lambda_grid(spec.rates, spec.drive, grid)
        else:
            amplitudes = _two_level_grid(spec.rates, grid)
    except (ConsistencyError, DegenerateDenominator) as exc:
        exc.add_note(f"grid index {exc.grid_index}, delta_k={float(grid[exc.grid_index])!r}")
        raise
    logger.debug("Evaluated %d detunings for a %s emitter", grid.size, spec.kind)
    return amplitudes


def spectrum(
    spec: EmitterSpec, grid: np.ndarray | list[float]
) -> list[tuple[float, ScatteringResult]]:
    """Scattering results at every detuning of ``grid``, in grid order."""
    amplitudes = evaluate_grid(spec, grid)
    return [(float(amplitudes.delta_k[i]), amplitudes.result(i)) for i in range(len(amplitudes))]


def laser_map(
    rates: CouplingRates,
    delta_k: float,
    delta_laser_grid: np.ndarray | list[float],
    omega_grid: np.ndarray | list[float],
) -> LaserMap:
    """Evaluates a Λ emitter over a (Δ, Ω) grid at fixed photon detuning.

    Args:
        rates (CouplingRates): Coupling and loss rates.
        delta_k (float): Photon detuning held fixed across the map.
        delta_laser_grid: Strictly increasing laser detunings Δ.
        omega_grid: Strictly increasing, non-negative Rabi frequencies Ω.

    Returns:
        LaserMap: Results flattened with Δ as the outer index.

    Raises:
        GridError: If a grid is not strictly increasing or the map would hold more
            than ``MAX_GRID_POINTS`` points.
        ValueError: If a Rabi frequency is negative.
    """
    deltas = as_grid(delta_laser_grid, name="delta_laser")
    omegas = as_grid(omega_grid, name="omega")
    if omegas.size and omegas[0] < 0.0:
        raise ValueError("Rabi frequencies must be non-negative.")
    if deltas.size * omegas.size > MAX_GRID_POINTS:
        raise GridError(
            f"laser map has {deltas.size}x{omegas.size} points; "
            f"at most {MAX_GRID_POINTS} are allowed."
        )
    delta_mesh, omega_mesh = np.meshgrid(deltas, omegas, indexing="ij")
    delta_flat = delta_mesh.ravel()
    omega_flat = omega_mesh.ravel()
    points = np.full(delta_flat.shape, float(delta_k))
    try:
        amplitudes = _assemble(
            rates, points, *_lambda_kernel(rates, omega_flat, delta_flat, points)
        )
    except (ConsistencyError, DegenerateDenominator) as exc:
        index = exc.grid_index
        delta_laser, omega = float(delta_flat[index]), float(omega_flat[index])
        exc.add_note(f"grid index {index}, Delta={delta_laser!r}, Omega={omega!r}")
        raise
    logger.debug("Evaluated a %dx%d laser map at delta_k=%g", deltas.size, omegas.size, delta_k)
    return LaserMap(
        delta_k=float(delta_k), delta_laser=delta_flat, omega=omega_flat, amplitudes=amplitudes
    )


def delta_T_closed_form(spec: EmitterSpec, delta_k: Detuning | float) -> float:
    """Closed-form diode contrast ΔT = |T_R − T_L|.

    Two-level: γ_a(Γ_R − Γ_L) / (δ_k² + ((γ_a + Γ_R + Γ_L)/2)²). For a dressed Λ
    emitter δ_k² is replaced by (Δ_kδ_k + Ω²)²/Δ_k². A Λ emitter with Ω = 0 uses
    the two-level form.

    Raises:
        NotApplicable: For a dressed Λ emitter at Δ_k = 0 or with γ_c != 0.
    """
    rates = spec.rates
    point = detuning_value(delta_k)
    if isinstance(spec, Lambda) and spec.drive.omega_rabi != 0.0:
        if rates.gamma_c != 0.0:
            raise NotApplicable("The closed-form contrast is stated for gamma_c = 0 only.")
        cap = spec.drive.delta_laser - point
        if cap == 0.0:
            raise NotApplicable(
                "The closed-form contrast is singular at Delta_k = 0 (EIT point, contrast 0)."
            )
        detuning_term = (cap * point + spec.drive.omega_rabi**2) ** 2 / cap**2
    else:
        detuning_term = point * point
    half_width = rates.total_width / 2.0
    return rates.gamma_a * (rates.gamma_R - rates.gamma_L) / (detuning_term + half_width**2)


def max_reflection(rates: CouplingRates) -> float:
    """Resonant reflection maximum 1 − C² = 4Γ_RΓ_L/(Γ_R + Γ_L)² at γ_a = 0."""
    total = rates.gamma_R + rates.gamma_L
    value = 4.0 * rates.gamma_R * rates.gamma_L / (total * total)
    logger.debug("max_reflection: C=%g, 1-C^2=%g", chirality(rates), value)
    return value


def diode_contrast_peak(rates: CouplingRates) -> float:
    """Two-level contrast at resonance, γ_a(Γ_R − Γ_L)/((γ_a + Γ_R + Γ_L)/2)²."""
    return delta_T_closed_form(TwoLevel(rates=rates), 0.0)


def decay_match(rates: CouplingRates) -> tuple[float, float]:
    """Decay-match requirement for critical coupling.

    Returns:
        tuple[float, float]: The required loss γ_a = Γ_R − Γ_L and the absolute gap
        between it and the current γ_a.
    """
    required = rates.gamma_R - rates.gamma_L
    return required, abs(rates.gamma_a - required)
