"""Inverse design of the laser drive.

A photon at detuning δ_k is blocked (critical coupling) when it resonantly drives
one of the dressed transitions, δ_k² − Δδ_k − Ω² = 0, and the loss matches
γ_a = Γ_R − Γ_L. It is passed (EIT) when Δ = δ_k. The tuner solves these
relations for the laser parameters; it cannot change γ_a, so a missing decay
match is reported rather than corrected.
"""

from dataclasses import dataclass
from enum import StrEnum
import logging
import math
from typing import ClassVar

from chiral_diode.models import CouplingRates, LaserDrive
from chiral_diode.scattering import ScatteringResult, amplitudes_lambda, decay_match

logger = logging.getLogger(__name__)

DECAY_MATCH_TOLERANCE = 1e-9
SWITCH_OMEGA_RATIO = math.sqrt(2.0 / 3.0)
"""Shared switch Rabi frequency in units of |δ_k|; puts the blocking Δ at δ_k/3."""


class TuneMode(StrEnum):
    BLOCK = "block"
    PASS = "pass"


@dataclass(frozen=True)
class TuneTarget:
    """A photon detuning and the transport wanted there."""

    delta_k_target: float
    mode: TuneMode

    def __post_init__(self):
        if not math.isfinite(self.delta_k_target):
            raise ValueError(f"delta_k_target must be finite, got {self.delta_k_target!r}.")


@dataclass(frozen=True)
class Feasible:
    label: ClassVar[str] = "feasible"


@dataclass(frozen=True)
class RequiresDecayMatch:
    """The drive is right but γ_a misses Γ_R − Γ_L by ``gap``."""

    gap: float
    label: ClassVar[str] = "requires-decay-match"


@dataclass(frozen=True)
class Infeasible:
    reason: str
    label: ClassVar[str] = "infeasible"


@dataclass(frozen=True)
class DegenerateTarget:
    """δ_k = 0 blocking target: only Ω = 0 solves the relation (two-level diode)."""

    gap: float
    label: ClassVar[str] = "degenerate-target"


Feasibility = Feasible | RequiresDecayMatch | Infeasible | DegenerateTarget


@dataclass(frozen=True)
class TunePlan:
    """Laser settings for a target detuning and their predicted outcome.

    Attributes:
        mode (TuneMode): Block or pass.
        delta_k (float): Target photon detuning.
        rates (CouplingRates): Rates the prediction was made with.
        drive (LaserDrive | None): Proposed drive; None when infeasible.
        required_gamma_a (float | None): Loss needed for critical coupling (block
            mode only).
        predicted (ScatteringResult | None): Scattering at the target with the
            proposed drive.
        feasibility (Feasibility): Outcome classification.
    """

    mode: TuneMode
    delta_k: float
    rates: CouplingRates
    drive: LaserDrive | None
    required_gamma_a: float | None
    predicted: ScatteringResult | None
    feasibility: Feasibility

    @property
    def is_usable(self) -> bool:
        """True unless the plan is infeasible or degenerate."""
        return isinstance(self.feasibility, Feasible | RequiresDecayMatch)

    @property
    def blocked_direction(self) -> str | None:
        """Injection side whose transmission vanishes, for block plans."""
        if self.mode is not TuneMode.BLOCK:
            return None
        return "right" if self.rates.mirrored else "left"


@dataclass(frozen=True)
class DressedStates:
    """Dressed-state structure of the laser-driven emitter.

    Attributes:
        freq_plus (float): Offset −(Δ − √(Δ² + 4Ω²))/2 of |+> from ω_a.
        freq_minus (float): Offset −(Δ + √(Δ² + 4Ω²))/2 of |−> from ω_a.
        root_plus (float): Larger photon detuning resonant with a dressed transition.
        root_minus (float): Smaller one.
    """

    freq_plus: float
    freq_minus: float
    root_plus: float
    root_minus: float

    @property
    def resonant_detunings(self) -> tuple[float, float]:
        return (self.root_plus, self.root_minus)


def dressed_states(drive: LaserDrive) -> DressedStates:
    """Roots of δ² − Δδ − Ω² = 0 and the matching dressed-state offsets.

    The root of larger magnitude is computed directly and the other through the
    product of the roots (−Ω²), which avoids cancellation.
    """
    delta, omega = drive.delta_laser, drive.omega_rabi
    split = math.hypot(delta, 2.0 * omega)
    if delta >= 0.0:
        root_plus = (delta + split) / 2.0
        root_minus = -(omega * omega) / root_plus if root_plus != 0.0 else 0.0
    else:
        root_minus = (delta - split) / 2.0
        root_plus = -(omega * omega) / root_minus
    return DressedStates(
        freq_plus=-(delta - split) / 2.0,
        freq_minus=-(delta + split) / 2.0,
        root_plus=root_plus,
        root_minus=root_minus,
    )


def _finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}.")
    return value


def _infeasible(delta_k: float, rates: CouplingRates, reason: str) -> TunePlan:
    logger.info("Block target delta_k=%g infeasible: %s", delta_k, reason)
    return TunePlan(
        mode=TuneMode.BLOCK,
        delta_k=delta_k,
        rates=rates,
        drive=None,
        required_gamma_a=None,
        predicted=None,
        feasibility=Infeasible(reason),
    )


def tune_block(
    target_delta_k: float,
    rates: CouplingRates,
    omega_choice: float | None = None,
    *,
    delta_laser_choice: float | None = None,
) -> TunePlan:
    """Laser settings that block the photon at ``target_delta_k``.

    Solves Ω² = δ_k(δ_k − Δ). With ``omega_choice`` the detuning follows as
    Δ = δ_k − Ω²/δ_k; with ``delta_laser_choice`` the Rabi frequency follows as
    Ω = √(δ_k(δ_k − Δ)); with neither the canonical Δ = 0, Ω = |δ_k| is used.

    Args:
        target_delta_k (float): Photon detuning to block.
        rates (CouplingRates): Emitter rates, γ_a included.
        omega_choice (float | None, optional): Rabi frequency to pin.
        delta_laser_choice (float | None, optional): Laser detuning to pin.

    Returns:
        TunePlan: Feasible, RequiresDecayMatch (γ_a off the match by more than
        1e-9), Infeasible (symmetric coupling, or no real positive Ω) or
        DegenerateTarget (δ_k = 0, two-level fallback with Ω = 0).
    """
    delta_k = _finite(target_delta_k, "target_delta_k")
    if omega_choice is not None and delta_laser_choice is not None:
        raise ValueError("Pin either the Rabi frequency or the laser detuning, not both.")
    if rates.gamma_R == rates.gamma_L:
        return _infeasible(
            delta_k, rates, "symmetric coupling (C = 0): nonreciprocity can not be achieved"
        )
    required, gap = decay_match(rates)

    if delta_k == 0.0:
        drive = LaserDrive(omega_rabi=0.0, delta_laser=0.0)
        logger.info("Block target delta_k=0 degenerates to the two-level resonant diode")
        return TunePlan(
            mode=TuneMode.BLOCK,
            delta_k=delta_k,
            rates=rates,
            drive=drive,
            required_gamma_a=required,
            predicted=amplitudes_lambda(rates, drive, delta_k),
            feasibility=DegenerateTarget(gap),
        )

    if delta_laser_choice is not None:
        delta_laser = _finite(delta_laser_choice, "delta_laser_choice")
        omega_sq = delta_k * (delta_k - delta_laser)
        if not omega_sq > 0.0:
            return _infeasible(delta_k, rates, "no real Rabi frequency")
        drive = LaserDrive(omega_rabi=math.sqrt(omega_sq), delta_laser=delta_laser)
    elif omega_choice is not None:
        omega = _finite(omega_choice, "omega_choice")
        if not omega > 0.0:
            return _infeasible(delta_k, rates, "no real Rabi frequency")
        drive = LaserDrive(omega_rabi=omega, delta_laser=delta_k - omega * omega / delta_k)
    else:
        drive = LaserDrive(omega_rabi=abs(delta_k), delta_laser=0.0)

    feasibility = Feasible() if gap <= DECAY_MATCH_TOLERANCE else RequiresDecayMatch(gap)
    logger.debug(
        "Block plan delta_k=%g: Omega=%g Delta=%g (%s)",
        delta_k,
        drive.omega_rabi,
        drive.delta_laser,
        feasibility.label,
    )
    return TunePlan(
        mode=TuneMode.BLOCK,
        delta_k=delta_k,
        rates=rates,
        drive=drive,
        required_gamma_a=required,
        predicted=amplitudes_lambda(rates, drive, delta_k),
        feasibility=feasibility,
    )


def tune_pass(
    target_delta_k: float, omega_choice: float, rates: CouplingRates | None = None
) -> TunePlan:
    """Laser settings that pass the photon at ``target_delta_k`` by EIT (Δ = δ_k).

    Args:
        target_delta_k (float): Photon detuning to transmit.
        omega_choice (float): Rabi frequency, strictly positive.
        rates (CouplingRates | None, optional): Rates for the prediction; any rates
            give full transmission when γ_c = 0.

    Returns:
        TunePlan: Always feasible.
    """
    delta_k = _finite(target_delta_k, "target_delta_k")
    omega = _finite(omega_choice, "omega_choice")
    if not omega > 0.0:
        raise ValueError("EIT needs a positive Rabi frequency.")
    rates = rates if rates is not None else CouplingRates()
    drive = LaserDrive(omega_rabi=omega, delta_laser=delta_k)
    return TunePlan(
        mode=TuneMode.PASS,
        delta_k=delta_k,
        rates=rates,
        drive=drive,
        required_gamma_a=None,
        predicted=amplitudes_lambda(rates, drive, delta_k),
        feasibility=Feasible(),
    )


def switch_omega(target_delta_k: float) -> float:
    """Canonical Rabi frequency shared by the pass and block settings of a switch."""
    return SWITCH_OMEGA_RATIO * abs(target_delta_k) if target_delta_k != 0.0 else 1.0


def switch_plan(
    target_delta_k: float, rates: CouplingRates, omega_choice: float | None = None
) -> tuple[TunePlan, TunePlan]:
    """Pass and block settings for one photon detuning.

    Both settings share the Rabi frequency, so switching only retunes the laser
    detuning: Δ = δ_k passes, Δ = δ_k − Ω²/δ_k blocks.

    Returns:
        tuple[TunePlan, TunePlan]: ``(pass_plan, block_plan)``.
    """
    omega = omega_choice if omega_choice is not None else switch_omega(target_delta_k)
    return (
        tune_pass(target_delta_k, omega, rates),
        tune_block(target_delta_k, rates, omega),
    )


def plan(
    target: TuneTarget,
    rates: CouplingRates,
    omega_choice: float | None = None,
    *,
    delta_laser_choice: float | None = None,
) -> TunePlan:
    """Dispatches a ``TuneTarget`` to ``tune_block`` or ``tune_pass``."""
    if target.mode is TuneMode.BLOCK:
        return tune_block(
            target.delta_k_target, rates, omega_choice, delta_laser_choice=delta_laser_choice
        )
    omega = omega_choice if omega_choice is not None else switch_omega(target.delta_k_target)
    return tune_pass(target.delta_k_target, omega, rates)
