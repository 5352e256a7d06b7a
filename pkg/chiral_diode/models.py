"""Physical parameters of the waveguide-emitter system.

All rates and detunings are expressed in units of the dominant waveguide decay
rate Γ_R (ħ = 1, v_g = 1). Absolute level frequencies never appear: every
formula depends on the photon detuning δ_k = ω_ab − |k| and on the laser
detuning Δ = ω_ac − ω_L only.
"""

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Rate = Annotated[float, Field(ge=0.0, allow_inf_nan=False)]
"""A non-negative, finite rate."""

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
"""A finite detuning of either sign."""


class CouplingRates(BaseModel):
    """Decay and coupling rates of the emitter.

    The convention Γ_R >= Γ_L is enforced by mirroring: when the caller describes
    a stronger left-moving coupling the two rates are swapped and ``mirrored`` is
    set, so results can still be reported for the physical orientation.

    Attributes:
        gamma_R (float): Decay rate into the right-moving channel (after mirroring,
            the dominant channel).
        gamma_L (float): Decay rate into the left-moving channel.
        gamma_a (float): Loss of the excited state to non-waveguide channels.
        gamma_c (float): Loss of the metastable state |c>.
        mirrored (bool): True when the physical left and right couplings were
            swapped to satisfy Γ_R >= Γ_L.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_R: Annotated[float, Field(gt=0.0, allow_inf_nan=False)] = 1.0
    gamma_L: Rate = 0.0
    gamma_a: Rate = 0.0
    gamma_c: Rate = 0.0
    mirrored: bool = False

    @model_validator(mode="before")
    @classmethod
    def _orient(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        try:
            right = float(data.get("gamma_R", 1.0))
            left = float(data.get("gamma_L", 0.0))
        except (TypeError, ValueError):
            return data
        if left > right:
            data["gamma_R"], data["gamma_L"] = left, right
            data["mirrored"] = not data.get("mirrored", False)
        return data

    @classmethod
    def from_absolute(
        cls,
        gamma_R: float,
        gamma_L: float,
        gamma_a: float = 0.0,
        gamma_c: float = 0.0,
    ) -> tuple["CouplingRates", float]:
        """Builds rates in natural units from rates in arbitrary absolute units.

        Args:
            gamma_R (float): Physical right-moving decay rate.
            gamma_L (float): Physical left-moving decay rate.
            gamma_a (float, optional): Non-waveguide loss. Defaults to 0.
            gamma_c (float, optional): Metastable-state loss. Defaults to 0.

        Returns:
            tuple[CouplingRates, float]: The scaled rates and the scale that was
            divided out (the larger of the two waveguide rates). Detunings and Rabi
            frequencies must be divided by the same scale.
        """
        scale = max(gamma_R, gamma_L)
        if not scale > 0.0:
            raise ValueError("At least one waveguide decay rate must be positive.")
        rates = cls(
            gamma_R=gamma_R / scale,
            gamma_L=gamma_L / scale,
            gamma_a=gamma_a / scale,
            gamma_c=gamma_c / scale,
        )
        return rates, scale

    @property
    def physical_gamma_R(self) -> float:
        """Right-moving decay rate in the orientation the caller described."""
        return self.gamma_L if self.mirrored else self.gamma_R

    @property
    def physical_gamma_L(self) -> float:
        """Left-moving decay rate in the orientation the caller described."""
        return self.gamma_R if self.mirrored else self.gamma_L

    @property
    def total_width(self) -> float:
        """Total population decay rate γ_a + Γ_R + Γ_L of the excited state."""
        return self.gamma_a + self.gamma_R + self.gamma_L


class LaserDrive(BaseModel):
    """Classical laser driving the |a> <-> |c> transition.

    Attributes:
        omega_rabi (float): Rabi frequency Ω >= 0; its phase is absorbed into |c>.
        delta_laser (float): Laser detuning Δ = ω_ac − ω_L.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    omega_rabi: Rate = 0.0
    delta_laser: FiniteFloat = 0.0

    def scaled(self, scale: float) -> "LaserDrive":
        """Returns the drive with both frequencies divided by ``scale``."""
        return LaserDrive(omega_rabi=self.omega_rabi / scale, delta_laser=self.delta_laser / scale)


class TwoLevel(BaseModel):
    """A two-level emitter (laser off)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["two-level"] = "two-level"
    rates: CouplingRates = CouplingRates()


class Lambda(BaseModel):
    """A Λ-type three-level emitter dressed by a classical laser."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["lambda"] = "lambda"
    rates: CouplingRates = CouplingRates()
    drive: LaserDrive = LaserDrive()

    def as_two_level(self) -> TwoLevel:
        """The emitter seen by the photon when the laser is off."""
        return TwoLevel(rates=self.rates)


EmitterSpec = Annotated[TwoLevel | Lambda, Field(discriminator="kind")]
"""Either emitter variant, discriminated by ``kind``."""


class Detuning(BaseModel):
    """Photon detuning δ_k = ω_ab − |k| from the |b> <-> |a> transition."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta_k: FiniteFloat

    def cap(self, drive: LaserDrive) -> float:
        """Two-photon detuning Δ_k = Δ − δ_k, recomputed from the drive."""
        return drive.delta_laser - self.delta_k


def detuning_value(delta_k: "Detuning | float") -> float:
    """Unwraps a ``Detuning`` or passes a plain number through."""
    if isinstance(delta_k, Detuning):
        return delta_k.delta_k
    return float(delta_k)


def chirality(rates: CouplingRates) -> float:
    """Chirality C = |Γ_R − Γ_L| / (Γ_R + Γ_L).

    Args:
        rates (CouplingRates): Validated coupling rates.

    Returns:
        float: 0 for symmetric coupling, 1 when one direction is decoupled.
    """
    return abs(rates.gamma_R - rates.gamma_L) / (rates.gamma_R + rates.gamma_L)
