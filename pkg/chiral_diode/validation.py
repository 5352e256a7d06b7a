"""Schema of scenario files.

Every rate, detuning and Rabi frequency in a scenario is written in the units of
``emitter.gamma_R``; the schema converts them to natural units (Γ_R = 1) when it
builds domain objects.
"""

from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from chiral_diode.models import (
    CouplingRates,
    EmitterSpec,
    FiniteFloat,
    Lambda,
    LaserDrive,
    Rate,
    TwoLevel,
)
from chiral_diode.oracle import MIN_MODES, Direction
from chiral_diode.utils import MAX_GRID_POINTS

PositiveFloat = Annotated[float, Field(gt=0.0, allow_inf_nan=False)]

SWEEP_SECTIONS = ("spectrum", "sweep2d", "tune", "oracle")
"""Scenario sections that select what a run computes; exactly one is present."""


class GridSettings(BaseModel):
    """An evenly spaced grid ``start:stop:count``.

    Attributes:
        start (float): First point.
        stop (float): Last point.
        count (int): Number of points, ``stop`` included.
    """

    model_config = ConfigDict(extra="forbid")

    start: FiniteFloat
    stop: FiniteFloat
    count: Annotated[int, Field(ge=1, le=MAX_GRID_POINTS)]

    @model_validator(mode="after")
    def _check_order(self) -> "GridSettings":
        if self.count > 1 and not self.stop > self.start:
            raise ValueError("stop must be greater than start when count > 1")
        if self.count == 1 and self.stop != self.start:
            raise ValueError("a single-point grid needs start == stop")
        return self

    def values(self, scale: float = 1.0) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count) / scale


class EmitterSettings(BaseModel):
    """The ``[emitter]`` table.

    Attributes:
        kind (str): ``two-level`` or ``lambda``.
        gamma_R (float): Unit of every rate-valued input.
        gamma_L (float): Left-moving decay rate.
        gamma_a (float): Excited-state loss.
        gamma_c (float): Metastable-state loss.
        omega (float): Rabi frequency (``lambda`` only).
        delta_laser (float): Laser detuning (``lambda`` only).
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["two-level", "lambda"] = "two-level"
    gamma_R: PositiveFloat = 1.0
    gamma_L: Rate = 0.0
    gamma_a: Rate = 0.0
    gamma_c: Rate = 0.0
    omega: Rate = 0.0
    delta_laser: FiniteFloat = 0.0

    def rates(self, gamma_L: float | None = None) -> CouplingRates:
        left = self.gamma_L if gamma_L is None else gamma_L
        return CouplingRates(
            gamma_R=1.0,
            gamma_L=left / self.gamma_R,
            gamma_a=self.gamma_a / self.gamma_R,
            gamma_c=self.gamma_c / self.gamma_R,
        )

    def drive(self) -> LaserDrive:
        return LaserDrive(omega_rabi=self.omega, delta_laser=self.delta_laser).scaled(self.gamma_R)

    def spec(self, gamma_L: float | None = None) -> EmitterSpec:
        """The emitter in natural units, optionally with another ``gamma_L``."""
        if self.kind == "lambda":
            return Lambda(rates=self.rates(gamma_L), drive=self.drive())
        return TwoLevel(rates=self.rates(gamma_L))


class SpectrumSettings(BaseModel):
    """The ``[spectrum]`` table: a δ_k sweep, optionally repeated over Γ_L values."""

    model_config = ConfigDict(extra="forbid")

    grid: GridSettings = GridSettings(start=-4.0, stop=4.0, count=801)
    gamma_L_series: list[Rate] | None = None


class Sweep2dSettings(BaseModel):
    """The ``[sweep2d]`` table: a (Δ, Ω) map at fixed δ_k."""

    model_config = ConfigDict(extra="forbid")

    delta_k: FiniteFloat = 3.0
    delta_laser: GridSettings = GridSettings(start=-6.0, stop=6.0, count=101)
    omega: GridSettings = GridSettings(start=0.0, stop=6.0, count=101)

    @model_validator(mode="after")
    def _check_omega(self) -> "Sweep2dSettings":
        if self.omega.start < 0.0:
            raise ValueError("omega grid must be non-negative")
        if self.delta_laser.count * self.omega.count > MAX_GRID_POINTS:
            raise ValueError(f"the (Delta, Omega) map may have at most {MAX_GRID_POINTS} points")
        return self


class TuneSettings(BaseModel):
    """The ``[tune]`` table."""

    model_config = ConfigDict(extra="forbid")

    mode: Literal["block", "pass", "switch"] = "block"
    delta_k: FiniteFloat
    omega: PositiveFloat | None = None
    delta_laser: FiniteFloat | None = None

    @model_validator(mode="after")
    def _check_pins(self) -> "TuneSettings":
        if self.omega is not None and self.delta_laser is not None:
            raise ValueError("pin either omega or delta_laser, not both")
        if self.delta_laser is not None and self.mode != "block":
            raise ValueError("delta_laser can only be pinned in block mode")
        return self


class OracleSettings(BaseModel):
    """The ``[oracle]`` table."""

    model_config = ConfigDict(extra="forbid")

    carriers: list[FiniteFloat] = []
    direction: Direction = Direction.FROM_LEFT
    sigma_k: PositiveFloat = 0.02
    span: PositiveFloat | None = None
    n_modes: Annotated[int, Field(ge=MIN_MODES)] | None = None
    dt: PositiveFloat | None = None
    tolerance: PositiveFloat = 1e-2
    check_convergence: bool = True


class OutputSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["csv", "json"] = "csv"
    path: Path | None = None


class Scenario(BaseModel):
    """Schema for an entire scenario file."""

    model_config = ConfigDict(extra="forbid")

    emitter: EmitterSettings = EmitterSettings()
    spectrum: SpectrumSettings | None = None
    sweep2d: Sweep2dSettings | None = None
    tune: TuneSettings | None = None
    oracle: OracleSettings | None = None
    output: OutputSettings = OutputSettings()

    @model_validator(mode="after")
    def _one_sweep(self) -> "Scenario":
        present = [name for name in SWEEP_SECTIONS if getattr(self, name) is not None]
        if len(present) != 1:
            listed = ", ".join(f"[{name}]" for name in SWEEP_SECTIONS)
            found = ", ".join(present) or "none"
            raise ValueError(f"exactly one of {listed} is required (found: {found})")
        return self

    @property
    def kind(self) -> str:
        """Name of the sweep section present."""
        return next(name for name in SWEEP_SECTIONS if getattr(self, name) is not None)

    @property
    def scale(self) -> float:
        return self.emitter.gamma_R
