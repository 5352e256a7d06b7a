"""Exception hierarchy for chiral-diode."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from chiral_diode.oracle import OracleResult


class ChiralDiodeError(Exception):
    """Base class for every error raised by chiral-diode.

    Attributes:
        grid_index (int | None): Index of the grid point being evaluated when the
            error was raised, filled in by batch evaluations.
    """

    grid_index: int | None = None


class DegenerateDenominator(ChiralDiodeError):
    """Raised when a scattering denominator is numerically zero."""

    def __init__(self, delta_k: float, magnitude: float):
        self.delta_k = delta_k
        self.magnitude = magnitude
        super().__init__(
            f"Scattering denominator vanishes at delta_k={delta_k!r} (|D|={magnitude:.3e})."
        )


class NotApplicable(ChiralDiodeError):
    """Raised when a closed form is evaluated outside the region where it holds."""


class ConsistencyError(ChiralDiodeError):
    """Raised when an evaluated quantity violates a physical bound beyond rounding."""


class GridError(ChiralDiodeError, ValueError):
    """Raised for grids that are not finite, not strictly increasing, or too large."""


class GridTooCoarse(ChiralDiodeError):
    """Raised when the oracle mode grid cannot resolve the emitter or the wavepacket."""


class StepRejected(ChiralDiodeError):
    """Raised when a single integrator step increases the norm beyond tolerance."""

    def __init__(self, time: float, growth: float):
        self.time = time
        self.growth = growth
        super().__init__(f"Integrator step at t={time:.6g} increased the norm by {growth:.3e}.")


class NotConverged(ChiralDiodeError):
    """Raised when refining the oracle resolution shifts the observables too much.

    Attributes:
        coarse (OracleResult): Result at the requested resolution.
        fine (OracleResult): Result with twice the modes and half the time step.
    """

    def __init__(self, coarse: OracleResult, fine: OracleResult, tolerance: float):
        self.coarse = coarse
        self.fine = fine
        self.tolerance = tolerance
        shift = max(abs(coarse.T - fine.T), abs(coarse.R - fine.R))
        super().__init__(
            f"Oracle not converged: refinement shifted (T, R) by {shift:.3e} "
            f"(tolerance {tolerance:.1e})."
        )


class ScenarioError(ChiralDiodeError):
    """Raised when a scenario file cannot be parsed or validated.

    Attributes:
        diagnostics (list[tuple[str, str]]): ``(location, message)`` pairs.
        line (int | None): Line of a TOML syntax error, when known.
    """

    def __init__(
        self,
        message: str,
        diagnostics: list[tuple[str, str]] | None = None,
        line: int | None = None,
    ):
        self.diagnostics = diagnostics or []
        self.line = line
        super().__init__(message)
