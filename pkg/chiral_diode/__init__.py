"""chiral-diode package."""

import importlib.metadata

try:
    __version__ = importlib.metadata.version("chiral-diode")
except importlib.metadata.PackageNotFoundError:
    __version__ = "unknown"

from .models import CouplingRates, Detuning, Lambda, LaserDrive, TwoLevel, chirality  # noqa: E402
from .oracle import ModeGrid, WavepacketSpec, compare_to_analytic, scatter_wavepacket  # noqa: E402
from .scattering import (  # noqa: E402
    amplitudes_lambda,
    amplitudes_two_level,
    delta_T_closed_form,
    evaluate,
    max_reflection,
    spectrum,
)
from .tuner import dressed_states, switch_plan, tune_block, tune_pass  # noqa: E402

__all__ = [
    "CouplingRates",
    "Detuning",
    "Lambda",
    "LaserDrive",
    "ModeGrid",
    "TwoLevel",
    "WavepacketSpec",
    "__version__",
    "amplitudes_lambda",
    "amplitudes_two_level",
    "chirality",
    "compare_to_analytic",
    "delta_T_closed_form",
    "dressed_states",
    "evaluate",
    "max_reflection",
    "scatter_wavepacket",
    "spectrum",
    "switch_plan",
    "tune_block",
    "tune_pass",
]
