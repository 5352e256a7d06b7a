from pathlib import Path

import pytest

from chiral_diode.config import OUTPUT_DIR_ENV, SCENARIO_ENV
from chiral_diode.models import CouplingRates, Lambda, LaserDrive, TwoLevel


@pytest.fixture(autouse=True)
def isolated_workdir(tmp_path: Path, monkeypatch):
    """Runs every test in an empty directory with no scenario or output variables set."""
    monkeypatch.delenv(SCENARIO_ENV, raising=False)
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def diode_rates() -> CouplingRates:
    """Γ_L/Γ_R = 0.1 with the matching loss γ_a = 0.9."""
    return CouplingRates(gamma_R=1.0, gamma_L=0.1, gamma_a=0.9)


@pytest.fixture
def diode_two_level(diode_rates: CouplingRates) -> TwoLevel:
    return TwoLevel(rates=diode_rates)


@pytest.fixture
def dressed_lambda(diode_rates: CouplingRates) -> Lambda:
    """Λ emitter with Ω = 2, Δ = 1; dressed resonances at (1 ± √17)/2."""
    return Lambda(rates=diode_rates, drive=LaserDrive(omega_rabi=2.0, delta_laser=1.0))


@pytest.fixture
def write_scenario(tmp_path: Path):
    """Writes TOML text to a scenario file and returns its path."""

    def _write(content: str, name: str = "scenario.toml") -> Path:
        path = tmp_path / name
        path.write_text(content)
        return path

    return _write
