import logging
import os
from pathlib import Path
from typing import Any

from dotenv import load_dotenv
from pydantic import ValidationError
import toml

from chiral_diode.errors import ScenarioError
from chiral_diode.utils import deep_merge, normalize_config
from chiral_diode.validation import SWEEP_SECTIONS, Scenario

logger = logging.getLogger(__name__)

SCENARIO_FILENAME = "scenario.toml"
"""Scenario file picked up from the working directory or one of its parents."""

SCENARIO_ENV = "CHIRAL_DIODE_SCENARIO"
"""Environment variable naming a scenario file."""

OUTPUT_DIR_ENV = "CHIRAL_DIODE_OUTPUT_DIR"
"""Environment variable naming a directory for result files."""

COMMAND_SECTIONS = {
    "spectrum": "spectrum",
    "compare": "spectrum",
    "sweep2d": "sweep2d",
    "tune": "tune",
    "oracle": "oracle",
}
"""Scenario section each command reads its sweep from."""


def load_environment() -> None:
    """Loads a ``.env`` file from the working directory without overriding the shell."""
    load_dotenv(Path.cwd() / ".env", override=False)


def find_scenario_path(explicit: Path | None = None) -> Path | None:
    """Finds the scenario file with a hierarchical search.

    The search order is as follows:
    1.  An explicit path (``--config``).
    2.  The ``CHIRAL_DIODE_SCENARIO`` environment variable.
    3.  ``scenario.toml`` in the current directory or a parent directory.

    Returns:
        Path | None: The scenario file, or None to run on defaults.
    """
    if explicit is not None:
        return explicit
    if env_path := os.getenv(SCENARIO_ENV):
        return Path(env_path)
    current_dir = Path.cwd()
    for directory in [current_dir, *current_dir.parents]:
        candidate = directory / SCENARIO_FILENAME
        if candidate.is_file():
            return candidate
    return None


def read_scenario_file(path: Path) -> dict[str, Any]:
    """Reads a scenario TOML file and expands dotted keys.

    Raises:
        ScenarioError: If the file is missing or is not valid TOML.
    """
    try:
        with path.open("r") as f:
            data = toml.load(f)
    except FileNotFoundError as exc:
        raise ScenarioError(f"Scenario file '{path}' not found.") from exc
    except toml.TomlDecodeError as exc:
        raise ScenarioError(
            f"Scenario file '{path}' is not valid TOML: {exc.msg}", line=exc.lineno
        ) from exc
    return normalize_config(data)


def validate_scenario(data: dict[str, Any]) -> Scenario:
    """Validates raw scenario data.

    Raises:
        ScenarioError: With one ``(location, message)`` diagnostic per field error.
    """
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        diagnostics = [
            (".".join(map(str, error["loc"])) or "scenario", error["msg"])
            for error in exc.errors()
        ]
        raise ScenarioError(
            f"Scenario is invalid: {exc.error_count()} error(s).", diagnostics=diagnostics
        ) from exc


def load_scenario(
    command: str,
    path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> Scenario:
    """Builds the scenario a command runs on.

    Values come from, in increasing precedence, the schema defaults, the scenario
    file and ``overrides`` (dotted keys from command-line flags). A file without a
    sweep section gets the command's section.

    Args:
        command (str): Command name, one of ``COMMAND_SECTIONS``.
        path (Path | None, optional): Scenario file; None runs on defaults.
        overrides (dict[str, Any] | None, optional): Flag values; None values are
            ignored.

    Raises:
        ScenarioError: If the file is invalid or holds another command's section.
    """
    section = COMMAND_SECTIONS[command]
    data = read_scenario_file(path) if path is not None else {}
    present = [name for name in SWEEP_SECTIONS if name in data]
    if not present:
        data[section] = {}
    elif section not in present:
        raise ScenarioError(
            f"Scenario defines [{present[0]}] but '{command}' needs [{section}].",
            diagnostics=[(present[0], f"unexpected section for '{command}'")],
        )
    cleaned = {key: value for key, value in (overrides or {}).items() if value is not None}
    merged = deep_merge(data, normalize_config(cleaned))
    logger.debug("Scenario for %s from %s with overrides %s", command, path, sorted(cleaned))
    return validate_scenario(merged)


def resolve_output_path(command: str, scenario: Scenario, out: Path | None = None) -> Path | None:
    """Where a command writes its table.

    Order: ``--out``, ``[output].path``, ``$CHIRAL_DIODE_OUTPUT_DIR/<command>.<ext>``.
    None means standard output.
    """
    if out is not None:
        return out
    if scenario.output.path is not None:
        return scenario.output.path
    if output_dir := os.getenv(OUTPUT_DIR_ENV):
        return Path(output_dir) / f"{command}.{scenario.output.format}"
    return None
