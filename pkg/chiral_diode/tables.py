"""Result tables and their CSV and JSON renderings.

Renderings are deterministic: floats are rounded to 12 significant digits and
printed with ``repr``, metadata is written with sorted keys, and nothing
time-dependent is included, so identical inputs give byte-identical files.
"""

from collections.abc import Sequence
import csv
from dataclasses import dataclass, field
import io
import json
import math
from pathlib import Path
from typing import Any, Literal

OutputFormat = Literal["csv", "json"]


def round_float(value: float) -> float:
    """Rounds to 12 significant digits."""
    return float(f"{value:.12g}")


def json_value(value: Any) -> Any:
    """Converts a cell to its JSON value; non-finite floats become null."""
    if value is None or isinstance(value, bool | str):
        return value
    if isinstance(value, int):
        return value
    value = float(value)
    return round_float(value) if math.isfinite(value) else None


def csv_value(value: Any) -> str:
    """Converts a cell to its CSV text."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    value = float(value)
    return repr(round_float(value)) if math.isfinite(value) else repr(value)


@dataclass
class ResultTable:
    """Rows of results with named columns and run metadata.

    Attributes:
        columns (list[str]): Column names.
        rows (list[list[Any]]): Row values in column order.
        meta (dict[str, Any]): Tool, version, command and the scenario echo.
        passed (bool | None): Pass/fail verdict of checking commands; not written.
    """

    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)
    passed: bool | None = None

    def append(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"Row has {len(row)} values for {len(self.columns)} columns.")
        self.rows.append(list(row))

    def column(self, name: str) -> list[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        for key in sorted(self.meta):
            value = self.meta[key]
            text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
            buffer.write(f"# {key}: {text}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([csv_value(value) for value in row])
        return buffer.getvalue()

    def to_json(self) -> str:
        document = {
            "meta": self.meta,
            "columns": self.columns,
            "rows": [
                {name: json_value(value) for name, value in zip(self.columns, row, strict=True)}
                for row in self.rows
            ],
        }
        return json.dumps(document, indent=2, sort_keys=False, allow_nan=False) + "\n"

    def render(self, fmt: OutputFormat) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()

    def write(self, path: Path, fmt: OutputFormat) -> Path:
        """Writes the rendering to ``path``, creating parent directories."""
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(fmt))
        return path


def series_path(path: Path, gamma_L: float) -> Path:
    """File for one member of a Γ_L series, e.g. ``spectrum_gL0.1.csv``."""
    return path.with_name(f"{path.stem}_gL{gamma_L:g}{path.suffix}")
