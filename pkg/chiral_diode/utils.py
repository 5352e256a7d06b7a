from typing import Any

import numpy as np

from chiral_diode.errors import GridError

MAX_GRID_POINTS = 1_000_000
"""Largest grid accepted by any sweep."""


def normalize_config(config: dict[str, Any]) -> dict[str, Any]:
    """
    Normalize a dictionary to expand dotted keys into nested dictionaries.

    Scenario files and command-line overrides may address nested values with
    dotted keys. For example, a key 'emitter.gamma_L' is transformed into the
    nested dictionary {'emitter': {'gamma_L': ...}}. Dotted keys merge into
    tables that are also written out explicitly.

    Args:
        config: The dictionary to normalize.

    Returns:
        A new dictionary with dotted keys expanded into nested structures.
    """
    normalized: dict[str, Any] = {}
    for key, value in config.items():
        if isinstance(value, dict):
            value = normalize_config(value)
        parts = key.split(".")
        target = normalized
        for part in parts[:-1]:
            target = target.setdefault(part, {})
        leaf = parts[-1]
        if isinstance(value, dict) and isinstance(target.get(leaf), dict):
            target[leaf] = deep_merge(target[leaf], value)
        else:
            target[leaf] = value
    return normalized


def deep_merge(parent: dict, child: dict) -> dict:
    """Recursively merges two dictionaries, with child values overriding parent values."""
    merged = parent.copy()
    for key, value in child.items():
        if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def parse_grid(text: str) -> dict[str, float | int]:
    """Parses a ``start:stop:count`` grid flag.

    Args:
        text: The flag value, e.g. ``-4:4:801``.

    Returns:
        A mapping with ``start``, ``stop`` and ``count`` keys.

    Raises:
        ValueError: If the text does not have three fields or they are not numbers.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"Grid '{text}' must have the form start:stop:count.")
    try:
        return {"start": float(parts[0]), "stop": float(parts[1]), "count": int(parts[2])}
    except ValueError as exc:
        raise ValueError(f"Grid '{text}' must have the form start:stop:count.") from exc


def as_grid(values: Any, name: str = "grid") -> np.ndarray:
    """Validates a one-dimensional evaluation grid.

    Raises:
        GridError: If the grid is not one-dimensional, contains non-finite values,
            is not strictly increasing or exceeds ``MAX_GRID_POINTS``.
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 1:
        raise GridError(f"{name} must be one-dimensional.")
    if grid.size > MAX_GRID_POINTS:
        raise GridError(f"{name} has {grid.size} points; at most {MAX_GRID_POINTS} are allowed.")
    if not np.all(np.isfinite(grid)):
        raise GridError(f"{name} contains non-finite values.")
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise GridError(f"{name} must be strictly increasing.")
    return grid
