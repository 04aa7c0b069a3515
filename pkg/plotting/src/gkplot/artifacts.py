"""Read-only access to experiment artifacts.

Everything here validates against the documented CSV/JSON schemas and
never writes into a run directory.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class MissingArtifact(FileNotFoundError):
    pass


class SchemaMismatch(ValueError):
    pass


def read_summary(run_dir) -> dict:
    path = Path(run_dir) / "summary.json"
    if not path.is_file():
        raise MissingArtifact(f"no summary.json in {run_dir}")
    summary = json.loads(path.read_text())
    if "config_hash" not in summary:
        raise SchemaMismatch(f"{path} carries no config_hash")
    return summary


def read_table(path, expected_columns) -> dict[str, np.ndarray]:
    """Load a CSV artifact, insisting on the exact documented header."""
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f"missing artifact {path}")
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise MissingArtifact(f"{path} is empty")
        columns = header.split(",")
        if columns != list(expected_columns):
            raise SchemaMismatch(
                f"{path.name} columns {columns} != expected {list(expected_columns)}")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise SchemaMismatch(f"{path.name}: {exc}") from exc
    if data.size == 0:
        raise MissingArtifact(f"{path} has a header but no rows")
    if data.shape[1] != len(columns):
        raise SchemaMismatch(f"{path.name} rows have {data.shape[1]} fields, "
                             f"expected {len(columns)}")
    return {name: data[:, k] for k, name in enumerate(columns)}


def read_timeseries(path) -> tuple[np.ndarray, np.ndarray]:
    """timeseries_*.csv: time,p_1,...,p_d -> (times, states)."""
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f"missing artifact {path}")
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise MissingArtifact(f"{path} is empty")
        columns = header.split(",")
        d = len(columns) - 1
        if d < 2 or columns[0] != "time" or columns[1:] != [f"p_{i+1}" for i in range(d)]:
            raise SchemaMismatch(f"{path.name} columns {columns} are not "
                                 "time,p_1,...,p_d")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        raise MissingArtifact(f"{path} has a header but no rows")
    return data[:, 0], data[:, 1:]
