"""
Field snapshot serialization.

A snapshot is a CSV text file: one ``#`` header line with the grid
description and component count, then one row per component holding the
row-major cell values.
"""

from pathlib import Path
from typing import Union

import numpy as np

from ..exceptions import GridError, OutputError
from .grid import Grid, ScalarField, VectorField, make_grid

Field = Union[ScalarField, VectorField]


def _header(field: Field) -> str:
    components = 1 if isinstance(field, ScalarField) else field.dim
    parts = [f"{k}={v}" for k, v in field.grid.header().items()]
    parts.append(f"components={components}")
    parts.append(f"kind={'scalar' if isinstance(field, ScalarField) else 'vector'}")
    return ",".join(parts)


def write_field(path: Union[str, Path], field: Field) -> Path:
    """Write a cell-centred field snapshot."""
    if isinstance(field, VectorField) and field.staggered:
        raise GridError("only cell-centred fields are serialized")
    path = Path(path)
    rows = [field.flat] if isinstance(field, ScalarField) else [c.reshape(-1) for c in field.components]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, np.vstack(rows), delimiter=",", fmt="%.17g", header=_header(field), newline="\n")
    except OSError as e:
        raise OutputError(f"Failed to write field snapshot: {e}", path=str(path)) from e
    return path


def _parse_header(line: str) -> dict:
    entries = {}
    for item in line.lstrip("#").strip().split(","):
        if "=" not in item:
            raise GridError(f"Malformed snapshot header entry: {item!r}")
        key, value = item.split("=", 1)
        entries[key.strip()] = value.strip()
    missing = {"nx", "ny", "lx", "ly", "bc_mode", "components", "kind"} - entries.keys()
    if missing:
        raise GridError(f"Snapshot header misses {sorted(missing)}")
    return entries


def read_field(path: Union[str, Path]) -> Field:
    """Read a snapshot written by :func:`write_field`."""
    path = Path(path)
    try:
        with open(path, "r") as f:
            header = _parse_header(f.readline())
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError as e:
        raise OutputError(f"Failed to read field snapshot: {e}", path=str(path)) from e

    grid: Grid = make_grid(int(header["nx"]), int(header["ny"]), float(header["lx"]), float(header["ly"]), header["bc_mode"])
    components = int(header["components"])
    if data.shape != (components, grid.size):
        raise GridError(f"Snapshot body has shape {data.shape}, header implies {(components, grid.size)}")
    if header["kind"] == "scalar":
        return ScalarField(grid, data[0])
    return VectorField(grid, tuple(row for row in data))
