"""CSV serialization for masks, distance fields, and scalar fields.

File layout: one JSON header line with the grid metadata, then nx rows
(one per grid row i), each with ny comma-separated values. Floats are
written with %.17g so doubles round-trip bit-identically.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError
from .grid import Grid


def save_array(path, grid: Grid, values: np.ndarray, kind: str) -> None:
    header = {
        "nx": grid.nx,
        "ny": grid.ny,
        "h": grid.h,
        "origin": [grid.origin[0], grid.origin[1]],
        "kind": kind,
    }
    with open(path, "w") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        if kind == "mask":
            for row in values.astype(int):
                f.write(",".join(str(v) for v in row) + "\n")
        else:
            for row in values:
                f.write(",".join("%.17g" % v for v in row) + "\n")


def load_array(path) -> tuple[Grid, np.ndarray, str]:
    with open(path) as f:
        try:
            header = json.loads(f.readline())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: bad field header: {e}") from e
        grid = Grid(header["nx"], header["ny"], header["h"],
                    tuple(header["origin"]))
        kind = header.get("kind", "scalar")
        rows = [line.strip().split(",") for line in f if line.strip()]
    if len(rows) != grid.nx or any(len(r) != grid.ny for r in rows):
        raise ConfigError(f"{path}: body does not match {grid.nx}x{grid.ny} header")
    if kind == "mask":
        values = np.array(rows, dtype=int).astype(bool)
    else:
        values = np.array(rows, dtype=float)
    return grid, values, kind
