# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from xdiff.io.datax import (
    CSV_COLUMNS,
    CSV_FLOAT_FORMAT,
    CSV_SCHEMA_LINE,
    SNAPSHOT_MAGIC,
    SnapshotHeaderDict,
)
from xdiff.numerics import Field, Grid

logger = logging.getLogger("xdiff.io")

PGM_MAX_GRAY = 255

# -------------------------------------------------------------------------------------
# Diagnostics CSV


def write_diagnostics(path: Path, rows: Iterable[Mapping[str, float]]) -> Path:
    """
    Write diagnostics rows as CSV.

    The first line is the schema marker, the second the frozen column header.
    Floats are written with 17 significant digits, so the file reproduces the
    in-memory values exactly.
    """
    frame = pd.DataFrame(list(rows), columns=list(CSV_COLUMNS))
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(CSV_SCHEMA_LINE + "\n")
        frame.to_csv(
            handle, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
        )
    logger.debug("Wrote %d diagnostics rows to %s", len(frame), path)
    return path


def read_diagnostics(path: Path) -> pd.DataFrame:
    with path.open(encoding="utf-8") as handle:
        marker = handle.readline().rstrip("\n")
        if marker != CSV_SCHEMA_LINE:
            error_msg = f"{path} is not an xdiff diagnostics file (got {marker!r})"
            raise ValueError(error_msg)
        frame = pd.read_csv(handle, dtype=float)
    if tuple(frame.columns) != CSV_COLUMNS:
        error_msg = f"{path} has columns {list(frame.columns)}, expected {CSV_COLUMNS}"
        raise ValueError(error_msg)
    return frame


# -------------------------------------------------------------------------------------
# Snapshots


def write_snapshot(path: Path, field: Field, *, t: float, name: str) -> Path:
    """
    Write `field` as a text snapshot.

    Header lines ``XDIFF1``, ``name``, ``dim``, ``cells``, ``extent`` and
    ``t``, then one value per line in C order (x index outermost).
    """
    grid = field.grid
    header = [
        SNAPSHOT_MAGIC,
        f"name {name}",
        f"dim {grid.dim}",
        "cells " + " ".join(str(count) for count in grid.cells),
        "extent " + " ".join(repr(length) for length in grid.extent),
        f"t {t!r}",
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(header) + "\n")
        np.savetxt(handle, field.values.reshape(-1), fmt=CSV_FLOAT_FORMAT)
    return path


def read_snapshot(path: Path) -> tuple[Field, SnapshotHeaderDict]:
    with path.open(encoding="utf-8") as handle:
        magic = handle.readline().strip()
        if magic != SNAPSHOT_MAGIC:
            error_msg = f"{path} is not an xdiff snapshot (got {magic!r})"
            raise ValueError(error_msg)
        entries: dict[str, str] = {}
        for key in ("name", "dim", "cells", "extent", "t"):
            found, _, value = handle.readline().strip().partition(" ")
            if found != key:
                error_msg = f"{path}: expected header {key!r}, got {found!r}"
                raise ValueError(error_msg)
            entries[key] = value
        values = np.loadtxt(handle, dtype=np.float64, ndmin=1)

    header: SnapshotHeaderDict = {
        "name": entries["name"],
        "dim": int(entries["dim"]),
        "cells": [int(count) for count in entries["cells"].split()],
        "extent": [float(length) for length in entries["extent"].split()],
        "t": float(entries["t"]),
    }
    grid = Grid(dim=header["dim"], extent=header["extent"], cells=header["cells"])
    if values.size != grid.n_cells:
        error_msg = f"{path} holds {values.size} values for {grid.n_cells} cells"
        raise ValueError(error_msg)
    return Field(grid=grid, values=values.reshape(grid.shape)), header


# -------------------------------------------------------------------------------------
# Heatmaps


def field_image(field: Field) -> np.ndarray:
    """Image rows of a field: y decreasing downwards in 2D, a single row in 1D."""
    if field.grid.dim == 1:
        return field.values[None, :]
    return field.values.T[::-1]


def kymograph(fields: Sequence[Field]) -> np.ndarray:
    """Space-time image of 1D fields, one row per field (earliest on top)."""
    if not fields:
        error_msg = "Kymograph needs at least one field"
        raise ValueError(error_msg)
    if any(field.grid.dim != 1 for field in fields):
        error_msg = "Kymographs are built from 1D fields"
        raise ValueError(error_msg)
    return np.stack([field.values for field in fields])


def write_heatmap(path: Path, image: np.ndarray) -> Path:
    """
    Write `image` as an ASCII (P2) grayscale PGM.

    Values are scaled linearly from their minimum (black) to their maximum
    (white); both are recorded in a header comment. A constant image is black.
    """
    low, high = float(np.min(image)), float(np.max(image))
    span = high - low
    if span > 0:
        gray = np.rint((image - low) / span * PGM_MAX_GRAY).astype(int)
    else:
        gray = np.zeros(image.shape, dtype=int)
    height, width = gray.shape
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="ascii", newline="") as handle:
        handle.write(f"P2\n# min={low!r} max={high!r}\n{width} {height}\n")
        handle.write(f"{PGM_MAX_GRAY}\n")
        np.savetxt(handle, gray, fmt="%d")
    return path


# -------------------------------------------------------------------------------------
# Summaries


def write_summary(directory: Path, *, data: str, text: str) -> list[Path]:
    """Write ``summary.json`` (`data`) and ``summary.txt`` (`text`) into `directory`."""
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / "summary.json"
    text_path = directory / "summary.txt"
    json_path.write_text(data + "\n", encoding="utf-8")
    text_path.write_text(text + "\n", encoding="utf-8")
    return [json_path, text_path]
