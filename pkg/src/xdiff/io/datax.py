# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from typing import TypedDict

# -------------------------------------------------------------------------------------
# Diagnostics CSV Exchange Types

CSV_SCHEMA_VERSION = "v1"
CSV_SCHEMA_LINE = f"# xdiff-diagnostics schema={CSV_SCHEMA_VERSION}"
CSV_FLOAT_FORMAT = "%.17g"


class DiagnosticsRowDict(TypedDict):
    t: float
    mass_u: float
    mean_v: float
    L0: float
    D0_grad: float
    D0_relax: float
    D0_mono: float
    lyap_residual: float
    entropy_y: float
    h1dual_u: float
    l2_v: float
    h1_v: float
    min_v: float
    min_u: float
    energy_a21: float
    K_residual: float


CSV_COLUMNS: tuple[str, ...] = tuple(DiagnosticsRowDict.__annotations__)

# -------------------------------------------------------------------------------------
# Snapshot Exchange Types

SNAPSHOT_MAGIC = "XDIFF1"


class SnapshotHeaderDict(TypedDict):
    name: str
    dim: int
    cells: list[int]
    extent: list[float]
    t: float
