# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.io.datax import (
    CSV_COLUMNS,
    CSV_SCHEMA_LINE,
    CSV_SCHEMA_VERSION,
    SNAPSHOT_MAGIC,
    DiagnosticsRowDict,
    SnapshotHeaderDict,
)
from xdiff.io.writers import (
    field_image,
    kymograph,
    read_diagnostics,
    read_snapshot,
    write_diagnostics,
    write_heatmap,
    write_snapshot,
    write_summary,
)

__all__ = [
    "CSV_COLUMNS",
    "CSV_SCHEMA_LINE",
    "CSV_SCHEMA_VERSION",
    "SNAPSHOT_MAGIC",
    "DiagnosticsRowDict",
    "SnapshotHeaderDict",
    "field_image",
    "kymograph",
    "read_diagnostics",
    "read_snapshot",
    "write_diagnostics",
    "write_heatmap",
    "write_snapshot",
    "write_summary",
]
