# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.typing.pydantic_extensions.types import Cells, Extent, FloatArray

__all__: list[str] = [
    "Cells",
    "Extent",
    "FloatArray",
]
