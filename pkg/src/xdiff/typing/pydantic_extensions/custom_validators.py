# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from typing import Any

import numpy as np


def float_array(value: Any) -> np.ndarray:
    try:
        array = np.array(value, dtype=np.float64, copy=True)
    except (TypeError, ValueError) as exc:
        error_msg = f"Expected an array of reals, got {type(value).__name__}"
        raise TypeError(error_msg) from exc
    if not np.all(np.isfinite(array)):
        error_msg = "Array contains NaN or Inf values"
        raise ValueError(error_msg)
    array.flags.writeable = False
    return array


def extent_tuple(value: Any) -> tuple[float, ...]:
    if isinstance(value, int | float):
        value = (value,)
    extent = tuple(float(length) for length in value)
    if any(length <= 0 for length in extent):
        error_msg = f"Extents must be positive, got {extent}"
        raise ValueError(error_msg)
    return extent


def cells_tuple(value: Any) -> tuple[int, ...]:
    if isinstance(value, int):
        value = (value,)
    return tuple(int(count) for count in value)
