# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np


def array_to_list(value: np.ndarray) -> list:
    return value.tolist()
