# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from typing import NamedTuple, Protocol

import numpy as np


class StepEvent(NamedTuple):
    """One accepted time step, as raw cell arrays."""

    t: float
    dt: float
    u_old: np.ndarray
    v_old: np.ndarray
    u_new: np.ndarray
    v_new: np.ndarray


class StepObserver(Protocol):
    def start(self, t: float, u: np.ndarray, v: np.ndarray) -> None: ...

    def observe(self, event: StepEvent) -> None: ...


class SpaceTimeTest(Protocol):
    """Smooth test function phi(t, x) with zero normal derivative."""

    def value(
        self, t: float, centers: tuple[np.ndarray, ...], extent: tuple[float, ...]
    ) -> np.ndarray: ...

    def laplacian(
        self, t: float, centers: tuple[np.ndarray, ...], extent: tuple[float, ...]
    ) -> np.ndarray: ...
