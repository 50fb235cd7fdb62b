# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from typing import Protocol

import numpy as np


class Motility(Protocol):
    """
    A motility function z -> gamma(z) together with its first two derivatives.

    All evaluators accept arrays and are pure.
    """

    @property
    def floor(self) -> float | None:
        """Smallest argument fed to the evaluators, None when unguarded."""
        ...

    @property
    def sup(self) -> float:
        """sup of gamma over [0, inf), may be inf."""
        ...

    @property
    def at_zero(self) -> float:
        """gamma(0), inf when gamma is unbounded at the origin."""
        ...

    def gamma(self, z: np.ndarray) -> np.ndarray: ...

    def gamma_prime(self, z: np.ndarray) -> np.ndarray: ...

    def gamma_second(self, z: np.ndarray) -> np.ndarray: ...

    def flux(self, u: np.ndarray, v: np.ndarray) -> np.ndarray: ...
