# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations


class GridMismatchError(ValueError):
    """Fields or states live on different grids, or values do not fit the grid."""


class SolverConvergenceError(RuntimeError):
    """An iterative solve stopped before reaching its tolerance."""

    def __init__(self, message: str, *, residual: float, iterations: int) -> None:
        super().__init__(message, residual, iterations)
        self.residual = residual
        self.iterations = iterations

    def __str__(self) -> str:
        return (
            f"{self.args[0]} (residual={self.residual:.3e}, "
            f"iterations={self.iterations})"
        )


class StiffnessError(RuntimeError):
    """The stable time step fell below the configured minimum."""

    def __init__(self, message: str, *, dt: float) -> None:
        super().__init__(message, dt)
        self.dt = dt

    def __str__(self) -> str:
        return f"{self.args[0]} (dt={self.dt:.3e})"


class PositivityError(RuntimeError):
    """A step produced a negative cell density."""

    def __init__(self, message: str, *, min_value: float) -> None:
        super().__init__(message, min_value)
        self.min_value = min_value

    def __str__(self) -> str:
        return f"{self.args[0]} (min={self.min_value:.3e})"


class ConfigError(ValueError):
    """A run config could not be parsed or validated."""

    def __init__(self, message: str, *, line: int) -> None:
        super().__init__(message, line)
        self.line = line

    def __str__(self) -> str:
        return f"line {self.line}: {self.args[0]}"
