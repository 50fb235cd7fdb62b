# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.utils.enums import (
    CheckStatus,
    ExperimentName,
    GrowthKind,
    InitialKind,
    InitStrategy,
    MotilityKind,
    Perturbation,
    SolverMethod,
    Writer,
)
from xdiff.utils.exceptions import (
    ConfigError,
    GridMismatchError,
    PositivityError,
    SolverConvergenceError,
    StiffnessError,
)
from xdiff.utils.sentinels import RESET

__all__ = [
    "RESET",
    "CheckStatus",
    "ConfigError",
    "ExperimentName",
    "GridMismatchError",
    "GrowthKind",
    "InitStrategy",
    "InitialKind",
    "MotilityKind",
    "Perturbation",
    "PositivityError",
    "SolverConvergenceError",
    "SolverMethod",
    "StiffnessError",
    "Writer",
]
