# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.components import ExperimentReport, RunConfig, SteadyProfile
from xdiff.utils import (
    ExperimentName,
    GrowthKind,
    InitStrategy,
    MotilityKind,
)
from xdiff.xdiff import Laboratory

__all__ = [
    "ExperimentName",
    "ExperimentReport",
    "GrowthKind",
    "InitStrategy",
    "Laboratory",
    "MotilityKind",
    "RunConfig",
    "SteadyProfile",
]
