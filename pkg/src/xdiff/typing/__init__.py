# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.typing.helpful import Helpful
from xdiff.typing.protocol import Motility, SpaceTimeTest, StepEvent, StepObserver

__all__ = [
    "Helpful",
    "Motility",
    "SpaceTimeTest",
    "StepEvent",
    "StepObserver",
]
