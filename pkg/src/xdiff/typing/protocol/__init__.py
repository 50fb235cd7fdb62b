# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.typing.protocol.motility import Motility
from xdiff.typing.protocol.observer import SpaceTimeTest, StepEvent, StepObserver

__all__ = [
    "Motility",
    "SpaceTimeTest",
    "StepEvent",
    "StepObserver",
]
