# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from enum import Enum


class ResetType(Enum):
    """Override value that drops a config key so the model default applies."""

    _RESET = "reset"

    def __repr__(self) -> str:
        return "RESET"


RESET = ResetType._RESET
