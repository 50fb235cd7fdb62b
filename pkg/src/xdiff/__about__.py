# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT
__version__ = "0.1.0"
