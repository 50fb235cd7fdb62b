# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

import sys

from xdiff.cli import main

if __name__ == "__main__":
    sys.exit(main())
