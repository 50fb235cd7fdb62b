# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

import abc
from collections.abc import Generator


class Helpful(abc.ABC):
    """
    Reports that render themselves as plain text, one item per line.

    Subclasses yield the lines; the first line is the headline used in log
    messages.
    """

    @abc.abstractmethod
    def _help(self) -> Generator[str]: ...

    @property
    def headline(self) -> str:
        return next(iter(self._help()), "")

    def help(self, indent: int = 0) -> str:
        """
        Get the formatted, human readable report.

        Parameters
        ----------

        indent: int
            Number of spaces put in front of every line, for nesting a
            report inside an error message or another report.

        Returns
        -------
        str
            One line per reported item.
        """
        prefix = " " * indent
        return "\n".join(prefix + line for line in self._help())
