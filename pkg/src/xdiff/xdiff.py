# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

from pydantic import Field
from pydantic.dataclasses import dataclass

from xdiff import components
from xdiff.numerics import Grid


@dataclass
class Laboratory:
    """
    Entry point for experiments on the cross-diffusion system.

    Parameters
    ----------

    config: components.RunConfig
        Base run config; builders and studies start from it. Defaults to
        `RunConfig()` with every default of the config file.

    Examples
    --------

    >>> lab = Laboratory.from_file(Path("run.toml"))
    >>> report = lab.experiment.new("mass-mean").seed(7).build()
    >>> print(report.help())
    """

    config: components.RunConfig = Field(default_factory=components.RunConfig)

    @classmethod
    def from_file(cls, path: Path) -> Laboratory:
        """Laboratory on the config stored at `path`."""
        return cls(config=components.load_config(path))

    @property
    def experiment(self) -> components.ExperimentBuilder:
        """
        Get a Builder to run an experiment on the base config.

        Returns
        -------

        components.ExperimentBuilder
            Builder whose `build()` runs the experiment and returns its report.

        Examples
        --------

        >>> report = (
        ...     lab.experiment.new("lyapunov")
        ...     .override("model", motility="prototype", k=1.0)
        ...     .output(Path("out/lyapunov"))
        ...     .build()
        ... )
        """
        return components.ExperimentBuilder(config=self.config)

    @property
    def steady(self) -> components.SteadyBuilder:
        """
        Get a Builder for steady patterns of the power-motility system.

        Examples
        --------

        >>> grid = Grid.interval(1.0, 256)
        >>> profile = lab.steady.new(d=1e-3, k=2.0).grid(grid).build()
        >>> profile.nonconstant
        True
        """
        return components.SteadyBuilder()

    def refine(
        self, levels: Sequence[tuple[float, float]]
    ) -> components.RefinementTable:
        """Refinement study of the base config over ``(h, dt)`` levels."""
        return components.refinement_study(self.config, levels)

    def threshold(
        self, k: float, grid: Grid, d_lo: float, d_hi: float = 1.0
    ) -> components.ThresholdReport:
        """Bracket of the diffusion parameter below which patterns exist."""
        return components.locate_threshold(k, grid, d_lo, d_hi)
