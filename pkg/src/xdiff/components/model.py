# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, model_validator

from xdiff.numerics import Field, Grid
from xdiff.specs import GrowthSpec, MollifiedMotility, MotilitySpec
from xdiff.utils.compatibility import Self
from xdiff.utils.exceptions import GridMismatchError


class ModelParams(BaseModel):
    """
    Coefficients of the cell density / signal system.

    ``u_t = lap(u gamma(v)) [+ u h(u)]`` and
    ``epsilon v_t = lap v - v + S(u)`` with ``S(u) = u / (1 + source_eta u)``.

    Parameters
    ----------

    epsilon: float
        Relaxation time of the signal, > 0.

    motility: MotilitySpec | MollifiedMotility
        The motility gamma.

    growth: GrowthSpec, optional
        Logistic source; None (or ``kind="none"``) switches it off.

    source_eta: float
        Saturation of the signal source, 0 for the plain source ``S(u) = u``.

    cfl_safety: float
        Fraction of the explicit stability limit used as time step, in (0, 1].

    dt_min: float
        Smallest admissible stable time step.
    """

    epsilon: float = pydantic.Field(gt=0)
    motility: MotilitySpec | MollifiedMotility
    growth: GrowthSpec | None = None
    source_eta: float = pydantic.Field(default=0.0, ge=0)
    cfl_safety: float = pydantic.Field(default=0.4, gt=0, le=1)
    dt_min: float = pydantic.Field(default=1e-12, gt=0)

    model_config = ConfigDict(frozen=True)

    @property
    def has_growth(self) -> bool:
        return self.growth is not None and self.growth.active

    def source(self, u: np.ndarray) -> np.ndarray:
        if self.source_eta == 0.0:
            return u
        return u / (1.0 + self.source_eta * u)


class State(BaseModel):
    """
    Time and the pair (u, v) on a common grid.

    ``u >= 0`` and ``v >= 0`` are enforced. Strict positivity of v is
    monitored by the diagnostics (`min_v`) rather than enforced, so a run may
    start from ``v = 0``.
    """

    t: float = pydantic.Field(ge=0)
    u: Field
    v: Field

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _validate_pair(self) -> Self:
        if self.u.grid != self.v.grid:
            error_msg = "u and v must live on the same grid"
            raise GridMismatchError(error_msg)
        if self.u.min < 0:
            error_msg = f"Cell density must be non-negative, min(u)={self.u.min!r}"
            raise ValueError(error_msg)
        if self.v.min < 0:
            error_msg = f"Signal must be non-negative, min(v)={self.v.min!r}"
            raise ValueError(error_msg)
        return self

    @classmethod
    def from_arrays(cls, grid: Grid, t: float, u: np.ndarray, v: np.ndarray) -> Self:
        return cls(t=t, u=Field(grid=grid, values=u), v=Field(grid=grid, values=v))

    @classmethod
    def homogeneous(cls, grid: Grid, m: float, v: float | None = None) -> Self:
        """The constant state ``(m, m)``, or ``(m, v)`` when `v` is given."""
        return cls(
            t=0.0,
            u=Field.constant(grid, m),
            v=Field.constant(grid, m if v is None else v),
        )

    @property
    def grid(self) -> Grid:
        return self.u.grid
