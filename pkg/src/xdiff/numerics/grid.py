# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from typing import Any

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, model_validator

from xdiff.typing.pydantic_extensions import Cells, Extent, FloatArray
from xdiff.utils.compatibility import Self
from xdiff.utils.exceptions import GridMismatchError

logger = logging.getLogger("xdiff.numerics")

_MIN_CELLS = 3
_SPACING_RTOL = 1e-12


def _axis_slice(ndim: int, axis: int, start: int | None, stop: int | None) -> tuple:
    index: list[slice] = [slice(None)] * ndim
    index[axis] = slice(start, stop)
    return tuple(index)


class Grid(BaseModel):
    """
    Uniform, cell centred mesh of an interval or a rectangle.

    Cells are square in 2D; the common edge length is `spacing`. Cell arrays
    are indexed ``[i]`` in 1D and ``[i, j]`` (x first) in 2D.

    Parameters
    ----------

    dim: int
        Space dimension, 1 or 2.

    extent: tuple[float, ...]
        Side lengths ``(Lx,)`` or ``(Lx, Ly)``.

    cells: tuple[int, ...]
        Cell counts ``(nx,)`` or ``(nx, ny)``, each at least 3.

    Examples
    --------

    >>> grid = Grid.interval(length=1.0, nx=128)
    >>> grid.spacing
    0.0078125
    """

    dim: int
    extent: Extent
    cells: Cells

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _validate_layout(self) -> Self:
        if self.dim not in (1, 2):
            error_msg = f"Grid dimension must be 1 or 2, got {self.dim}"
            raise ValueError(error_msg)
        if len(self.extent) != self.dim or len(self.cells) != self.dim:
            error_msg = (
                f"Grid of dimension {self.dim} needs {self.dim} extents and cell "
                f"counts, got extent={self.extent} cells={self.cells}"
            )
            raise ValueError(error_msg)
        if min(self.cells) < _MIN_CELLS:
            error_msg = f"Each direction needs at least {_MIN_CELLS} cells"
            raise ValueError(error_msg)
        spacing = self.extent[0] / self.cells[0]
        for length, count in zip(self.extent[1:], self.cells[1:], strict=True):
            if not math.isclose(length / count, spacing, rel_tol=_SPACING_RTOL):
                error_msg = (
                    "Grid cells must be square: spacing "
                    f"{length / count!r} differs from {spacing!r}"
                )
                raise ValueError(error_msg)
        return self

    @classmethod
    def interval(cls, length: float, nx: int) -> Self:
        return cls(dim=1, extent=(length,), cells=(nx,))

    @classmethod
    def rectangle(cls, lx: float, ly: float, nx: int, ny: int) -> Self:
        return cls(dim=2, extent=(lx, ly), cells=(nx, ny))

    @property
    def spacing(self) -> float:
        return self.extent[0] / self.cells[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def n_cells(self) -> int:
        return math.prod(self.cells)

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def measure(self) -> float:
        return math.prod(self.extent)

    def centers(self) -> tuple[np.ndarray, ...]:
        """Cell centre coordinates per direction."""
        h = self.spacing
        return tuple((np.arange(count) + 0.5) * h for count in self.cells)

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Cell centre coordinates broadcast to the cell array shape."""
        return tuple(np.meshgrid(*self.centers(), indexing="ij"))

    def scaled(self, factor: float) -> Grid:
        """Same cells on the domain stretched by `factor` in every direction."""
        if factor <= 0:
            error_msg = f"Scale factor must be positive, got {factor}"
            raise ValueError(error_msg)
        return Grid(
            dim=self.dim,
            extent=tuple(length * factor for length in self.extent),
            cells=self.cells,
        )

    # ---------------------------------------------------------------------------------
    # Raw cell-array kernels, used directly by the solvers' inner loops

    def check(self, values: np.ndarray) -> None:
        if values.shape != self.shape:
            error_msg = (
                f"Array of shape {values.shape} does not fit grid of shape {self.shape}"
            )
            raise GridMismatchError(error_msg)

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        # Face fluxes, zero on the boundary faces (mirror ghosts)
        out = np.zeros(values.shape, dtype=np.float64)
        for axis in range(values.ndim):
            flux = np.diff(values, axis=axis)
            out[_axis_slice(values.ndim, axis, None, -1)] += flux
            out[_axis_slice(values.ndim, axis, 1, None)] -= flux
        out /= self.spacing * self.spacing
        return out

    def grad_sq(self, values: np.ndarray) -> np.ndarray:
        total = np.zeros(values.shape, dtype=np.float64)
        two_h = 2.0 * self.spacing
        for axis in range(values.ndim):
            pad_width = [(1, 1) if a == axis else (0, 0) for a in range(values.ndim)]
            padded = np.pad(values, pad_width, mode="edge")
            centred = (
                padded[_axis_slice(values.ndim, axis, 2, None)]
                - padded[_axis_slice(values.ndim, axis, None, -2)]
            ) / two_h
            total += centred * centred
        return total

    def dirichlet_energy(self, values: np.ndarray) -> float:
        energy = 0.0
        for axis in range(values.ndim):
            jumps = np.diff(values, axis=axis)
            energy += float(np.sum(jumps * jumps))
        return energy * self.spacing ** (self.dim - 2)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values)) * self.cell_volume

    def laplacian_matrix(self) -> sp.csr_matrix:
        """Sparse matrix of `laplacian` acting on C-ordered flattened arrays."""
        h2 = self.spacing * self.spacing
        blocks = []
        for count in self.cells:
            main = np.full(count, -2.0)
            main[0] = main[-1] = -1.0
            off = np.ones(count - 1)
            blocks.append(sp.diags([off, main, off], [-1, 0, 1], format="csr") / h2)
        if self.dim == 1:
            return blocks[0].tocsr()
        nx, ny = self.cells
        return (
            sp.kron(blocks[0], sp.identity(ny)) + sp.kron(sp.identity(nx), blocks[1])
        ).tocsr()


class Field(BaseModel):
    """
    Scalar grid function: one finite real per cell.

    Values are stored as a read-only float64 array of shape `grid.shape`.
    """

    grid: Grid
    values: FloatArray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _validate_shape(self) -> Self:
        if self.values.shape != self.grid.shape:
            error_msg = (
                f"Field has {self.values.shape} values, "
                f"grid has {self.grid.shape} cells"
            )
            raise GridMismatchError(error_msg)
        return self

    @classmethod
    def constant(cls, grid: Grid, value: float) -> Self:
        return cls(grid=grid, values=np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, function: Callable[..., Any]) -> Self:
        """Sample ``function(x)`` or ``function(x, y)`` at the cell centres."""
        values = np.broadcast_to(function(*grid.mesh()), grid.shape)
        return cls(grid=grid, values=values)

    def with_values(self, values: np.ndarray) -> Field:
        return Field(grid=self.grid, values=values)

    @property
    def min(self) -> float:
        return float(np.min(self.values))

    @property
    def max(self) -> float:
        return float(np.max(self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return self.grid == other.grid and bool(
            np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def _same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for other in fields[1:]:
        if other.grid != grid:
            error_msg = f"Fields live on different grids: {grid} and {other.grid}"
            raise GridMismatchError(error_msg)
    return grid


def laplacian_neumann(f: Field, grid: Grid | None = None) -> Field:
    """
    Five-point (three-point in 1D) Laplacian with zero-flux ghost reflection.

    The stencil is assembled from face differences, so the cell sum of the
    result vanishes up to round-off for any input.

    Parameters
    ----------

    f: Field
        Input grid function.

    grid: Grid, optional
        Grid the caller expects `f` to live on.

    Returns
    -------

    Field
        Discrete Laplacian of `f`.
    """
    if grid is not None and grid != f.grid:
        error_msg = f"Field lives on {f.grid}, expected {grid}"
        raise GridMismatchError(error_msg)
    return f.with_values(f.grid.laplacian(f.values))


def mean(f: Field) -> float:
    return f.grid.integrate(f.values) / f.grid.measure


def integrate(f: Field) -> float:
    return f.grid.integrate(f.values)


def inner(f: Field, g: Field) -> float:
    grid = _same_grid(f, g)
    return grid.integrate(f.values * g.values)


def lp_norm(f: Field, p: float) -> float:
    """
    Cell-quadrature L^p norm; ``p = math.inf`` gives the max norm.
    """
    if p < 1:
        error_msg = f"L^p norm needs p >= 1, got {p}"
        raise ValueError(error_msg)
    magnitude = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(magnitude))
    if p == 1:
        return f.grid.integrate(magnitude)
    if p == 2:  # noqa: PLR2004
        return math.sqrt(f.grid.integrate(magnitude * magnitude))
    return f.grid.integrate(magnitude**p) ** (1.0 / p)


def grad_sq(f: Field) -> Field:
    """Cellwise |grad f|^2 from centred differences with mirrored boundary values."""
    return f.with_values(f.grid.grad_sq(f.values))


def dirichlet_energy(f: Field) -> float:
    """Exact discrete Dirichlet form, equal to ``-inner(f, laplacian_neumann(f))``."""
    return f.grid.dirichlet_energy(f.values)
