# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

import math

import numpy as np
import pytest

from xdiff.numerics import (
    Field,
    Grid,
    dirichlet_energy,
    grad_sq,
    inner,
    integrate,
    laplacian_neumann,
    lp_norm,
    mean,
)
from xdiff.utils import GridMismatchError


def test_grid_geometry(grid_2d: Grid) -> None:
    assert grid_2d.spacing == 1.0 / 16
    assert grid_2d.shape == (16, 8)
    assert grid_2d.n_cells == 128
    assert grid_2d.measure == 0.5
    assert grid_2d.cell_volume == pytest.approx(1.0 / 256)
    x, y = grid_2d.mesh()
    assert x.shape == y.shape == (16, 8)
    assert x[0, 0] == pytest.approx(1.0 / 32)


@pytest.mark.parametrize(
    ("dim", "extent", "cells"),
    [
        (3, (1.0, 1.0, 1.0), (8, 8, 8)),
        (1, (1.0,), (2,)),
        (2, (1.0, 1.0), (16, 8)),
        (1, (-1.0,), (16,)),
        (2, (1.0,), (16,)),
    ],
)
def test_grid_rejects_bad_layout(
    dim: int, extent: tuple[float, ...], cells: tuple[int, ...]
) -> None:
    with pytest.raises(ValueError):  # noqa: PT011
        Grid(dim=dim, extent=extent, cells=cells)


def test_grid_scaled_keeps_cells(grid_1d: Grid) -> None:
    stretched = grid_1d.scaled(4.0)
    assert stretched.cells == grid_1d.cells
    assert stretched.extent == (4.0,)
    with pytest.raises(ValueError):  # noqa: PT011
        grid_1d.scaled(0.0)


def test_field_rejects_non_finite_and_wrong_shape(grid_1d: Grid) -> None:
    values = np.ones(grid_1d.shape)
    values[3] = np.nan
    with pytest.raises(ValueError):  # noqa: PT011
        Field(grid=grid_1d, values=values)
    with pytest.raises(ValueError):  # noqa: PT011
        Field(grid=grid_1d, values=np.ones(10))


def test_field_values_are_read_only(grid_1d: Grid) -> None:
    field = Field.constant(grid_1d, 2.0)
    with pytest.raises(ValueError):  # noqa: PT011
        field.values[0] = 1.0


def test_laplacian_conserves_sum(grid_2d: Grid, rng: np.random.Generator) -> None:
    for _ in range(20):
        f = Field(grid=grid_2d, values=rng.uniform(0.0, 5.0, grid_2d.shape))
        lap = laplacian_neumann(f)
        scale = float(np.max(np.abs(lap.values)))
        assert abs(float(np.sum(lap.values))) <= 1e-10 * scale


def test_laplacian_of_cosine_mode(grid_1d: Grid) -> None:
    f = Field.from_function(grid_1d, lambda x: np.cos(np.pi * x))
    h = grid_1d.spacing
    eigenvalue = 2.0 / (h * h) * (1.0 - math.cos(math.pi * h))
    lap = laplacian_neumann(f)
    np.testing.assert_allclose(lap.values, -eigenvalue * f.values, atol=1e-10)
    assert eigenvalue == pytest.approx(math.pi**2, rel=1e-3)


def test_laplacian_of_constant_is_zero(grid_2d: Grid) -> None:
    lap = laplacian_neumann(Field.constant(grid_2d, 3.7))
    assert np.all(lap.values == 0.0)


def test_laplacian_matrix_matches_stencil(
    grid_2d: Grid, rng: np.random.Generator
) -> None:
    values = rng.normal(size=grid_2d.shape)
    by_matrix = (grid_2d.laplacian_matrix() @ values.reshape(-1)).reshape(
        grid_2d.shape
    )
    np.testing.assert_allclose(by_matrix, grid_2d.laplacian(values), atol=1e-9)


def test_laplacian_neumann_grid_mismatch(grid_1d: Grid) -> None:
    f = Field.constant(grid_1d, 1.0)
    with pytest.raises(GridMismatchError):
        laplacian_neumann(f, Grid.interval(1.0, 32))


def test_dirichlet_energy_is_discrete_form(
    grid_2d: Grid, rng: np.random.Generator
) -> None:
    f = Field(grid=grid_2d, values=rng.normal(size=grid_2d.shape))
    energy = dirichlet_energy(f)
    assert energy > 0
    assert energy == pytest.approx(-inner(f, laplacian_neumann(f)), rel=1e-12)


def test_grad_sq_of_linear_profile_interior(grid_1d: Grid) -> None:
    f = Field.from_function(grid_1d, lambda x: 3.0 * x)
    gradient = grad_sq(f).values
    np.testing.assert_allclose(gradient[1:-1], 9.0, rtol=1e-12)
    assert np.all(grad_sq(Field.constant(grid_1d, 2.0)).values == 0.0)


def test_quadrature_helpers(grid_2d: Grid) -> None:
    f = Field.constant(grid_2d, 2.0)
    assert integrate(f) == pytest.approx(1.0)
    assert mean(f) == pytest.approx(2.0)
    assert lp_norm(f, 1) == pytest.approx(1.0)
    assert lp_norm(f, 2) == pytest.approx(2.0 * math.sqrt(0.5))
    assert lp_norm(f, 3) == pytest.approx(2.0 * 0.5 ** (1.0 / 3.0))
    assert lp_norm(f, math.inf) == 2.0
    with pytest.raises(ValueError):  # noqa: PT011
        lp_norm(f, 0.5)


def test_inner_needs_common_grid(grid_1d: Grid) -> None:
    f = Field.constant(grid_1d, 1.0)
    g = Field.constant(Grid.interval(2.0, 64), 1.0)
    with pytest.raises(GridMismatchError):
        inner(f, g)


def test_field_equality(grid_1d: Grid) -> None:
    assert Field.constant(grid_1d, 1.0) == Field.constant(grid_1d, 1.0)
    assert Field.constant(grid_1d, 1.0) != Field.constant(grid_1d, 1.5)


def test_laplacian_is_self_adjoint_and_non_positive(
    grid_2d: Grid, rng: np.random.Generator
) -> None:
    for _ in range(10):
        f = Field(grid=grid_2d, values=rng.normal(size=grid_2d.shape))
        g = Field(grid=grid_2d, values=rng.normal(size=grid_2d.shape))
        left = inner(f, laplacian_neumann(g))
        right = inner(laplacian_neumann(f), g)
        assert left == pytest.approx(right, rel=1e-12, abs=1e-12)
        assert inner(f, laplacian_neumann(f)) <= 0.0


def test_laplacian_second_order_on_interior_cells() -> None:
    def _interior_error(nx: int) -> float:
        grid = Grid.interval(1.0, nx)
        f = Field.from_function(grid, lambda x: x**2 * (1.0 - x) ** 2)
        exact = Field.from_function(grid, lambda x: 2.0 - 12.0 * x + 12.0 * x**2)
        error = laplacian_neumann(f).values - exact.values
        return float(np.max(np.abs(error[1:-1])))

    coarse, fine = _interior_error(32), _interior_error(64)
    assert fine <= 2.01 / 64**2
    assert coarse / fine == pytest.approx(4.0, rel=1e-3)


def test_l2_norm_of_cosine(grid_1d: Grid) -> None:
    f = Field.from_function(grid_1d, lambda x: np.cos(np.pi * x))
    h = grid_1d.spacing
    assert abs(lp_norm(f, 2) - math.sqrt(0.5)) <= h * h


def test_integrated_grad_sq_of_cosine_converges() -> None:
    def _error(nx: int) -> float:
        grid = Grid.interval(1.0, nx)
        f = Field.from_function(grid, lambda x: np.cos(np.pi * x))
        return abs(integrate(grad_sq(f)) - math.pi**2 / 2.0)

    coarse, fine = _error(32), _error(64)
    assert fine <= 20.0 / 64**2
    assert 3.5 <= coarse / fine <= 4.5
