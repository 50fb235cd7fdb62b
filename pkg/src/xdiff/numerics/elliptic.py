# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import math
from collections.abc import Iterable

import numpy as np
import pydantic
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, PrivateAttr
from scipy.fft import dctn, idctn
from scipy.sparse.linalg import cg

from xdiff.numerics.grid import Field, Grid, lp_norm
from xdiff.utils import SolverMethod
from xdiff.utils.exceptions import GridMismatchError, SolverConvergenceError

logger = logging.getLogger("xdiff.numerics")


class EllipticSolver(BaseModel):
    """
    Neumann solvers for the inverse Laplacian K and the Helmholtz inverse.

    `solve_K` returns the zero-mean z with ``-lap_h z = w - <w>``;
    `solve_helmholtz` returns z with ``-lap_h z + (1 + lam) z = w``. Both use
    the same stencil as `Grid.laplacian`, so the identities hold discretely.

    Parameters
    ----------

    grid: Grid
        Mesh the solver works on.

    method: SolverMethod
        ``spectral_cosine`` (type-II cosine transform, direct) or
        ``conjugate_gradient`` (sparse CG with mean projection).

    rel_tol: float
        Relative residual tolerance of the CG backend.

    max_iter: int, optional
        CG iteration cap, defaults to ten times the number of cells.

    Examples
    --------

    >>> solver = EllipticSolver(grid=Grid.interval(1.0, 64))
    >>> z = solver.solve_K(np.cos(np.pi * solver.grid.centers()[0]))
    """

    grid: Grid
    method: SolverMethod = SolverMethod.SPECTRAL_COSINE
    rel_tol: float = pydantic.Field(default=1e-10, gt=0, lt=1)
    max_iter: int | None = pydantic.Field(default=None, gt=0)

    model_config = ConfigDict(frozen=True)

    __eigenvalues: np.ndarray = PrivateAttr()
    __matrix: sp.csr_matrix = PrivateAttr()

    def model_post_init(self, context: object, /) -> None:
        h = self.grid.spacing
        axes = [
            (2.0 / (h * h)) * (1.0 - np.cos(np.pi * np.arange(count) / count))
            for count in self.grid.cells
        ]
        eigenvalues = axes[0] if self.grid.dim == 1 else np.add.outer(*axes)
        eigenvalues.flags.writeable = False
        self.__eigenvalues = eigenvalues
        self.__matrix = -self.grid.laplacian_matrix()

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ``-lap_h`` on the cosine modes, zero mode first."""
        return self.__eigenvalues

    @property
    def iteration_cap(self) -> int:
        return self.max_iter if self.max_iter is not None else 10 * self.grid.n_cells

    def solve_K(self, w: np.ndarray) -> np.ndarray:  # noqa: N802
        self.grid.check(w)
        centred = w - np.mean(w)
        if self.method == SolverMethod.SPECTRAL_COSINE:
            coefficients = dctn(centred, type=2, norm="ortho")
            flat = coefficients.reshape(-1)
            flat[0] = 0.0
            flat[1:] /= self.__eigenvalues.reshape(-1)[1:]
            z = idctn(coefficients, type=2, norm="ortho")
        else:
            z = self.__cg(self.__shifted(0.0), centred)
        return z - np.mean(z)

    def solve_helmholtz(self, w: np.ndarray, lam: float = 0.0) -> np.ndarray:
        if lam < 0:
            error_msg = f"Helmholtz shift must be non-negative, got {lam}"
            raise ValueError(error_msg)
        self.grid.check(w)
        if self.method == SolverMethod.SPECTRAL_COSINE:
            coefficients = dctn(w, type=2, norm="ortho")
            coefficients /= self.__eigenvalues + (1.0 + lam)
            return idctn(coefficients, type=2, norm="ortho")
        return self.__cg(self.__shifted(1.0 + lam), w)

    def __shifted(self, shift: float) -> sp.csr_matrix:
        if shift == 0.0:
            return self.__matrix
        return (self.__matrix + shift * sp.identity(self.grid.n_cells)).tocsr()

    def __cg(self, matrix: sp.csr_matrix, rhs: np.ndarray) -> np.ndarray:
        b = rhs.reshape(-1)
        norm_b = float(np.linalg.norm(b))
        if norm_b == 0.0:
            return np.zeros(self.grid.shape)

        iterations = 0

        def _count(_: np.ndarray) -> None:
            nonlocal iterations
            iterations += 1

        solution, info = cg(
            matrix,
            b,
            rtol=self.rel_tol,
            atol=0.0,
            maxiter=self.iteration_cap,
            callback=_count,
        )
        residual = float(np.linalg.norm(matrix @ solution - b)) / norm_b
        if info != 0:
            error_msg = "Conjugate gradient did not converge"
            raise SolverConvergenceError(
                error_msg, residual=residual, iterations=iterations
            )
        logger.debug(
            "CG converged in %d iterations, relative residual %.3e",
            iterations,
            residual,
        )
        return solution.reshape(self.grid.shape)


def _check_solver(solver: EllipticSolver, w: Field) -> None:
    if solver.grid != w.grid:
        error_msg = f"Solver grid {solver.grid} does not match field grid {w.grid}"
        raise GridMismatchError(error_msg)


def solve_K(solver: EllipticSolver, w: Field) -> Field:  # noqa: N802
    """
    Zero-mean solution of ``-lap_h z = w - <w>`` with Neumann conditions.

    The mean of `w` is removed before the solve and the mean of the result
    after it, so callers may pass fields with a residual mean.
    """
    _check_solver(solver, w)
    return w.with_values(solver.solve_K(w.values))


def solve_helmholtz(solver: EllipticSolver, w: Field, lam: float = 0.0) -> Field:
    """Solution of ``-lap_h z + (1 + lam) z = w`` with Neumann conditions."""
    _check_solver(solver, w)
    return w.with_values(solver.solve_helmholtz(w.values, lam))


def h1dual_norm(solver: EllipticSolver, w: Field) -> float:
    """
    Dual norm ``||grad K (w - <w>)||_2``.

    The gradient energy is the face-difference Dirichlet form, for which
    ``h1dual_norm(w)**2 == inner(solve_K(w), w - <w>)`` up to round-off.
    """
    _check_solver(solver, w)
    potential = solver.solve_K(w.values)
    return math.sqrt(max(solver.grid.dirichlet_energy(potential), 0.0))


def helmholtz_norm(solver: EllipticSolver, w: Field) -> float:
    """The equivalent dual norm ``||grad A^-1 w||_2 + ||A^-1 w - <w>||_2``."""
    _check_solver(solver, w)
    potential = w.with_values(solver.solve_helmholtz(w.values))
    centred = potential.with_values(potential.values - np.mean(w.values))
    return math.sqrt(
        max(solver.grid.dirichlet_energy(potential.values), 0.0)
    ) + lp_norm(centred, 2)


def norm_equivalence_ratio(
    solver: EllipticSolver, fields: Iterable[Field]
) -> tuple[float, float]:
    """
    Smallest and largest ratio `h1dual_norm / helmholtz_norm` over `fields`.

    Constant fields, for which both norms vanish, are skipped.
    """
    ratios = []
    for w in fields:
        denominator = helmholtz_norm(solver, w)
        if denominator <= 1e-12 * lp_norm(w, 2):
            continue
        ratios.append(h1dual_norm(solver, w) / denominator)
    if not ratios:
        error_msg = "Need at least one non-constant field"
        raise ValueError(error_msg)
    return min(ratios), max(ratios)
