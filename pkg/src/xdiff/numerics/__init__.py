# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.numerics.elliptic import (
    EllipticSolver,
    h1dual_norm,
    helmholtz_norm,
    norm_equivalence_ratio,
    solve_helmholtz,
    solve_K,
)
from xdiff.numerics.grid import (
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

__all__ = [
    "EllipticSolver",
    "Field",
    "Grid",
    "dirichlet_energy",
    "grad_sq",
    "h1dual_norm",
    "helmholtz_norm",
    "inner",
    "integrate",
    "laplacian_neumann",
    "lp_norm",
    "mean",
    "norm_equivalence_ratio",
    "solve_K",
    "solve_helmholtz",
]
