# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import math

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, PrivateAttr
from scipy.integrate import quad

from xdiff.components.model import ModelParams, State
from xdiff.numerics import EllipticSolver, Grid
from xdiff.specs import MollifiedMotility, MotilitySpec
from xdiff.utils import MotilityKind
from xdiff.utils.exceptions import SolverConvergenceError

logger = logging.getLogger("xdiff.components")

_PANELS = 8
_PANEL_NODES = 16
_CLOSED_FORM_RTOL = 1e-8


class DiagnosticsRecord(BaseModel):
    """
    One row of run diagnostics.

    Field order is the column order of the diagnostics CSV.
    """

    t: float
    mass_u: float
    mean_v: float
    L0: float
    D0_grad: float
    D0_relax: float
    D0_mono: float
    lyap_residual: float
    entropy_y: float
    h1dual_u: float
    l2_v: float
    h1_v: float
    min_v: float
    min_u: float
    energy_a21: float
    K_residual: float

    model_config = ConfigDict(frozen=True)

    @property
    def D0(self) -> float:  # noqa: N802
        return self.D0_grad + self.D0_relax + self.D0_mono


class G0Evaluator(BaseModel):
    """
    The convex weight ``G0`` of the Lyapunov functional.

    ``G0(m) = 0`` and ``G0'(z) = 2 z gamma(z) - m gamma(z) - m gamma(m)``.
    Closed forms are used for the prototype and power families with k = 1 and
    for constant motility; every other motility is integrated numerically from
    the anchor m.

    Parameters
    ----------

    motility: MotilitySpec | MollifiedMotility
        The motility gamma.

    m: float
        Anchor, the mean of the initial cell density.

    tol: float
        Relative tolerance of the scalar adaptive quadrature.
    """

    motility: MotilitySpec | MollifiedMotility
    m: float = pydantic.Field(gt=0)
    tol: float = pydantic.Field(default=1e-10, gt=0, lt=1)

    model_config = ConfigDict(frozen=True)

    __gamma_m: float = PrivateAttr()
    __nodes: np.ndarray = PrivateAttr()
    __weights: np.ndarray = PrivateAttr()

    def model_post_init(self, context: object, /) -> None:
        self.__gamma_m = float(self.motility.gamma(np.array(self.m)))
        x, w = np.polynomial.legendre.leggauss(_PANEL_NODES)
        starts = np.arange(_PANELS)[:, None] / _PANELS
        self.__nodes = (starts + (x[None, :] + 1.0) / (2.0 * _PANELS)).reshape(-1)
        self.__weights = np.tile(w / (2.0 * _PANELS), _PANELS)

    @property
    def gamma_m(self) -> float:
        return self.__gamma_m

    @property
    def has_closed_form(self) -> bool:
        spec = self.motility
        if not isinstance(spec, MotilitySpec):
            return False
        if spec.kind == MotilityKind.CONSTANT:
            return True
        return spec.kind in (MotilityKind.PROTOTYPE, MotilityKind.POWER) and spec.k == 1

    def derivative(self, z: np.ndarray) -> np.ndarray:
        gamma = self.motility.gamma(z)
        return 2.0 * z * gamma - self.m * gamma - self.m * self.__gamma_m

    def second(self, z: np.ndarray) -> np.ndarray:
        gamma = self.motility.gamma(z)
        slope = self.motility.gamma_prime(z)
        return 2.0 * z * slope + 2.0 * gamma - self.m * slope

    def closed_form(self, z: np.ndarray) -> np.ndarray | None:
        if not self.has_closed_form:
            return None
        assert isinstance(self.motility, MotilitySpec)  # noqa: S101
        m = self.m
        match self.motility.kind:
            case MotilityKind.CONSTANT:
                return self.motility.c * (z - m) ** 2
            case MotilityKind.PROTOTYPE:
                slope = 2.0 - m / (1.0 + m)
                return slope * (z - m) - (2.0 + m) * np.log((1.0 + z) / (1.0 + m))
            case _:
                return (z - m) - m * np.log(z / m)

    def values(self, z: np.ndarray) -> np.ndarray:
        """Cellwise ``G0(z)``; Gauss-Legendre on ``[m, z]`` without a closed form."""
        exact = self.closed_form(z)
        if exact is not None:
            return exact
        z = np.asarray(z, dtype=np.float64)
        span = z - self.m
        samples = self.m + span[..., None] * self.__nodes
        return span * (self.derivative(samples) @ self.__weights)

    def scalar(self, z: float) -> float:
        """Adaptive quadrature of ``G0'`` from m to z, checked by the closed form."""
        if z == self.m:
            return 0.0

        def _integrand(s: float) -> float:
            return float(self.derivative(np.array(s)))

        result = quad(
            _integrand,
            self.m,
            z,
            epsabs=1e-12,
            epsrel=self.tol,
            limit=200,
            full_output=1,
        )
        value, error, info = result[0], result[1], result[2]
        if len(result) > 3:  # noqa: PLR2004
            error_msg = f"G0 quadrature on [{self.m}, {z}] failed: {result[3]}"
            raise SolverConvergenceError(
                error_msg, residual=float(error), iterations=int(info["neval"])
            )

        exact = self.closed_form(np.array(z))
        if exact is None:
            return float(value)
        exact_value = float(exact)
        if abs(exact_value - value) > _CLOSED_FORM_RTOL * max(1.0, abs(exact_value)):
            logger.warning(
                "G0(%g) closed form %.17g and quadrature %.17g disagree",
                z,
                exact_value,
                value,
            )
        return exact_value


def _require_positive(z: float) -> None:
    if not z > 0:
        error_msg = f"G0 is evaluated at positive arguments only, got {z}"
        raise ValueError(error_msg)


def eval_G0(ev: G0Evaluator, z: float) -> float:  # noqa: N802
    """
    ``G0(z) = int_m^z G0'(s) ds``.

    Raises
    ------

    ValueError
        For ``z <= 0``.

    SolverConvergenceError
        When the adaptive quadrature does not reach its tolerance.
    """
    _require_positive(z)
    return ev.scalar(z)


def eval_G0_second(ev: G0Evaluator, z: float) -> float:  # noqa: N802
    """``G0''(z) = 2 z gamma'(z) + 2 gamma(z) - m gamma'(z)``."""
    _require_positive(z)
    return float(ev.second(np.array(z)))


class DiagnosticsEngine:
    """
    Evaluates the monitored functionals on raw cell arrays of one grid.

    All quantities use the anchor `m` (the initial mean of u) and share one
    elliptic solver.
    """

    grid: Grid
    params: ModelParams
    m: float
    solver: EllipticSolver
    g0: G0Evaluator

    def __init__(
        self,
        grid: Grid,
        params: ModelParams,
        m: float,
        solver: EllipticSolver | None = None,
    ) -> None:
        self.grid = grid
        self.params = params
        self.m = m
        self.solver = solver if solver is not None else EllipticSolver(grid=grid)
        self.g0 = G0Evaluator(motility=params.motility, m=m)

    def h1dual_sq(self, u: np.ndarray) -> float:
        """``||u - m||^2`` in the dual norm; the solve removes the mean itself."""
        return self.grid.dirichlet_energy(self.solver.solve_K(u))

    def L0(self, u: np.ndarray, v: np.ndarray) -> float:  # noqa: N802
        return 0.5 * self.h1dual_sq(u) + self.params.epsilon * self.grid.integrate(
            self.g0.values(v)
        )

    def D0(  # noqa: N802
        self, u: np.ndarray, v: np.ndarray
    ) -> tuple[float, float, float]:
        grid = self.grid
        motility = self.params.motility
        gamma = motility.gamma(v)
        gradient = grid.integrate(self.g0.second(v) * grid.grad_sq(v))
        relaxation = grid.integrate((u - v) ** 2 * gamma)
        monotone = grid.integrate(
            (v - self.m) * (v * gamma - self.m * self.g0.gamma_m)
        )
        return gradient, relaxation, monotone

    def entropy(self, u: np.ndarray, v: np.ndarray) -> float:
        shifted = u + math.e
        return self.grid.integrate(
            shifted * (np.log(shifted) - 1.0)
        ) + self.params.epsilon * self.grid.integrate(self.grid.grad_sq(v))

    def lyapunov_residual(
        self,
        u_old: np.ndarray,
        v_old: np.ndarray,
        u_new: np.ndarray,
        v_new: np.ndarray,
        dt: float,
    ) -> float:
        """``|(L0' - L0) / dt + D0(mid)|`` with D0 at the averaged state."""
        dissipation = sum(self.D0(0.5 * (u_old + u_new), 0.5 * (v_old + v_new)))
        rate = (self.L0(u_new, v_new) - self.L0(u_old, v_old)) / dt
        return abs(rate + dissipation)

    def K_residual(  # noqa: N802
        self,
        u_old: np.ndarray,
        v_old: np.ndarray,
        u_new: np.ndarray,
        v_new: np.ndarray,
        dt: float,
    ) -> float:
        """L2 norm of ``K(u' - u) / dt + f - <f>`` with the midpoint flux f."""
        flux = self.params.motility.flux(0.5 * (u_old + u_new), 0.5 * (v_old + v_new))
        residual = self.solver.solve_K(u_new - u_old) / dt + flux - np.mean(flux)
        return math.sqrt(self.grid.integrate(residual * residual))

    def record(
        self,
        t: float,
        u: np.ndarray,
        v: np.ndarray,
        previous: tuple[np.ndarray, np.ndarray, float] | None = None,
    ) -> DiagnosticsRecord:
        """
        Diagnostics of the state ``(t, u, v)``.

        `previous` is ``(u_old, v_old, dt)`` of the step that produced the
        state; without it both step residuals are 0.
        """
        grid = self.grid
        d0_grad, d0_relax, d0_mono = self.D0(u, v)
        lyap = k_residual = 0.0
        if previous is not None:
            u_old, v_old, dt = previous
            lyap = self.lyapunov_residual(u_old, v_old, u, v, dt)
            k_residual = self.K_residual(u_old, v_old, u, v, dt)
        l2_sq = grid.integrate(v * v)
        return DiagnosticsRecord(
            t=t,
            mass_u=grid.integrate(u),
            mean_v=grid.integrate(v) / grid.measure,
            L0=self.L0(u, v),
            D0_grad=d0_grad,
            D0_relax=d0_relax,
            D0_mono=d0_mono,
            lyap_residual=lyap,
            entropy_y=self.entropy(u, v),
            h1dual_u=math.sqrt(max(self.h1dual_sq(u), 0.0)),
            l2_v=math.sqrt(l2_sq),
            h1_v=math.sqrt(l2_sq + grid.integrate(grid.grad_sq(v))),
            min_v=float(np.min(v)),
            min_u=float(np.min(u)),
            energy_a21=grid.integrate(u * u * self.params.motility.gamma(v)),
            K_residual=k_residual,
        )


def _solver_for(grid: Grid, solver: EllipticSolver | None) -> EllipticSolver:
    if solver is None:
        return EllipticSolver(grid=grid)
    if solver.grid != grid:
        error_msg = f"Solver grid {solver.grid} does not match state grid {grid}"
        raise ValueError(error_msg)
    return solver


def eval_L0(  # noqa: N802
    state: State,
    ev: G0Evaluator,
    *,
    epsilon: float,
    solver: EllipticSolver | None = None,
) -> float:
    """
    Lyapunov functional ``1/2 ||u - m||^2 + epsilon int G0(v)``.

    The first term is the squared dual norm, the anchor is ``ev.m``.
    """
    grid = state.grid
    potential = _solver_for(grid, solver).solve_K(state.u.values)
    return 0.5 * grid.dirichlet_energy(potential) + epsilon * grid.integrate(
        ev.values(state.v.values)
    )


def eval_D0(state: State, ev: G0Evaluator) -> tuple[float, float, float]:  # noqa: N802
    """
    The three dissipation integrals.

    Returns
    -------

    tuple[float, float, float]
        ``int G0''(v) |grad v|^2``, ``int (u - v)^2 gamma(v)`` and
        ``int (v - m)(v gamma(v) - m gamma(m))``.
    """
    grid = state.grid
    u, v = state.u.values, state.v.values
    gamma = ev.motility.gamma(v)
    return (
        grid.integrate(ev.second(v) * grid.grad_sq(v)),
        grid.integrate((u - v) ** 2 * gamma),
        grid.integrate((v - ev.m) * (v * gamma - ev.m * ev.gamma_m)),
    )


def lyapunov_residual(
    record_n: DiagnosticsRecord,
    record_np1: DiagnosticsRecord,
    D0_mid: float | tuple[float, float, float],  # noqa: N803
) -> float:
    """``|(L0(n+1) - L0(n)) / dt + D0_mid|`` between two consecutive records."""
    dt = record_np1.t - record_n.t
    if not dt > 0:
        error_msg = f"Records must be in increasing time order, got dt={dt}"
        raise ValueError(error_msg)
    dissipation = D0_mid if isinstance(D0_mid, float | int) else sum(D0_mid)
    return abs((record_np1.L0 - record_n.L0) / dt + dissipation)


def eval_entropy(state: State, *, epsilon: float) -> float:
    """``int (u + e)(ln(u + e) - 1) + epsilon int |grad v|^2``."""
    grid = state.grid
    shifted = state.u.values + math.e
    return grid.integrate(shifted * (np.log(shifted) - 1.0)) + epsilon * grid.integrate(
        grid.grad_sq(state.v.values)
    )


def K_equation_residual(  # noqa: N802
    state_n: State,
    state_np1: State,
    motility: MotilitySpec | MollifiedMotility,
    solver: EllipticSolver | None = None,
) -> float:
    """
    Residual of ``d/dt K(u - m) = <u gamma(v)> - u gamma(v)`` across one step.

    The flux is evaluated at the midpoint fields.
    """
    grid = state_n.grid
    if state_np1.grid != grid:
        error_msg = "Consecutive states must share a grid"
        raise ValueError(error_msg)
    dt = state_np1.t - state_n.t
    if not dt > 0:
        error_msg = f"States must be in increasing time order, got dt={dt}"
        raise ValueError(error_msg)
    u_old, u_new = state_n.u.values, state_np1.u.values
    flux = motility.flux(
        0.5 * (u_old + u_new), 0.5 * (state_n.v.values + state_np1.v.values)
    )
    potential = _solver_for(grid, solver).solve_K(u_new - u_old)
    residual = potential / dt + flux - np.mean(flux)
    return math.sqrt(grid.integrate(residual * residual))
