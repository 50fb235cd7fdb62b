# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

"""
Per-step observers for `dynamics.run`.

Each observer sees every accepted step through `StepEvent` and accumulates one
family of checks without storing the trajectory.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from functools import reduce
from typing import Literal

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict

from xdiff.components.diagnostics import DiagnosticsEngine
from xdiff.components.model import ModelParams, State
from xdiff.numerics import Grid
from xdiff.typing.protocol import SpaceTimeTest, StepEvent

logger = logging.getLogger("xdiff.components")

_MONOTONE_SLACK = 10.0


class MassDriftTracker:
    """Largest relative change of the cell sum of u against the initial sum."""

    def __init__(self) -> None:
        self.initial = 0.0
        self.max_relative_drift = 0.0

    def start(self, t: float, u: np.ndarray, v: np.ndarray) -> None:
        self.initial = float(np.sum(u))
        self.max_relative_drift = 0.0

    def observe(self, event: StepEvent) -> None:
        drift = abs(float(np.sum(event.u_new)) - self.initial)
        scale = abs(self.initial) if self.initial != 0.0 else 1.0
        self.max_relative_drift = max(self.max_relative_drift, drift / scale)


class MeanRecursionTracker:
    """
    Checks the scalar recursion of the mean of v.

    Summing the implicit signal update over the cells gives
    ``<v'> = (epsilon <v> + dt <S(u)>) / (epsilon + dt)`` exactly. Without growth
    and with the plain source the continuum mean is
    ``<v_in> exp(-t / epsilon) + m (1 - exp(-t / epsilon))``; its largest
    deviation is tracked as well.
    """

    def __init__(self, params: ModelParams) -> None:
        self.params = params
        self.max_recursion_error = 0.0
        self.max_continuum_deviation = 0.0
        self.__v0 = 0.0
        self.__m = 0.0
        self.__t0 = 0.0

    @property
    def continuum_applicable(self) -> bool:
        return not self.params.has_growth and self.params.source_eta == 0.0

    def start(self, t: float, u: np.ndarray, v: np.ndarray) -> None:
        self.__t0 = t
        self.__v0 = float(np.mean(v))
        self.__m = float(np.mean(u))
        self.max_recursion_error = 0.0
        self.max_continuum_deviation = 0.0

    def observe(self, event: StepEvent) -> None:
        epsilon = self.params.epsilon
        expected = (
            epsilon * float(np.mean(event.v_old))
            + event.dt * float(np.mean(self.params.source(event.u_old)))
        ) / (epsilon + event.dt)
        observed = float(np.mean(event.v_new))
        self.max_recursion_error = max(
            self.max_recursion_error, abs(observed - expected)
        )
        decay = math.exp(-(event.t + event.dt - self.__t0) / epsilon)
        reference = self.__v0 * decay + self.__m * (1.0 - decay)
        self.max_continuum_deviation = max(
            self.max_continuum_deviation, abs(observed - reference)
        )


class LyapunovTracker:
    """
    Step-by-step check of the dissipation identity ``dL0/dt + D0 = 0``.

    Tracks the largest per-step residual (D0 at the averaged state), the
    largest K-equation residual, the trapezoidal integral of D0 and the number
    of steps where L0 grows by more than ten times the step's residual.
    """

    def __init__(self, engine: DiagnosticsEngine) -> None:
        self.engine = engine
        self.initial_L0 = 0.0
        self.final_L0 = 0.0
        self.dissipation_integral = 0.0
        self.max_residual = 0.0
        self.max_K_residual = 0.0
        self.violations = 0
        self.min_D0 = (math.inf, math.inf, math.inf)
        self.__dissipation = 0.0

    def start(self, t: float, u: np.ndarray, v: np.ndarray) -> None:
        self.initial_L0 = self.final_L0 = self.engine.L0(u, v)
        components = self.engine.D0(u, v)
        self.__dissipation = sum(components)
        self.min_D0 = components
        self.dissipation_integral = 0.0
        self.max_residual = self.max_K_residual = 0.0
        self.violations = 0

    def observe(self, event: StepEvent) -> None:
        engine = self.engine
        dt = event.dt
        level = engine.L0(event.u_new, event.v_new)
        components = engine.D0(event.u_new, event.v_new)
        midpoint = engine.D0(
            0.5 * (event.u_old + event.u_new), 0.5 * (event.v_old + event.v_new)
        )
        residual = abs((level - self.final_L0) / dt + sum(midpoint))
        self.max_residual = max(self.max_residual, residual)
        self.max_K_residual = max(
            self.max_K_residual,
            engine.K_residual(event.u_old, event.v_old, event.u_new, event.v_new, dt),
        )

        slack = _MONOTONE_SLACK * residual * dt + 1e-14 * max(1.0, abs(level))
        if level > self.final_L0 + slack:
            self.violations += 1
            logger.debug("L0 grew by %.3e at t=%g", level - self.final_L0, event.t)

        dissipation = sum(components)
        self.dissipation_integral += 0.5 * dt * (self.__dissipation + dissipation)
        self.__dissipation = dissipation
        self.min_D0 = tuple(
            min(a, b) for a, b in zip(self.min_D0, components, strict=True)
        )  # type: ignore[assignment]
        self.final_L0 = level

    @property
    def energy_balance(self) -> float:
        """``(L0(final) + int D0 dt) / L0(initial)``, 1 in the continuum."""
        if self.initial_L0 == 0.0:
            return 1.0
        return (self.final_L0 + self.dissipation_integral) / self.initial_L0


class FluxIntegralTracker:
    """Space-time integral of ``|grad(u sqrt(gamma(v)))|^(4/3)``."""

    def __init__(self, grid: Grid, params: ModelParams) -> None:
        self.grid = grid
        self.params = params
        self.value = 0.0

    def start(self, t: float, u: np.ndarray, v: np.ndarray) -> None:
        self.value = 0.0

    def observe(self, event: StepEvent) -> None:
        weighted = event.u_new * np.sqrt(self.params.motility.gamma(event.v_new))
        self.value += event.dt * self.grid.integrate(
            self.grid.grad_sq(weighted) ** (2.0 / 3.0)
        )


class CosineTestFunction(BaseModel):
    """
    Test function ``amplitude * psi(t) * prod_i cos(pi n_i x_i / L_i)``.

    ``psi(t) = sin(pi t / horizon)`` for ``temporal="sine"`` (vanishing at both
    ends of the horizon) and ``psi = 1`` for ``temporal="constant"``. The normal
    derivative vanishes on the boundary of every rectangle.
    """

    horizon: float = pydantic.Field(gt=0)
    modes: tuple[int, ...] = (1,)
    temporal: Literal["sine", "constant"] = "sine"
    amplitude: float = 1.0

    model_config = ConfigDict(frozen=True)

    def __profile(self, t: float) -> float:
        if self.temporal == "constant":
            return self.amplitude
        return self.amplitude * math.sin(math.pi * t / self.horizon)

    def __spatial(
        self, centers: tuple[np.ndarray, ...], extent: tuple[float, ...]
    ) -> np.ndarray:
        if len(centers) != len(self.modes):
            error_msg = (
                f"Test function has {len(self.modes)} modes, grid has "
                f"{len(centers)} directions"
            )
            raise ValueError(error_msg)
        factors = [
            np.cos(math.pi * mode * x / length)
            for mode, x, length in zip(self.modes, centers, extent, strict=True)
        ]
        return reduce(np.multiply.outer, factors)

    def wavenumber_sq(self, extent: tuple[float, ...]) -> float:
        return sum(
            (math.pi * mode / length) ** 2
            for mode, length in zip(self.modes, extent, strict=True)
        )

    def value(
        self, t: float, centers: tuple[np.ndarray, ...], extent: tuple[float, ...]
    ) -> np.ndarray:
        return self.__profile(t) * self.__spatial(centers, extent)

    def laplacian(
        self, t: float, centers: tuple[np.ndarray, ...], extent: tuple[float, ...]
    ) -> np.ndarray:
        return -self.wavenumber_sq(extent) * self.value(t, centers, extent)


class WeakFormAccumulator:
    """
    Residuals of the two very weak integral identities against a test function.

    With ``phi_n = phi(t_n)`` the accumulated sums are

    ``r_u = -sum <u_{n+1}, phi_{n+1} - phi_n> - <u_0, phi_0> + <u_N, phi_N>
    - sum dt (<u_n gamma(v_n), lap phi_n> + <u_n h(u_n), phi_n>)``

    ``r_v = -epsilon sum <v_n, phi_{n+1} - phi_n> - epsilon <v_0, phi_0>
    + epsilon <v_N, phi_N> - sum dt (<v_{n+1}, lap phi_{n+1} - phi_{n+1}>
    + <S(u_n), phi_{n+1}>)``

    where ``lap`` is the exact Laplacian of phi. By summation by parts both
    vanish up to the consistency error of the discrete Laplacian.
    """

    def __init__(self, grid: Grid, params: ModelParams, test: SpaceTimeTest) -> None:
        self.grid = grid
        self.params = params
        self.test = test
        self.__centers = grid.centers()
        self.__u_sum = 0.0
        self.__v_sum = 0.0
        self.__terminal = (0.0, 0.0)
        self.__phi = np.zeros(grid.shape)
        self.__lap_phi = np.zeros(grid.shape)

    def __evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        extent = self.grid.extent
        return (
            self.test.value(t, self.__centers, extent),
            self.test.laplacian(t, self.__centers, extent),
        )

    def start(self, t: float, u: np.ndarray, v: np.ndarray) -> None:
        self.__phi, self.__lap_phi = self.__evaluate(t)
        integrate = self.grid.integrate
        epsilon = self.params.epsilon
        self.__u_sum = -integrate(u * self.__phi)
        self.__v_sum = -epsilon * integrate(v * self.__phi)
        self.__terminal = (-self.__u_sum, -self.__v_sum)

    def observe(self, event: StepEvent) -> None:
        params = self.params
        integrate = self.grid.integrate
        phi_old, lap_old = self.__phi, self.__lap_phi
        phi_new, lap_new = self.__evaluate(event.t + event.dt)
        increment = phi_new - phi_old
        dt = event.dt

        u_term = integrate(params.motility.flux(event.u_old, event.v_old) * lap_old)
        if params.has_growth:
            assert params.growth is not None  # noqa: S101
            u_term += integrate(event.u_old * params.growth.h(event.u_old) * phi_old)
        self.__u_sum += -integrate(event.u_new * increment) - dt * u_term

        v_term = integrate(event.v_new * (lap_new - phi_new)) + integrate(
            params.source(event.u_old) * phi_new
        )
        v_time = params.epsilon * integrate(event.v_old * increment)
        self.__v_sum -= v_time + dt * v_term

        self.__terminal = (
            integrate(event.u_new * phi_new),
            params.epsilon * integrate(event.v_new * phi_new),
        )
        self.__phi, self.__lap_phi = phi_new, lap_new

    @property
    def residuals(self) -> tuple[float, float]:
        return (
            self.__u_sum + self.__terminal[0],
            self.__v_sum + self.__terminal[1],
        )


def weakform_residual(
    trajectory: Sequence[State],
    test: SpaceTimeTest,
    params: ModelParams,
) -> tuple[float, float]:
    """
    Very weak form residuals ``(r_u, r_v)`` of a stored trajectory.

    Consecutive states must be consecutive accepted steps of one run; the
    identities are exact sums only for the step sequence that produced them.

    Raises
    ------

    ValueError
        For an empty trajectory, mixed grids or non-increasing times.
    """
    if not trajectory:
        error_msg = "Trajectory must hold at least one state"
        raise ValueError(error_msg)
    grid = trajectory[0].grid
    accumulator = WeakFormAccumulator(grid, params, test)
    first = trajectory[0]
    accumulator.start(first.t, first.u.values, first.v.values)
    for before, after in zip(trajectory, trajectory[1:], strict=False):
        if after.grid != grid:
            error_msg = "Trajectory states must share a grid"
            raise ValueError(error_msg)
        dt = after.t - before.t
        if not dt > 0:
            error_msg = f"Trajectory times must increase, got dt={dt} at t={before.t}"
            raise ValueError(error_msg)
        accumulator.observe(
            StepEvent(
                before.t,
                dt,
                before.u.values,
                before.v.values,
                after.u.values,
                after.v.values,
            )
        )
    return accumulator.residuals
