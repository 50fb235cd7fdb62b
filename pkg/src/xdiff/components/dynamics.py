# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import math
from collections.abc import Generator, Sequence

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict
from tqdm.auto import tqdm

from xdiff.components.diagnostics import DiagnosticsEngine, DiagnosticsRecord
from xdiff.components.model import ModelParams, State
from xdiff.numerics import EllipticSolver, Grid
from xdiff.typing import Helpful
from xdiff.typing.protocol import StepEvent, StepObserver
from xdiff.utils.compatibility import override
from xdiff.utils.exceptions import PositivityError, StiffnessError

logger = logging.getLogger("xdiff.components")

MAX_HALVINGS = 20
_SNAP_RTOL = 1e-9


def _stable_dt(grid: Grid, params: ModelParams, v: np.ndarray) -> float:
    gamma_max = float(np.max(params.motility.gamma(v)))
    h = grid.spacing
    dt = params.cfl_safety * h * h / (2.0 * grid.dim * gamma_max)
    if not dt >= params.dt_min:
        error_msg = (
            f"Stable time step below dt_min={params.dt_min:g} "
            f"(max gamma(v)={gamma_max:.3e})"
        )
        raise StiffnessError(error_msg, dt=dt)
    return dt


def stable_dt(state: State, params: ModelParams) -> float:
    """
    Explicit stability limit ``cfl_safety * h**2 / (2 * dim * max gamma(v))``.

    Raises
    ------

    StiffnessError
        When the limit falls below `params.dt_min`.
    """
    return _stable_dt(state.grid, params, state.v.values)


class TimeStepper:
    """
    One IMEX step on raw cell arrays.

    The cell density is advanced explicitly in conservative form,
    ``u' = u + dt lap_h(u gamma(v)) [+ dt u h(u)]``; the signal implicitly,
    ``(epsilon + dt) v' - dt lap_h v' = epsilon v + dt S(u)``, which is one
    Helmholtz solve with shift ``epsilon / dt``.
    """

    grid: Grid
    params: ModelParams
    solver: EllipticSolver

    def __init__(
        self, grid: Grid, params: ModelParams, solver: EllipticSolver | None = None
    ) -> None:
        if solver is not None and solver.grid != grid:
            error_msg = f"Solver grid {solver.grid} does not match state grid {grid}"
            raise ValueError(error_msg)
        self.grid = grid
        self.params = params
        self.solver = solver if solver is not None else EllipticSolver(grid=grid)

    def advance(
        self, u: np.ndarray, v: np.ndarray, dt: float
    ) -> tuple[np.ndarray, np.ndarray]:
        params = self.params
        if params.has_growth:
            assert params.growth is not None  # noqa: S101
            rate = params.growth.h(u)
            damped = u * (1.0 + dt * rate)
            if np.min(damped) < 0:
                error_msg = "Growth step drives the cell density negative"
                raise PositivityError(error_msg, min_value=float(np.min(damped)))
        u_new = u + dt * self.grid.laplacian(params.motility.flux(u, v))
        if params.has_growth:
            u_new += dt * u * rate
        if np.min(u_new) < 0:
            error_msg = "Explicit step drives the cell density negative"
            raise PositivityError(error_msg, min_value=float(np.min(u_new)))

        lam = params.epsilon / dt
        v_new = self.solver.solve_helmholtz(lam * v + params.source(u), lam)
        return u_new, v_new

    def floor_events(self, v: np.ndarray) -> int:
        """Cells where the power motility evaluates at its floor."""
        floor = self.params.motility.floor
        if floor is None:
            return 0
        return int(np.count_nonzero(v < floor))

    def clip_signal(self, v: np.ndarray) -> int:
        """Zero the negative cells of `v` in place and return how many there were."""
        negative = v < 0
        count = int(np.count_nonzero(negative))
        if count:
            v[negative] = 0.0
        return count


def step(
    state: State,
    params: ModelParams,
    dt: float,
    solver: EllipticSolver | None = None,
) -> State:
    """
    Advance `state` by one step of length `dt`.

    The caller is responsible for ``dt <= stable_dt(state, params)``.

    Raises
    ------

    PositivityError
        When the explicit update produces a negative cell density.
    """
    if not dt > 0:
        error_msg = f"Time step must be positive, got {dt}"
        raise ValueError(error_msg)
    stepper = TimeStepper(state.grid, params, solver)
    u_new, v_new = stepper.advance(state.u.values, state.v.values, dt)
    clipped = stepper.clip_signal(v_new)
    if clipped:
        logger.warning("Signal clipped to zero in %d cells at t=%g", clipped, state.t)
    return State.from_arrays(state.grid, state.t + dt, u_new, v_new)


class RunAudit(BaseModel):
    steps: int = 0
    halvings: int = 0
    floor_events: int = 0
    signal_clips: int = 0
    min_u: float = math.inf
    min_v: float = math.inf
    dt_min_used: float = math.inf
    dt_max_used: float = 0.0
    reason: str | None = None


class RunResult(BaseModel, Helpful):
    """
    Outcome of `run`.

    `final` is the last accepted state; when `complete` is False the run was
    aborted and `audit.reason` says why.
    """

    final: State
    records: list[DiagnosticsRecord]
    complete: bool
    audit: RunAudit
    snapshots: list[State] = pydantic.Field(default_factory=list)

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @override
    def _help(self) -> Generator[str]:
        audit = self.audit
        status = "complete" if self.complete else "ABORTED"
        yield f"run {status} at t={self.final.t:.6g}"
        if audit.reason:
            yield f"  reason: {audit.reason}"
        yield f"  steps: {audit.steps}, dt halvings: {audit.halvings}"
        if audit.steps:
            yield f"  dt range: [{audit.dt_min_used:.3e}, {audit.dt_max_used:.3e}]"
        yield f"  min u: {audit.min_u:.6g}, min v: {audit.min_v:.6g}"
        if audit.floor_events:
            yield f"  motility floor events: {audit.floor_events}"
        if audit.signal_clips:
            yield f"  signal clipped to zero: {audit.signal_clips} cells"
        yield f"  records: {len(self.records)}"


def run(  # noqa: PLR0912, PLR0915
    params: ModelParams,
    initial: State,
    t_end: float,
    observer_stride: int = 1,
    *,
    dt: float | None = None,
    solver: EllipticSolver | None = None,
    observers: Sequence[StepObserver] = (),
    snapshot_every: int = 0,
    progress: bool = False,
) -> RunResult:
    """
    Integrate from `initial` up to `t_end`.

    Parameters
    ----------

    params: ModelParams
        Model coefficients.

    initial: State
        Starting state, time ``t0 = initial.t``.

    t_end: float
        Final time, ``t_end >= t0``.

    observer_stride: int
        A diagnostics record is taken every `observer_stride` accepted steps,
        at ``t0`` and at `t_end`.

    dt: float, optional
        Fixed step. Without it every step uses `stable_dt`; with it every step
        uses ``min(dt, stable_dt)``. The last step is shortened to land on
        `t_end` exactly, unless it is already within round-off of it.

    solver: EllipticSolver, optional
        Solver for the signal update and the diagnostics.

    observers: Sequence[StepObserver]
        Called after every accepted step with the raw arrays of the step.

    snapshot_every: int
        Keep the state of every `snapshot_every`-th record (0 keeps none).

    progress: bool
        Show a progress bar over ``[t0, t_end]``.

    Returns
    -------

    RunResult
        Final state, records and audit. A positivity failure persisting after
        `MAX_HALVINGS` halvings, or a stiffness failure, ends the run with
        ``complete=False`` instead of raising.
        Negative signal values left by the Helmholtz solve are set to zero
        and counted in `audit.signal_clips`.
    """
    if observer_stride < 1:
        error_msg = f"observer_stride must be at least 1, got {observer_stride}"
        raise ValueError(error_msg)
    if t_end < initial.t:
        error_msg = f"t_end={t_end} precedes the initial time {initial.t}"
        raise ValueError(error_msg)
    if dt is not None and not dt > 0:
        error_msg = f"Fixed time step must be positive, got {dt}"
        raise ValueError(error_msg)

    grid = initial.grid
    stepper = TimeStepper(grid, params, solver)
    m = float(np.mean(initial.u.values))
    engine = DiagnosticsEngine(grid=grid, params=params, m=m, solver=stepper.solver)
    logger.info(
        "Run %s on %s from t=%g to t=%g",
        params.motility.label,
        grid.cells,
        initial.t,
        t_end,
    )

    t = initial.t
    u = initial.u.values
    v = initial.v.values
    audit = RunAudit(min_u=float(np.min(u)), min_v=float(np.min(v)))
    records = [engine.record(t, u, v)]
    snapshots = [initial] if snapshot_every > 0 else []
    for observer in observers:
        observer.start(t, u, v)

    def _keep_snapshot(t_now: float, u_now: np.ndarray, v_now: np.ndarray) -> None:
        if snapshot_every > 0 and (len(records) - 1) % snapshot_every == 0:
            snapshots.append(State.from_arrays(grid, t_now, u_now, v_now))

    fixed_warned = False
    since_record = 0
    span = t_end - initial.t
    with tqdm(total=100, dynamic_ncols=True, disable=not progress) as progress_bar:
        progress_bar.desc = "running"
        shown = 0
        while t < t_end:
            try:
                limit = _stable_dt(grid, params, v)
            except StiffnessError as error:
                audit.reason = str(error)
                logger.error("Run aborted at t=%g: %s", t, error)
                break
            if dt is None:
                trial = limit
            else:
                if dt > limit and not fixed_warned:
                    logger.warning(
                        "Fixed dt=%g exceeds the stable limit %g, using the limit",
                        dt,
                        limit,
                    )
                    fixed_warned = True
                trial = min(dt, limit)

            remaining = t_end - t
            last = remaining <= trial * (1.0 + _SNAP_RTOL)
            # Within the snap tolerance the step keeps its length and lands on t_end
            if last and remaining < trial * (1.0 - _SNAP_RTOL):
                trial = remaining

            halvings = 0
            while True:
                try:
                    u_new, v_new = stepper.advance(u, v, trial)
                    break
                except PositivityError as error:
                    if halvings == MAX_HALVINGS:
                        audit.reason = f"{error} after {MAX_HALVINGS} halvings"
                        break
                    halvings += 1
                    audit.halvings += 1
                    trial /= 2.0
                    last = False
                    logger.warning("%s at t=%g, halving dt to %g", error, t, trial)
            if audit.reason is not None:
                logger.error("Run aborted at t=%g: %s", t, audit.reason)
                break

            t_new = t_end if last else t + trial
            audit.steps += 1
            audit.min_u = min(audit.min_u, float(np.min(u_new)))
            audit.min_v = min(audit.min_v, float(np.min(v_new)))
            audit.signal_clips += stepper.clip_signal(v_new)
            audit.floor_events += stepper.floor_events(v_new)
            audit.dt_min_used = min(audit.dt_min_used, trial)
            audit.dt_max_used = max(audit.dt_max_used, trial)

            event = StepEvent(t, trial, u, v, u_new, v_new)
            for observer in observers:
                observer.observe(event)

            since_record += 1
            if since_record == observer_stride or t_new >= t_end:
                records.append(
                    engine.record(t_new, u_new, v_new, previous=(u, v, trial))
                )
                _keep_snapshot(t_new, u_new, v_new)
                since_record = 0

            t, u, v = t_new, u_new, v_new
            if span > 0:
                percent = int(100 * (t - initial.t) / span)
                progress_bar.update(percent - shown)
                shown = percent

        progress_bar.desc = "complete" if audit.reason is None else "aborted"

    if audit.floor_events:
        logger.warning(
            "Power motility evaluated at its floor %d times", audit.floor_events
        )
    if audit.signal_clips:
        logger.warning(
            "Signal clipped to zero in %d cells, min v before clipping %g",
            audit.signal_clips,
            audit.min_v,
        )
    if since_record:
        # Aborted runs still record the last accepted state
        records.append(engine.record(t, u, v))

    final = State.from_arrays(grid, t, u, v)
    logger.info("Run finished at t=%g after %d steps", t, audit.steps)
    return RunResult(
        final=final,
        records=records,
        complete=audit.reason is None,
        audit=audit,
        snapshots=snapshots,
    )
