# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

import logging

import numpy as np
import pytest

from xdiff.components import (
    MassDriftTracker,
    MeanRecursionTracker,
    ModelParams,
    State,
    TimeStepper,
    run,
    stable_dt,
    step,
)
from xdiff.numerics import Grid
from xdiff.specs import GrowthSpec, MotilitySpec
from xdiff.utils import MotilityKind, StiffnessError


def test_stable_dt_formula(grid_1d: Grid, params: ModelParams) -> None:
    state = State.homogeneous(grid_1d, 1.0)
    h = grid_1d.spacing
    assert stable_dt(state, params) == pytest.approx(0.4 * h * h)


def test_stable_dt_below_minimum(grid_1d: Grid, prototype: MotilitySpec) -> None:
    params = ModelParams(epsilon=1.0, motility=prototype, dt_min=1.0)
    with pytest.raises(StiffnessError):
        stable_dt(State.homogeneous(grid_1d, 1.0), params)


def test_step_keeps_homogeneous_state(grid_2d: Grid, params: ModelParams) -> None:
    state = State.homogeneous(grid_2d, 2.0)
    after = step(state, params, 1e-4)
    assert after.t == pytest.approx(1e-4)
    np.testing.assert_allclose(after.u.values, 2.0, rtol=1e-12)
    np.testing.assert_allclose(after.v.values, 2.0, rtol=1e-12)
    with pytest.raises(ValueError):  # noqa: PT011
        step(state, params, 0.0)


def test_step_conserves_cell_sum(smooth_state: State, params: ModelParams) -> None:
    dt = stable_dt(smooth_state, params)
    after = step(smooth_state, params, dt)
    assert np.sum(after.u.values) == pytest.approx(
        np.sum(smooth_state.u.values), rel=1e-14
    )


def test_run_conserves_mass_and_mean_recursion(
    smooth_state: State, params: ModelParams
) -> None:
    mass, mean = MassDriftTracker(), MeanRecursionTracker(params)
    result = run(params, smooth_state, 0.05, 20, observers=[mass, mean])
    assert result.complete
    assert result.final.t == 0.05
    assert mass.max_relative_drift <= 1e-11
    assert mean.max_recursion_error <= 1e-12
    assert mean.continuum_applicable
    assert mean.max_continuum_deviation <= 1e-3
    assert result.audit.min_u >= 0
    assert result.audit.min_v > 0


def test_run_records_and_snapshots(
    grid_1d: Grid, smooth_state: State, params: ModelParams
) -> None:
    dt = 0.1 * grid_1d.spacing**2
    result = run(params, smooth_state, 10 * dt, 1, dt=dt, snapshot_every=2)
    assert result.audit.steps == 10
    assert len(result.records) == 11
    assert [snapshot.t for snapshot in result.snapshots] == pytest.approx(
        [record.t for record in result.records[::2]]
    )
    assert result.snapshots[0] == smooth_state
    assert result.records[0].lyap_residual == 0.0
    assert result.records[-1].t == 10 * dt

    strided = run(params, smooth_state, 10 * dt, 4, dt=dt)
    assert [record.t for record in strided.records] == pytest.approx(
        [0.0, 4 * dt, 8 * dt, 10 * dt]
    )


def test_run_caps_fixed_dt(
    caplog: pytest.LogCaptureFixture, smooth_state: State, params: ModelParams
) -> None:
    with caplog.at_level(logging.WARNING, logger="xdiff.components"):
        result = run(params, smooth_state, 0.01, 100, dt=1.0)
    assert result.complete
    assert result.audit.steps > 1
    assert result.audit.dt_max_used < 1.0
    assert "exceeds the stable limit" in caplog.text


def test_run_aborts_when_stiff(
    caplog: pytest.LogCaptureFixture, smooth_state: State, prototype: MotilitySpec
) -> None:
    params = ModelParams(epsilon=1.0, motility=prototype, dt_min=1.0)
    with caplog.at_level(logging.ERROR, logger="xdiff.components"):
        result = run(params, smooth_state, 0.1)
    assert not result.complete
    assert result.audit.reason is not None
    assert result.final is not None
    assert "ABORTED" in result.help()
    assert "Run aborted" in caplog.text


def test_run_argument_checks(smooth_state: State, params: ModelParams) -> None:
    later = smooth_state.model_copy(update={"t": 1.0})
    with pytest.raises(ValueError):  # noqa: PT011
        run(params, later, 0.5)
    with pytest.raises(ValueError):  # noqa: PT011
        run(params, smooth_state, 1.0, 0)
    with pytest.raises(ValueError):  # noqa: PT011
        run(params, smooth_state, 1.0, dt=-1.0)


def test_run_with_zero_span(smooth_state: State, params: ModelParams) -> None:
    result = run(params, smooth_state, 0.0)
    assert result.complete
    assert result.audit.steps == 0
    assert len(result.records) == 1


def test_continued_run_matches_single_run(
    smooth_state: State, params: ModelParams
) -> None:
    dt = 1e-5
    single = run(params, smooth_state, 2e-3, 50, dt=dt)
    first = run(params, smooth_state, 1e-3, 50, dt=dt)
    second = run(params, first.final, 2e-3, 50, dt=dt)
    assert first.final.t == 1e-3
    assert first.audit.steps + second.audit.steps == single.audit.steps == 200
    assert first.audit.dt_min_used == first.audit.dt_max_used == dt
    assert np.array_equal(second.final.u.values, single.final.u.values)
    assert np.array_equal(second.final.v.values, single.final.v.values)


def test_clip_signal_counts_negative_cells(grid_1d: Grid, params: ModelParams) -> None:
    stepper = TimeStepper(grid_1d, params)
    v = np.linspace(-0.5, 1.0, grid_1d.shape[0])
    negative = int(np.count_nonzero(v < 0))
    assert negative > 0
    assert stepper.clip_signal(v) == negative
    assert v.min() == 0.0
    assert stepper.clip_signal(v) == 0


def test_regular_run_reports_no_signal_clips(
    smooth_state: State, params: ModelParams
) -> None:
    result = run(params, smooth_state, 0.01, 100)
    assert result.audit.signal_clips == 0
    assert "signal clipped" not in result.help()


def test_logistic_run_stays_positive(smooth_state: State) -> None:
    params = ModelParams(
        epsilon=1.0,
        motility=MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0),
        growth=GrowthSpec(h0=1.0, l=1.0),
    )
    mean = MeanRecursionTracker(params)
    result = run(params, smooth_state, 0.05, 50, observers=[mean])
    assert result.complete
    assert result.audit.min_u > 0
    assert not mean.continuum_applicable
    assert mean.max_recursion_error <= 1e-12


def test_power_motility_flux_is_constant_on_pattern(grid_1d: Grid) -> None:
    params = ModelParams(
        epsilon=1.0, motility=MotilitySpec(kind=MotilityKind.POWER, k=2.0)
    )
    (x,) = grid_1d.centers()
    v = 1.0 + 0.5 * np.cos(np.pi * x)
    state = State.from_arrays(grid_1d, 0.0, v**2, v)
    after = step(state, params, 1e-5)
    np.testing.assert_allclose(after.u.values, state.u.values, rtol=1e-12)
