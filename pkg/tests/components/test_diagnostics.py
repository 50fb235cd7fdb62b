# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

import math

import numpy as np
import pytest
from scipy.integrate import quad

from xdiff.components import (
    DiagnosticsEngine,
    G0Evaluator,
    K_equation_residual,
    ModelParams,
    State,
    eval_D0,
    eval_entropy,
    eval_G0,
    eval_G0_second,
    eval_L0,
    lyapunov_residual,
    stable_dt,
    step,
)
from xdiff.numerics import Grid
from xdiff.specs import MotilitySpec, mollify
from xdiff.utils import MotilityKind


@pytest.mark.parametrize(
    "motility",
    [
        MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0),
        MotilitySpec(kind=MotilityKind.POWER, k=1.0),
        MotilitySpec(kind=MotilityKind.CONSTANT, c=2.0),
    ],
)
def test_g0_closed_forms_match_quadrature(motility: MotilitySpec) -> None:
    ev = G0Evaluator(motility=motility, m=1.5)
    assert ev.has_closed_form
    for z in (0.1, 0.9, 1.5, 4.0, 20.0):
        expected, _ = quad(lambda s: float(ev.derivative(np.array(s))), 1.5, z)
        exact = float(ev.closed_form(np.array(z)))
        assert exact == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert eval_G0(ev, z) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize(
    "motility",
    [
        MotilitySpec(kind=MotilityKind.PROTOTYPE, k=2.0),
        MotilitySpec(kind=MotilityKind.EXPONENTIAL),
        mollify(MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0), 0.1),
    ],
)
def test_g0_cellwise_quadrature_matches_scalar(
    motility: MotilitySpec,
) -> None:
    ev = G0Evaluator(motility=motility, m=1.0)
    assert not ev.has_closed_form
    z = np.array([0.2, 0.7, 1.0, 1.3, 3.0])
    expected = [eval_G0(ev, float(point)) for point in z]
    np.testing.assert_allclose(ev.values(z), expected, rtol=1e-9, atol=1e-13)


def test_g0_is_convex_with_minimum_at_anchor(prototype: MotilitySpec) -> None:
    ev = G0Evaluator(motility=prototype, m=1.0)
    z = np.linspace(0.01, 10.0, 500)
    assert eval_G0(ev, 1.0) == 0.0
    assert np.all(ev.values(z) >= -1e-14)
    assert np.all(ev.second(z) > 0)
    assert eval_G0_second(ev, 1.0) == pytest.approx(3.0 / 4.0)


def test_g0_argument_checks(prototype: MotilitySpec) -> None:
    ev = G0Evaluator(motility=prototype, m=1.0)
    with pytest.raises(ValueError):  # noqa: PT011
        eval_G0(ev, 0.0)
    with pytest.raises(ValueError):  # noqa: PT011
        eval_G0_second(ev, -1.0)
    with pytest.raises(ValueError):  # noqa: PT011
        G0Evaluator(motility=prototype, m=0.0)


def test_functionals_vanish_at_homogeneous_state(
    grid_2d: Grid, prototype: MotilitySpec
) -> None:
    state = State.homogeneous(grid_2d, 1.5)
    ev = G0Evaluator(motility=prototype, m=1.5)
    assert eval_L0(state, ev, epsilon=1.0) == pytest.approx(0.0, abs=1e-14)
    assert eval_D0(state, ev) == pytest.approx((0.0, 0.0, 0.0), abs=1e-14)
    shifted = 1.5 + math.e
    expected = shifted * (math.log(shifted) - 1.0) * grid_2d.measure
    assert eval_entropy(state, epsilon=1.0) == pytest.approx(expected)


def test_dissipation_components_are_non_negative(
    smooth_state: State, prototype: MotilitySpec
) -> None:
    ev = G0Evaluator(motility=prototype, m=1.0)
    assert all(part >= 0 for part in eval_D0(smooth_state, ev))
    assert eval_L0(smooth_state, ev, epsilon=1.0) > 0


def test_engine_record(smooth_state: State, params: ModelParams) -> None:
    grid = smooth_state.grid
    engine = DiagnosticsEngine(grid, params, 1.0)
    u, v = smooth_state.u.values, smooth_state.v.values
    record = engine.record(0.0, u, v)
    ev = G0Evaluator(motility=params.motility, m=1.0)
    assert record.mass_u == pytest.approx(1.0)
    assert record.mean_v == pytest.approx(1.0)
    assert record.L0 == pytest.approx(eval_L0(smooth_state, ev, epsilon=1.0))
    assert record.D0 == pytest.approx(sum(eval_D0(smooth_state, ev)))
    assert record.min_u == pytest.approx(0.8, abs=1e-3)
    assert record.lyap_residual == record.K_residual == 0.0
    assert record.h1_v >= record.l2_v


def test_k_equation_residual_is_first_order(
    smooth_state: State, params: ModelParams
) -> None:
    dt = stable_dt(smooth_state, params)
    coarse = K_equation_residual(
        smooth_state, step(smooth_state, params, dt), params.motility
    )
    fine = K_equation_residual(
        smooth_state, step(smooth_state, params, dt / 4), params.motility
    )
    assert 0 < fine < 0.4 * coarse
    assert coarse <= 10 * dt
    with pytest.raises(ValueError):  # noqa: PT011
        K_equation_residual(smooth_state, smooth_state, params.motility)


def test_record_lyapunov_residual(smooth_state: State, params: ModelParams) -> None:
    engine = DiagnosticsEngine(smooth_state.grid, params, 1.0)
    dt = stable_dt(smooth_state, params)
    after = step(smooth_state, params, dt)
    before_record = engine.record(0.0, smooth_state.u.values, smooth_state.v.values)
    after_record = engine.record(
        dt,
        after.u.values,
        after.v.values,
        previous=(smooth_state.u.values, smooth_state.v.values, dt),
    )
    mid = engine.D0(
        0.5 * (smooth_state.u.values + after.u.values),
        0.5 * (smooth_state.v.values + after.v.values),
    )
    assert lyapunov_residual(before_record, after_record, mid) == pytest.approx(
        after_record.lyap_residual, rel=1e-9, abs=1e-12
    )
    assert after_record.L0 < before_record.L0
    with pytest.raises(ValueError):  # noqa: PT011
        lyapunov_residual(after_record, before_record, mid)


@pytest.mark.parametrize(
    "motility",
    [
        MotilitySpec(kind=MotilityKind.PROTOTYPE, k=0.5),
        MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0),
        MotilitySpec(kind=MotilityKind.POWER, k=1.0),
    ],
)
@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_g0_non_negative_and_convex(motility: MotilitySpec, m: float) -> None:
    ev = G0Evaluator(motility=motility, m=m)
    z = np.linspace(0.0, 20.0, 1001)[1:]
    assert eval_G0(ev, m) == 0.0
    assert np.all(ev.values(z) >= -1e-9)
    assert np.all(ev.second(z) >= -1e-9)


@pytest.mark.parametrize(
    "motility",
    [
        MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0),
        MotilitySpec(kind=MotilityKind.PROTOTYPE, k=2.0),
        MotilitySpec(kind=MotilityKind.POWER, k=1.5),
        MotilitySpec(kind=MotilityKind.EXPONENTIAL),
        mollify(MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0), 0.1),
    ],
)
def test_g0_second_matches_finite_differences(motility: MotilitySpec) -> None:
    ev = G0Evaluator(motility=motility, m=1.2)
    for z in (0.3, 0.8, 1.2, 2.5, 7.0):
        s = 1e-5 * max(1.0, z)
        slope_up = float(ev.derivative(np.array(z + s)))
        slope_down = float(ev.derivative(np.array(z - s)))
        expected = (slope_up - slope_down) / (2.0 * s)
        assert eval_G0_second(ev, z) == pytest.approx(expected, rel=1e-6, abs=1e-9)


def test_g0_second_matches_closed_form_curvature(prototype: MotilitySpec) -> None:
    ev = G0Evaluator(motility=prototype, m=1.0)
    z, s = np.array([0.5, 1.0, 3.0]), 1e-3
    curvature = (
        ev.closed_form(z + s) - 2.0 * ev.closed_form(z) + ev.closed_form(z - s)
    ) / (s * s)
    np.testing.assert_allclose(ev.second(z), curvature, rtol=1e-5)


def test_dissipation_with_homogeneous_signal(
    grid_1d: Grid, prototype: MotilitySpec
) -> None:
    u = 1.0 + 0.3 * np.cos(np.pi * grid_1d.centers()[0])
    state = State.from_arrays(grid_1d, 0.0, u, np.ones(grid_1d.shape))
    ev = G0Evaluator(motility=prototype, m=1.0)
    grad, relax, mono = eval_D0(state, ev)
    assert grad == 0.0
    assert mono == 0.0
    assert relax == pytest.approx(ev.gamma_m * grid_1d.integrate((u - 1.0) ** 2))
    assert relax == pytest.approx(0.5 * 0.09 * 0.5, rel=1e-12)


def test_dissipation_with_equal_densities(
    smooth_state: State, prototype: MotilitySpec
) -> None:
    v = smooth_state.v.values
    state = State.from_arrays(smooth_state.grid, 0.0, v, v)
    grad, relax, mono = eval_D0(state, G0Evaluator(motility=prototype, m=1.0))
    assert relax == 0.0
    assert grad > 0
    assert mono >= 0
