# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import math
from collections.abc import Generator, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from xdiff.components.config import RunConfig, sweep_threads
from xdiff.components.diagnostics import DiagnosticsEngine
from xdiff.components.dynamics import RunResult, run
from xdiff.components.model import ModelParams, State
from xdiff.components.observers import (
    CosineTestFunction,
    FluxIntegralTracker,
    LyapunovTracker,
    MassDriftTracker,
    MeanRecursionTracker,
    WeakFormAccumulator,
)
from xdiff.components.steady import (
    SteadyProfile,
    oscillation,
    scale_to_pattern,
    solve_scalar_steady,
    verify_steady,
)
from xdiff.io import (
    field_image,
    kymograph,
    read_snapshot,
    write_diagnostics,
    write_heatmap,
    write_snapshot,
    write_summary,
)
from xdiff.numerics import Field, Grid, lp_norm
from xdiff.specs import MotilitySpec, check_hypotheses, mass_bound
from xdiff.typing import Helpful, StepObserver
from xdiff.utils import (
    CheckStatus,
    ExperimentName,
    InitialKind,
    MotilityKind,
    Perturbation,
)
from xdiff.utils.compatibility import Self, override
from xdiff.utils.data_structures import merge_dicts
from xdiff.utils.exceptions import ConfigError
from xdiff.utils.rng import make_generator

logger = logging.getLogger("xdiff.components")

CONVERGENCE_HORIZON = 50.0
ORDER_FLOOR = 1e-12
REFINEMENT_METRICS = (
    "lyap_residual",
    "K_residual",
    "weak_u",
    "weak_v",
    "mean_deviation",
)

_NONNEGATIVE_SLACK = 1e-9
_HYPOTHESIS_SAMPLES = np.linspace(0.0, 50.0, 1001)[1:]

# -------------------------------------------------------------------------------------
# Initial data


def _perturbation(grid: Grid, kind: Perturbation, seed: int, stream: int) -> np.ndarray:
    match kind:
        case Perturbation.NONE:
            return np.zeros(grid.shape)
        case Perturbation.RANDOM:
            draws = make_generator(seed, stream).uniform(-1.0, 1.0, size=grid.shape)
            return draws - np.mean(draws)
        case Perturbation.COSINE:
            return Field.from_function(
                grid,
                lambda *xs: math.prod(
                    np.cos(np.pi * x / length)
                    for x, length in zip(xs, grid.extent, strict=True)
                ),
            ).values


def steady_profile(config: RunConfig) -> SteadyProfile:
    """Stretched steady pattern of the ``[pattern]`` section on the config domain."""
    pattern = config.pattern
    w = solve_scalar_steady(
        pattern.d, pattern.k_profile, config.grid(), pattern.strategy
    )
    return scale_to_pattern(w, pattern.d, pattern.k_profile)


def build_initial_state(config: RunConfig, base: Path | None = None) -> State:
    """
    Initial state of a run.

    Perturbations come from the seeded streams 0 (u) and 1 (v). File paths
    are resolved against `base` when relative.
    """
    initial = config.initial
    match initial.kind:
        case InitialKind.RECIPE:
            grid = config.grid()
            v_mean = initial.m if initial.v_mean is None else initial.v_mean
            xi_u = _perturbation(grid, initial.perturbation, config.seed, 0)
            xi_v = _perturbation(grid, initial.perturbation, config.seed, 1)
            return State.from_arrays(
                grid,
                0.0,
                initial.m * (1.0 + initial.amplitude * xi_u),
                v_mean * (1.0 + initial.amplitude * xi_v),
            )
        case InitialKind.FILE:
            assert initial.u_file is not None  # noqa: S101
            assert initial.v_file is not None  # noqa: S101
            root = base if base is not None else Path()
            u, u_header = read_snapshot(root / initial.u_file)
            v, _ = read_snapshot(root / initial.v_file)
            return State(t=u_header["t"], u=u, v=v)
        case InitialKind.STEADY:
            profile = steady_profile(config)
            grid = profile.v.grid
            size = config.pattern.perturbation
            xi_u = _perturbation(grid, Perturbation.RANDOM, config.seed, 0)
            xi_v = _perturbation(grid, Perturbation.RANDOM, config.seed, 1)
            return State.from_arrays(
                grid,
                0.0,
                profile.u.values * (1.0 + size * xi_u),
                profile.v.values * (1.0 + size * xi_v),
            )


# -------------------------------------------------------------------------------------
# Reports


class Check(BaseModel):
    name: str
    status: CheckStatus
    value: float | None = None
    threshold: float | None = None
    note: str = ""

    model_config = ConfigDict(frozen=True)

    @classmethod
    def at_most(
        cls, name: str, value: float, threshold: float, note: str = ""
    ) -> Check:
        passed = value <= threshold
        return cls(
            name=name,
            status=CheckStatus.PASSED if passed else CheckStatus.FAILED,
            value=value,
            threshold=threshold,
            note=note,
        )

    @classmethod
    def at_least(
        cls, name: str, value: float, threshold: float, note: str = ""
    ) -> Check:
        passed = value >= threshold
        return cls(
            name=name,
            status=CheckStatus.PASSED if passed else CheckStatus.FAILED,
            value=value,
            threshold=threshold,
            note=note,
        )

    @classmethod
    def reported(cls, name: str, value: float, note: str = "") -> Check:
        return cls(name=name, status=CheckStatus.REPORTED, value=value, note=note)


class ExperimentReport(BaseModel, Helpful):
    """Verdict of one experiment with its checks, metrics and written files."""

    name: str
    seed: int
    complete: bool
    reason: str | None = None
    notes: list[str] = []
    checks: list[Check] = []
    metrics: dict[str, float] = {}
    artifacts: list[str] = []

    @property
    def passed(self) -> bool:
        return self.complete and all(
            check.status != CheckStatus.FAILED for check in self.checks
        )

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def check(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        error_msg = f"No check named {name!r} in report {self.name!r}"
        raise KeyError(error_msg)

    @override
    def _help(self) -> Generator[str]:
        verdict = "PASSED" if self.passed else "FAILED"
        yield f"experiment {self.name} (seed {self.seed}): {verdict}"
        if not self.complete:
            yield f"  run aborted: {self.reason}"
        for note in self.notes:
            yield f"  note: {note}"
        for check in self.checks:
            line = f"  [{check.status}] {check.name}"
            if check.value is not None:
                line += f" = {check.value:.6g}"
            if check.threshold is not None:
                line += f" (threshold {check.threshold:.6g})"
            if check.note:
                line += f" -- {check.note}"
            yield line
        for key, value in self.metrics.items():
            yield f"  {key}: {value:.6g}"


# -------------------------------------------------------------------------------------
# Presets


def _monotone(params: ModelParams) -> bool:
    return check_hypotheses(params.motility, _HYPOTHESIS_SAMPLES).monotone


def _lyapunov_checks(
    params: ModelParams,
    t_span: float,
    result: RunResult,
    tracker: LyapunovTracker,
    initial: State,
    m: float,
) -> list[Check]:
    monotone = _monotone(params)
    shape_note = "" if monotone else "motility fails the monotonicity hypothesis"
    checks = []
    if monotone:
        checks.append(Check.at_most("L0 increases", tracker.violations, 0))
        checks.append(
            Check.at_least("min D0 component", min(tracker.min_D0), -_NONNEGATIVE_SLACK)
        )
    else:
        checks.append(Check.reported("L0 increases", tracker.violations, shape_note))
        checks.append(
            Check.reported("min D0 component", min(tracker.min_D0), shape_note)
        )
    checks.append(
        Check.at_least(
            "min L0", min(record.L0 for record in result.records), -_NONNEGATIVE_SLACK
        )
    )
    if tracker.initial_L0 > 0:
        checks.append(Check.at_most("energy balance", tracker.energy_balance, 1.01))
    else:
        checks.append(Check.at_most("final L0", tracker.final_L0, ORDER_FLOOR))
    checks.append(Check.reported("max lyapunov residual", tracker.max_residual))
    checks.append(Check.reported("max K residual", tracker.max_K_residual))

    if t_span >= CONVERGENCE_HORIZON:
        final = result.final
        checks.extend(
            _relative_decay(
                "v - m decay",
                lp_norm(initial.v.with_values(initial.v.values - m), 2),
                lp_norm(final.v.with_values(final.v.values - m), 2),
            )
        )
        checks.extend(
            _relative_decay(
                "dual norm of u - m decay",
                result.records[0].h1dual_u,
                result.records[-1].h1dual_u,
            )
        )
    return checks


def _relative_decay(name: str, start: float, end: float) -> list[Check]:
    if start <= ORDER_FLOOR:
        return [Check.at_most(name, end, ORDER_FLOOR, "initial value at floor")]
    return [Check.at_most(name, end / start, 1e-4)]


def _pattern_checks(
    config: RunConfig,
    params: ModelParams,
    profile: SteadyProfile,
    initial: State,
    result: RunResult,
) -> tuple[list[Check], list[str]]:
    motility = params.motility
    assert isinstance(motility, MotilitySpec)  # noqa: S101
    start = oscillation(initial.v)
    end = oscillation(result.final.v)
    ratio = end / start if start > 0 else 0.0
    if motility.k <= 1:
        note = "no pattern expected (k <= 1)"
        return [Check.at_most("oscillation ratio", ratio, 0.01, "convergence")], [note]

    checks = [
        Check.at_least("oscillation ratio", ratio, 0.5, "persistence"),
        Check.at_least("oscillation of w", oscillation(profile.w), 0.5),
    ]
    if motility.k == config.pattern.k_profile:
        r1, r2 = verify_steady(profile, motility)
        scale = lp_norm(profile.u, 2)
        checks.append(Check.at_most("steady r1 / |u|", r1 / scale, 1e-13))
        checks.append(Check.at_most("steady r2 / |u|", r2 / scale, 1e-9))
    return checks, []


def _logistic_checks(
    params: ModelParams, initial: State, result: RunResult, flux: FluxIntegralTracker
) -> list[Check]:
    assert params.growth is not None  # noqa: S101
    t0 = initial.t
    min_v0 = initial.v.min
    margin = min(
        record.min_v - min_v0 * math.exp(-(record.t - t0) / params.epsilon)
        for record in result.records
    )
    entropies = [record.entropy_y for record in result.records]
    growth_bound = max(entropies) - entropies[0]
    if all(math.isfinite(entropy) for entropy in entropies):
        entropy_check = Check.reported("entropy growth C(T)", growth_bound)
    else:
        entropy_check = Check(
            name="entropy growth C(T)",
            status=CheckStatus.FAILED,
            note="entropy is not finite at every record",
        )
    ceiling = mass_bound(params.growth, result.records[0].mass_u, initial.grid.measure)
    peak_mass = max(record.mass_u for record in result.records)
    return [
        Check.at_least("v lower bound margin", margin, -1e-3),
        entropy_check,
        Check.at_most("peak mass / bound", peak_mass / ceiling, 1.05),
        Check.reported("flux integral", flux.value),
    ]


# -------------------------------------------------------------------------------------
# Artifacts


def _write_artifacts(
    config: RunConfig, result: RunResult, out_dir: Path
) -> list[Path]:
    writers = set(config.output.writers)
    paths: list[Path] = []
    if "csv" in writers:
        rows = [record.model_dump() for record in result.records]
        paths.append(write_diagnostics(out_dir / "diagnostics.csv", rows))
    states = [*result.snapshots, result.final]
    if "snapshot" in writers:
        for index, state in enumerate(result.snapshots):
            for name in ("u", "v"):
                paths.append(
                    write_snapshot(
                        out_dir / "snapshots" / f"{name}_{index:04d}.xdiff",
                        getattr(state, name),
                        t=state.t,
                        name=name,
                    )
                )
        for name in ("u", "v"):
            paths.append(
                write_snapshot(
                    out_dir / f"{name}_final.xdiff",
                    getattr(result.final, name),
                    t=result.final.t,
                    name=name,
                )
            )
    if "heatmap" in writers:
        for name in ("u", "v"):
            if result.final.grid.dim == 1:
                image = kymograph([getattr(state, name) for state in states])
                target = out_dir / f"{name}_kymograph.pgm"
            else:
                image = field_image(getattr(result.final, name))
                target = out_dir / f"{name}_final.pgm"
            paths.append(write_heatmap(target, image))
    return paths


# -------------------------------------------------------------------------------------
# Experiments


def run_experiment(  # noqa: PLR0912
    name: ExperimentName | str | None,
    config: RunConfig,
    out_dir: Path | None = None,
    *,
    progress: bool = False,
) -> ExperimentReport:
    """
    Run a preset experiment and write its artifacts.

    Parameters
    ----------

    name: ExperimentName, optional
        ``lyapunov``, ``mass-mean``, ``pattern`` or ``logistic``; None runs the
        config with the generic checks only.

    config: RunConfig
        Validated run config.

    out_dir: Path, optional
        Directory for the artifacts, defaults to
        ``<output.directory>/<name>``.

    progress: bool
        Show a progress bar.

    Returns
    -------

    ExperimentReport
        Checks and artifact paths. Aborted runs still write their partial
        artifacts and fail the report.

    Raises
    ------

    ConfigError
        When the config does not fit the preset.
    """
    preset = ExperimentName(name) if name is not None else None
    label = str(preset) if preset is not None else "run"
    target = out_dir if out_dir is not None else Path(config.output.directory) / label

    if preset == ExperimentName.PATTERN:
        if config.model.motility != MotilityKind.POWER or config.model.mollify_eta:
            error_msg = "Pattern preset needs unmollified power motility"
            raise ConfigError(error_msg, line=0)
        config = config.with_overrides({"initial": {"kind": InitialKind.STEADY.value}})
    if preset == ExperimentName.LOGISTIC and config.model.growth_spec() is None:
        error_msg = "Logistic preset needs a growth term"
        raise ConfigError(error_msg, line=0)

    params = config.params()
    profile = steady_profile(config) if preset == ExperimentName.PATTERN else None
    initial = build_initial_state(config)
    grid = initial.grid
    solver = config.solver(grid)
    m = float(np.mean(initial.u.values))

    observers: list[StepObserver] = []
    lyapunov = mass = mean = flux = None
    if preset == ExperimentName.LYAPUNOV:
        lyapunov = LyapunovTracker(DiagnosticsEngine(grid, params, m, solver))
        observers.append(lyapunov)
    if preset == ExperimentName.MASS_MEAN:
        mass, mean = MassDriftTracker(), MeanRecursionTracker(params)
        observers.extend((mass, mean))
    if preset == ExperimentName.LOGISTIC:
        flux = FluxIntegralTracker(grid, params)
        observers.append(flux)

    logger.info("Experiment %s writing to %s", label, target)
    result = run(
        params,
        initial,
        initial.t + config.time.t_end,
        config.time.observer_stride,
        dt=config.time.dt,
        solver=solver,
        observers=observers,
        snapshot_every=config.output.snapshot_every,
        progress=progress,
    )

    checks = [Check.at_least("run complete", float(result.complete), 1.0)]
    notes: list[str] = []
    if result.complete:
        if lyapunov is not None:
            checks.extend(
                _lyapunov_checks(
                    params, config.time.t_end, result, lyapunov, initial, m
                )
            )
        if mass is not None and mean is not None:
            if params.has_growth:
                checks.append(Check.reported("mass drift", mass.max_relative_drift))
            else:
                checks.append(
                    Check.at_most("mass drift", mass.max_relative_drift, 1e-11)
                )
            checks.append(
                Check.at_most("mean recursion error", mean.max_recursion_error, 1e-12)
            )
            if mean.continuum_applicable:
                checks.append(
                    Check.reported(
                        "mean continuum deviation", mean.max_continuum_deviation
                    )
                )
        if profile is not None:
            pattern_checks, notes = _pattern_checks(
                config, params, profile, initial, result
            )
            checks.extend(pattern_checks)
        if flux is not None:
            checks.extend(_logistic_checks(params, initial, result, flux))

    final = result.records[-1]
    report = ExperimentReport(
        name=label,
        seed=config.seed,
        complete=result.complete,
        reason=result.audit.reason,
        notes=notes,
        checks=checks,
        metrics={
            "t_final": result.final.t,
            "steps": float(result.audit.steps),
            "dt_halvings": float(result.audit.halvings),
            "floor_events": float(result.audit.floor_events),
            "L0_final": final.L0,
            "mass_final": final.mass_u,
            "min_u": result.audit.min_u,
            "min_v": result.audit.min_v,
        },
    )

    paths = _write_artifacts(config, result, target)
    if "summary" in config.output.writers:
        summary_paths = [target / "summary.json", target / "summary.txt"]
        report = report.model_copy(
            update={"artifacts": [str(path) for path in (*paths, *summary_paths)]}
        )
        write_summary(target, data=report.model_dump_json(indent=2), text=report.help())
    else:
        report = report.model_copy(update={"artifacts": [str(path) for path in paths]})

    log = logger.info if report.passed else logger.error
    log("Experiment %s %s", label, "passed" if report.passed else "failed")
    return report


# -------------------------------------------------------------------------------------
# Refinement


class RefinementTable(BaseModel, Helpful):
    """Residuals per refinement level and their fitted orders in dt."""

    frame: pd.DataFrame
    orders: dict[str, float | str]

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @override
    def _help(self) -> Generator[str]:
        yield self.frame.to_string(index=False, float_format=lambda x: f"{x:.3e}")
        for metric, order in self.orders.items():
            shown = order if isinstance(order, str) else f"{order:.3f}"
            yield f"order[{metric}] = {shown}"


def fitted_order(dts: Sequence[float], values: Sequence[float]) -> float | str:
    """
    Least-squares slope of ``log(value)`` against ``log(dt)``.

    Values below `ORDER_FLOOR` are at the solver floor; with fewer than two
    points above it the order is reported as ``"floor"``.
    """
    pairs = [
        (dt, value)
        for dt, value in zip(dts, values, strict=True)
        if value >= ORDER_FLOOR
    ]
    if len(pairs) < 2:  # noqa: PLR2004
        return "floor"
    x, y = np.log(np.array(pairs)).T
    return float(np.polyfit(x, y, 1)[0])


def _refinement_level(config: RunConfig, h: float, dt: float) -> dict[str, Any]:
    grid = config.grid()
    cells = [round(length / h) for length in grid.extent]
    if not all(
        math.isclose(length / count, h, rel_tol=1e-9)
        for length, count in zip(grid.extent, cells, strict=True)
    ):
        error_msg = f"Spacing h={h} does not divide the domain {grid.extent}"
        raise ValueError(error_msg)
    level_config = config.with_overrides(
        {"domain": {"cells": cells}, "time": {"dt": dt}}
    )
    params = level_config.params()
    initial = build_initial_state(level_config)
    level_grid = initial.grid
    solver = level_config.solver(level_grid)
    m = float(np.mean(initial.u.values))
    engine = DiagnosticsEngine(level_grid, params, m, solver)
    t_end = initial.t + level_config.time.t_end
    lyapunov = LyapunovTracker(engine)
    mean = MeanRecursionTracker(params)
    test = CosineTestFunction(
        horizon=t_end, modes=(1,) + (0,) * (level_grid.dim - 1)
    )
    weak = WeakFormAccumulator(level_grid, params, test)
    result = run(
        params,
        initial,
        t_end,
        observer_stride=max(1, round(level_config.time.t_end / dt)),
        dt=dt,
        solver=solver,
        observers=(lyapunov, mean, weak),
    )
    if not result.complete:
        error_msg = f"Refinement level h={h}, dt={dt} aborted: {result.audit.reason}"
        raise RuntimeError(error_msg)
    r_u, r_v = weak.residuals
    return {
        "h": h,
        "dt": dt,
        "steps": result.audit.steps,
        "lyap_residual": lyapunov.max_residual,
        "K_residual": lyapunov.max_K_residual,
        "weak_u": abs(r_u),
        "weak_v": abs(r_v),
        "mean_deviation": mean.max_continuum_deviation,
    }


def refinement_study(
    config: RunConfig, levels: Sequence[tuple[float, float]]
) -> RefinementTable:
    """
    Run `config` at every ``(h, dt)`` level with a fixed step and fit orders.

    Levels run concurrently (at most `XDIFF_THREADS` at a time). The initial
    data must be smooth for the orders to mean anything, so a random
    perturbation is replaced by the cosine one.

    Raises
    ------

    ValueError
        For fewer than three levels or a spacing that does not divide the domain.

    RuntimeError
        When a level's run aborts.
    """
    if len(levels) < 3:  # noqa: PLR2004
        error_msg = f"Refinement needs at least three levels, got {len(levels)}"
        raise ValueError(error_msg)
    if (
        config.initial.kind == InitialKind.RECIPE
        and config.initial.perturbation == Perturbation.RANDOM
    ):
        logger.warning("Random initial data is rough, using the cosine perturbation")
        config = config.with_overrides(
            {"initial": {"perturbation": Perturbation.COSINE.value}}
        )

    workers = min(len(levels), sweep_threads())
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda level: _refinement_level(config, *level), levels))
    frame = pd.DataFrame(rows)
    orders = {
        metric: fitted_order(frame["dt"].tolist(), frame[metric].tolist())
        for metric in REFINEMENT_METRICS
    }
    table = RefinementTable(frame=frame, orders=orders)
    logger.info("Refinement study:\n%s", table.help())
    return table


class ExperimentBuilder:
    _name: ExperimentName | None
    _config: RunConfig
    _overrides: dict[str, Any]
    _out_dir: Path | None
    _progress: bool

    def __init__(self, config: RunConfig | None = None) -> None:
        self._name = None
        self._config = config if config is not None else RunConfig()
        self._overrides = {}
        self._out_dir = None
        self._progress = False

    def new(self, name: ExperimentName | str | None) -> Self:
        self._name = ExperimentName(name) if name is not None else None
        return self

    def config(self, config: RunConfig) -> Self:
        self._config = config
        return self

    def override(self, section: str, **values: Any) -> Self:
        """Set keys of one config section, e.g. ``override("model", k=2.0)``."""
        self._overrides = merge_dicts(self._overrides, {section: values})
        return self

    def seed(self, seed: int) -> Self:
        self._overrides["seed"] = seed
        return self

    def output(self, directory: Path) -> Self:
        self._out_dir = directory
        return self

    def progress(self, enabled: bool = True) -> Self:
        self._progress = enabled
        return self

    def build(self) -> ExperimentReport:
        """Run the experiment and return its report."""
        config = self._config
        if self._overrides:
            config = config.with_overrides(self._overrides)
        return run_experiment(
            self._name, config, self._out_dir, progress=self._progress
        )
