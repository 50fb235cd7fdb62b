# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.components.config import (
    RunConfig,
    load_config,
    parse_config,
    render_config,
    sweep_threads,
)
from xdiff.components.diagnostics import (
    DiagnosticsEngine,
    DiagnosticsRecord,
    G0Evaluator,
    K_equation_residual,
    eval_D0,
    eval_entropy,
    eval_G0,
    eval_G0_second,
    eval_L0,
    lyapunov_residual,
)
from xdiff.components.dynamics import (
    RunAudit,
    RunResult,
    TimeStepper,
    run,
    stable_dt,
    step,
)
from xdiff.components.experiment import (
    Check,
    ExperimentBuilder,
    ExperimentReport,
    RefinementTable,
    build_initial_state,
    fitted_order,
    refinement_study,
    run_experiment,
)
from xdiff.components.model import ModelParams, State
from xdiff.components.observers import (
    CosineTestFunction,
    FluxIntegralTracker,
    LyapunovTracker,
    MassDriftTracker,
    MeanRecursionTracker,
    WeakFormAccumulator,
    weakform_residual,
)
from xdiff.components.steady import (
    SteadyBuilder,
    SteadyProfile,
    ThresholdReport,
    continue_branch,
    locate_threshold,
    oscillation,
    scale_to_pattern,
    solve_scalar_steady,
    verify_steady,
)

__all__ = [
    "Check",
    "CosineTestFunction",
    "DiagnosticsEngine",
    "DiagnosticsRecord",
    "ExperimentBuilder",
    "ExperimentReport",
    "FluxIntegralTracker",
    "G0Evaluator",
    "K_equation_residual",
    "LyapunovTracker",
    "MassDriftTracker",
    "MeanRecursionTracker",
    "ModelParams",
    "RefinementTable",
    "RunAudit",
    "RunConfig",
    "RunResult",
    "State",
    "SteadyBuilder",
    "SteadyProfile",
    "ThresholdReport",
    "TimeStepper",
    "WeakFormAccumulator",
    "build_initial_state",
    "continue_branch",
    "eval_D0",
    "eval_G0",
    "eval_G0_second",
    "eval_L0",
    "eval_entropy",
    "fitted_order",
    "load_config",
    "locate_threshold",
    "lyapunov_residual",
    "oscillation",
    "parse_config",
    "refinement_study",
    "render_config",
    "run",
    "run_experiment",
    "scale_to_pattern",
    "solve_scalar_steady",
    "stable_dt",
    "step",
    "sweep_threads",
    "verify_steady",
    "weakform_residual",
]
