# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT
from __future__ import annotations

from xdiff.utils.compatibility import StrEnum

# -------------------------------------------------------------------------------------
# Motility Related Enums


class MotilityKind(StrEnum):
    PROTOTYPE = "prototype"
    POWER = "power"
    EXPONENTIAL = "exponential"
    TABULATED = "tabulated"
    CONSTANT = "constant"

    @property
    def has_exponent(self) -> bool:
        return self in (MotilityKind.PROTOTYPE, MotilityKind.POWER)


class GrowthKind(StrEnum):
    LOGISTIC_POWER = "logistic_power"
    NONE = "none"


# -------------------------------------------------------------------------------------
# Solver Related Enums


class SolverMethod(StrEnum):
    SPECTRAL_COSINE = "spectral_cosine"
    CONJUGATE_GRADIENT = "conjugate_gradient"


class InitStrategy(StrEnum):
    SPIKE_ANSATZ = "spike_ansatz"
    GAUSSIAN_BUMP = "gaussian_bump"
    PARABOLIC_RELAX = "parabolic_relax"
    GIVEN = "given"


# -------------------------------------------------------------------------------------
# Experiment Related Enums


class ExperimentName(StrEnum):
    LYAPUNOV = "lyapunov"
    MASS_MEAN = "mass-mean"
    PATTERN = "pattern"
    LOGISTIC = "logistic"


class InitialKind(StrEnum):
    RECIPE = "recipe"
    FILE = "file"
    STEADY = "steady"


class Perturbation(StrEnum):
    NONE = "none"
    RANDOM = "random"
    COSINE = "cosine"


class Writer(StrEnum):
    CSV = "csv"
    SNAPSHOT = "snapshot"
    HEATMAP = "heatmap"
    SUMMARY = "summary"


class CheckStatus(StrEnum):
    PASSED = "PASSED"
    FAILED = "FAILED"
    REPORTED = "REPORTED"

    def __repr__(self) -> str:
        return self.value


# -------------------------------------------------------------------------------------
