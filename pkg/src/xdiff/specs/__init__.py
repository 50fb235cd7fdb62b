# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from xdiff.specs.growth import (
    GrowthReport,
    GrowthSpec,
    check_growth_condition,
    eval_h,
    mass_bound,
)
from xdiff.specs.motility import (
    MollifiedMotility,
    MotilityReport,
    MotilitySpec,
    check_hypotheses,
    eval_gamma,
    eval_gamma_prime,
    eval_gamma_second,
    mollify,
)

__all__ = [
    "GrowthReport",
    "GrowthSpec",
    "MollifiedMotility",
    "MotilityReport",
    "MotilitySpec",
    "check_growth_condition",
    "check_hypotheses",
    "eval_gamma",
    "eval_gamma_prime",
    "eval_gamma_second",
    "eval_h",
    "mass_bound",
    "mollify",
]
