# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

import math

import pytest

from xdiff.specs import GrowthSpec, check_growth_condition, eval_h, mass_bound
from xdiff.utils import GrowthKind


def test_eval_h() -> None:
    spec = GrowthSpec(h0=2.0, l=2.0)
    assert eval_h(spec, 0.0) == 2.0
    assert eval_h(spec, 1.0) == 0.0
    assert eval_h(spec, 2.0) == -6.0
    with pytest.raises(ValueError):  # noqa: PT011
        eval_h(spec, -1.0)
    assert eval_h(GrowthSpec(kind=GrowthKind.NONE), 5.0) == 0.0


def test_threshold_where_h_reaches_minus_one() -> None:
    spec = GrowthSpec(h0=2.0, l=2.0)
    assert spec.threshold_s1 == pytest.approx(math.sqrt(1.5))
    assert eval_h(spec, spec.threshold_s1) == pytest.approx(-1.0)
    assert spec.sup_abs_below_s1 == 2.0
    assert GrowthSpec(kind=GrowthKind.NONE).threshold_s1 == math.inf


def test_mass_bound() -> None:
    spec = GrowthSpec(h0=1.0, l=1.0)
    assert mass_bound(spec, 0.5, 1.0) == pytest.approx(4.0)
    assert mass_bound(spec, 10.0, 1.0) == 10.0
    assert mass_bound(GrowthSpec(kind=GrowthKind.NONE), 0.5, 1.0) == 0.5


@pytest.mark.parametrize(("h0", "l"), [(1.0, 1.0), (0.5, 2.0), (3.0, 1.5)])
def test_logistic_growth_condition_holds(h0: float, l: float) -> None:  # noqa: E741
    report = check_growth_condition(GrowthSpec(h0=h0, l=l))
    assert report.decreasing
    assert report.holds
    assert "pass" in report.help()


def test_growth_condition_fails_without_source() -> None:
    report = check_growth_condition(GrowthSpec(kind=GrowthKind.NONE))
    assert not report.holds
    with pytest.raises(ValueError):  # noqa: PT011
        check_growth_condition(GrowthSpec(), s_max=1.0)
