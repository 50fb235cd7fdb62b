# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from pathlib import Path

import pytest

from xdiff import ExperimentName, Laboratory, RunConfig
from xdiff.numerics import Grid


def test_laboratory_defaults() -> None:
    lab = Laboratory()
    assert lab.config == RunConfig()


def test_laboratory_from_file(config_file: Path, out_dir: Path) -> None:
    lab = Laboratory.from_file(config_file)
    assert lab.config.seed == 4
    report = lab.experiment.new(ExperimentName.LYAPUNOV).build()
    assert report.passed, report.help()
    assert (out_dir / "lyapunov" / "summary.json").exists()


def test_laboratory_experiment_overrides(config_file: Path, tmp_path: Path) -> None:
    lab = Laboratory.from_file(config_file)
    report = (
        lab.experiment.new("mass-mean")
        .override("model", epsilon=0.5)
        .seed(9)
        .output(tmp_path / "mm")
        .build()
    )
    assert report.seed == 9
    assert report.passed, report.help()
    assert lab.config.seed == 4


def test_laboratory_steady() -> None:
    grid = Grid.interval(1.0, 256)
    profile = Laboratory().steady.new(d=1e-3, k=2.0).grid(grid).build()
    assert profile.nonconstant
    assert profile.w.max > 1.0


def test_laboratory_refine_rejects_short_study(config_file: Path) -> None:
    lab = Laboratory.from_file(config_file)
    with pytest.raises(ValueError):  # noqa: PT011
        lab.refine([(1 / 32, 1e-4)])


@pytest.mark.slow()
def test_laboratory_threshold() -> None:
    report = Laboratory().threshold(2.0, Grid.interval(1.0, 64), 2e-3)
    assert report.bracket[0] < report.bracket[1]
