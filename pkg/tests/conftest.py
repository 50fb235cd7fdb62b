# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from pathlib import Path

import numpy as np
import pytest

from xdiff.numerics import Grid

_SEED = 20261018


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(_SEED)


@pytest.fixture()
def grid_1d() -> Grid:
    return Grid.interval(length=1.0, nx=64)


@pytest.fixture()
def grid_2d() -> Grid:
    return Grid.rectangle(lx=1.0, ly=0.5, nx=16, ny=8)


@pytest.fixture()
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "out"


@pytest.fixture()
def config_file(tmp_path: Path, out_dir: Path) -> Path:
    """Small prototype run, written as a config file."""
    path = tmp_path / "run.toml"
    path.write_text(
        "seed = 4\n"
        "\n"
        "[domain]\n"
        "cells = [32]\n"
        "\n"
        "[initial]\n"
        'perturbation = "cosine"\n'
        "amplitude = 0.2\n"
        "\n"
        "[time]\n"
        "t_end = 0.02\n"
        "observer_stride = 10\n"
        "\n"
        "[output]\n"
        f'directory = "{out_dir.as_posix()}"\n'
        'writers = ["csv", "summary"]\n',
        encoding="utf-8",
    )
    return path
