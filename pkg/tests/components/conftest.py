# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from pathlib import Path

import numpy as np
import pytest

from xdiff.components import ModelParams, RunConfig, State, parse_config
from xdiff.numerics import Grid
from xdiff.specs import MotilitySpec
from xdiff.utils import MotilityKind

_SMALL_CONFIG = """\
seed = 11

[domain]
dim = 1
extent = [1.0]
cells = [32]

[model]
epsilon = 1.0
motility = "prototype"
k = 1.0

[initial]
kind = "recipe"
m = 1.0
perturbation = "cosine"
amplitude = 0.2

[time]
t_end = 0.05
observer_stride = 10

[output]
directory = "{directory}"
writers = ["csv", "snapshot", "heatmap", "summary"]
snapshot_every = 5
"""


@pytest.fixture()
def prototype() -> MotilitySpec:
    return MotilitySpec(kind=MotilityKind.PROTOTYPE, k=1.0)


@pytest.fixture()
def params(prototype: MotilitySpec) -> ModelParams:
    return ModelParams(epsilon=1.0, motility=prototype)


@pytest.fixture()
def smooth_state(grid_1d: Grid) -> State:
    """Cosine perturbation of ``(1, 1)`` with ``m = 1``."""
    (x,) = grid_1d.centers()
    mode = np.cos(np.pi * x)
    return State.from_arrays(grid_1d, 0.0, 1.0 + 0.2 * mode, 1.0 - 0.1 * mode)


@pytest.fixture()
def small_config(out_dir: Path) -> RunConfig:
    return parse_config(_SMALL_CONFIG.format(directory=out_dir.as_posix()))
