# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "philox4x64-10"


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """
    Build a counter-based generator for one named stream of a seed.

    Every random draw of a run comes from `SeedSequence(seed)` split by the
    integer path in `stream`, so streams never overlap and adding a new stream
    does not shift the draws of the existing ones.

    Parameters
    ----------

    seed: int
        Run seed (non-negative).

    *stream: int
        Spawn key identifying the consumer, e.g. ``(0,)`` for the u perturbation
        and ``(1,)`` for v.

    Returns
    -------

    np.random.Generator
        Generator backed by the Philox 4x64-10 bit generator.
    """
    if seed < 0:
        error_msg = f"Seed must be non-negative, got {seed}"
        raise ValueError(error_msg)
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(sequence))
