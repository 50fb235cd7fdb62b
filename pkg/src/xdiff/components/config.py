# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import json
import logging
import math
import os
import re
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pydantic
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from xdiff.components.model import ModelParams
from xdiff.numerics import EllipticSolver, Grid
from xdiff.specs import GrowthSpec, MollifiedMotility, MotilitySpec, mollify
from xdiff.utils import (
    GrowthKind,
    InitialKind,
    InitStrategy,
    MotilityKind,
    Perturbation,
    SolverMethod,
    Writer,
)
from xdiff.utils.compatibility import Self, tomllib
from xdiff.utils.data_structures import merge_dicts
from xdiff.utils.exceptions import ConfigError
from xdiff.utils.sentinels import RESET

logger = logging.getLogger("xdiff.components")

THREADS_ENV = "XDIFF_THREADS"

_SECTION_PATTERN = re.compile(r"^\[\s*([A-Za-z0-9_.-]+)\s*\]")
_KEY_PATTERN = re.compile(r"^([A-Za-z0-9_-]+)\s*=")
_DECODE_LINE_PATTERN = re.compile(r"line (\d+)")
_BARE_WORD_PATTERN = re.compile(
    r"^\s*([A-Za-z0-9_.-]+)\s*=\s*([A-Za-z_][A-Za-z0-9_-]*)\s*(?:#.*)?$"
)
_TOML_KEYWORDS = frozenset({"true", "false", "inf", "nan"})

_SECTION_CONFIG = ConfigDict(frozen=True, extra="forbid")


class DomainConfig(BaseModel):
    dim: int = 1
    extent: tuple[float, ...] = (1.0,)
    cells: tuple[int, ...] = (128,)

    model_config = _SECTION_CONFIG

    @model_validator(mode="after")
    def _validate_grid(self) -> Self:
        self.grid()
        return self

    def grid(self) -> Grid:
        return Grid(dim=self.dim, extent=self.extent, cells=self.cells)


class ModelConfig(BaseModel):
    """Coefficients of the system; ``mollify_eta`` regularises the motility."""

    epsilon: float = pydantic.Field(default=1.0, gt=0)
    motility: MotilityKind = MotilityKind.PROTOTYPE
    k: float = pydantic.Field(default=1.0, gt=0)
    K1: float | None = pydantic.Field(default=None, gt=0)
    c: float = pydantic.Field(default=1.0, gt=0)
    table: tuple[tuple[float, float], ...] | None = None
    monotone: bool = False
    mollify_eta: float | None = pydantic.Field(default=None, gt=0, lt=1)
    growth: GrowthKind = GrowthKind.NONE
    h0: float = pydantic.Field(default=1.0, gt=0)
    l: float = pydantic.Field(default=1.0, ge=1)  # noqa: E741
    source_eta: float = pydantic.Field(default=0.0, ge=0)
    solver: SolverMethod = SolverMethod.SPECTRAL_COSINE

    model_config = _SECTION_CONFIG

    @model_validator(mode="after")
    def _validate_motility(self) -> Self:
        self.motility_spec()
        return self

    def motility_spec(self) -> MotilitySpec | MollifiedMotility:
        spec = MotilitySpec(
            kind=self.motility,
            k=self.k,
            K1=self.K1,
            c=self.c,
            table=self.table,
            monotone=self.monotone,
        )
        if self.mollify_eta is None:
            return spec
        return mollify(spec, self.mollify_eta)

    def growth_spec(self) -> GrowthSpec | None:
        if self.growth == GrowthKind.NONE:
            return None
        return GrowthSpec(kind=self.growth, h0=self.h0, l=self.l)


class InitialConfig(BaseModel):
    """
    Initial data.

    ``recipe``: ``u = m (1 + amplitude xi_u)`` and ``v = v_mean (1 + amplitude
    xi_v)`` with zero-mean perturbations xi; ``file``: snapshots `u_file` and
    `v_file`; ``steady``: the stretched pattern of the ``[pattern]`` section.
    """

    kind: InitialKind = InitialKind.RECIPE
    m: float = pydantic.Field(default=1.0, ge=0)
    v_mean: float | None = pydantic.Field(default=None, ge=0)
    perturbation: Perturbation = Perturbation.RANDOM
    amplitude: float = pydantic.Field(default=0.1, ge=0, le=0.5)
    u_file: str | None = None
    v_file: str | None = None

    model_config = _SECTION_CONFIG

    @model_validator(mode="after")
    def _validate_files(self) -> Self:
        missing = self.u_file is None or self.v_file is None
        if self.kind == InitialKind.FILE and missing:
            error_msg = "Initial data of kind 'file' needs both u_file and v_file"
            raise ValueError(error_msg)
        return self


class PatternConfig(BaseModel):
    d: float = pydantic.Field(default=0.05, gt=0)
    k_profile: float = pydantic.Field(default=2.0, gt=1)
    perturbation: float = pydantic.Field(default=1e-3, ge=0, lt=1)
    strategy: InitStrategy = InitStrategy.SPIKE_ANSATZ

    model_config = _SECTION_CONFIG

    @model_validator(mode="after")
    def _validate_strategy(self) -> Self:
        if self.strategy == InitStrategy.GIVEN:
            error_msg = "Pattern strategy 'given' needs a field, use kind 'file'"
            raise ValueError(error_msg)
        return self


class TimeConfig(BaseModel):
    t_end: float = pydantic.Field(default=1.0, ge=0)
    observer_stride: int = pydantic.Field(default=100, ge=1)
    cfl_safety: float = pydantic.Field(default=0.4, gt=0, le=1)
    dt: float | None = pydantic.Field(default=None, gt=0)
    dt_min: float = pydantic.Field(default=1e-12, gt=0)

    model_config = _SECTION_CONFIG


class OutputConfig(BaseModel):
    directory: str = "xdiff-out"
    writers: tuple[Writer, ...] = tuple(Writer)
    snapshot_every: int = pydantic.Field(default=10, ge=0)

    model_config = _SECTION_CONFIG


class RunConfig(BaseModel):
    """
    Complete description of a run; every random draw derives from `seed`.

    Examples
    --------

    >>> config = parse_config("[model]\\nepsilon = 2.0\\n")
    >>> config.model.epsilon
    2.0
    """

    seed: int = pydantic.Field(default=0, ge=0)
    domain: DomainConfig = pydantic.Field(default_factory=DomainConfig)
    model: ModelConfig = pydantic.Field(default_factory=ModelConfig)
    initial: InitialConfig = pydantic.Field(default_factory=InitialConfig)
    pattern: PatternConfig = pydantic.Field(default_factory=PatternConfig)
    time: TimeConfig = pydantic.Field(default_factory=TimeConfig)
    output: OutputConfig = pydantic.Field(default_factory=OutputConfig)

    model_config = _SECTION_CONFIG

    def grid(self) -> Grid:
        return self.domain.grid()

    def params(self) -> ModelParams:
        return ModelParams(
            epsilon=self.model.epsilon,
            motility=self.model.motility_spec(),
            growth=self.model.growth_spec(),
            source_eta=self.model.source_eta,
            cfl_safety=self.time.cfl_safety,
            dt_min=self.time.dt_min,
        )

    def solver(self, grid: Grid | None = None) -> EllipticSolver:
        return EllipticSolver(
            grid=grid if grid is not None else self.grid(), method=self.model.solver
        )

    def with_overrides(self, overrides: dict[str, Any]) -> RunConfig:
        """
        Re-validated copy with `overrides` merged over the dumped config.

        Nested sections merge key by key; a value of `RESET` drops the key so
        its default applies again.
        """
        merged = merge_dicts(self.model_dump(mode="json"), overrides, sentinel=RESET)
        return RunConfig.model_validate(merged)


# -------------------------------------------------------------------------------------
# Text form


def _key_lines(text: str) -> tuple[dict[str, int], dict[tuple[str | None, str], int]]:
    sections: dict[str, int] = {}
    keys: dict[tuple[str | None, str], int] = {}
    current: str | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if section := _SECTION_PATTERN.match(line):
            current = section.group(1)
            sections.setdefault(current, number)
        elif key := _KEY_PATTERN.match(line):
            keys.setdefault((current, key.group(1)), number)
    return sections, keys


def _locate(text: str, loc: Sequence[int | str]) -> int:
    sections, keys = _key_lines(text)
    if not loc:
        return 0
    head = str(loc[0])
    if head in sections:
        if len(loc) > 1 and (line := keys.get((head, str(loc[1])))):
            return line
        return sections.get(head, 0)
    return keys.get((None, head), 0)


def _quoting_hint(text: str, line: int) -> str:
    lines = text.splitlines()
    if not 0 < line <= len(lines):
        return ""
    bare = _BARE_WORD_PATTERN.match(lines[line - 1])
    if bare is None or bare.group(2) in _TOML_KEYWORDS:
        return ""
    key, word = bare.groups()
    return f'; strings must be quoted, e.g. {key} = "{word}"'


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate a run config.

    The grammar is ``[section]`` headers followed by ``key = value`` lines
    (numbers, quoted strings, ``true``/``false`` and bracketed lists), a
    subset of TOML. Top-level keys (``seed``) precede the first section.

    Raises
    ------

    ConfigError
        Malformed text, unknown keys, type mismatches and constraint
        violations, with the line number of the offending entry.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as error:
        found = _DECODE_LINE_PATTERN.search(str(error))
        line = int(found.group(1)) if found else 0
        error_msg = f"Malformed config: {error}{_quoting_hint(text, line)}"
        raise ConfigError(error_msg, line=line) from error

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as error:
        first = error.errors()[0]
        name = ".".join(str(part) for part in first["loc"]) or "config"
        count = error.error_count()
        more = f" (and {count - 1} more)" if count > 1 else ""
        error_msg = f"{name}: {first['msg']}{more}"
        raise ConfigError(error_msg, line=_locate(text, first["loc"])) from error
    logger.debug("Parsed config:\n%s", render_config(config))
    return config


def load_config(path: Path) -> RunConfig:
    return parse_config(path.read_text(encoding="utf-8"))


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, list | tuple):
        return "[" + ", ".join(_render_value(item) for item in value) + "]"
    error_msg = f"Cannot render config value {value!r}"
    raise TypeError(error_msg)


def render_config(config: RunConfig) -> str:
    """Text form of `config` with every default written out, read by `parse_config`."""
    data = config.model_dump(mode="json")
    lines = [f"seed = {_render_value(data.pop('seed'))}"]
    for section, values in data.items():
        lines.extend(("", f"[{section}]"))
        lines.extend(
            f"{key} = {_render_value(value)}"
            for key, value in values.items()
            if value is not None
        )
    return "\n".join(lines) + "\n"


def sweep_threads() -> int:
    """Worker cap for concurrent runs, from `XDIFF_THREADS` (default: CPU count)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        threads = 0
    if threads < 1:
        error_msg = f"{THREADS_ENV} must be a positive integer, got {raw!r}"
        raise ConfigError(error_msg, line=0)
    return threads
