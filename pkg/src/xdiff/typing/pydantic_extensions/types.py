# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

from typing import Annotated

import numpy as np
from pydantic import BeforeValidator, PlainSerializer, PlainValidator

from xdiff.typing.pydantic_extensions.custom_serializers import array_to_list
from xdiff.typing.pydantic_extensions.custom_validators import (
    cells_tuple,
    extent_tuple,
    float_array,
)

FloatArray = Annotated[
    np.ndarray, PlainValidator(float_array), PlainSerializer(array_to_list)
]

Extent = Annotated[tuple[float, ...], BeforeValidator(extent_tuple)]

Cells = Annotated[tuple[int, ...], BeforeValidator(cells_tuple)]
