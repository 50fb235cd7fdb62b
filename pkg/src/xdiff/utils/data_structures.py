# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from typing import Any


def merge_dicts(obj_1: dict, obj_2: dict, *, sentinel: Any = None) -> dict:
    """
    Merge two dictionaries recursively, with the second taking precedence.

    Used to layer command line overrides on top of a parsed run config.

    Parameters
    ----------

    obj_1 : dict
        The base dictionary, usually a dumped config.

    obj_2 : dict
        The overriding dictionary (takes precedence in conflicts).

    sentinel: Any, optional
        When present in obj_2 the corresponding key is removed from the result
        so the model default applies. None disables the check.

    Returns
    -------

    dict
        The merged dictionary.

    Examples
    --------

    >>> merge_dicts({"time": {"t_end": 1.0, "dt": 0.1}}, {"time": {"t_end": 2.0}})
    {'time': {'t_end': 2.0, 'dt': 0.1}}

    >>> sentinel = object()
    >>> merge_dicts({"seed": 3, "output": {}}, {"seed": sentinel}, sentinel=sentinel)
    {'output': {}}
    """
    if type(obj_1) is not type(obj_2):
        return obj_2

    use_sentinel = sentinel is not None
    if isinstance(obj_1, dict):
        result = dict(**obj_1)
        for k, v in obj_2.items():
            if use_sentinel and v is sentinel:
                result.pop(k, None)
                continue

            result[k] = (
                merge_dicts(result[k], v, sentinel=sentinel) if k in result else v
            )
        return result
    return obj_2
