"""Locally optimal drone harvesting paths under a path-length budget.

Thin convenience layer over the compiled `_core` module: scenario arguments
may be given as dicts (converted to JSON) or as JSON strings.
"""

import json as _json

from ._core import (
    InfeasibleTargetError,
    RangeError,
    ValidationError,
    __version__,
    constrained_minimize,
    energy,
    path_length,
    single_head_closed_form,
    tour_order,
)
from ._core import plan as _plan
from ._core import sweep as _sweep
from ._core import validate as _validate

__all__ = [
    "InfeasibleTargetError",
    "RangeError",
    "ValidationError",
    "__version__",
    "constrained_minimize",
    "energy",
    "path_length",
    "plan",
    "single_head_closed_form",
    "sweep",
    "tour_order",
    "validate",
]


def _as_json(scenario):
    if isinstance(scenario, str):
        return scenario
    return _json.dumps(scenario)


def plan(scenario, target):
    """Plan a path of at most ``target`` length for a scenario dict or JSON string."""
    return _plan(_as_json(scenario), float(target))


def sweep(scenario):
    """Sweep a scenario from the full tour down to the first merge."""
    return _sweep(_as_json(scenario))


def validate(scenario):
    """Run the validation suites; returns a list of per-suite records."""
    return _validate(_as_json(scenario))
