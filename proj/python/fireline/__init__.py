"""Wildfire suppression crew assignment by branch-and-price-and-cut."""

import json

from . import _core
from ._core import (
    FirelineError,
    GuardError,
    InputError,
    area_grid_size,
    brute_force_optimum,
    evaluate_all,
    generate_instance,
    simulate,
    snap_to_grid,
    validate_instance,
)

__all__ = [
    "FirelineError",
    "GuardError",
    "InputError",
    "area_grid_size",
    "brute_force_optimum",
    "evaluate_all",
    "generate_instance",
    "simulate",
    "snap_to_grid",
    "solve",
    "validate_instance",
]


def _text(instance):
    return instance if isinstance(instance, str) else json.dumps(instance)


def solve(instance, **options):
    """Solve an instance (JSON text or dict); returns the solution as a dict."""
    return json.loads(_core.solve(_text(instance), **options))
