"""Quasi-linear quantum dynamics: normalized Kraus semigroups, the
trace-conserving nonlinear master equation, exact qubit solutions, and
the model applications built on them."""

from . import (
    dynamics,
    kraus,
    linalg,
    output,
    qubit,
    rootfind,
    run,
    scenario,
    states,
)
from .errors import QdsimError
from .tolerances import TOL

__version__ = "0.1.0"

__all__ = [
    "QdsimError",
    "TOL",
    "__version__",
    "dynamics",
    "kraus",
    "linalg",
    "output",
    "qubit",
    "rootfind",
    "run",
    "scenario",
    "states",
]
