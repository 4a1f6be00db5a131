"""Numerical verification of Steffensen-type integral inequalities."""

from ._core import BACKEND
from .expr import parse, evaluate, differentiate, to_string
from .numerics import FunctionSpec, GridFunction, Interval, integrate, rs_integrate, refine_until, sample

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "FunctionSpec", "GridFunction", "Interval", "differentiate",
    "evaluate", "integrate", "parse", "refine_until", "rs_integrate",
    "sample", "to_string",
]
