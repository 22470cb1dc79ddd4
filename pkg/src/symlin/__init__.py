"""Interval analysis with linearization and symbolic constant propagation."""

from __future__ import annotations

from .affine import AffineForm
from .engine import AnalysisOptions, SubstStrategy, check_assertions, solve
from .frontend import ParseError, compile_source, parse
from .interval import Interval, Mode
from .linearize import MultStrategy, linearize
from .symconst import SymbolicEnv

__all__ = [
    "AffineForm",
    "AnalysisOptions",
    "Interval",
    "Mode",
    "MultStrategy",
    "ParseError",
    "SubstStrategy",
    "SymbolicEnv",
    "check_assertions",
    "compile_source",
    "linearize",
    "parse",
    "solve",
]
