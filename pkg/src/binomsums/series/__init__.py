"""Exact kernels, partial sums and certified evaluation of the series families."""

from .engine import (
    EvalOptions,
    EvalResult,
    NonConvergenceError,
    evaluate,
    evaluate_alternating,
    evaluate_strict,
    partial_sum,
    tail_bracket,
    term,
)
from .kernels import Kernel, SeriesFamily, Tag

__all__ = [
    "EvalOptions",
    "EvalResult",
    "Kernel",
    "NonConvergenceError",
    "SeriesFamily",
    "Tag",
    "evaluate",
    "evaluate_alternating",
    "evaluate_strict",
    "partial_sum",
    "tail_bracket",
    "term",
]
