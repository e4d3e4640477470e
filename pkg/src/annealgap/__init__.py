"""Spectral-gap analysis of catalysed quantum annealing in collective-spin models."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    AnnealGapError,
    BracketError,
    ConfigError,
    ConvergenceError,
    GridPointError,
    NegativeMassError,
    SymmetryError,
)

__all__ = [
    "__version__",
    "AnnealGapError",
    "BracketError",
    "ConfigError",
    "ConvergenceError",
    "GridPointError",
    "NegativeMassError",
    "SymmetryError",
]
