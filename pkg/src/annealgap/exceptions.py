"""Exception hierarchy shared by every module."""


class AnnealGapError(Exception):
    """Base class for all errors raised by annealgap."""


class ConvergenceError(AnnealGapError):
    """An iterative or eigen solve did not meet its accuracy contract."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BracketError(AnnealGapError):
    """A root or extremum search could not be bracketed."""

    def __init__(self, message, scanned=None):
        super().__init__(message)
        self.scanned = scanned


class NegativeMassError(AnnealGapError):
    """The continuum inverse mass is negative inside the domain."""

    def __init__(self, message, crossings=()):
        super().__init__(message)
        self.crossings = tuple(crossings)


class SymmetryError(AnnealGapError):
    """A matrix does not commute with the requested reflection."""


class GridPointError(AnnealGapError):
    """A per-point failure inside a raster scan, tagged with its coordinates."""

    def __init__(self, message, coords):
        super().__init__(f"{message} at {coords}")
        self.coords = coords


class ConfigError(AnnealGapError):
    """Invalid run configuration (CLI exit code 2)."""
