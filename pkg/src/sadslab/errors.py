"""Exception hierarchy shared by every module.

The CLI maps :class:`ValidationError` to exit code 2 and
:class:`ConvergenceError` to exit code 3.
"""


class SadsLabError(Exception):
    """Base class for all package errors."""


class ValidationError(SadsLabError, ValueError):
    """Bad input: out-of-domain radius, malformed spec, unsorted grid, ..."""


class ConvergenceError(SadsLabError, ArithmeticError):
    """A quadrature, root solve or extrapolation did not meet its tolerance."""


class RankDeficiencyError(ValidationError):
    """Least-squares design matrix is numerically singular."""


class AliasingError(ValidationError):
    """A sphere field carries more spectral content than its grid resolves."""
