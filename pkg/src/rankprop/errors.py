"""Exception types shared across the package.

Two broad failure classes are distinguished so callers (and the CLI exit
codes) can tell bad input apart from numerical breakdown.
"""


class ValidationError(ValueError):
    """Invalid input: bad shapes, out-of-range values, malformed files."""


class NumericalError(RuntimeError):
    """Numerical failure: non-convergence, singular system, bad residual."""
