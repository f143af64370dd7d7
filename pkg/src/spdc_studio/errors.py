"""Package-level exception types.

The CLI maps these onto exit codes: configuration problems exit with 2 and
convergence failures with 3.
"""

from __future__ import annotations

__all__ = ["ConfigError", "ConvergenceError"]


class ConfigError(ValueError):
    """Invalid or inconsistent user-supplied configuration."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to meet its convergence criterion."""
