"""Exception types shared across the package.

Plain invalid arguments raise the built-in ``ValueError``; the classes here
cover the failure modes that calling code is expected to branch on.
"""

from __future__ import annotations

__all__ = ["ConvergenceError", "CapacityError", "TargetUnreachableError"]


class ConvergenceError(RuntimeError):
    """An iterative scheme (series, continued fraction, bisection, quadrature)
    hit its iteration cap before reaching the requested tolerance."""


class CapacityError(RuntimeError):
    """Exact risk evaluation refused: the summation breakpoint exceeds the
    term cap.  Use the asymptotic risk for such small probabilities."""


class TargetUnreachableError(RuntimeError):
    """The planner could not reach the requested guaranteed risk within the
    success-count search cap."""
