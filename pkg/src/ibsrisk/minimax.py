"""Minimax benchmarking of the guaranteed-risk estimators.

For each loss family the limiting risk, viewed as a function of the numerator
constant omega, has a monotone increasing derivative, so a unique omega_star
minimizes it.  That minimum is the best guaranteed risk any estimator can
achieve; the degradation factor measures how far the proposed estimators sit
above it.  There is one slope ratio a/b per family at which the proposed
estimator is exactly minimax; ``minimax_ratio_ll`` / ``minimax_ratio_il``
locate it.

All roots are found by bisection with geometric bracket expansion: the
objectives are monotone, which makes bisection unconditionally convergent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .estimators import omega_il
from .exceptions import ConvergenceError
from .loss import LossFamily, LossSpec
from .risk import asymptotic_value, guaranteed_risk_limit
from .special import reg_lower_gamma

__all__ = [
    "MinimaxReport",
    "omega_star_ll",
    "omega_star_il",
    "degradation",
    "minimax_ratio_ll",
    "minimax_ratio_il",
]

_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class MinimaxReport:
    omega_star: float
    risk_star: float
    risk_bar: float
    degradation: float

    def __post_init__(self) -> None:
        if self.degradation < 1.0 - 1e-10:
            raise ValueError(
                f"degradation {self.degradation} below 1; omega_star is not the minimizer"
            )


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of an increasing function already bracketed by [lo, hi]."""
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _solve_increasing_omega(f: Callable[[float], float], n: int) -> float:
    """Positive root of an increasing objective in omega.

    Starts from [1e-6, n+10] and doubles the upper end until the sign
    condition holds; the objectives here are negative near zero by
    construction, so the failure branches indicate a bug.
    """
    lo = 1e-6
    if f(lo) > 0.0:
        raise ConvergenceError(f"objective unexpectedly positive at omega={lo}")
    hi = float(n + 10)
    for _ in range(200):
        if f(hi) > 0.0:
            return _bisect(f, lo, hi)
        lo = hi
        hi *= 2.0
    raise ConvergenceError("bracket expansion failed; objective never turns positive")


def _check_slopes(a: float, b: float) -> None:
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"minimax analysis requires strictly positive slopes, got a={a}, b={b}")


def omega_star_ll(n: int, a: float, b: float) -> float:
    """Minimizing constant under linear-linear loss.

    Solves ``reg_lower_gamma(n-1, omega) = a / (a+b)``; the left side is the
    increasing derivative factor of the limiting risk.
    """
    _check_slopes(a, b)
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")
    target = a / (a + b)
    return _solve_increasing_omega(lambda om: reg_lower_gamma(n - 1, om) - target, n)


def omega_star_il(n: int, a: float, b: float) -> float:
    """Minimizing constant under inverse-linear loss.

    The derivative of the limiting risk in omega is
    ``b g(n-1, omega)/(n-1) - a n (1 - g(n+1, omega))/omega^2``,
    monotone increasing, so its zero is the unique minimizer.
    """
    _check_slopes(a, b)
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")

    def derivative(om: float) -> float:
        return (
            b * reg_lower_gamma(n - 1, om) / (n - 1)
            - a * n * (1.0 - reg_lower_gamma(n + 1, om)) / (om * om)
        )

    return _solve_increasing_omega(derivative, n)


def degradation(loss: LossSpec, n: int) -> MinimaxReport:
    """Guaranteed risk of the proposed estimator relative to the minimax one.

    Both numerator and denominator are closed-form limiting risks, so no
    quadrature error pollutes the ratio.
    """
    _check_slopes(loss.a, loss.b)
    if loss.family is LossFamily.LINEAR_LINEAR:
        omega_star = omega_star_ll(n, loss.a, loss.b)
    else:
        omega_star = omega_star_il(n, loss.a, loss.b)
    risk_star = asymptotic_value(loss, omega_star, n)
    risk_bar = guaranteed_risk_limit(loss, n)
    return MinimaxReport(omega_star, risk_star, risk_bar, risk_bar / risk_star)


def minimax_ratio_ll(n: int) -> float:
    """Slope ratio a/b at which the unbiased estimator is exactly minimax."""
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")
    g = reg_lower_gamma(n - 1, float(n - 1))
    return g / (1.0 - g)


def _il_ratio_objective(n: int, r: float) -> float:
    omega = omega_il(n, r, 1.0)
    lhs = reg_lower_gamma(n - 1, omega) / (1.0 - reg_lower_gamma(n + 1, omega))
    rhs = n * (omega - n + 1.0) / (omega * (n - omega))
    return lhs - rhs


def minimax_ratio_il(n: int) -> float:
    """Slope ratio a/b at which the balanced inverse-linear estimator is minimax.

    The defining condition is solved directly in the single scalar ``r = a/b``
    (with the balanced constant substituted inline), bisecting in ``ln r``.
    The objective decreases in r, so its negation is bisected upward.
    """
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")

    def negated(s: float) -> float:
        return -_il_ratio_objective(n, math.exp(s))

    lo, hi = -6.0, 6.0
    for _ in range(60):
        if negated(lo) < 0.0:
            break
        lo -= 6.0
    else:
        raise ConvergenceError(f"could not bracket the minimax ratio below, n={n}")
    for _ in range(60):
        if negated(hi) > 0.0:
            break
        hi += 6.0
    else:
        raise ConvergenceError(f"could not bracket the minimax ratio above, n={n}")

    r = math.exp(_bisect(negated, lo, hi))
    if abs(_il_ratio_objective(n, r)) > 1e-9:
        raise ConvergenceError(f"minimax ratio residual too large at n={n}")
    return r
