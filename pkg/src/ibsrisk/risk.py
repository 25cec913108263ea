"""Risk evaluation: exact for a given p, and asymptotic as p tends to zero.

The exact risk is the expectation of the loss over the stopping-time
distribution.  The expectation is split at the breakpoint
``m0 = floor(omega / p - d)``, the last stopping time that overestimates p:

* the overestimation branch (``m <= m0``) is a finite sum, accumulated term
  by term with compensated summation;
* the underestimation branch is unbounded.  Its terms linear in ``m`` reduce
  exactly to distribution functions through the stopping-time identity
  ``m p f_n(m) = n f_{n+1}(m+1)``, while terms in ``1/(m+d)`` (linear-linear
  loss only) are summed with a certified tail bound.

For the unbiased estimator under linear-linear loss the whole expectation
collapses to a single binomial probability, which is used directly.

The asymptotic risk has a closed form in the regularized incomplete gamma
function for both loss families; an independent adaptive-quadrature route is
provided as a cross-check oracle, splitting the integral at the loss kink.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad as _quad

from .estimators import EstimatorSpec, omega_il
from .exceptions import CapacityError, ConvergenceError
from .loss import LossFamily, LossSpec
from .special import (
    _pmf_from_log,
    _reg_upper_gamma,
    binom_pmf,
    negbin_log_pmf_block,
    reg_lower_gamma,
)

__all__ = [
    "RiskMethod",
    "RiskReport",
    "M0_CAP",
    "exact_risk",
    "asymptotic_value",
    "asymptotic_risk_closed",
    "asymptotic_risk_quadrature",
    "guaranteed_risk_limit",
]

M0_CAP = 10_000_000

_TAIL_MASS_TOL = 1e-14  # residual stopping-time mass allowed past truncation
_TAIL_TERM_TOL = 1e-16  # last summed loss term must be below this as well
_TAIL_BLOCK = 65_536
_TAIL_MAX_TERMS = 200_000_000

_QUAD_TAIL_TOL = 1e-12
_QUAD_ERROR_BUDGET = 1e-9


class RiskMethod(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    TRUNCATED_SERIES = "TruncatedSeries"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class RiskReport:
    """A risk value with method provenance and a truncation/quadrature bound."""

    value: float
    method: RiskMethod
    error_bound: float
    m0: int | None = None

    def __post_init__(self) -> None:
        if self.error_bound < 0.0:
            raise ValueError(f"error bound must be nonnegative, got {self.error_bound}")


def _breakpoint(spec: EstimatorSpec, p: float) -> int:
    return math.floor(spec.omega / p - spec.d)


def exact_risk(loss: LossSpec, spec: EstimatorSpec, p: float) -> RiskReport:
    """Expected loss of ``spec`` at success probability ``p``.

    Refuses with :class:`CapacityError` when the summation breakpoint exceeds
    ``M0_CAP``; callers should switch to the asymptotic risk for such p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"success probability must lie in (0,1), got {p}")
    m0 = _breakpoint(spec, p)
    if m0 > M0_CAP:
        raise CapacityError(
            f"breakpoint {m0} exceeds the {M0_CAP}-term cap; "
            "use the asymptotic risk for probabilities this small"
        )
    if (
        loss.family is LossFamily.LINEAR_LINEAR
        and spec.omega == spec.n - 1
        and spec.d == -1.0
    ):
        # Unbiased estimator: the split telescopes to one binomial mass.
        value = (loss.a + loss.b) * (1.0 - p) * binom_pmf(m0 - 1, p, spec.n - 1)
        return RiskReport(value, RiskMethod.CLOSED_FORM, 0.0, m0)
    return _risk_by_series(loss, spec, p)


def _finite_branch(spec: EstimatorSpec, p: float, m0: int):
    """Stopping-time masses and moments over the overestimation branch."""
    n = spec.n
    if m0 < n:
        return 0.0, 0.0, 0.0
    ms = np.arange(n, m0 + 1, dtype=np.int64)
    f = _pmf_from_log(negbin_log_pmf_block(n, p, ms))
    ratio = spec.omega / ((ms + spec.d) * p)
    over = math.fsum((f * (ratio - 1.0)).tolist())
    s0 = math.fsum(f.tolist())
    s1 = math.fsum((f * ms.astype(np.float64)).tolist())
    return over, s0, s1


def _ll_tail_sum(spec: EstimatorSpec, p: float, m0: int, s0: float):
    """Sum ``f_n(m)/(m+d)`` over the underestimation branch.

    Blocks are extended until both the remaining stopping-time mass and the
    last loss term are negligible; the remaining mass is the certified bound
    on the truncation error (the loss on this branch never exceeds ``a``).
    """
    n, omega, d = spec.n, spec.omega, spec.d
    inv_parts: list[float] = []
    mass_parts: list[float] = []
    m_lo = m0 + 1
    terms = 0
    while True:
        ms = np.arange(m_lo, m_lo + _TAIL_BLOCK, dtype=np.int64)
        f = _pmf_from_log(negbin_log_pmf_block(n, p, ms))
        denom = (ms + d) * p
        inv_parts.append(math.fsum((f / (ms + d)).tolist()))
        mass_parts.append(math.fsum(f.tolist()))
        tail_mass = max(1.0 - s0 - math.fsum(mass_parts), 0.0)
        last_term = abs(f[-1] * (1.0 - omega / denom[-1]))
        if tail_mass < _TAIL_MASS_TOL and last_term < _TAIL_TERM_TOL:
            return math.fsum(inv_parts), tail_mass
        m_lo += _TAIL_BLOCK
        terms += _TAIL_BLOCK
        if terms > _TAIL_MAX_TERMS:
            raise ConvergenceError(
                f"underestimation-branch series did not settle within {_TAIL_MAX_TERMS} terms"
            )


def _risk_by_series(loss: LossSpec, spec: EstimatorSpec, p: float) -> RiskReport:
    n, omega, d = spec.n, spec.omega, spec.d
    a, b = loss.a, loss.b
    m0 = max(_breakpoint(spec, p), n - 1)
    over, s0, s1 = _finite_branch(spec, p, m0)
    if loss.family is LossFamily.INVERSE_LINEAR:
        # Underestimation branch reduces exactly: the mean stopping time is
        # n/p, so sum_{m>m0} m f_n(m) = n/p - s1.
        under = 0.0
        if a > 0.0:
            under = (a / omega) * (n - p * s1) + a * (1.0 - s0) * (p * d / omega - 1.0)
        return RiskReport(b * over + under, RiskMethod.TRUNCATED_SERIES, 0.0, m0)
    if a == 0.0:
        return RiskReport(b * over, RiskMethod.TRUNCATED_SERIES, 0.0, m0)
    inv_sum, tail_mass = _ll_tail_sum(spec, p, m0, s0)
    under = a * (1.0 - s0) - (a * omega / p) * inv_sum
    return RiskReport(b * over + under, RiskMethod.TRUNCATED_SERIES, a * tail_mass, m0)


def asymptotic_value(loss: LossSpec, omega: float, n: int) -> float:
    """Limiting risk as p tends to zero, for any positive ``omega``."""
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    a, b = loss.a, loss.b
    g1 = reg_lower_gamma(n - 1, omega)
    g2 = reg_lower_gamma(n, omega)
    if loss.family is LossFamily.LINEAR_LINEAR:
        return (a + b) * omega * g1 / (n - 1) - (a + b) * g2 + a * (1.0 - omega / (n - 1))
    g3 = reg_lower_gamma(n + 1, omega)
    return b * omega * g1 / (n - 1) + (a - b) * g2 - a * n * g3 / omega + a * (n / omega - 1.0)


def asymptotic_risk_closed(loss: LossSpec, spec: EstimatorSpec) -> RiskReport:
    """Closed-form limiting risk of ``spec`` (``d`` does not affect the limit)."""
    return RiskReport(
        asymptotic_value(loss, spec.omega, spec.n), RiskMethod.CLOSED_FORM, 0.0, None
    )


def guaranteed_risk_limit(loss: LossSpec, n: int) -> float:
    """Limiting risk of the guaranteed-risk estimator for this loss.

    This limit is also the supremum of the exact risk over p in (0,1), which
    is what makes sample-size planning possible without knowing p.
    """
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")
    a, b = loss.a, loss.b
    if loss.family is LossFamily.LINEAR_LINEAR:
        return (a + b) * math.exp((n - 2) * math.log(n - 1) - (n - 1) - math.lgamma(n - 1))
    omega = omega_il(n, a, b)
    peak = math.exp((n - 1) * math.log(omega) - omega - math.lgamma(n))
    return a * (n / omega - 1.0) + (a * n / omega + b) * peak


def _integrand(loss: LossSpec, omega: float, n: int, branch: str):
    a, b = loss.a, loss.b
    log_norm = math.lgamma(n)

    def weight(nu: float) -> float:
        return math.exp((n - 1) * math.log(nu) - nu - log_norm)

    if branch == "over":
        return lambda nu: weight(nu) * b * (omega / nu - 1.0)
    if loss.family is LossFamily.LINEAR_LINEAR:
        return lambda nu: weight(nu) * a * (1.0 - omega / nu)
    return lambda nu: weight(nu) * a * (nu / omega - 1.0)


def asymptotic_risk_quadrature(loss: LossSpec, omega: float, n: int) -> RiskReport:
    """Limiting risk by adaptive quadrature; independent of the closed forms.

    The integral is split at the loss kink so each panel is smooth, and cut
    at an upper limit beyond which an incomplete-gamma tail bound (the loss
    grows at most linearly) is folded into the error bound.
    """
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    a = loss.a

    upper = max(2.0 * omega, n + 10.0)
    tail_bound = math.inf
    for _ in range(200):
        if loss.family is LossFamily.LINEAR_LINEAR:
            tail_bound = a * _reg_upper_gamma(n, upper)
        else:
            tail_bound = a * (n / omega) * _reg_upper_gamma(n + 1, upper)
        if tail_bound < _QUAD_TAIL_TOL:
            break
        upper *= 2.0
    else:
        raise ConvergenceError("could not place the quadrature cutoff")

    over_val, over_err = _quad(
        _integrand(loss, omega, n, "over"), 0.0, omega,
        epsabs=1e-12, epsrel=1e-12, limit=500,
    )
    under_val, under_err = _quad(
        _integrand(loss, omega, n, "under"), omega, upper,
        epsabs=1e-12, epsrel=1e-12, limit=500,
    )
    error_bound = over_err + under_err + tail_bound
    if error_bound > _QUAD_ERROR_BUDGET:
        raise ConvergenceError(
            f"adaptive quadrature error bound {error_bound:g} exceeds {_QUAD_ERROR_BUDGET:g}"
        )
    return RiskReport(over_val + under_val, RiskMethod.QUADRATURE, error_bound, None)
