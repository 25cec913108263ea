"""Estimators of the success probability from the observed stopping time.

Every estimator here has the form ``omega / (N + d)`` where ``N`` is the
number of trials consumed by inverse binomial sampling.  ``umvu`` and ``ml``
are the classical instances; ``proposed_il`` is the estimator tuned for
inverse-linear loss, whose constant ``omega_il`` balances the two loss slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .loss import LossFamily, LossSpec

__all__ = [
    "EstimatorSpec",
    "estimate",
    "umvu",
    "ml",
    "omega_il",
    "proposed_il",
    "proposed_estimator",
    "parse_estimator",
]


@dataclass(frozen=True)
class EstimatorSpec:
    """Constants (n, omega, d) defining the estimate ``omega / (N + d)``."""

    n: int
    omega: float
    d: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"success count n must be >= 2, got {self.n}")
        if not self.omega > 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.d > -self.n:
            raise ValueError(f"d must exceed -n so estimates stay finite, got d={self.d}")


def estimate(spec: EstimatorSpec, stopping_time: int) -> float:
    """Point estimate of p after the n-th success arrived at ``stopping_time``."""
    if stopping_time < spec.n:
        raise ValueError(
            f"stopping time {stopping_time} is below the success count {spec.n}"
        )
    return spec.omega / (stopping_time + spec.d)


def umvu(n: int) -> EstimatorSpec:
    """Uniformly minimum variance unbiased estimator, (n-1)/(N-1)."""
    return EstimatorSpec(n, float(n - 1), -1.0)


def ml(n: int) -> EstimatorSpec:
    """Maximum likelihood estimator, n/N."""
    return EstimatorSpec(n, float(n), 0.0)


def omega_il(n: int, a: float, b: float) -> float:
    """Numerator constant balancing the inverse-linear loss slopes.

    Unique positive solution of ``a n / omega - b omega / (n-1) = a - b``.
    The radical is rearranged as ``x / (1 + sqrt(1+x))`` so nothing cancels
    when one slope dominates the other.
    """
    if n < 2:
        raise ValueError(f"success count n must be >= 2, got {n}")
    if a < 0.0 or b < 0.0 or (a == 0.0 and b == 0.0):
        raise ValueError(f"slopes must be nonnegative and not both zero, got a={a}, b={b}")
    if a == 0.0:
        return float(n - 1)
    if b == 0.0:
        return float(n)
    x = 4.0 * a * b / ((n - 1) * (a + b) ** 2)
    return (n - 1) * (1.0 + (a + b) / (2.0 * b) * x / (1.0 + math.sqrt(1.0 + x)))


def proposed_il(n: int, loss: LossSpec, d_choice: float | None = None) -> EstimatorSpec:
    """Inverse-linear-loss estimator with the balanced numerator constant.

    Any ``d`` in ``[omega - n, 0]`` keeps the guaranteed-risk property; the
    default is the lower endpoint, the one for which the estimate is always
    sandwiched between the unbiased and maximum-likelihood estimates.
    """
    if loss.family is not LossFamily.INVERSE_LINEAR:
        raise ValueError("proposed_il requires an inverse-linear loss")
    omega = omega_il(n, loss.a, loss.b)
    d = omega - n if d_choice is None else float(d_choice)
    if not omega - n <= d <= 0.0:
        raise ValueError(
            f"d must lie in [{omega - n}, 0] for the guaranteed-risk estimator, got {d}"
        )
    return EstimatorSpec(n, omega, d)


def proposed_estimator(loss: LossSpec, n: int) -> EstimatorSpec:
    """The guaranteed-risk estimator for the given loss family."""
    if loss.family is LossFamily.LINEAR_LINEAR:
        return umvu(n)
    return proposed_il(n, loss)


def parse_estimator(text: str, n: int, loss: LossSpec) -> EstimatorSpec:
    """Parse the command-line encoding of an estimator.

    Accepts ``umvu``, ``ml``, ``il-default`` and ``custom:omega=<v>,d=<v>``.
    """
    token = text.strip()
    if token == "umvu":
        return umvu(n)
    if token == "ml":
        return ml(n)
    if token == "il-default":
        return proposed_il(n, loss)
    head, sep, rest = token.partition(":")
    if head == "custom" and sep:
        fields = {}
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq or key not in ("omega", "d") or key in fields:
                raise ValueError(f"malformed estimator parameters {rest!r}")
            try:
                fields[key] = float(value)
            except ValueError:
                raise ValueError(f"estimator parameter {key!r} is not a number: {value!r}") from None
        if set(fields) != {"omega", "d"}:
            raise ValueError(f"custom estimator must provide omega and d, got {rest!r}")
        return EstimatorSpec(n, fields["omega"], fields["d"])
    raise ValueError(
        f"unknown estimator {text!r} (expected umvu, ml, il-default or custom:omega=<v>,d=<v>)"
    )
