"""Sample-size planning: the smallest success count with a guaranteed risk.

The guaranteed risk of the proposed estimators is their limiting risk, which
bounds the risk for every p in (0,1).  Planning therefore reduces to finding
the minimal n whose limit falls at or below the target.  The limit is treated
as decreasing in n (which it is empirically); the returned n is certified by
checking the crossing at n-1 directly, with a linear scan as fallback so the
answer never silently rests on the monotonicity assumption.
"""

from __future__ import annotations

from dataclasses import dataclass

from .estimators import EstimatorSpec, proposed_estimator
from .exceptions import TargetUnreachableError
from .loss import LossSpec
from .risk import guaranteed_risk_limit

__all__ = ["PlanResult", "plan", "SEARCH_CAP"]

SEARCH_CAP = 10_000_000


@dataclass(frozen=True)
class PlanResult:
    n: int
    estimator: EstimatorSpec
    guaranteed_risk: float
    target: float


def plan(loss: LossSpec, target: float) -> PlanResult:
    """Smallest n >= 2 whose guaranteed risk is at most ``target``."""
    if target <= 0.0:
        raise TargetUnreachableError(
            f"guaranteed risk is strictly positive; target {target} is unreachable"
        )

    def limit(n: int) -> float:
        return guaranteed_risk_limit(loss, n)

    if limit(2) <= target:
        return _result(loss, 2, target)

    lo = 2
    hi = 4
    while limit(hi) > target:
        lo = hi
        hi *= 2
        if hi >= SEARCH_CAP:
            if limit(SEARCH_CAP) > target:
                raise TargetUnreachableError(
                    f"target {target} not reachable within n <= {SEARCH_CAP}"
                )
            hi = SEARCH_CAP
            break
    # Minimal crossing inside (lo, hi]: limit(lo) > target >= limit(hi).
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if limit(mid) <= target:
            hi = mid
        else:
            lo = mid
    n = hi
    if limit(n) <= target and limit(n - 1) > target:
        return _result(loss, n, target)
    # The decreasing assumption failed around the crossing; certify linearly.
    for n in range(2, SEARCH_CAP + 1):
        if limit(n) <= target:
            return _result(loss, n, target)
    raise TargetUnreachableError(f"target {target} not reachable within n <= {SEARCH_CAP}")


def _result(loss: LossSpec, n: int, target: float) -> PlanResult:
    return PlanResult(n, proposed_estimator(loss, n), guaranteed_risk_limit(loss, n), target)
