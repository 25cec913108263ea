"""The two normalized loss families and their evaluation.

Losses are functions of the normalized estimate ``x = estimate / p`` and are
zero at ``x = 1``.  Slope ``a`` penalizes underestimation, ``b``
overestimation; either may be zero but not both.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class LossFamily(enum.Enum):
    LINEAR_LINEAR = "ll"
    INVERSE_LINEAR = "il"


@dataclass(frozen=True)
class LossSpec:
    family: LossFamily
    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError(f"loss slopes must be nonnegative, got a={self.a}, b={self.b}")
        if self.a == 0.0 and self.b == 0.0:
            raise ValueError("loss slopes (a, b) must not both be zero")

    def scaled(self, factor: float) -> "LossSpec":
        return LossSpec(self.family, self.a * factor, self.b * factor)


def loss_eval(loss: LossSpec, x: float) -> float:
    """Loss at normalized estimate ``x > 0``.

    ``x = 1`` is evaluated on the underestimation branch; both branches are
    zero there, so the choice only fixes determinism.
    """
    if not x > 0.0:
        raise ValueError(f"normalized estimate must be positive, got {x}")
    if x <= 1.0:
        if loss.family is LossFamily.LINEAR_LINEAR:
            return loss.a * (1.0 - x)
        return loss.a * (1.0 / x - 1.0)
    return loss.b * (x - 1.0)


def loss_eval_array(loss: LossSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized ``loss_eval`` over an array of positive ratios."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0.0):
        raise ValueError("normalized estimates must be positive")
    if loss.family is LossFamily.LINEAR_LINEAR:
        under = loss.a * (1.0 - x)
    else:
        under = loss.a * (1.0 / x - 1.0)
    return np.where(x <= 1.0, under, loss.b * (x - 1.0))


def parse_loss(text: str) -> LossSpec:
    """Parse the command-line encoding ``ll:a=<v>,b=<v>`` / ``il:a=<v>,b=<v>``.

    A bare family token (``ll`` or ``il``) yields the symmetric a = b = 1 loss.
    """
    head, sep, rest = text.partition(":")
    try:
        family = LossFamily(head.strip())
    except ValueError:
        raise ValueError(f"unknown loss family {head!r} (expected 'll' or 'il')") from None
    if not sep:
        return LossSpec(family, 1.0, 1.0)
    fields = {}
    for item in rest.split(","):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in ("a", "b") or key in fields:
            raise ValueError(f"malformed loss parameters {rest!r} (expected 'a=<v>,b=<v>')")
        try:
            fields[key] = float(value)
        except ValueError:
            raise ValueError(f"loss parameter {key!r} is not a number: {value!r}") from None
    if set(fields) != {"a", "b"}:
        raise ValueError(f"loss parameters must provide both a and b, got {rest!r}")
    return LossSpec(family, fields["a"], fields["b"])


def format_loss(loss: LossSpec) -> str:
    return f"{loss.family.value}:a={loss.a:g},b={loss.b:g}"
