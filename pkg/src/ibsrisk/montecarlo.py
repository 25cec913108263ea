"""Seeded Monte Carlo verification of risks and stopping-time behaviour.

Replications are organized in chunks; chunk ``i`` draws from its own stream
derived from ``(seed, i)`` via ``numpy``'s seed-sequence spawning, and chunk
statistics are merged in fixed index order.  Results for a given
``(seed, trials, chunk)`` are therefore bitwise reproducible regardless of how
the chunks are scheduled.

Within a chunk the Bernoulli draws (uniform < p) for consecutive replications
form one continuous stream: the stopping times are the gaps between every
n-th success position, which is the same process as running the replications
one after another but vectorizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import EstimatorSpec
from .loss import LossSpec, loss_eval_array

__all__ = ["McConfig", "McResult", "simulate_ibs", "empirical_risk"]

_DRAW_CAP_PER_REPLICATION = 1_000_000_000


@dataclass(frozen=True)
class McConfig:
    p: float
    trials: int
    seed: int
    chunk: int = 100_000

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"success probability must lie in (0,1), got {self.p}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.chunk < 1:
            raise ValueError(f"chunk must be >= 1, got {self.chunk}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class McResult:
    mean_loss: float
    std_error: float
    mean_stopping_time: float
    trials: int
    degenerate: bool = False


def simulate_ibs(n: int, p: float, rng: np.random.Generator) -> int:
    """Number of Bernoulli trials consumed until the n-th success.

    Draws uniforms in blocks and compares against p; a hard cap of 1e9 draws
    guards against a pathological generator/probability combination.
    """
    if n < 1:
        raise ValueError(f"success count n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"success probability must lie in (0,1), got {p}")
    remaining = n
    consumed = 0
    block = 4096
    while consumed < _DRAW_CAP_PER_REPLICATION:
        hits = np.flatnonzero(rng.random(block) < p)
        if hits.size >= remaining:
            return consumed + int(hits[remaining - 1]) + 1
        remaining -= int(hits.size)
        consumed += block
    raise RuntimeError(
        f"no {n}-th success within {_DRAW_CAP_PER_REPLICATION} draws (p={p})"
    )


def _stopping_times_chunk(
    rng: np.random.Generator, n: int, p: float, count: int
) -> np.ndarray:
    """Stopping times of ``count`` replications from one Bernoulli stream."""
    need = count * n
    positions: list[np.ndarray] = []
    found = 0
    offset = 0
    draws = 0
    cap = _DRAW_CAP_PER_REPLICATION * count
    while found < need:
        estimate = int((need - found) / p * 1.15) + 1024
        block = min(max(estimate, 4096), 8_388_608)
        hits = np.flatnonzero(rng.random(block) < p)
        if hits.size:
            positions.append(hits.astype(np.int64) + (offset + 1))
            found += int(hits.size)
        offset += block
        draws += block
        if draws > cap:
            raise RuntimeError(f"draw cap exceeded while sampling stopping times (p={p})")
    success_positions = np.concatenate(positions)[:need]
    ends = success_positions[n - 1 :: n]
    return np.diff(ends, prepend=0)


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def empirical_risk(loss: LossSpec, spec: EstimatorSpec, cfg: McConfig) -> McResult:
    """Empirical mean loss over ``cfg.trials`` replications.

    Returns the mean, its standard error and the mean stopping time.  Chunk
    statistics (count, mean, sum of squared deviations) are merged pairwise in
    index order, so the output is deterministic for a fixed configuration.
    """
    n_chunks = -(-cfg.trials // cfg.chunk)
    count = 0
    mean = 0.0
    m2 = 0.0
    stopping_total = 0
    for i in range(n_chunks):
        size = min(cfg.chunk, cfg.trials - i * cfg.chunk)
        rng = _chunk_rng(cfg.seed, i)
        stopping = _stopping_times_chunk(rng, spec.n, cfg.p, size)
        ratios = (spec.omega / (stopping + spec.d)) / cfg.p
        losses = loss_eval_array(loss, ratios)
        c_mean = float(losses.mean())
        c_m2 = float(np.sum((losses - c_mean) ** 2))
        delta = c_mean - mean
        total = count + size
        mean += delta * size / total
        m2 += c_m2 + delta * delta * count * size / total
        count = total
        stopping_total += int(stopping.sum())
    if count > 1:
        std_error = math.sqrt(m2 / (count - 1) / count)
        degenerate = False
    else:
        std_error = 0.0
        degenerate = True
    return McResult(mean, std_error, stopping_total / count, count, degenerate)
