"""Interval quality metrics and coverage calibration.

PICP counts inclusive containment (a target exactly on a bound is
covered); MPIW averages absolute widths. Calibration finds the smallest
midpoint-preserving scale factor k that lifts PICP to the target: under
that scaling, coverage is a step function of k whose breakpoints are the
per-sample expansion factors, so the answer is their nearest-rank Tth
percentile -- exact, no search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .backend import kernels as K
from .errors import ConfigError, DegenerateIntervalError
from .losses import EPS_WIDTH


class Interval(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True)
class IntervalBatch:
    """Emitted (ordered) intervals plus the matching targets."""

    lower: np.ndarray
    upper: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, np.float64)
        upper = np.asarray(self.upper, np.float64)
        targets = np.asarray(self.targets, np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "targets", targets)
        if not lower.shape == upper.shape == targets.shape or lower.ndim != 1:
            raise ConfigError(
                f"interval batch arrays must share one dimension, got "
                f"{lower.shape}/{upper.shape}/{targets.shape}"
            )
        if lower.shape[0] < 1:
            raise ConfigError("interval batch is empty")
        if np.any(lower > upper):
            bad = int(np.flatnonzero(lower > upper)[0])
            raise ConfigError(
                f"crossed interval at sample {bad}: emitted batches must be "
                f"ordered (lower <= upper)"
            )

    def __len__(self) -> int:
        return self.lower.shape[0]

    def __getitem__(self, i: int) -> Interval:
        return Interval(float(self.lower[i]), float(self.upper[i]))


def picp(batch: IntervalBatch) -> float:
    """Fraction of targets inside their interval (bounds inclusive)."""
    inside = (batch.lower <= batch.targets) & (batch.targets <= batch.upper)
    return float(inside.mean())


def mpiw(batch: IntervalBatch) -> float:
    """Mean absolute interval width."""
    return float(np.abs(batch.upper - batch.lower).mean())


def scale_intervals(batch: IntervalBatch, k: float) -> IntervalBatch:
    """Scale every interval about its midpoint by k >= 0."""
    if k < 0:
        raise ConfigError(f"scale factor must be >= 0, got {k}")
    mid2 = batch.upper + batch.lower
    spread = k * np.abs(batch.upper - batch.lower)
    return IntervalBatch((mid2 - spread) / 2.0, (mid2 + spread) / 2.0, batch.targets)


def expansion_factors(batch: IntervalBatch) -> np.ndarray:
    """Per-sample minimal midpoint-preserving expansion factors."""
    k, bad = K.expansion_factors(batch.lower, batch.upper, batch.targets, EPS_WIDTH)
    if bad >= 0:
        width = np.abs(batch.upper - batch.lower)
        idx = np.flatnonzero(width < EPS_WIDTH)[:20]
        raise DegenerateIntervalError(
            f"cannot calibrate: degenerate interval width at sample(s) "
            f"{idx.tolist()}"
        )
    return k


def nearest_rank(values: np.ndarray, t: float) -> float:
    """Value at 1-based index ceil(t*n) of the ascending-sorted sample."""
    n = values.shape[0]
    idx = int(math.ceil(t * n - 1e-9))
    idx = min(max(idx, 1), n) - 1
    return float(np.partition(np.asarray(values, np.float64), idx)[idx])


def calibrate_k(batch: IntervalBatch, target: float) -> float:
    """Smallest k with picp(scale_intervals(batch, k)) >= target."""
    if not 0.0 < target <= 1.0:
        raise ConfigError(f"coverage target must lie in (0, 1], got {target}")
    return nearest_rank(expansion_factors(batch), target)
