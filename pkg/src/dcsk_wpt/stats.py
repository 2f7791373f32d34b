"""Mergeable sample statistics and the harvest estimate record."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.stats import norm


@dataclass
class RunningStats:
    """Count / mean / sum of squared deviations, merged with Chan's pairwise update."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_values(cls, values: np.ndarray) -> "RunningStats":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(np.mean(values))
        # np.sum is pairwise, which keeps beta^4-scale terms from swamping the rest
        return cls(values.size, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: "RunningStats") -> "RunningStats":
        if other.n == 0:
            return RunningStats(self.n, self.mean, self.m2)
        if self.n == 0:
            return RunningStats(other.n, other.mean, other.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta**2 * self.n * other.n / n
        return RunningStats(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else math.inf

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.n) if self.n > 1 else math.inf


@dataclass
class HarvestEstimate:
    """Monte Carlo mean harvested DC with its normal-approximation interval."""

    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    n: int
    seed: int
    analytic: Optional[float] = None
    confidence: float = 0.99

    @classmethod
    def from_stats(cls, stats: RunningStats, seed: int, analytic: Optional[float] = None, confidence: float = 0.99):
        if not 0 < confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        return cls.from_mean_se(stats.mean, stats.std_error, stats.n, seed, analytic, confidence)

    @classmethod
    def from_mean_se(cls, mean: float, se: float, n: int, seed: int, analytic=None, confidence: float = 0.99):
        half = float(norm.ppf(0.5 + confidence / 2)) * se
        mean, se = float(mean), float(se)
        return cls(mean, se, mean - half, mean + half, int(n), seed, analytic, confidence)

    @property
    def rel_dev(self) -> Optional[float]:
        if self.analytic is None or not self.analytic > 0:
            return None
        return abs(self.mean - self.analytic) / self.analytic

    def agrees(self, rel_tol: float = 0.02, n_sigma: float = 3.0) -> bool:
        """|mean - analytic| within max(rel_tol * analytic, n_sigma * std_error)."""
        if self.analytic is None:
            return True
        return abs(self.mean - self.analytic) <= max(rel_tol * abs(self.analytic), n_sigma * self.std_error)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["rel_dev"] = self.rel_dev
        return d


def joint_agree(a: HarvestEstimate, b: HarvestEstimate, n_sigma: float = 3.0) -> bool:
    """True when two independent estimates differ by at most n_sigma joint standard errors."""
    return abs(a.mean - b.mean) <= n_sigma * math.hypot(a.std_error, b.std_error)
