"""Nakagami-m block fading and the link budget."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def dbm_to_watts(dbm: float) -> float:
    return 10 ** (dbm / 10 - 3)


def watts_to_dbm(watts: float) -> float:
    return 10 * math.log10(watts) + 30


@dataclass(frozen=True)
class ChannelParams:
    """Unit-mean-power Nakagami-m channel. ``m = inf`` means no fading."""

    m: float = 1.0

    def __post_init__(self):
        m = float(self.m)
        if math.isnan(m) or m < 1:
            raise ValueError(f"Nakagami m must be >= 1 or inf, got {self.m!r}")
        object.__setattr__(self, "m", m)

    @property
    def no_fading(self) -> bool:
        return math.isinf(self.m)

    def sample(self, rng: np.random.Generator, size=None):
        return nakagami_amplitude(self.m, rng, size)


def fourth_moment(m: float) -> float:
    """E{|h|^4} = (1+m)/m for unit-power Nakagami-m; exactly 1 without fading."""
    if math.isinf(m):
        return 1.0
    return (1 + m) / m


def nakagami_amplitude(m: float, rng: np.random.Generator, size=None):
    """|h| = sqrt(G/m) with G ~ Gamma(m, 1), so E{|h|^2} = 1.

    ``m = inf`` returns the constant amplitude 1 without consuming randomness.
    """
    if math.isinf(m):
        return np.ones(size) if size is not None else 1.0
    if not m >= 1:
        raise ValueError(f"Nakagami m must be >= 1, got {m!r}")
    return np.sqrt(rng.gamma(m, 1.0, size) / m)


def rice_to_nakagami(K: float) -> float:
    """Nakagami shape matching a Rician channel with factor K."""
    if K < 0:
        raise ValueError("Rice factor must be non-negative")
    if math.isinf(K):
        return math.inf
    return (K + 1) ** 2 / (2 * K + 1)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power (W), distance (m), path-loss exponent and rectenna constants."""

    p_t: float = 1.0
    r: float = 20.0
    alpha: float = 4.0
    k2: float = 0.0034
    k4: float = 0.3829
    r_ant: float = 50.0

    def __post_init__(self):
        for name in ("p_t", "r", "k2", "r_ant"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not self.alpha >= 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha!r}")
        # k4 = 0 is the linear harvester model
        if not (self.k4 >= 0 and math.isfinite(self.k4)):
            raise ValueError(f"k4 must be non-negative, got {self.k4!r}")

    @classmethod
    def from_dbm(cls, p_t_dbm: float = 30.0, **kwargs) -> "LinkBudget":
        return cls(p_t=dbm_to_watts(p_t_dbm), **kwargs)

    @property
    def p_t_dbm(self) -> float:
        return watts_to_dbm(self.p_t)

    @property
    def path_gain(self) -> float:
        return self.r ** (-self.alpha)

    @property
    def k2_r(self) -> float:
        return self.k2 * self.r_ant

    @property
    def k4_r2(self) -> float:
        return self.k4 * self.r_ant**2


def effective_gains(budget: LinkBudget, p_t: float | None = None) -> tuple[float, float]:
    """(eps1, eps2) for the budget; ``p_t`` overrides the transmit power (e.g. after an HPA)."""
    p = budget.p_t if p_t is None else p_t
    eps1 = budget.r ** (-budget.alpha) * budget.k2 * budget.r_ant * p
    eps2 = budget.r ** (-2 * budget.alpha) * budget.k4 * budget.r_ant**2 * p**2
    return eps1, eps2
