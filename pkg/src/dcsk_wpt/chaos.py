"""Chebyshev chaotic chip generation and information bits.

Every chaotic trajectory starts from an initial condition drawn from the
invariant (arcsine) law of the Chebyshev map, so sample statistics match the
invariant density 1/(pi*sqrt(1-x^2)) from the first chip onwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Largest |x| - 1 accepted as rounding noise by chebyshev_next.
DOMAIN_TOL = 1e-12


class TrajectoryMode(str, enum.Enum):
    PER_SYMBOL = "trajectory"
    IID = "iid"


@dataclass(frozen=True)
class ChaosConfig:
    """Chebyshev map settings.

    ``degree`` defaults to 4. Degree 2 and 3 maps produce non-vanishing
    fourth-order cross moments between neighbouring chips
    (E{x_k^2 x_{k+1} x_{k+2}} = 1/8 for degree 2, E{x_k^3 x_{k+1}} = 1/8 for
    degree 3), which bias every correlator sum; degree 4 is the lowest degree
    whose trajectories behave like independent arcsine draws up to fourth order.

    ``trajectory_mode`` selects one Chebyshev orbit per symbol (the physical
    generator) or independent invariant draws for every chip (a moment oracle).
    """

    degree: int = 4
    trajectory_mode: TrajectoryMode = TrajectoryMode.PER_SYMBOL

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 2:
            raise ValueError(f"degree must be an integer >= 2, got {self.degree!r}")
        object.__setattr__(self, "trajectory_mode", TrajectoryMode(self.trajectory_mode))


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + DOMAIN_TOL) or np.any(np.isnan(x)):
        raise ValueError("Chebyshev map is only defined on [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def chebyshev_next(x, degree: int = 4):
    """One step of the Chebyshev map, cos(degree * arccos(x)).

    Accepts scalars or arrays. Values outside [-1, 1] beyond rounding noise
    raise ``ValueError``.
    """
    if degree < 2:
        raise ValueError("degree must be >= 2")
    out = np.cos(degree * np.arccos(_check_domain(x)))
    return float(out) if np.ndim(out) == 0 else out


def sample_invariant(rng: np.random.Generator, size=None):
    """Draw from the arcsine law on (-1, 1) via the exact transform cos(pi*u)."""
    u = rng.random(size)
    return np.cos(np.pi * u)


def generate_references(n: int, length: int, config: ChaosConfig, rng: np.random.Generator) -> np.ndarray:
    """Return an ``(n, length)`` array of chaotic chips, one row per symbol."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if config.trajectory_mode is TrajectoryMode.IID:
        return np.cos(np.pi * rng.random((n, length)))

    # chip-major layout keeps each iteration step contiguous
    chips = np.empty((length, n))
    chips[0] = sample_invariant(rng, n)
    for k in range(1, length):
        np.cos(config.degree * np.arccos(chips[k - 1]), out=chips[k])
    return np.ascontiguousarray(chips.T)


def generate_reference(length: int, config: ChaosConfig, rng: np.random.Generator) -> np.ndarray:
    """A single chip sequence of the given length (values in [-1, 1])."""
    return generate_references(1, length, config, rng)[0]


def random_bits(rng: np.random.Generator, size=None):
    """Equiprobable +/-1 information bits."""
    return 2 * rng.integers(0, 2, size=size) - 1


def random_bit(rng: np.random.Generator) -> int:
    return int(random_bits(rng))
