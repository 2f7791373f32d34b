"""Seeded Monte Carlo estimation of harvested DC and PAPR.

The symbol index space is cut into fixed-size chunks, each with its own
``SeedSequence`` child, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    IDEAL_HPA,
    HpaModel,
    HpaPlacement,
    chaotic_harvest_with_hpa,
    hpa_apply,
    multisine_baseline,
    multisine_papr,
    radiated_power,
)
from .channel import ChannelParams, LinkBudget, dbm_to_watts, nakagami_amplitude
from .chaos import ChaosConfig
from .receiver import ReceiverConfig, harvest_batch, papr_from_samples, theoretical_papr
from .stats import HarvestEstimate, RunningStats
from .waveform import Scheme, WaveformSpec, generate_frames

CHUNK_SYMBOLS = 1 << 14

SWEEP_PARAMETERS = ("beta", "m", "beta_r", "p_t_dbm", "r", "n_tones")


@dataclass(frozen=True)
class SimConfig:
    waveform: WaveformSpec = field(default_factory=WaveformSpec)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    budget: LinkBudget = field(default_factory=LinkBudget)
    chaos: ChaosConfig = field(default_factory=ChaosConfig)
    n_symbols: int = 10_000
    seed: int = 0
    confidence: float = 0.99
    hpa: HpaModel = IDEAL_HPA

    def __post_init__(self):
        if int(self.n_symbols) != self.n_symbols or self.n_symbols < 1:
            raise ValueError(f"n_symbols must be a positive integer, got {self.n_symbols!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        if self.waveform.scheme is Scheme.SRDCSK and self.waveform.beta_r == 0:
            raise ValueError("beta_r=0 SR-DCSK has no frame to simulate")

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


def derive_seed(base_seed: int, index: int) -> int:
    """Independent, reproducible child seed for sweep point ``index``."""
    words = np.random.SeedSequence(base_seed, spawn_key=(index,)).generate_state(2, np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _chunks(n_symbols: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK_SYMBOLS, n_symbols - i * CHUNK_SYMBOLS)) for i in range(math.ceil(n_symbols / CHUNK_SYMBOLS))]


def _simulate_chunk(config: SimConfig, chunk: int, n: int):
    """Frames, amplitudes and per-symbol harvested DC for one chunk."""
    rng = _chunk_rng(config.seed, chunk)
    samples, _ = generate_frames(config.waveform, config.chaos, n, rng)
    h = np.broadcast_to(nakagami_amplitude(config.channel.m, rng, n), (n,))
    budget, hpa = config.budget, config.hpa
    if not hpa.ideal and hpa.placement is HpaPlacement.ENVELOPE:
        tx = hpa_apply(math.sqrt(budget.p_t) * samples, hpa)
        amplitude = math.sqrt(budget.path_gain)
    else:
        tx = samples
        amplitude = math.sqrt(radiated_power(budget.p_t, hpa) * budget.path_gain)
    z = harvest_batch(tx, h, amplitude, config.receiver.correlator, budget.k2_r, budget.k4_r2)
    return samples, h, z


def _chunk_worker(args) -> tuple[RunningStats, float]:
    config, chunk, n = args
    samples, h, z = _simulate_chunk(config, chunk, n)
    papr = papr_from_samples(samples, h, config.waveform, config.receiver.correlator)
    return RunningStats.from_values(z), papr


def _run_chunks(config: SimConfig, workers: int):
    tasks = [(config, i, n) for i, n in _chunks(config.n_symbols)]
    if workers <= 1 or len(tasks) == 1:
        return [_chunk_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_chunk_worker, tasks))


def analytic_for(config: SimConfig) -> Optional[float]:
    """Closed-form counterpart of ``config``; None for a per-sample (envelope) HPA."""
    hpa = config.hpa
    if not hpa.ideal and hpa.placement is HpaPlacement.ENVELOPE:
        return None
    return chaotic_harvest_with_hpa(config.waveform, config.receiver.correlator, config.channel.m, config.budget, hpa)


def simulate(config: SimConfig, workers: int = 1) -> tuple[HarvestEstimate, float, float]:
    """Harvest estimate plus (empirical, theoretical) PAPR from one pass over the symbols."""
    total = RunningStats()
    papr = 0.0
    # merge in chunk order: identical floating-point result for any worker count
    for stats, chunk_papr in _run_chunks(config, workers):
        total = total.merge(stats)
        papr = max(papr, chunk_papr)
    estimate = HarvestEstimate.from_stats(total, config.seed, analytic_for(config), config.confidence)
    return estimate, papr, theoretical_papr(config.waveform, config.receiver.correlator)


def estimate_harvest(config: SimConfig, workers: int = 1) -> HarvestEstimate:
    """Mean per-symbol harvested DC over ``config.n_symbols`` symbols."""
    return simulate(config, workers)[0]


def estimate_papr(config: SimConfig, workers: int = 1) -> tuple[float, float]:
    """(empirical, theoretical) PAPR at the harvester input."""
    _, empirical, theoretical = simulate(config, workers)
    return empirical, theoretical


@dataclass
class SweepPoint:
    parameter: str
    value: float
    config: Optional[SimConfig] = None
    estimate: Optional[HarvestEstimate] = None
    error: Optional[str] = None
    papr_emp: Optional[float] = None
    papr_theory: Optional[float] = None

    @property
    def analytic(self) -> Optional[float]:
        return None if self.estimate is None else self.estimate.analytic


def apply_parameter(base: SimConfig, parameter: str, value) -> SimConfig:
    """Return ``base`` with one physical parameter replaced."""
    if parameter == "beta":
        return base.replace(waveform=dataclasses.replace(base.waveform, beta=int(value)))
    if parameter == "beta_r":
        return base.replace(waveform=dataclasses.replace(base.waveform, beta_r=int(value)))
    if parameter == "m":
        return base.replace(channel=ChannelParams(float(value)))
    if parameter == "p_t_dbm":
        return base.replace(budget=dataclasses.replace(base.budget, p_t=dbm_to_watts(float(value))))
    if parameter == "r":
        return base.replace(budget=dataclasses.replace(base.budget, r=float(value)))
    raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")


def sweep(parameter: str, grid: Sequence, base: SimConfig, workers: int = 1) -> list[SweepPoint]:
    """One estimate per grid value with seeds derived from the base seed and index.

    Invalid grid points (e.g. a beta_r that does not divide beta) are reported
    in ``SweepPoint.error`` instead of aborting the sweep.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")
    if len(grid) == 0:
        raise ValueError("empty sweep grid")
    points = []
    for i, value in enumerate(grid):
        seed = derive_seed(base.seed, i)
        try:
            if parameter == "n_tones":
                est = multisine_baseline(
                    int(value), base.budget, base.hpa, base.channel,
                    n_draws=base.n_symbols, seed=seed, confidence=base.confidence,
                )
                emp, theory = multisine_papr(int(value), base.budget.p_t, base.hpa)
                points.append(SweepPoint(parameter, value, None, est, None, emp, theory))
                continue
            config = apply_parameter(base, parameter, value).replace(seed=seed)
        except ValueError as exc:
            points.append(SweepPoint(parameter, value, error=str(exc)))
            continue
        est, papr_emp, papr_theory = simulate(config, workers)
        points.append(SweepPoint(parameter, value, config, est, None, papr_emp, papr_theory))
    return points
