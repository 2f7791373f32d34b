"""Analog correlator, per-sample aggregation, rectenna DC model and PAPR.

Scaling convention: the received amplitude sqrt(P_t * r^-alpha) * |h| is
applied to the signal before the moments are formed, so ``rectenna_dc`` only
carries the circuit constants k2*R_ant and k4*R_ant^2. The closed forms in
:mod:`dcsk_wpt.analysis` fold the same factors into eps1/eps2 instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .waveform import Frame, Scheme, WaveformSpec


@dataclass(frozen=True)
class ReceiverConfig:
    """``correlator=True`` integrates the whole frame (psi = frame length); False is psi = 1."""

    correlator: bool = True

    def psi(self, frame_length: int) -> int:
        return frame_length if self.correlator else 1


@dataclass(frozen=True)
class MomentPair:
    m2: float
    m4: float

    def __post_init__(self):
        if np.any(np.asarray(self.m2) < 0) or np.any(np.asarray(self.m4) < 0):
            raise ValueError("moments must be non-negative")


def correlate(frame: Frame, h: float, p_t: float, path_gain: float = 1.0) -> float:
    """Correlator output for one symbol: sqrt(P_t * path_gain) * h * sum(s).

    The chip sum is correctly rounded, so a bit = -1 DCSK frame gives exactly 0.
    """
    return float(np.sqrt(p_t * path_gain) * h * math.fsum(frame.samples))


def no_correlator_moments(frame: Frame, h: float, p_t: float, path_gain: float = 1.0) -> MomentPair:
    """Per-sample moments summed over the frame (psi = 1)."""
    s = np.asarray(frame.samples)
    amp2 = p_t * path_gain * h**2
    return MomentPair(float(amp2 * np.sum(s**2)), float(amp2**2 * np.sum(s**4)))


def correlator_moments(frame: Frame, h: float, p_t: float, path_gain: float = 1.0) -> MomentPair:
    y = correlate(frame, h, p_t, path_gain)
    return MomentPair(y**2, y**4)


def rectenna_dc(moments: MomentPair, k2_r: float, k4_r2: float):
    """Truncated diode model: z = k2*R_ant*E|y|^2 + k4*R_ant^2*E|y|^4 (amperes).

    Pass ``k4_r2=0`` for the linear harvester model.
    """
    return k2_r * moments.m2 + k4_r2 * moments.m4


def harvest_batch(samples: np.ndarray, h: np.ndarray, amplitude: float, correlator: bool, k2_r: float, k4_r2: float) -> np.ndarray:
    """Per-symbol harvested DC for a block of frames.

    ``samples`` is (n, L), ``h`` is (n,), ``amplitude`` is sqrt(P_t * r^-alpha).
    """
    g = amplitude * h
    if correlator:
        y2 = (g * samples.sum(axis=1)) ** 2
        return k2_r * y2 + k4_r2 * y2**2
    g2 = g**2
    s2 = np.square(samples)
    m2 = g2 * s2.sum(axis=1)
    m4 = g2**2 * np.einsum("ij,ij->i", s2, s2)
    return k2_r * m2 + k4_r2 * m4


def expected_power(spec: WaveformSpec, correlator: bool) -> float:
    """Mean harvester-input power per unit |h|^2 under the arcsine chip law.

    Per chip (E{s^2} = 1/2) without a correlator, per symbol E{(sum s)^2} with one.
    """
    if not correlator:
        return 0.5
    if spec.scheme in (Scheme.DCSK, Scheme.UNMODULATED):
        return float(spec.beta)
    return (spec.beta_r**2 + spec.beta**2) / (2 * spec.beta_r)


def peak_power(spec: WaveformSpec, correlator: bool) -> float:
    """Supremum of the harvester-input instantaneous power per unit |h|^2."""
    if not correlator:
        return 1.0
    return float(spec.frame_length) ** 2


def theoretical_papr(spec: WaveformSpec, correlator: bool) -> float:
    """2 without a correlator; 4*beta with one for DCSK and unmodulated frames.

    SR frames with a correlator give 2*beta_r*(beta_r+beta)^2/(beta_r^2+beta^2).
    """
    if not correlator:
        return 2.0
    if spec.scheme in (Scheme.DCSK, Scheme.UNMODULATED):
        return 4.0 * spec.beta
    return peak_power(spec, True) / expected_power(spec, True)


def papr_from_samples(samples: np.ndarray, h: np.ndarray, spec: WaveformSpec, correlator: bool) -> float:
    """Largest observed instantaneous power over the conditional mean power.

    Each frame's peak is normalised by the expected power for that frame's own
    channel instance, so |h| cancels and the result never exceeds the
    theoretical supremum ratio.
    """
    samples = np.atleast_2d(samples)
    h = np.broadcast_to(np.asarray(h, dtype=float), samples.shape[:1])
    if samples.shape[0] == 0:
        raise ValueError("need at least one frame")
    keep = h > 0
    if not np.any(keep):
        raise ValueError("every channel instance is zero; PAPR undefined")
    samples, h = samples[keep], h[keep]
    if correlator:
        peak = (h * samples.sum(axis=1)) ** 2
    else:
        peak = h**2 * np.square(np.max(np.abs(samples), axis=1))
    mean = h**2 * expected_power(spec, correlator)
    return float(np.max(peak / mean))


def measure_papr(frames: Sequence[Frame], h_per_frame, config: ReceiverConfig) -> tuple[float, float]:
    """(empirical, theoretical) PAPR at the harvester input for a run of frames."""
    if len(frames) == 0:
        raise ValueError("need at least one frame")
    spec = frames[0].spec
    samples = np.stack([f.samples for f in frames])
    emp = papr_from_samples(samples, np.asarray(h_per_frame, dtype=float), spec, config.correlator)
    return emp, theoretical_papr(spec, config.correlator)
