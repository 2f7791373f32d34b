"""Transmit frame construction for DCSK, unmodulated, SR-DCSK and the
single-chip-reference SR-DCSK frame."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chaos import ChaosConfig, generate_references, random_bits


class Scheme(str, enum.Enum):
    DCSK = "dcsk"
    UNMODULATED = "unmodulated"
    SRDCSK = "srdcsk"
    OPTIMAL_SR = "optimal_sr"


@dataclass(frozen=True)
class WaveformSpec:
    """Frame scheme plus spreading factor ``beta`` and SR reference length ``beta_r``.

    ``beta_r`` is only meaningful for SRDCSK; OPTIMAL_SR always uses 1.
    A ``beta_r`` of 0 is accepted for the closed form only and cannot be framed.
    """

    scheme: Scheme = Scheme.DCSK
    beta: int = 25
    beta_r: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if int(self.beta) != self.beta or self.beta < 1:
            raise ValueError(f"beta must be an integer >= 1, got {self.beta!r}")
        if int(self.beta_r) != self.beta_r or self.beta_r < 0:
            raise ValueError(f"beta_r must be an integer >= 0, got {self.beta_r!r}")
        if self.scheme is Scheme.OPTIMAL_SR:
            object.__setattr__(self, "beta_r", 1)
        if self.scheme is Scheme.SRDCSK and self.beta_r > 0 and self.beta % self.beta_r:
            raise ValueError(f"beta_r={self.beta_r} does not divide beta={self.beta}")

    @property
    def zeta(self) -> int:
        """Number of modulated reference copies in an SR frame."""
        return self.beta // self.beta_r

    @property
    def reference_length(self) -> int:
        if self.scheme is Scheme.DCSK:
            return self.beta
        if self.scheme is Scheme.UNMODULATED:
            return 2 * self.beta
        if self.beta_r == 0:
            raise ValueError("beta_r=0 has no constructible frame")
        return self.beta_r

    @property
    def frame_length(self) -> int:
        if self.scheme in (Scheme.DCSK, Scheme.UNMODULATED):
            return 2 * self.beta
        return self.beta_r + self.beta


@dataclass
class Frame:
    samples: np.ndarray
    bit: Optional[int]
    spec: WaveformSpec = field(default_factory=WaveformSpec)

    def __len__(self):
        return len(self.samples)


def _as_chips(reference) -> np.ndarray:
    ref = np.asarray(reference, dtype=float)
    if ref.ndim != 1 or ref.size == 0:
        raise ValueError("reference must be a non-empty 1-D sequence")
    return ref


def _check_bit(bit):
    if bit not in (-1, 1):
        raise ValueError(f"bit must be +1 or -1, got {bit!r}")
    return int(bit)


def frame_dcsk(reference, bit: int) -> Frame:
    ref = _as_chips(reference)
    bit = _check_bit(bit)
    spec = WaveformSpec(Scheme.DCSK, beta=ref.size)
    return Frame(np.concatenate([ref, bit * ref]), bit, spec)


def frame_unmodulated(chips, beta: Optional[int] = None) -> Frame:
    chips = _as_chips(chips)
    if beta is None:
        if chips.size % 2:
            raise ValueError("unmodulated frame needs an even number of chips")
        beta = chips.size // 2
    if chips.size != 2 * beta:
        raise ValueError(f"expected {2 * beta} chips, got {chips.size}")
    return Frame(chips.copy(), None, WaveformSpec(Scheme.UNMODULATED, beta=beta))


def frame_srdcsk(reference, bit: int, beta: int) -> Frame:
    """Reference of length beta_r followed by beta/beta_r copies of bit*reference."""
    ref = _as_chips(reference)
    bit = _check_bit(bit)
    spec = WaveformSpec(Scheme.SRDCSK, beta=beta, beta_r=ref.size)
    return Frame(np.concatenate([ref, np.tile(bit * ref, spec.zeta)]), bit, spec)


def frame_optimal_sr(reference_chip: float, bit: int, beta: int) -> Frame:
    if abs(reference_chip) > 1:
        raise ValueError("reference chip must lie in [-1, 1]")
    bit = _check_bit(bit)
    spec = WaveformSpec(Scheme.OPTIMAL_SR, beta=beta)
    samples = np.full(beta + 1, bit * float(reference_chip))
    samples[0] = reference_chip
    return Frame(samples, bit, spec)


def assemble(spec: WaveformSpec, reference: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Vectorised frame assembly: one frame per row of ``reference``.

    ``bits`` is ignored for the unmodulated scheme.
    """
    reference = np.atleast_2d(reference)
    if reference.shape[1] != spec.reference_length:
        raise ValueError(
            f"{spec.scheme.value} needs {spec.reference_length} reference chips, got {reference.shape[1]}"
        )
    if spec.scheme is Scheme.UNMODULATED:
        return reference.copy()
    data = np.asarray(bits).reshape(-1, 1) * reference
    if spec.scheme is Scheme.DCSK:
        return np.concatenate([reference, data], axis=1)
    return np.concatenate([reference, np.tile(data, (1, spec.zeta))], axis=1)


def generate_frames(spec: WaveformSpec, chaos: ChaosConfig, n: int, rng: np.random.Generator):
    """Draw ``n`` frames; returns ``(samples, bits)`` with samples of shape (n, frame_length)."""
    bits = random_bits(rng, n)
    reference = generate_references(n, spec.reference_length, chaos, rng)
    return assemble(spec, reference, bits), bits
