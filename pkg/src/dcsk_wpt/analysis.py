"""Closed-form harvested DC for every frame scheme plus the multisine + HPA baseline.

All harvest formulas take the effective gains eps1 = r^-a k2 R_ant P_t and
eps2 = r^-2a k4 R_ant^2 P_t^2 (see :func:`dcsk_wpt.channel.effective_gains`).
``m = inf`` is the no-fading channel and is handled exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    ChannelParams,
    LinkBudget,
    dbm_to_watts,
    effective_gains,
    fourth_moment,
    nakagami_amplitude,
)
from .stats import HarvestEstimate, RunningStats
from .waveform import Scheme, WaveformSpec


def _check_beta(beta):
    if np.any(np.asarray(beta) < 1):
        raise ValueError("beta must be >= 1")


def z_mc(eps1, eps2, beta, m):
    """DCSK with a full-symbol correlator."""
    _check_beta(beta)
    return eps1 * beta + eps2 * 3 * fourth_moment(m) * beta * (2 * beta - 1)


def z_mnc(eps1, eps2, beta, m):
    """DCSK without a correlator."""
    _check_beta(beta)
    return eps1 * beta + eps2 * 0.75 * fourth_moment(m) * beta


def z_um_c(eps1, eps2, beta, m):
    """Unmodulated chaos with a correlator."""
    _check_beta(beta)
    return eps1 * beta + eps2 * 3 * fourth_moment(m) * beta * (beta - 0.25)


def z_um_nc(eps1, eps2, beta, m):
    """Unmodulated chaos without a correlator; identical to :func:`z_mnc`."""
    return z_mnc(eps1, eps2, beta, m)


def z_sr(eps1, eps2, beta, beta_r, m):
    """SR-DCSK with a correlator; ``beta_r = 0`` is the limiting closed form."""
    _check_beta(beta)
    c = 3 * fourth_moment(m) / 8
    if beta_r == 0:
        return 0.5 * eps1 * beta**2 + c * eps2 * beta**4
    if beta_r < 0 or beta % beta_r:
        raise ValueError(f"beta_r={beta_r} does not divide beta={beta}")
    zeta = beta // beta_r
    return (
        eps1 * (beta_r**2 + beta**2) / (2 * beta_r)
        + eps2 * c * (1 + 6 * zeta**2 + zeta**4) * (2 * beta_r**2 - beta_r)
    )


def z_sr_opt(eps1, eps2, beta, m):
    """Single-chip-reference SR-DCSK (beta_r = 1) with a correlator."""
    _check_beta(beta)
    c = 3 * fourth_moment(m) / 8
    return 0.5 * eps1 * (1 + beta**2) + c * eps2 * (1 + 6 * beta**2 + beta**4)


def z_sr_nc(eps1, eps2, beta, beta_r, m):
    """SR-DCSK without a correlator: beta_r + beta chips of E{s^2}=1/2, E{s^4}=3/8."""
    _check_beta(beta)
    if beta_r < 1 or beta % beta_r:
        raise ValueError(f"beta_r={beta_r} must be a positive divisor of beta={beta}")
    n = beta_r + beta
    return eps1 * n / 2 + eps2 * fourth_moment(m) * 3 * n / 8


def analytic_harvest(spec: WaveformSpec, correlator: bool, m: float, eps1: float, eps2: float) -> float:
    """Closed-form harvested DC for any scheme / receiver pairing."""
    beta = spec.beta
    if spec.scheme is Scheme.DCSK:
        return z_mc(eps1, eps2, beta, m) if correlator else z_mnc(eps1, eps2, beta, m)
    if spec.scheme is Scheme.UNMODULATED:
        return z_um_c(eps1, eps2, beta, m) if correlator else z_um_nc(eps1, eps2, beta, m)
    if spec.scheme is Scheme.OPTIMAL_SR:
        return z_sr_opt(eps1, eps2, beta, m) if correlator else z_sr_nc(eps1, eps2, beta, 1, m)
    if correlator:
        return z_sr(eps1, eps2, beta, spec.beta_r, m)
    return z_sr_nc(eps1, eps2, beta, spec.beta_r, m)


def delta_gap(eps2, beta, m1, m2):
    """z_MC at fading m1 minus z_UM,C at fading m2 (the eps1 terms cancel)."""
    return (
        eps2 * 3 * fourth_moment(m1) * beta * (2 * beta - 1)
        - eps2 * 3 * fourth_moment(m2) * beta * (beta - 0.25)
    )


def beta_opt(m1, m2) -> float:
    """Real threshold on beta above which the gap is positive, clipped at 0.

    Returns ``math.inf`` when no finite threshold exists (non-positive slope,
    e.g. m1 = inf with m2 = 1). Integer feasibility is left to the caller.
    """
    if math.isinf(m1) or math.isinf(m2):
        a, b = fourth_moment(m1), fourth_moment(m2)
        num, denom = a - b / 4, 2 * a - b
    else:
        # polynomial form, exact for integer shapes
        num = 4 * m2 + 3 * m1 * m2 - m1
        denom = 4 * (2 * m2 + m1 * m2 - m1)
    if denom <= 0:
        return math.inf
    return max(0.0, num / denom)


# --- transmit amplifier -------------------------------------------------------


class HpaKind(str, enum.Enum):
    IDEAL = "ideal"
    RAPP = "rapp"


class HpaPlacement(str, enum.Enum):
    DRIVE = "drive"
    ENVELOPE = "envelope"


DEFAULT_SAT_DBM = 25.0


@dataclass(frozen=True)
class HpaModel:
    """Memoryless Rapp amplifier.

    ``placement='drive'`` compresses the transmit power level and keeps the
    waveform shape, so the radiated power settles at saturation_amplitude^2.
    ``placement='envelope'`` applies the curve to every baseband sample.
    """

    kind: HpaKind = HpaKind.IDEAL
    smoothness: float = 10.0
    saturation_amplitude: float = math.sqrt(dbm_to_watts(DEFAULT_SAT_DBM))
    placement: HpaPlacement = HpaPlacement.DRIVE

    def __post_init__(self):
        object.__setattr__(self, "kind", HpaKind(self.kind))
        object.__setattr__(self, "placement", HpaPlacement(self.placement))
        if self.kind is HpaKind.RAPP:
            if not self.smoothness > 0:
                raise ValueError("Rapp smoothness must be positive")
            if not self.saturation_amplitude > 0:
                raise ValueError("saturation amplitude must be positive")

    @classmethod
    def rapp(cls, smoothness: float = 10.0, saturation_dbm: float = DEFAULT_SAT_DBM, placement="drive") -> "HpaModel":
        return cls(HpaKind.RAPP, smoothness, math.sqrt(dbm_to_watts(saturation_dbm)), HpaPlacement(placement))

    @property
    def ideal(self) -> bool:
        return self.kind is HpaKind.IDEAL


IDEAL_HPA = HpaModel()


def hpa_apply(sample, model: HpaModel):
    """AM/AM curve: identity when ideal, x / (1 + |x/A|^(2p))^(1/(2p)) for Rapp."""
    if model.ideal:
        return sample
    p, a = model.smoothness, model.saturation_amplitude
    x = np.asarray(sample, dtype=float)
    out = x / (1 + np.abs(x / a) ** (2 * p)) ** (1 / (2 * p))
    return float(out) if out.ndim == 0 else out


def radiated_power(p_t: float, model: HpaModel) -> float:
    """Transmit power after a drive-level HPA (unchanged otherwise)."""
    if model.ideal or model.placement is HpaPlacement.ENVELOPE:
        return p_t
    return hpa_apply(math.sqrt(p_t), model) ** 2


# --- multisine baseline -------------------------------------------------------


def multisine_waveform(n_tones: int, p_t: float, samples_per_period: int | None = None, periods: int = 1):
    """In-phase, equal-amplitude N-tone multisine with unit tone spacing.

    Returns ``(t, s)`` with s(t) = sqrt(2 P / N) * sum_n cos(2 pi n t).
    """
    if n_tones < 1:
        raise ValueError("need at least one tone")
    if samples_per_period is None:
        samples_per_period = 64 * n_tones
    if samples_per_period < 8 * n_tones:
        raise ValueError(
            f"{samples_per_period} samples per period undersamples the highest tone "
            f"(need >= {8 * n_tones})"
        )
    t = np.arange(samples_per_period * periods) / samples_per_period
    tones = np.arange(1, n_tones + 1)
    s = np.sqrt(2 * p_t / n_tones) * np.cos(2 * np.pi * np.outer(tones, t)).sum(axis=0)
    return t, s


def amplified_multisine(n_tones: int, p_t: float, hpa: HpaModel = IDEAL_HPA, samples_per_period=None, periods=1):
    _, s = multisine_waveform(n_tones, radiated_power(p_t, hpa), samples_per_period, periods)
    if hpa.placement is HpaPlacement.ENVELOPE:
        s = hpa_apply(s, hpa)
    return s


def multisine_moments(n_tones: int, p_t: float, hpa: HpaModel = IDEAL_HPA, samples_per_period=None, periods=1):
    """Time-averaged second and fourth moments of the amplified multisine."""
    s = amplified_multisine(n_tones, p_t, hpa, samples_per_period, periods)
    return float(np.mean(s**2)), float(np.mean(s**4))


def multisine_papr(n_tones: int, p_t: float, hpa: HpaModel = IDEAL_HPA, samples_per_period=None, periods=1):
    """(empirical, theoretical) PAPR of the amplified multisine; theory is 2N."""
    power = amplified_multisine(n_tones, p_t, hpa, samples_per_period, periods) ** 2
    return float(power.max() / power.mean()), 2.0 * n_tones


def multisine_baseline(
    n_tones: int,
    budget: LinkBudget,
    hpa: HpaModel = IDEAL_HPA,
    channel: ChannelParams = ChannelParams(),
    samples_per_period: int | None = None,
    periods: int = 1,
    n_draws: int = 100_000,
    seed: int = 0,
    confidence: float = 0.99,
) -> HarvestEstimate:
    """Harvested DC of an N-tone multisine through the HPA, fading and rectenna.

    The waveform moments are exact time averages; the fading expectation is
    estimated over ``n_draws`` block-fading draws and paired with its closed
    form E{|h|^4} = (1+m)/m.
    """
    s2, s4 = multisine_moments(n_tones, budget.p_t, hpa, samples_per_period, periods)
    a2 = budget.k2_r * budget.path_gain * s2
    a4 = budget.k4_r2 * budget.path_gain**2 * s4
    h = nakagami_amplitude(channel.m, np.random.default_rng(seed), n_draws)
    h2 = np.broadcast_to(h, (n_draws,)) ** 2
    stats = RunningStats.from_values(a2 * h2 + a4 * h2**2)
    analytic = a2 + a4 * fourth_moment(channel.m)
    return HarvestEstimate.from_stats(stats, seed, analytic, confidence)


def chaotic_harvest_with_hpa(spec: WaveformSpec, correlator: bool, m: float, budget: LinkBudget, hpa: HpaModel) -> float:
    """Closed-form chaotic harvest after a drive-level HPA (envelope placement has no closed form)."""
    if hpa.placement is HpaPlacement.ENVELOPE and not hpa.ideal:
        raise ValueError("no closed form for a per-sample HPA")
    eps1, eps2 = effective_gains(budget, radiated_power(budget.p_t, hpa))
    return analytic_harvest(spec, correlator, m, eps1, eps2)
