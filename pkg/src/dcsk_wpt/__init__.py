"""Monte Carlo and closed-form simulator for wireless power transfer with chaotic waveforms."""

from .analysis import (
    IDEAL_HPA,
    HpaModel,
    analytic_harvest,
    beta_opt,
    delta_gap,
    multisine_baseline,
    z_mc,
    z_mnc,
    z_sr,
    z_sr_opt,
    z_um_c,
    z_um_nc,
)
from .channel import ChannelParams, LinkBudget, effective_gains
from .chaos import ChaosConfig, TrajectoryMode
from .montecarlo import SimConfig, estimate_harvest, estimate_papr, simulate, sweep
from .receiver import ReceiverConfig
from .stats import HarvestEstimate
from .waveform import Scheme, WaveformSpec

__version__ = "0.1.0"

__all__ = [
    "IDEAL_HPA", "HpaModel", "analytic_harvest", "beta_opt", "delta_gap", "multisine_baseline",
    "z_mc", "z_mnc", "z_sr", "z_sr_opt", "z_um_c", "z_um_nc",
    "ChannelParams", "LinkBudget", "effective_gains", "ChaosConfig", "TrajectoryMode",
    "SimConfig", "estimate_harvest", "estimate_papr", "simulate", "sweep",
    "ReceiverConfig", "HarvestEstimate", "Scheme", "WaveformSpec",
]
