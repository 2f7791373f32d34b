"""Flat ``key = value`` configuration with command-line overrides.

Every key is a field of :class:`Settings`; unknown keys, bad types and
violated constraints raise :class:`ConfigError` naming the offending key.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .analysis import HpaKind, HpaModel, HpaPlacement
from .channel import ChannelParams, LinkBudget, dbm_to_watts, rice_to_nakagami
from .chaos import ChaosConfig, TrajectoryMode
from .montecarlo import SWEEP_PARAMETERS, SimConfig
from .receiver import ReceiverConfig
from .waveform import Scheme, WaveformSpec


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class Settings:
    # run control
    seed: int = 20210606
    n_symbols: int = 10_000
    confidence: float = 0.99
    workers: int = 1
    strict: bool = False
    rel_tol: float = 0.02
    n_sigma: float = 3.0
    # link budget
    p_t_dbm: float = 30.0
    r: float = 20.0
    alpha: float = 4.0
    k2: float = 0.0034
    k4: float = 0.3829
    r_ant: float = 50.0
    # channel; rice_k, when given, replaces m
    m: float = 1.0
    rice_k: Optional[float] = None
    # waveform and receiver
    scheme: str = Scheme.DCSK.value
    beta: int = 25
    beta_r: int = 0
    correlator: bool = True
    degree: int = 4
    trajectory_mode: str = TrajectoryMode.PER_SYMBOL.value
    # transmit amplifier
    hpa: str = HpaKind.IDEAL.value
    hpa_smoothness: float = 10.0
    hpa_sat_dbm: float = 25.0
    hpa_placement: str = HpaPlacement.DRIVE.value
    # multisine and custom sweeps
    n_tones: int = 16
    sweep_param: str = "beta"
    grid: list = field(default_factory=list)

    @property
    def fading_m(self) -> float:
        return self.m if self.rice_k is None else rice_to_nakagami(self.rice_k)

    def budget(self) -> LinkBudget:
        return LinkBudget(dbm_to_watts(self.p_t_dbm), self.r, self.alpha, self.k2, self.k4, self.r_ant)

    def hpa_model(self, force_rapp: bool = False) -> HpaModel:
        if self.hpa == HpaKind.IDEAL.value and not force_rapp:
            return HpaModel()
        return HpaModel.rapp(self.hpa_smoothness, self.hpa_sat_dbm, self.hpa_placement)

    def sim_config(self) -> SimConfig:
        return SimConfig(
            waveform=WaveformSpec(Scheme(self.scheme), self.beta, self.beta_r),
            receiver=ReceiverConfig(self.correlator),
            channel=ChannelParams(self.fading_m),
            budget=self.budget(),
            chaos=ChaosConfig(self.degree, TrajectoryMode(self.trajectory_mode)),
            n_symbols=self.n_symbols,
            seed=self.seed,
            confidence=self.confidence,
            hpa=self.hpa_model(),
        )


KEYS = tuple(f.name for f in dataclasses.fields(Settings))

_CHOICES = {
    "scheme": [s.value for s in Scheme],
    "trajectory_mode": [t.value for t in TrajectoryMode],
    "hpa": [k.value for k in HpaKind],
    "hpa_placement": [p.value for p in HpaPlacement],
    "sweep_param": list(SWEEP_PARAMETERS),
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_float(text: str) -> float:
    value = float(text)  # accepts "inf"
    if math.isnan(value):
        raise ValueError("nan is not allowed")
    return value


def _convert(key: str, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    kind = Settings.__dataclass_fields__[key].type
    try:
        if key == "grid":
            return [_parse_float(v) for v in text.split(",") if v.strip()]
        if kind == "bool":
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"expected a boolean, got {text!r}")
        if kind == "int":
            return int(text)
        if kind in ("float", "Optional[float]"):
            return _parse_float(text)
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None
    if key in _CHOICES and text not in _CHOICES[key]:
        raise ConfigError(key, f"expected one of {_CHOICES[key]}, got {text!r}")
    return text


def read_config_file(path) -> dict[str, str]:
    """Parse a UTF-8 ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _validate(settings: Settings) -> None:
    checks = [
        ("n_symbols", settings.n_symbols >= 1, "must be >= 1"),
        ("workers", settings.workers >= 1, "must be >= 1"),
        ("confidence", 0 < settings.confidence < 1, "must lie in (0, 1)"),
        ("seed", 0 <= settings.seed < 2**64, "must be a 64-bit unsigned integer"),
        ("beta", settings.beta >= 1, "must be >= 1"),
        ("beta_r", settings.beta_r >= 0, "must be >= 0"),
        ("m", settings.m >= 1, "must be >= 1 or inf"),
        ("degree", settings.degree >= 2, "must be >= 2"),
        ("n_tones", settings.n_tones >= 1, "must be >= 1"),
        ("rel_tol", settings.rel_tol >= 0, "must be >= 0"),
        ("n_sigma", settings.n_sigma >= 0, "must be >= 0"),
        ("hpa_smoothness", settings.hpa_smoothness > 0, "must be > 0"),
    ]
    for key, ok, message in checks:
        if not ok:
            raise ConfigError(key, message)
    if settings.rice_k is not None and settings.rice_k < 0:
        raise ConfigError("rice_k", "must be >= 0")
    if settings.scheme == Scheme.SRDCSK.value and settings.beta_r < 1:
        raise ConfigError("beta_r", "SR-DCSK needs beta_r >= 1")
    if settings.beta_r > 0 and settings.beta % settings.beta_r:
        raise ConfigError("beta_r", f"beta_r={settings.beta_r} does not divide beta={settings.beta}")
    for key in ("p_t_dbm", "r", "alpha", "k2", "k4", "r_ant"):
        if not math.isfinite(getattr(settings, key)):
            raise ConfigError(key, "must be finite")
    try:
        settings.sim_config()
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from None


def parse_config(path=None, overrides: Optional[Mapping[str, object]] = None) -> Settings:
    """Defaults, then the config file, then ``overrides`` (flags win)."""
    raw: dict[str, object] = {}
    if path is not None:
        try:
            raw.update(read_config_file(path))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key.replace("-", "_")] = value
    values = {}
    for key, value in raw.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        values[key] = _convert(key, value)
    settings = Settings(**values)
    _validate(settings)
    return settings
