"""Named experiments reproducing the figure data sets, written as CSV."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analysis import (
    HpaModel,
    delta_gap,
    multisine_baseline,
    multisine_papr,
)
from .channel import ChannelParams, dbm_to_watts, effective_gains
from .config import Settings
from .montecarlo import SimConfig, derive_seed, simulate, sweep
from .receiver import ReceiverConfig
from .stats import HarvestEstimate
from .waveform import Scheme, WaveformSpec

COLUMNS = [
    "experiment", "sweep_param", "sweep_value", "scheme", "psi", "m", "beta", "beta_r",
    "n_symbols", "seed", "z_analytic", "z_mc_mean", "z_mc_se", "ci_low", "ci_high",
    "papr_emp", "papr_theory",
    # context needed to recompute z_analytic from the row alone
    "r", "alpha", "p_t_dbm", "m2", "n_tones", "hpa",
]

EXPERIMENTS = (
    "fig3_beta_sweep",
    "fig4_modulation",
    "fig5_delta_vs_beta",
    "fig6_srdcsk_betar",
    "fig7_wpt_opt_distance",
    "fig8_joint_beta_m",
    "fig9_multisine_hpa",
    "custom",
)

INF = math.inf


@dataclass
class ExperimentSpec:
    name: str
    overrides: dict = field(default_factory=dict)
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}; expected one of {EXPERIMENTS}")


@dataclass
class Row:
    experiment: str
    sweep_param: str
    sweep_value: float
    scheme: str
    psi: int
    m: float
    beta: int
    beta_r: int
    n_symbols: int
    seed: int
    z_analytic: Optional[float]
    estimate: HarvestEstimate
    papr_emp: Optional[float]
    papr_theory: Optional[float]
    r: float
    alpha: float
    p_t_dbm: float
    m2: Optional[float] = None
    n_tones: Optional[int] = None
    hpa: str = "ideal"

    def within_tolerance(self, rel_tol: float, n_sigma: float) -> bool:
        if self.z_analytic is None:
            return True
        est = self.estimate
        return abs(est.mean - self.z_analytic) <= max(rel_tol * abs(self.z_analytic), n_sigma * est.std_error)

    @property
    def rel_dev(self) -> Optional[float]:
        if self.z_analytic is None or self.z_analytic == 0:
            return None
        return abs(self.estimate.mean - self.z_analytic) / abs(self.z_analytic)

    def as_record(self) -> dict:
        est = self.estimate
        return {
            "experiment": self.experiment, "sweep_param": self.sweep_param, "sweep_value": self.sweep_value,
            "scheme": self.scheme, "psi": self.psi, "m": self.m, "beta": self.beta, "beta_r": self.beta_r,
            "n_symbols": self.n_symbols, "seed": self.seed, "z_analytic": self.z_analytic,
            "z_mc_mean": est.mean, "z_mc_se": est.std_error, "ci_low": est.ci_low, "ci_high": est.ci_high,
            "papr_emp": self.papr_emp, "papr_theory": self.papr_theory, "r": self.r, "alpha": self.alpha,
            "p_t_dbm": self.p_t_dbm, "m2": self.m2, "n_tones": self.n_tones, "hpa": self.hpa,
        }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        record = row.as_record()
        writer.writerow([_fmt(record[c]) for c in COLUMNS])
    return buf.getvalue()


def _hpa_label(hpa: HpaModel) -> str:
    if hpa.ideal:
        return "ideal"
    return f"rapp(p={hpa.smoothness:g},sat={hpa.saturation_amplitude:.6g},{hpa.placement.value})"


class _Runner:
    """Builds rows with per-point seeds derived from the base seed and a running index."""

    def __init__(self, name: str, settings: Settings, progress: Optional[Callable[[str], None]] = None):
        self.name = name
        self.settings = settings
        self.base = settings.sim_config()
        self.index = 0
        self.rows: list[Row] = []
        self.progress = progress

    def next_seed(self) -> int:
        seed = derive_seed(self.settings.seed, self.index)
        self.index += 1
        return seed

    def config(self, scheme, beta, beta_r=0, correlator=True, m=None, r=None, hpa=None) -> SimConfig:
        budget = self.base.budget if r is None else dataclasses.replace(self.base.budget, r=r)
        return self.base.replace(
            waveform=WaveformSpec(Scheme(scheme), beta, beta_r),
            receiver=ReceiverConfig(correlator),
            channel=self.base.channel if m is None else ChannelParams(m),
            budget=budget,
            hpa=self.base.hpa if hpa is None else hpa,
            seed=self.next_seed(),
        )

    def run(self, sweep_param: str, sweep_value, config: SimConfig) -> Row:
        est, papr_emp, papr_theory = simulate(config, self.settings.workers)
        spec = config.waveform
        row = Row(
            self.name, sweep_param, float(sweep_value), spec.scheme.value,
            config.receiver.psi(spec.frame_length), config.channel.m, spec.beta, spec.beta_r,
            config.n_symbols, config.seed, est.analytic, est, papr_emp, papr_theory,
            config.budget.r, config.budget.alpha, config.budget.p_t_dbm, hpa=_hpa_label(config.hpa),
        )
        self.rows.append(row)
        if self.progress:
            self.progress(f"{self.name}: {sweep_param}={sweep_value:g} {spec.scheme.value} psi={row.psi} m={config.channel.m:g}")
        return row


BETA_GRID = [1, 2, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50]


def _fig3(run: _Runner):
    for m in (1, 4, 20, INF):
        for correlator in (True, False):
            for beta in BETA_GRID:
                run.run("beta", beta, run.config("dcsk", beta, correlator=correlator, m=m))


def _fig4(run: _Runner):
    for m in (1, 10, INF):
        for scheme in ("dcsk", "unmodulated"):
            for correlator in (True, False):
                for beta in (1, 2, 5, 10, 20, 30, 40, 50):
                    run.run("beta", beta, run.config(scheme, beta, correlator=correlator, m=m))


def _fig5(run: _Runner):
    m2 = 1.0
    betas = [1, 2, 4, 6, 8, 10, 12, 15, 20, 25, 30, 35, 40, 45, 50]
    unmodulated = {}
    for beta in betas:
        unmodulated[beta] = simulate(run.config("unmodulated", beta, m=m2), run.settings.workers)[0]
    for m1 in (40, 80, 100, 150):
        for beta in betas:
            config = run.config("dcsk", beta, m=m1)
            est, _, _ = simulate(config, run.settings.workers)
            um_est = unmodulated[beta]
            _, eps2 = effective_gains(config.budget)
            gap = delta_gap(eps2, beta, m1, m2)
            combined = HarvestEstimate.from_mean_se(
                est.mean - um_est.mean, math.hypot(est.std_error, um_est.std_error),
                est.n, config.seed, gap, est.confidence,
            )
            spec = config.waveform
            run.rows.append(Row(
                run.name, "beta", float(beta), "delta", spec.frame_length, float(m1), beta, 0,
                config.n_symbols, config.seed, gap, combined, None, None,
                config.budget.r, config.budget.alpha, config.budget.p_t_dbm, m2=m2,
            ))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _fig6(run: _Runner):
    for beta in (60, 90):
        for beta_r in _divisors(beta):
            run.run("beta_r", beta_r, run.config("srdcsk", beta, beta_r, m=1.0))


def _fig7(run: _Runner):
    for r in (20.0, 30.0):
        for beta in (1, 2, 4, 6, 8, 10, 15, 20, 25, 30):
            run.run("beta", beta, run.config("optimal_sr", beta, m=1.0, r=r))


def _fig8(run: _Runner):
    for beta in (5, 10, 15, 20, 25, 30):
        for m in (1, 2, 4, 8, 16, 32, INF):
            run.run("m", m, run.config("optimal_sr", beta, m=m))


FIG9_POWERS_DBM = list(range(10, 41, 2))
FIG9_TONES = (2, 4, 8, 16)


def _fig9(run: _Runner):
    s = run.settings
    hpa = s.hpa_model(force_rapp=True)
    beta, m = 16, 4.0
    for p_dbm in FIG9_POWERS_DBM:
        config = run.config("optimal_sr", beta, m=m, hpa=hpa)
        config = config.replace(budget=dataclasses.replace(config.budget, p_t=dbm_to_watts(p_dbm)))
        run.run("p_t_dbm", p_dbm, config)
    budget0 = run.base.budget
    for n_tones in FIG9_TONES:
        for p_dbm in FIG9_POWERS_DBM:
            budget = dataclasses.replace(budget0, p_t=dbm_to_watts(p_dbm))
            seed = run.next_seed()
            est = multisine_baseline(n_tones, budget, hpa, ChannelParams(m), n_draws=s.n_symbols,
                                     seed=seed, confidence=s.confidence)
            emp, theory = multisine_papr(n_tones, budget.p_t, hpa)
            run.rows.append(Row(
                run.name, "p_t_dbm", float(p_dbm), "multisine", 1, m, 0, 0, s.n_symbols, seed,
                est.analytic, est, emp, theory, budget.r, budget.alpha, budget.p_t_dbm,
                n_tones=n_tones, hpa=_hpa_label(hpa),
            ))


def _custom(run: _Runner):
    s = run.settings
    if not s.grid:
        raise ValueError("grid: custom experiments need a non-empty grid")
    base = run.base
    for point in sweep(s.sweep_param, s.grid, base, s.workers):
        if point.error is not None:
            if run.progress:
                run.progress(f"skipped {s.sweep_param}={point.value:g}: {point.error}")
            continue
        if point.config is None:
            budget = base.budget
            run.rows.append(Row(
                run.name, s.sweep_param, float(point.value), "multisine", 1, base.channel.m, 0, 0,
                base.n_symbols, point.estimate.seed, point.analytic, point.estimate,
                point.papr_emp, point.papr_theory, budget.r, budget.alpha, budget.p_t_dbm,
                n_tones=int(point.value), hpa=_hpa_label(base.hpa),
            ))
            continue
        config, spec = point.config, point.config.waveform
        run.rows.append(Row(
            run.name, s.sweep_param, float(point.value), spec.scheme.value,
            config.receiver.psi(spec.frame_length), config.channel.m, spec.beta, spec.beta_r,
            config.n_symbols, config.seed, point.analytic, point.estimate, point.papr_emp,
            point.papr_theory, config.budget.r, config.budget.alpha, config.budget.p_t_dbm,
            hpa=_hpa_label(config.hpa),
        ))


_BUILDERS = {
    "fig3_beta_sweep": _fig3,
    "fig4_modulation": _fig4,
    "fig5_delta_vs_beta": _fig5,
    "fig6_srdcsk_betar": _fig6,
    "fig7_wpt_opt_distance": _fig7,
    "fig8_joint_beta_m": _fig8,
    "fig9_multisine_hpa": _fig9,
    "custom": _custom,
}


def build_rows(name: str, settings: Settings, progress=None) -> list[Row]:
    if name not in _BUILDERS:
        raise ValueError(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    runner = _Runner(name, settings, progress)
    _BUILDERS[name](runner)
    return runner.rows


@dataclass
class Summary:
    rows: int
    checked: int
    breaches: int
    max_rel_dev: Optional[float]

    def __str__(self):
        dev = "n/a" if self.max_rel_dev is None else f"{100 * self.max_rel_dev:.3f}%"
        return (f"{self.rows} rows, {self.checked} checked against closed form, "
                f"{self.breaches} outside tolerance, max relative deviation {dev}")


def summarize(rows: list[Row], rel_tol: float, n_sigma: float) -> Summary:
    checked = [r for r in rows if r.z_analytic is not None]
    # the modulation gap crosses zero, so its relative deviation is not meaningful
    devs = [r.rel_dev for r in checked if r.rel_dev is not None and r.scheme != "delta"]
    breaches = sum(not r.within_tolerance(rel_tol, n_sigma) for r in checked)
    return Summary(len(rows), len(checked), breaches, max(devs) if devs else None)
