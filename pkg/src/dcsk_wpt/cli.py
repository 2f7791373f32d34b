"""Command-line driver.

Exit status: 0 when every checked point is within tolerance, 1 on a tolerance
breach with ``--strict``, 2 on a configuration or output error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

from . import analysis
from .channel import effective_gains
from .config import KEYS, ConfigError, Settings, parse_config
from .experiments import EXPERIMENTS, ExperimentSpec, Row, build_rows, rows_to_csv, summarize
from .montecarlo import SWEEP_PARAMETERS, estimate_papr
from .waveform import Scheme, WaveformSpec

log = logging.getLogger("dcsk_wpt")

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG = 0, 1, 2

# flags that do not map onto a physical/config key
_RUN_ONLY = {"strict"}


def _add_settings_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--strict", action="store_const", const="true", default=None,
                        help="exit 1 if any Monte Carlo point misses its closed form")
    for key in KEYS:
        if key in _RUN_ONLY:
            continue
        default = Settings.__dataclass_fields__[key].default
        shown = "" if default is dataclasses.MISSING else f" (default {default})"
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, metavar="VALUE", help=f"{key}{shown}")
    parser.add_argument("--psi", choices=["1", "full"], help="1 = no correlator, full = frame-length correlator")


def _settings_from_args(args, **forced) -> Settings:
    overrides = {key: getattr(args, key, None) for key in KEYS}
    if getattr(args, "psi", None) is not None:
        overrides["correlator"] = "true" if args.psi == "full" else "false"
    overrides.update({k: v for k, v in forced.items() if v is not None})
    return parse_config(args.config, overrides)


def write_output(text: str, path) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError("out", f"cannot write {path}: {exc.strerror}") from None


def run_experiment(spec: ExperimentSpec, settings: Settings, progress=None) -> tuple[int, list[Row]]:
    """Run a named experiment, write its CSV and return (exit status, rows)."""
    if spec.output_path is not None:
        # fail before simulating if the destination is unusable
        parent = Path(spec.output_path).resolve().parent
        if not parent.is_dir():
            raise ConfigError("out", f"directory {parent} does not exist")
    rows = build_rows(spec.name, settings, progress)
    if spec.output_path is not None:
        write_output(rows_to_csv(rows), spec.output_path)
    summary = summarize(rows, settings.rel_tol, settings.n_sigma)
    print(f"{spec.name}: {summary}")
    status = EXIT_TOLERANCE if settings.strict and summary.breaches else EXIT_OK
    return status, rows


def _cmd_run(args) -> int:
    settings = _settings_from_args(args)
    out = args.out or f"{args.experiment}.csv"
    status, _ = run_experiment(ExperimentSpec(args.experiment, output_path=out), settings, log.info)
    print(f"wrote {out}")
    return status


def _cmd_sweep(args) -> int:
    settings = _settings_from_args(args, sweep_param=args.param)
    if not settings.grid:
        raise ConfigError("grid", "sweep needs --grid v1,v2,...")
    out = args.out or f"sweep_{args.param}.csv"
    status, _ = run_experiment(ExperimentSpec("custom", output_path=out), settings, log.info)
    print(f"wrote {out}")
    return status


def _cmd_papr(args) -> int:
    settings = _settings_from_args(args)
    config = settings.sim_config()
    empirical, theoretical = estimate_papr(config, settings.workers)
    spec = config.waveform
    psi = config.receiver.psi(spec.frame_length)
    print(f"scheme={spec.scheme.value} beta={spec.beta} psi={psi} symbols={config.n_symbols}")
    print(f"papr_emp={empirical!r} papr_theory={theoretical!r}")
    if settings.strict and empirical > theoretical:
        return EXIT_TOLERANCE
    return EXIT_OK


def _cmd_compare_multisine(args) -> int:
    settings = _settings_from_args(args)
    hpa = settings.hpa_model()
    budget = settings.budget()
    m = settings.fading_m
    n = settings.n_tones
    beta = settings.beta
    chaotic = analysis.chaotic_harvest_with_hpa(WaveformSpec(Scheme.OPTIMAL_SR, beta), True, m, budget, hpa)
    ms = analysis.multisine_baseline(n, budget, hpa, channel=settings.sim_config().channel,
                                     n_draws=settings.n_symbols, seed=settings.seed,
                                     confidence=settings.confidence)
    print(f"P_t={settings.p_t_dbm:g} dBm m={m:g} hpa={hpa.kind.value}")
    print(f"optimal SR-DCSK (beta={beta}): z={chaotic:.6e} A")
    print(f"multisine (N={n}): z={ms.mean:.6e} A (analytic {ms.analytic:.6e}, se {ms.std_error:.2e})")
    print(f"ratio chaotic/multisine: {chaotic / ms.mean:.4g}")
    if args.out:
        write_output(
            "waveform,parameter,z\n"
            f"optimal_sr,{beta},{chaotic!r}\n"
            f"multisine,{n},{ms.mean!r}\n",
            args.out,
        )
    return EXIT_OK


def selftest(settings: Settings) -> list[tuple[str, bool]]:
    """Fast closed-form identities plus a few small Monte Carlo oracle checks."""
    from .montecarlo import estimate_harvest
    from .receiver import ReceiverConfig
    from .channel import ChannelParams

    eps1, eps2 = effective_gains(settings.budget())
    checks = []
    for m in (1.0, 4.0, math.inf):
        for beta in (1, 5, 25):
            checks.append((f"z_sr(beta_r=beta) == z_mc  m={m:g} beta={beta}",
                           math.isclose(analysis.z_sr(eps1, eps2, beta, beta, m),
                                        analysis.z_mc(eps1, eps2, beta, m), rel_tol=1e-12)))
            checks.append((f"z_sr(beta_r=1) == z_sr_opt  m={m:g} beta={beta}",
                           math.isclose(analysis.z_sr(eps1, eps2, beta, 1, m),
                                        analysis.z_sr_opt(eps1, eps2, beta, m), rel_tol=1e-12)))
    checks.append(("beta_opt(10, 1) == 3", math.isclose(analysis.beta_opt(10, 1), 3.0)))
    checks.append(("delta_gap(m1=10, m2=1, beta=3) == 0", abs(analysis.delta_gap(eps2, 3, 10, 1)) < 1e-20))
    base = settings.sim_config().replace(n_symbols=min(settings.n_symbols, 20_000))
    for scheme, beta_r in (("dcsk", 0), ("unmodulated", 0), ("srdcsk", 5), ("optimal_sr", 1)):
        for correlator in (True, False):
            config = base.replace(
                waveform=WaveformSpec(Scheme(scheme), 10, beta_r),
                receiver=ReceiverConfig(correlator),
                channel=ChannelParams(4.0),
            )
            est = estimate_harvest(config, settings.workers)
            checks.append((f"MC {scheme} correlator={correlator} rel_dev={est.rel_dev:.4f}",
                           est.agrees(settings.rel_tol, settings.n_sigma)))
    return checks


def _cmd_selftest(args) -> int:
    settings = _settings_from_args(args)
    checks = selftest(settings)
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    failed = sum(not ok for _, ok in checks)
    print(f"{len(checks) - failed}/{len(checks)} passed")
    return EXIT_OK if not failed else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcsk-wpt", description="Chaotic-waveform wireless power transfer simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a named figure experiment")
    p.add_argument("experiment", choices=[e for e in EXPERIMENTS if e != "custom"])
    _add_settings_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="sweep one parameter over --grid")
    p.add_argument("param", choices=SWEEP_PARAMETERS)
    _add_settings_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("papr", help="empirical vs theoretical PAPR at the harvester input")
    _add_settings_flags(p)
    p.set_defaults(func=_cmd_papr)

    p = sub.add_parser("compare-multisine", help="optimal SR-DCSK vs N-tone multisine")
    _add_settings_flags(p)
    p.set_defaults(func=_cmd_compare_multisine)

    p = sub.add_parser("selftest", help="quick closed-form and Monte Carlo checks")
    _add_settings_flags(p)
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
