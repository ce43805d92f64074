"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harris_hau, units
from .config import load_config
from .errors import (ConfigurationError, DomainError, NumericalBlowupError,
                     SingularSystemError, TraceFormatError)
from .experiments import FIGURES, reproduce_figure, run_curves, run_single
from .fitting import fit, load_trace
from .steady import SteadyStateInputs, steady_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

log = logging.getLogger("eitfwm")


def _print_kv(pairs):
    for key, value in pairs:
        if isinstance(value, float):
            value = f"{value:.9g}"
        print(f"{key}={value}")


def cmd_steady(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        p = cfg.params
        inputs = SteadyStateInputs(p.omega_c, cfg.omega_d, p.delta, p.gamma31, p.alpha)
    else:
        inputs = SteadyStateInputs(args.omega_c, args.omega_d, args.delta, args.gamma31,
                                   args.alpha)
    sol = steady_state(inputs)
    _print_kv([("probe_transmission", sol.probe_transmission),
               ("signal_efficiency", sol.signal_efficiency),
               ("total", sol.probe_transmission + sol.signal_efficiency)])
    return EXIT_OK


def cmd_propagate(args) -> int:
    cfg = load_config(args.config)
    result, path = run_single(cfg, args.out, args.grid_scale)
    _print_kv([("conversion_efficiency", result.conversion_efficiency),
               ("energy_transmission_probe", result.energy_transmission_probe),
               ("probe_delay_us", units.gamma_time_to_us(result.probe_delay))])
    if path:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    analytic = True if args.analytic else None
    runs = run_curves(cfg, args.out, analytic=analytic, serial=args.serial,
                      grid_scale=args.grid_scale)
    for label, records, path in runs:
        best = max(records, key=lambda r: r.signal_efficiency)
        print(f"{label or 'sweep'}: {len(records)} points, peak signal_efficiency="
              f"{best.signal_efficiency:.4f} at {cfg.sweep.variable}={best.swept_value:g}; "
              f"wrote {path}")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = load_config(args.config)
    trace = load_trace(args.trace)
    bounds = {"omega_d": tuple(args.omega_d_bounds), "gamma21": tuple(args.gamma21_bounds)}
    grid = cfg.grid.scaled(args.grid_scale) if args.grid_scale != 1.0 else cfg.grid
    result = fit(trace, cfg.params, {"probe": cfg.probe, "driving": cfg.driving}, bounds, grid,
                 max_evals=args.max_evals)
    sys.stdout.write(result.to_text())
    if args.out:
        Path(args.out).write_text(result.csv_header() + "\n" + result.csv_row() + "\n",
                                  encoding="utf-8")
    return EXIT_OK


def cmd_harris_hau(args) -> int:
    t_d = units.eit_delay_time(args.alpha, args.gamma31, args.omega_c)
    eta = harris_hau.delay_ratio(t_d, args.probe_us * 1e-6)
    r = harris_hau.loss_parameter(args.alpha, args.delta, args.gamma31)
    z = harris_hau.zeta(harris_hau.HarrisHauInputs(args.photons, args.cross_section_ratio,
                                                   args.phi, eta, r))
    _print_kv([("delay_us", t_d * 1e6), ("eta", eta), ("r", r), ("zeta", z)])
    return EXIT_OK


def cmd_reproduce(args) -> int:
    paths = reproduce_figure(args.figure, args.out or ".", grid_scale=args.grid_scale,
                             serial=args.serial)
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_convert(args) -> int:
    out = []
    if args.rabi is not None:
        out.append(("intensity_mW_per_cm2", units.rabi_to_intensity(args.rabi)))
    if args.intensity is not None:
        out.append(("rabi_over_gamma", units.intensity_to_rabi(args.intensity)))
    if args.photons is not None:
        intensity, duration_us = args.photons
        out.append(("photons_per_cross_section",
                    units.photons_per_atomic_cross_section(intensity, duration_us * 1e-6)))
    if args.delay is not None:
        alpha, gamma31, omega_c = args.delay
        out.append(("eit_delay_us", units.eit_delay_time(alpha, gamma31, omega_c) * 1e6))
    if not out:
        raise ConfigurationError("convert-units: give at least one of --rabi, --intensity, "
                                 "--photons, --delay")
    _print_kv(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eitfwm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_flags(p):
        p.add_argument("--grid-scale", type=float, default=1.0,
                       help="multiply n_z and 1/dt by FACTOR")

    p = sub.add_parser("steady", help="closed-form steady-state transmissions")
    p.add_argument("--config")
    p.add_argument("--omega-c", type=float, default=0.32)
    p.add_argument("--omega-d", type=float, default=0.32)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--gamma31", type=float, default=1.25)
    p.add_argument("--alpha", type=float, default=42.0)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("propagate", help="pulsed propagation of one configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    grid_flags(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("sweep", help="parameter sweep from a config [sweep] section")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--analytic", action="store_true", help="use the closed form")
    p.add_argument("--serial", action="store_true")
    grid_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit omega_d and gamma21 to a measured trace")
    p.add_argument("--config", required=True, help="fixed parameters and pulses")
    p.add_argument("--trace", required=True)
    p.add_argument("--omega-d-bounds", type=float, nargs=2, default=(0.05, 1.0))
    p.add_argument("--gamma21-bounds", type=float, nargs=2, default=(1e-4, 1e-2))
    p.add_argument("--max-evals", type=int, default=400)
    p.add_argument("--out", help="write the result as a CSV row")
    grid_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("harris-hau", help="pulsed-regime efficiency estimate")
    p.add_argument("--alpha", type=float, default=42.0)
    p.add_argument("--delta", type=float, default=13.0)
    p.add_argument("--gamma31", type=float, default=1.25)
    p.add_argument("--omega-c", type=float, default=0.32)
    p.add_argument("--probe-us", type=float, default=50.0)
    p.add_argument("--photons", type=float, default=60.0)
    p.add_argument("--cross-section-ratio", type=float,
                   default=harris_hau.FOCUSED_CROSS_SECTION_RATIO)
    p.add_argument("--phi", type=float, default=harris_hau.PHI_REFERENCE)
    p.set_defaults(func=cmd_harris_hau)

    p = sub.add_parser("reproduce-figure", help="run a bundled figure configuration")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--out", help="output directory")
    p.add_argument("--serial", action="store_true")
    grid_flags(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("convert-units", help="Rabi frequency / intensity / photon budget")
    p.add_argument("--rabi", type=float, help="Rabi frequency in Gamma -> mW/cm^2")
    p.add_argument("--intensity", type=float, help="mW/cm^2 -> Rabi frequency in Gamma")
    p.add_argument("--photons", type=float, nargs=2, metavar=("MW_CM2", "US"),
                   help="photons per atomic cross section")
    p.add_argument("--delay", type=float, nargs=3, metavar=("ALPHA", "GAMMA31", "OMEGA_C"),
                   help="EIT delay in microseconds")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericalBlowupError, SingularSystemError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TraceFormatError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigurationError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
