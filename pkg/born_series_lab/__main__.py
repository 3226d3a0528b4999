import argparse
import os
import sys
from pathlib import Path

from pydantic import ValidationError
from tornado.log import app_log

from born_series_lab.lab.experiment import (
    compare_speed,
    example_potential,
    read_report,
    run_experiment,
    write_recovery,
    write_report,
)
from born_series_lab.lab.plots import emit_plot, emit_section_plot
from born_series_lab.lab.schema import Algorithm, LabConfig, Tier
from born_series_lab.log import setup_logging
from born_series_lab.scattering.dataset_io import read_dataset, write_dataset
from born_series_lab.scattering.excs import BaseScatteringError
from born_series_lab.scattering.forward import generate_dataset
from born_series_lab.scattering.grid import make_grid
from born_series_lab.scattering.inversion import bcr_recover, recover
from born_series_lab.scattering.scene import make_cutoff, rasterize
from born_series_lab.scattering.schema import RecoveryParams


def generate(args: argparse.Namespace, config: LabConfig) -> int:
    spec = make_grid(config.grid_sizes[0], config.half_width)
    potential = example_potential(config.example, config.amplitude)
    d = generate_dataset(
        potential,
        spec,
        theta0=config.theta0,
        fine_factor=config.fine_factor,
        k_max=config.k_max,
        tol=config.tol,
        eps_deg=config.eps_deg,
        workers=config.workers,
    )
    write_dataset(d, args.out)
    app_log.info("Wrote %d records (%d omitted) to %s", len(d.records), len(d.omitted), args.out)
    return 0


def recover_potential(args: argparse.Namespace, config: LabConfig) -> int:
    d = read_dataset(args.data)
    cutoff = make_cutoff(d.inverse_spec, config.r_inner, config.r_outer)
    m = config.m[0]
    if args.algorithm == Algorithm.BCR.value:
        trace = bcr_recover(d, config.l, cutoff, tol=config.tol, workers=config.workers)
        m = None
    else:
        params = RecoveryParams(m=m, l_max=config.l, stop_tol=config.stop_tol, cutoff=cutoff, workers=config.workers)
        trace = recover(d, params)
    write_recovery(trace, args.out, m=m, l_max=config.l, include_trace=args.trace)
    app_log.info("Wrote %d iterates of %s recovery to %s", len(trace.iterates), trace.algorithm, args.out)

    if args.section:
        truth = rasterize(example_potential(config.example, config.amplitude), d.inverse_spec)
        emit_section_plot(truth, trace.final, args.section, label=f"{trace.algorithm}-l{len(trace.iterates)}")
    return 0


def experiment(args: argparse.Namespace, config: LabConfig) -> int:
    rows = run_experiment(config.example, config.grid_sizes, config.m, config.l, config)
    write_report(rows, args.report)
    app_log.info("Wrote %d report rows to %s", len(rows), args.report)
    return 0


def plot(args: argparse.Namespace, config: LabConfig) -> int:
    emit_plot(read_report(args.report), args.out, x=args.x)
    return 0


def speed(args: argparse.Namespace, config: LabConfig) -> int:
    d = read_dataset(args.data)
    cutoff = make_cutoff(d.inverse_spec, config.r_inner, config.r_outer)
    comparison = compare_speed(d, config.m[0], config.l, cutoff, tol=config.tol, workers=config.workers)
    print(comparison.model_dump_json(indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", type=Path, help="JSON file with LabConfig keys, flags override it")
    common.add_argument("--log-level", dest="log_level", help="defaults to $LOG_LEVEL or INFO")
    common.add_argument("--workers", type=int, help="threads for per-record sweeps")

    physics = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    physics.add_argument("--example", type=int, choices=[1, 2])
    physics.add_argument("--amplitude", type=float, help="scale the example potential")
    physics.add_argument("--theta0", help="incident direction X,Y")
    physics.add_argument("--fine", dest="fine_factor", type=int, help="simulation grid refinement")
    physics.add_argument("--kmax", dest="k_max", type=float)
    physics.add_argument("--eps-deg", dest="eps_deg", type=float)
    physics.add_argument("--tol", type=float, help="Lippmann-Schwinger relative residual")

    recovery = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    recovery.add_argument("--l", dest="l", type=int, help="number of iterates")
    recovery.add_argument("--r-inner", dest="r_inner", type=float)
    recovery.add_argument("--r-outer", dest="r_outer", type=float)
    recovery.add_argument("--stop-tol", dest="stop_tol", type=float)

    parser = argparse.ArgumentParser(prog="born_series_lab", description="Fixed angle inverse scattering lab")
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("generate", parents=[common, physics], help="simulate a scattering dataset")
    cmd.add_argument("--n", type=int, default=argparse.SUPPRESS)
    cmd.add_argument("--out", type=Path, required=True)
    cmd.set_defaults(handler=generate)

    cmd = commands.add_parser("recover", parents=[common, physics, recovery], help="invert a dataset")
    cmd.add_argument("--data", type=Path, required=True)
    cmd.add_argument("--m", type=int, default=argparse.SUPPRESS)
    cmd.add_argument("--algorithm", choices=[Algorithm.NEW.value, Algorithm.BCR.value], default=Algorithm.NEW.value)
    cmd.add_argument("--trace", action="store_true", help="also write every iterate")
    cmd.add_argument("--section", type=Path, help="SVG profile against the --example potential")
    cmd.add_argument("--out", type=Path, required=True)
    cmd.set_defaults(handler=recover_potential)

    cmd = commands.add_parser("experiment", parents=[common, physics, recovery], help="run an error sweep")
    cmd.add_argument("--n", default=argparse.SUPPRESS, help="comma separated grid sizes")
    cmd.add_argument("--m", default=argparse.SUPPRESS, help="comma separated series depths")
    cmd.add_argument("--tier", choices=[t.value for t in Tier], default=argparse.SUPPRESS)
    cmd.add_argument(
        "--algorithm",
        dest="algorithms",
        action="append",
        choices=[a.value for a in Algorithm],
        default=argparse.SUPPRESS,
    )
    cmd.add_argument("--timings", action="store_true", default=argparse.SUPPRESS)
    cmd.add_argument("--regenerate", action="store_true", default=argparse.SUPPRESS)
    cmd.add_argument("--cache-dir", dest="cache_dir", type=Path, default=argparse.SUPPRESS)
    cmd.add_argument("--report", type=Path, required=True)
    cmd.set_defaults(handler=experiment)

    cmd = commands.add_parser("plot", parents=[common], help="draw a report as SVG")
    cmd.add_argument("--report", type=Path, required=True)
    cmd.add_argument("--x", choices=["l", "n"], default="l")
    cmd.add_argument("--out", type=Path, required=True)
    cmd.set_defaults(handler=plot)

    cmd = commands.add_parser("speed", parents=[common, recovery], help="time both recovery algorithms")
    cmd.add_argument("--data", type=Path, required=True)
    cmd.add_argument("--m", type=int, default=argparse.SUPPRESS)
    cmd.set_defaults(handler=speed)
    return parser


def load_config(args: argparse.Namespace) -> LabConfig:
    base = LabConfig()
    if getattr(args, "config", None):
        base = LabConfig.model_validate_json(Path(args.config).read_text())
    overrides = {key: value for key, value in vars(args).items() if key in LabConfig.model_fields}
    return LabConfig.model_validate({**base.model_dump(), **overrides})


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, "log_level", None) or os.getenv("LOG_LEVEL", "INFO"))

    try:
        config = load_config(args)
        return args.handler(args, config)
    except (ValidationError, ValueError, OSError) as e:
        app_log.error("Invalid input: %s", e)
        return 1
    except BaseScatteringError as e:
        app_log.error("%s: %s", e.message, e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
