"""
quditkit command line

Parses the global flags and subcommands, runs one command with one Logger,
and maps library errors to exit codes:

* 0: success;
* 2: input error (bad arguments, device file, CSV, missing file);
* 3: numerical or fit error.

A failing command writes ``error.json`` with the error's category to the
output directory.
"""

import argparse
import os
import sys
import warnings

from quditkit.counter import Counter
from quditkit.errors import InputError, NumericalError
from quditkit.logger import Logger, LogLevel

from . import commands
from .output import error_category, write_error

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _device_command(subparsers, name: str, handler, summary: str) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(name, help=summary, description=summary)
    parser.add_argument("device", help="Device file (JSON).")
    parser.add_argument("--transmon", default=None, help="Transmon name; optional if the file holds one.")
    parser.set_defaults(handler=handler, command_name=name)
    return parser


def build_parser() -> argparse.ArgumentParser:
    """The ``quditkit`` argument parser."""
    parser = argparse.ArgumentParser(
        prog="quditkit",
        description="Modeling, readout and analysis of transmon qudits.",
    )
    parser.add_argument("--out", default=".", help="Directory for output files (default: current).")
    parser.add_argument("--seed", type=int, default=None, help="Seed for stochastic commands; overrides the device file.")
    parser.add_argument(
        "--log-level",
        default="info",
        choices=["debug", "info", "warning", "error", "critical"],
        help="Lowest level that is logged.",
    )
    parser.add_argument("--log-file", action="store_true", help="Also append log records to <out>/activity.log.")
    parser.add_argument("--color", action="store_true", help="Colorize log levels.")
    parser.add_argument("--plot-data", action="store_true", help="Also write <command>.plot.csv series.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    check = _device_command(subparsers, "check", commands.check_device, "Validate a device file and write its canonical form.")
    check.add_argument("--save", action="store_true", help="Write the --seed override into the device file.")

    spectrum = _device_command(subparsers, "spectrum", commands.spectrum, "Transitions, anharmonicities and N_levels.")
    spectrum.add_argument("--levels", type=int, default=None, help="Levels to solve (default: device setting).")
    spectrum.add_argument("--dispersion", action="store_true", help="Also compute δf per transition.")

    dispersion = _device_command(subparsers, "dispersion", commands.dispersion, "Charge dispersion ε_m and δf.")
    dispersion.add_argument("--levels", type=int, default=None, help="Levels to report.")

    dispersive = _device_command(subparsers, "dispersive", commands.dispersive, "Dispersive shifts χ_i.")
    dispersive.add_argument("--levels", type=int, default=None, help="Levels to report.")
    dispersive.add_argument("--dressed", action="store_true", help="Also compute pulls by exact diagonalization.")
    dispersive.add_argument("--photons", type=int, default=commands.DEFAULT_PHOTONS, help="Photon cutoff for --dressed.")

    fit = _device_command(subparsers, "fit", commands.fit, "Fit circuit parameters to measured frequencies.")
    models = fit.add_mutually_exclusive_group()
    models.add_argument("--harmonics", type=int, default=None, metavar="M", help="Fit the M-harmonic model.")
    models.add_argument(
        "--harmonics-sweep", type=int, default=None, metavar="MAX", help="Fit M = 1..MAX and tabulate the parameters."
    )

    zz = subparsers.add_parser("zz", help="ZZ shift matrix of a coupled pair.")
    zz.add_argument("device", help="Device file (JSON).")
    zz.add_argument("--control", required=True, help="Control transmon.")
    zz.add_argument("--target", required=True, help="Target transmon.")
    zz.add_argument("--levels", type=int, default=6, help="Control states and target transitions.")
    zz.add_argument("--trunc", type=int, default=12, help="Levels kept per transmon.")
    zz.add_argument("--measured-shift", type=float, default=None, help="Measured Δf^{|1⟩}_{01} in GHz; fits J.")
    zz.set_defaults(handler=commands.zz, command_name="zz")

    readout = subparsers.add_parser("readout", help="Multi-tone readout simulation and discrimination.")
    readout_commands = readout.add_subparsers(dest="readout_command", required=True)

    sim = _device_command(readout_commands, "sim", commands.readout_sim, "Synthesize labeled single shots.")
    sim.set_defaults(command_name="readout-sim")
    sim.add_argument("--tone-set", default=None, help="Tone set name.")
    sim.add_argument("--states", type=int, default=10, help="Prepare states 0..STATES-1.")
    sim.add_argument("--shots", type=int, default=1000, help="Shots per state.")
    sim.add_argument("--sigma", type=float, default=None, help="Noise per quadrature (default: separation/20).")
    sim.add_argument("--integration", type=float, default=None, help="Integration time in µs.")
    sim.add_argument("--decay", action="store_true", help="Decay during readout at the measured T1.")
    sim.add_argument("--t1-csv", default=None, help="T1 CSV instead of the device's measured series.")

    train = readout_commands.add_parser("train", help="Train the Gaussian classifier.")
    train.add_argument("records", help="Labeled records CSV.")
    train.add_argument("--refine-em", action="store_true", help="Refine with expectation-maximization.")
    train.add_argument("--shared-covariance", action="store_true", help="Pool one covariance for all states.")
    train.add_argument("--use-weights", action="store_true", help="Fit mixture weights.")
    train.add_argument("--folds", type=int, default=0, help="Stratified cross-validation folds (0: off).")
    train.set_defaults(handler=commands.readout_train, command_name="readout-train")

    classify = readout_commands.add_parser("classify", help="Assign records to states.")
    classify.add_argument("classifier", help="Classifier JSON from 'readout train'.")
    classify.add_argument("records", help="Records CSV.")
    classify.add_argument("--calibration", default=None, help="Labeled records used to mitigate the populations.")
    classify.set_defaults(handler=commands.readout_classify, command_name="readout-classify")

    confusion = readout_commands.add_parser("confusion", help="Assignment matrix on labeled records.")
    confusion.add_argument("classifier", help="Classifier JSON from 'readout train'.")
    confusion.add_argument("records", help="Labeled records CSV.")
    confusion.set_defaults(handler=commands.readout_confusion, command_name="readout-confusion")

    budget = _device_command(subparsers, "t1-budget", commands.t1_budget, "Relaxation budget per level.")
    budget.add_argument("--noise", default=None, help="Noise parameter set name.")
    budget.add_argument("--levels", type=int, default=9, help="Report levels 1..LEVELS.")
    budget.add_argument("--fit-dielectric", action="store_true", help="Fit Q_diel,0 and ε to measured T1.")
    budget.add_argument("--t1-csv", default=None, help="T1 CSV instead of the device's measured series.")
    budget.add_argument("--weighted", action="store_true", help="Weight the fit by the T1 uncertainties.")
    budget.add_argument("--no-qp", action="store_true", help="Leave the quasiparticle channel out of the fit.")

    rb = subparsers.add_parser("rb-fit", help="Fit randomized-benchmarking survival.")
    rb.add_argument("csv", help="CSV with 'depth' and one survival column per randomization.")
    rb.add_argument("--d", type=int, default=2, help="Dimension of the benchmarked subspace.")
    rb.set_defaults(handler=commands.rb_fit, command_name="rb-fit")

    ramsey = subparsers.add_parser("ramsey-fit", help="Fit beating Ramsey traces.")
    ramsey.add_argument("csv", help="CSV with 'time_us' and one population column per trace.")
    ramsey.set_defaults(handler=commands.ramsey_fit, command_name="ramsey-fit")

    tomo = subparsers.add_parser("tomo", help="Qudit state tomography.")
    tomo_commands = tomo.add_subparsers(dest="tomo_command", required=True)
    gates = tomo_commands.add_parser("gates", help="List the gate sequences.")
    gates.add_argument("--d", type=int, required=True, help="Qudit dimension.")
    gates.set_defaults(handler=commands.tomo_gates, command_name="tomo-gates")
    simulate = tomo_commands.add_parser("simulate", help="Sample outcome frequencies of a pure state.")
    simulate.add_argument("--state", required=True, help="Comma-separated amplitudes, e.g. '1,0,1'.")
    simulate.add_argument("--shots", type=int, default=5000, help="Shots per sequence.")
    simulate.set_defaults(handler=commands.tomo_simulate, command_name="tomo-simulate")
    reconstruct = tomo_commands.add_parser("reconstruct", help="Reconstruct ρ from outcome frequencies.")
    reconstruct.add_argument("probabilities", help="CSV with 'gate' and p_0..p_{d-1} columns.")
    reconstruct.add_argument("--target", default=None, help="Pure target state for the fidelity.")
    reconstruct.set_defaults(handler=commands.tomo_reconstruct, command_name="tomo-reconstruct")

    return parser


def main(argv: list[str] | None = None) -> int:
    """Runs one command and returns its exit code."""
    args = build_parser().parse_args(argv)
    logger = Logger(
        error_counter=Counter("errors"),
        log_level=LogLevel.from_name(args.log_level),
        colorized=args.color,
        stream=sys.stderr,
    )
    ctx = commands.CommandContext(logger=logger, out_dir=args.out, seed=args.seed, plot_data=args.plot_data)
    command = args.command_name

    error: Exception | None = None
    written: list[str] = []
    code = EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if args.log_file:
                os.makedirs(args.out, exist_ok=True)
                logger.set_log_dir(args.out)
            written = args.handler(args, ctx)
        except (InputError, FileNotFoundError) as e:
            error, code = e, EXIT_INPUT
        except NumericalError as e:
            error, code = e, EXIT_NUMERICAL
    logger.log_warnings(caught, command=command)

    if error is not None:
        logger.error("Command failed.", err=error, command=command, category=error_category(error))
        write_error(args.out, command, error, code)
        return code

    logger.info("Command finished.", command=command, files=written)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
