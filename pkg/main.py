"""Crystal Automaton - box-ball soliton cellular automaton on symmetric tensor crystals."""

import argparse
import json
import sys
from pathlib import Path

from config import Config
from errors import ArgumentError, AutomatonError, IntegrityError
from logging_setup import get_logger, setup_logging, write_progress
from runner import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    ExperimentResult,
    ExperimentSpec,
    check_record_file,
    read_specs,
    run,
    run_batch,
    write_results_jsonl,
    write_results_parquet,
)
from state_io import DIALECTS, read_state, state_to_dict
from verify import SUITES


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c", "--config",
        type=Path,
        default=None,
        help="Path to config file (default: config.toml)",
    )

    # Logging verbosity (mutually exclusive)
    verbosity_group = common.add_mutually_exclusive_group()
    verbosity_group.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose output (DEBUG level)",
    )
    verbosity_group.add_argument(
        "-q", "--quiet",
        action="store_true",
        help="Quiet mode (only warnings and errors)",
    )

    common.add_argument(
        "--log-file",
        type=Path,
        default=None,
        help="Write logs to file (always DEBUG level)",
    )
    common.add_argument(
        "--render",
        choices=("ascii", "json"),
        default="ascii",
        help="Report format on stdout (default: ascii)",
    )
    return common


def _add_state_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("-s", "--state", type=str, help="State in ASCII, e.g. 111142113 or 14·3·123")
    source.add_argument("-i", "--in", dest="input", type=Path, help="State as a JSON file")
    parser.add_argument("-M", "--rank", type=int, default=None, help="Rank M (required with --state)")
    parser.add_argument("--window-start", type=int, default=0, help="Position of the first box")


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        description="Box-ball soliton cellular automaton on symmetric tensor crystals",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    evolve = commands.add_parser("evolve", parents=[common], help="Run T_kappa steps and print every row")
    _add_state_args(evolve)
    evolve.add_argument("-k", "--kappa", type=str, default="inf", help='Carrier schedule, e.g. "inf" or "5*4,2*5"')
    evolve.add_argument("-n", "--steps", type=int, default=None, help="Number of steps (default: schedule length)")
    evolve.add_argument("--dialect", choices=DIALECTS, default="auto", help="ASCII dialect")
    evolve.add_argument("--carriers", action="store_true", help="Print the carrier row between states")
    evolve.add_argument("--record", type=Path, default=None, help="Also write the run as a Parquet record")

    scatter = commands.add_parser("scatter", parents=[common], help="Collide two solitons")
    scatter.add_argument("-M", "--rank", type=int, required=True, help="Rank M")
    scatter.add_argument("--left", "--l-label", dest="left", required=True, help="Label of the left soliton")
    scatter.add_argument("--right", "--k-label", dest="right", required=True, help="Label of the right soliton")
    scatter.add_argument("--theta", type=str, default="1", help='Box capacity or profile, e.g. "2" or "1,2,3*40"')
    scatter.add_argument("-k", "--kappa", type=str, default="inf", help="Carrier capacity or schedule")
    scatter.add_argument("--trace", action="store_true", help="Print every intermediate state")

    rmatrix = commands.add_parser("rmatrix", parents=[common], help="Apply the combinatorial R matrix")
    rmatrix.add_argument("words", nargs="*", help="Left and right tableau words")
    rmatrix.add_argument("-M", "--rank", type=int, default=None, help="Rank M")
    rmatrix.add_argument("--oracle", action="store_true", help="Use the crystal-graph oracle")
    rmatrix.add_argument(
        "--check-yb",
        nargs=4,
        type=int,
        metavar=("K", "L", "M_", "RANK"),
        default=None,
        help="Check the Yang-Baxter equation on B_K ⊗ B_L ⊗ B_M_",
    )

    plstep = commands.add_parser("plstep", parents=[common], help="One max-plus vertex next to the R matrix")
    plstep.add_argument("-M", "--rank", type=int, required=True, help="Rank M")
    plstep.add_argument("--box", required=True, help="Box word")
    plstep.add_argument("--carrier", required=True, help="Carrier word")

    conserved = commands.add_parser("conserved", parents=[common], help="Energies E_kappa and the P-symbol")
    _add_state_args(conserved)
    conserved.add_argument("--kappas", type=str, default="1,2,3,inf", help="Carrier capacities to evaluate")

    tau = commands.add_parser("tau", parents=[common], help="Soliton solutions from the max-plus tau function")
    tau.add_argument("-p", "--params", type=Path, required=True, help="JSON file of soliton parameters")
    tau.add_argument("-w", "--window", type=str, required=True, help="t0:t1,n0:n1")
    tau.add_argument("--emit", choices=("fields", "ascii", "residual"), default="ascii", help="What to print")

    verify = commands.add_parser("verify", parents=[common], help="Run the acceptance suites")
    verify.add_argument("--suite", choices=SUITES, default="all", help="Suite to run (default: all)")
    verify.add_argument("--seed", type=int, default=None, help="Seed of the randomized checks")
    verify.add_argument("--cases", type=int, default=None, help="Random cases per property")

    batch = commands.add_parser("batch", parents=[common], help="Run a JSONL file of experiments")
    batch.add_argument("-i", "--in", dest="input", type=Path, required=True, help="JSONL experiment specs")
    batch.add_argument("-o", "--out", type=Path, default=None, help="JSONL results (default: output_dir)")
    batch.add_argument("--parquet", type=Path, default=None, help="Also write results as Parquet")
    batch.add_argument("-j", "--concurrency", type=int, default=None, help="Number of worker threads")
    batch.add_argument("--progress", action="store_true", help="Show a progress bar")

    check = commands.add_parser("check-record", parents=[common], help="Re-verify a Parquet evolution record")
    check.add_argument("path", type=Path, help="Record written by evolve --record")

    return parser.parse_args(argv)


def _state_params(args: argparse.Namespace) -> dict:
    if args.input is not None:
        try:
            return {"state": state_to_dict(read_state(args.input))}
        except OSError as e:
            raise ArgumentError(f"cannot read {args.input}: {e}") from e
    if args.rank is None:
        raise ArgumentError("--rank is required with --state")
    return {"ascii": args.state, "M": args.rank, "window_start": args.window_start}


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    """Translate a parsed command line into an experiment."""
    if args.command == "evolve":
        params = _state_params(args)
        params.update(kappa=args.kappa, dialect=args.dialect, show_carriers=args.carriers)
        if args.steps is not None:
            params["steps"] = args.steps
        if args.record is not None:
            params["record"] = str(args.record)
        return ExperimentSpec("evolve", params)
    if args.command == "scatter":
        return ExperimentSpec(
            "scatter",
            {
                "M": args.rank,
                "left": args.left,
                "right": args.right,
                "theta": args.theta,
                "kappa": args.kappa,
                "trace": args.trace,
            },
        )
    if args.command == "rmatrix":
        if args.check_yb is not None:
            return ExperimentSpec("rmatrix", {"check_yb": list(args.check_yb)})
        if len(args.words) != 2 or args.rank is None:
            raise ArgumentError("rmatrix needs two words and --rank, or --check-yb")
        left, right = args.words
        return ExperimentSpec("rmatrix", {"M": args.rank, "left": left, "right": right, "oracle": args.oracle})
    if args.command == "plstep":
        return ExperimentSpec("plstep", {"M": args.rank, "box": args.box, "carrier": args.carrier})
    if args.command == "conserved":
        params = _state_params(args)
        params["kappas"] = args.kappas
        return ExperimentSpec("conserved", params)
    if args.command == "tau":
        try:
            data = json.loads(args.params.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ArgumentError(f"cannot read soliton parameters from {args.params}: {e}") from e
        return ExperimentSpec("tau", {"params": data, "window": args.window, "emit": args.emit})
    if args.command == "verify":
        params: dict = {"suite": args.suite}
        if args.cases is not None:
            params["cases"] = args.cases
        return ExperimentSpec("verify", params, args.seed)
    raise ArgumentError(f"no experiment for command {args.command!r}")


def emit(result: ExperimentResult, render: str) -> None:
    if render == "json":
        print(json.dumps(result.report, sort_keys=True, indent=2))
    else:
        for line in result.lines:
            print(line)


def _progress_bar(completed: int, total: int) -> None:
    percent = completed / total
    bar_width = 40
    filled = int(bar_width * percent)
    bar = "█" * filled + "░" * (bar_width - filled)
    write_progress(f"Experiments: [{bar}] {completed}/{total}")


def run_batch_command(args: argparse.Namespace, config: Config) -> int:
    logger = get_logger()
    specs = read_specs(args.input)
    logger.info("Experiments: %d", len(specs))
    logger.info("Worker threads: %s", config.concurrent_experiments)

    results = run_batch(specs, config, on_progress=_progress_bar if args.progress else None)
    if args.progress and specs:
        sys.stderr.write("\n")

    out = args.out or config.results_path
    write_results_jsonl(results, out)
    if args.parquet:
        write_results_parquet(results, args.parquet)

    failed = sum(1 for r in results if r.status != EXIT_OK)
    logger.info("")
    logger.info("=" * 50)
    logger.info("Batch Summary")
    logger.info("=" * 50)
    logger.info("Total experiments: %d", len(results))
    logger.info("Succeeded: %d", len(results) - failed)
    if failed:
        logger.warning("Failed: %d", failed)
    logger.info("Results written to %s", out)
    if args.parquet:
        logger.info("Parquet written to %s", args.parquet)

    if failed:
        return EXIT_USAGE if all(r.status == EXIT_USAGE for r in results if r.status) else EXIT_FAILED
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)

    # Handlers must exist before the config is read so its errors are logged
    verbosity = 1 if args.verbose else (-1 if args.quiet else 0)
    setup_logging(verbosity=verbosity, log_file=args.log_file)
    logger = get_logger()

    logger.debug("Loading configuration...")
    try:
        config = Config.load(
            config_path=args.config,
            seed_override=getattr(args, "seed", None),
            concurrency_override=getattr(args, "concurrency", None),
        )
    except (ArgumentError, OSError, ValueError) as e:
        logger.error("Error loading configuration: %s", e)
        return EXIT_USAGE

    logger.debug("Extension cap: %s", config.extension_cap)
    logger.debug("Separation margin: %s", config.separation_margin)
    logger.debug("Scatter max steps: %s", config.scatter_max_steps)
    logger.debug("Seed: %s", config.seed)

    try:
        if args.command == "batch":
            return run_batch_command(args, config)
        if args.command == "check-record":
            record = check_record_file(args.path)
            print(f"{args.path}: {record.steps} steps on {record.width} boxes, every vertex verified")
            return EXIT_OK
        spec = build_spec(args)
    except (ArgumentError, OSError) as e:
        logger.error("Error: %s", e)
        return EXIT_USAGE
    except IntegrityError as e:
        logger.error("Integrity check failed: %s", e)
        return EXIT_FAILED
    except AutomatonError as e:
        logger.error("Error: %s", e)
        return EXIT_FAILED

    result = run(spec, config)
    if "error" in result.report:
        logger.error("Error: %s", result.report["error"])
    else:
        emit(result, args.render)

    if spec.kind == "verify":
        logger.info("")
        logger.info("=" * 50)
        logger.info("Verification %s", "passed" if result.status == EXIT_OK else "FAILED")
        logger.info("=" * 50)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
