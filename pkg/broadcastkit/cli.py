import argparse
import sys
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List, Optional

from broadcastkit.core.errors import BroadcastKitError
from broadcastkit.modules.experiments import (
    CommandResult,
    cmd_clone,
    cmd_fidelity_curve,
    cmd_nut_sweep,
    cmd_universality_check,
)
from broadcastkit.utils.config_utils import RunConfig, load_config_file, resolve_config
from broadcastkit.utils.display_utils import (
    arrow_message,
    boxed_message,
    console,
    goodbye_message,
    results_table,
    status_message,
    verdict_message,
)
from broadcastkit.utils.io_utils import PathUtils, safe_csv_save
from broadcastkit.utils.log_utils import configure_logging
from broadcastkit.utils.report_utils import write_report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3
EXIT_INTERRUPTED = 130

MAX_TABLE_ROWS = 40


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", dest="output_path", help="write the results as CSV to this path")
    common.add_argument("--seed", help="random seed (default 42)")
    common.add_argument("--config", help="key=value config file; flags override its values")
    common.add_argument("--degrees", action="store_true", default=None,
                        help="read every angle in degrees instead of radians")
    common.add_argument("--threads", help="worker threads for the search (default: machine cores)")
    common.add_argument("--report", help="also write a markdown run report to this path")
    common.add_argument("--dump-config", action="store_true",
                        help="print the resolved configuration as YAML and exit")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    return common


def _machine_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--machine", help="gm, omega-dqcm or known-basis")
    parser.add_argument("--M", dest="M", help="number of copies")
    parser.add_argument("--machine-theta", dest="machine_theta", help="theta of the known-basis broadcaster")
    parser.add_argument("--machine-omega", dest="machine_omega", help="a priori omega of the machine")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="broadcastkit",
        description="Broadcasting and cloning experiments for mixed qubits",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    curve = commands.add_parser("fidelity-curve", parents=[common],
                                help="optimal universal clone fidelity over lambda")
    curve.add_argument("--M", dest="M", help="number of copies")
    curve.add_argument("--lambda-steps", dest="lambda_steps", help="points on the uniform lambda grid")

    clone = commands.add_parser("clone", parents=[common], help="run one cloner on one input")
    _machine_arguments(clone)
    clone.add_argument("--theta", help="input theta")
    clone.add_argument("--omega", help="input omega")
    clone.add_argument("--lambda", dest="lam", help="input lambda")

    check = commands.add_parser("universality-check", parents=[common],
                                help="coefficient residuals and fidelity spread on a grid")
    _machine_arguments(check)
    check.add_argument("--grid-steps", dest="grid_steps", help="points per grid axis")
    check.add_argument("--fixed-omega", dest="fixed_omega", help="restrict the grid to one omega")
    check.add_argument("--fixed-theta", dest="fixed_theta", help="restrict the grid to one theta")

    sweep = commands.add_parser("nut-sweep", parents=[common],
                                help="search for constant-fidelity broadcasters per target level")
    sweep.add_argument("--M", dest="M", help="number of copies")
    sweep.add_argument("--d", dest="d", help="ancilla dimension")
    sweep.add_argument("--levels", help="comma-separated target fidelity levels (may be empty)")
    sweep.add_argument("--budget", help="function evaluations per restart")
    sweep.add_argument("--restarts", help="independent restarts per level")
    sweep.add_argument("--sample-size", dest="sample_size", help="random states on top of the fixed anchor states")
    sweep.add_argument("--machine-omega", dest="machine_omega", help="omega of the negative control")
    sweep.add_argument("--negative-control", action="store_true",
                       help="also search a fixed-omega sample seeded at the omega-DQCM")
    return parser


def _flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    names = {item.name for item in fields(RunConfig)}
    return {name: value for name, value in vars(args).items() if name in names}


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_values = None
    if args.config:
        file_values, error = load_config_file(Path(args.config))
        if error:
            raise ValueError(error)
    return resolve_config(file_values, _flag_values(args))


def _run(args: argparse.Namespace, config: RunConfig) -> CommandResult:
    if args.command == "fidelity-curve":
        return cmd_fidelity_curve(config)
    if args.command == "clone":
        return cmd_clone(config)
    if args.command == "universality-check":
        return cmd_universality_check(config)
    return cmd_nut_sweep(config, with_negative_control=args.negative_control)


def _show(result: CommandResult):
    boxed_message(f"broadcastkit {result.command}")
    rows = result.frame.itertuples(index=False, name=None)
    results_table(result.command, list(result.frame.columns), list(rows)[:MAX_TABLE_ROWS])
    if len(result.frame) > MAX_TABLE_ROWS:
        arrow_message(f"{len(result.frame) - MAX_TABLE_ROWS} more rows in the CSV output")
    for line in result.summary:
        arrow_message(line)
    if result.universal is not None:
        verdict_message(result.universal)
    if result.evidence_note:
        console.print(f"[dim]{result.evidence_note}[/dim]")


def _check_output(path: Optional[str], label: str):
    if path is None:
        return
    ok, error = PathUtils.check_writable(Path(path))
    if not ok:
        raise ValueError(f"{label}: {error}")


def main(argv: Optional[List[str]] = None) -> int:
    """The main entry point for the broadcastkit CLI application."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        config = _resolve(args)
        if args.dump_config:
            console.print(config.to_yaml(), markup=False, highlight=False, end="")
            return EXIT_OK

        _check_output(config.output_path, "out")
        _check_output(args.report, "report")
        result = _run(args, config)
        _show(result)

        if config.output_path:
            ok, error = safe_csv_save(Path(config.output_path), result.frame)
            if not ok:
                status_message(error, False)
                return EXIT_USAGE
            status_message(f"Wrote {config.output_path}")

        if args.report:
            ok, error = write_report(
                Path(args.report),
                command=result.command,
                config=config.to_dict(),
                summary=result.summary,
                columns=list(result.frame.columns),
                rows=list(result.frame.itertuples(index=False, name=None)),
                evidence_note=result.evidence_note,
            )
            if not ok:
                status_message(error, False)
                return EXIT_USAGE
            status_message(f"Wrote {args.report}")
        return EXIT_OK

    except KeyboardInterrupt:
        goodbye_message()
        return EXIT_INTERRUPTED
    except ValueError as e:
        status_message(str(e), False)
        return EXIT_USAGE
    except (RuntimeError, BroadcastKitError) as e:
        status_message(f"Run failed: {e}", False)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
