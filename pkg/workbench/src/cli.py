"""Command-line entry point.

Exit codes: 0 when the property holds or the command succeeded, 1 when the property fails
(a report is still written), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from arena import Arena
from automaton import Automaton
from errors import InputError, WorkbenchError
from serialization import file_digest, load, to_document, to_dot
from workbench import Report, Workbench

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Sampling seed (default WORKBENCH_SEED)")
    common.add_argument("--bound", type=int, default=None, help="Stack/counter bound (default WORKBENCH_BOUND)")
    common.add_argument("--samples", type=int, default=None, help="Lassos or words to sample")
    common.add_argument("--format", choices=("json", "dot"), default="json", help="Format of emitted automata")
    common.add_argument("--out", type=Path, default=None, help="Write the emitted automaton here")

    parser = argparse.ArgumentParser(prog="hd-workbench", description="History-determinism workbench")
    commands = parser.add_subparsers(dest="command", required=True)

    check_hd = commands.add_parser("check-hd", parents=[common], help="Decide history-determinism")
    check_hd.add_argument("file", type=Path)
    check_hd.add_argument("--monitor", type=Path, default=None, help="Deterministic automaton for the language")

    check_sim = commands.add_parser("check-sim", parents=[common], help="Does A simulate B?")
    check_sim.add_argument("a", type=Path)
    check_sim.add_argument("b", type=Path)

    ghost = commands.add_parser("ghost", parents=[common], help="Build the delayed ghost of an automaton")
    ghost.add_argument("file", type=Path)
    ghost.add_argument("--verify", action="store_true", help="Certify the ghost")

    spoiler = commands.add_parser("spoiler", parents=[common], help="Build a spoiler for a non-HD automaton")
    spoiler.add_argument("file", type=Path)
    spoiler.add_argument("--monitor", type=Path, default=None)
    spoiler.add_argument("--linearize", action="store_true")

    solve = commands.add_parser("solve", parents=[common], help="Solve a 3-priority parity arena")
    solve.add_argument("arena", type=Path)

    gallery = commands.add_parser("gallery", parents=[common], help="Named instances")
    gallery.add_argument("action", choices=("list", "show", "verify"))
    gallery.add_argument("name", nargs="?", default=None)

    sample = commands.add_parser("sample-lassos", parents=[common], help="Sample ultimately periodic words")
    sample.add_argument("file", type=Path, nargs="?", default=None, help="Annotate lassos with membership")
    sample.add_argument("--alphabet", default=None, help="Letters, e.g. ab")

    return parser


def _load_automaton(path: Path) -> Automaton:
    model = load(path)
    if not isinstance(model, Automaton):
        raise InputError(f"{path} does not hold a finite automaton")
    return model


def run(args: argparse.Namespace, workbench: Workbench) -> Report:
    inputs: list[Path] = []

    def automaton(path: Path) -> Automaton:
        inputs.append(path)
        return _load_automaton(path)

    match args.command:
        case "check-hd":
            a = automaton(args.file)
            report = workbench.check_hd(a, automaton(args.monitor) if args.monitor else None)
        case "check-sim":
            report = workbench.check_sim(automaton(args.a), automaton(args.b))
        case "ghost":
            inputs.append(args.file)
            report = workbench.ghost(load(args.file), args.verify, args.samples, args.seed, args.bound)
        case "spoiler":
            a = automaton(args.file)
            monitor = automaton(args.monitor) if args.monitor else None
            report = workbench.spoiler(a, monitor, args.linearize, args.samples, args.seed)
        case "solve":
            inputs.append(args.arena)
            arena = load(args.arena)
            if not isinstance(arena, Arena):
                raise InputError(f"{args.arena} does not hold an arena")
            report = workbench.solve(arena)
        case "gallery":
            if args.action != "list" and not args.name:
                raise InputError(f"gallery {args.action} needs an entry name")
            match args.action:
                case "list":
                    report = workbench.gallery_list()
                case "show":
                    report = workbench.gallery_show(args.name)
                case "verify":
                    report = workbench.gallery_verify(args.name, args.samples, args.seed)
        case "sample-lassos":
            subject = automaton(args.file) if args.file else None
            alphabet = list(args.alphabet) if args.alphabet else None
            report = workbench.sample_lassos(alphabet, subject, args.samples, args.seed)
    report.inputs = {str(path): file_digest(path) for path in inputs}
    return report


def emit(report: Report, args: argparse.Namespace, stdout) -> None:
    """Write the emitted model to --out (or into the report) and the report to stdout."""
    document = report.to_document()
    if report.output is not None:
        rendered = (
            to_dot(report.output)
            if args.format == "dot"
            else to_document(report.output).model_dump_json(by_alias=True, indent=2, exclude_none=True)
        )
        if args.out is not None:
            args.out.write_text(rendered + "\n", encoding="utf-8")
            document.details["output"] = str(args.out)
        else:
            document.details["output"] = rendered if args.format == "dot" else json.loads(rendered)
    stdout.write(document.model_dump_json(by_alias=True, indent=2) + "\n")


def main(argv: list[str] | None = None, workbench: Workbench | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    if workbench is None:
        from container import Container

        workbench = Container().workbench

    try:
        report = run(args, workbench)
        emit(report, args, stdout)
        code = report.exit_code
    except (WorkbenchError, ValidationError, json.JSONDecodeError) as e:
        logger.debug(f"{args.command} rejected its input", exc_info=True)
        message = str(e).splitlines()[0] if str(e) else type(e).__name__
        stderr.write(f"error: {message}\n")
        code = EXIT_USAGE
    except Exception:
        logger.error(f"Unexpected failure in {args.command}", exc_info=True)
        raise
    workbench.telemetry.metrics.cli_commands.add(1, {"command": args.command, "exit_code": str(code)})
    return code


if __name__ == "__main__":
    sys.exit(main())
