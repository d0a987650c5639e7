# coding=utf-8
# Copyright 2026 The NFST Overlay authors.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import argparse
import json
import sys
from dataclasses import asdict
from typing import Any, Dict, List, Optional

from transformers.utils import logging

from ..core.errors import (
    CompileError,
    EngineError,
    ImageFormatError,
    RulesetError,
    UnsupportedEpsilonOutput,
    ValidationError,
)
from ..core.fst.modeling_fst import validate
from ..core.fst.parsing_fst import parse_ruleset
from ..core.overlay.configuration_overlay import EngineConfig, OverlayConfig, POLICIES
from ..core.overlay.grid import GridSpec, Neighborhood, parse_grid
from ..core.overlay.serialization import image_to_json, save_image
from ..core.resources.modeling_resources import scaling_sweep, to_csv
from ..inference.overlay_transducer import OverlayTransducer
from ..inference.verification import escape_bytes, verify

logger = logging.get_logger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_RULESET = 4
EXIT_VALIDATION = 5
EXIT_COMPILE = 6
EXIT_IMAGE = 7
EXIT_ENGINE = 8
EXIT_COUNTEREXAMPLE = 9

EXIT_CODES_HELP = (
    "Exit codes:\n"
    "  0  success (discarded windows are not an error)\n"
    "  1  unexpected failure\n"
    "  2  usage error\n"
    "  3  file I/O error\n"
    "  4  ruleset syntax or semantic error\n"
    "  5  invalid machine (validation, epsilon input with byte output)\n"
    "  6  compile error (not length-preserving, capacity, adjacency)\n"
    "  7  image format error (version, checksum, truncated, malformed)\n"
    "  8  engine error (activation or FIFO overflow), reported with the window index\n"
    "  9  verify found a counterexample\n"
)


class UsageError(ValueError):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _add_grid_args(parser: argparse.ArgumentParser, rows: int, cols: int) -> None:
    parser.add_argument("--rows", type=_positive_int, default=rows, help=f"PE rows (default: {rows}).")
    parser.add_argument("--cols", type=_positive_int, default=cols, help=f"PE columns (default: {cols}).")
    parser.add_argument(
        "--neighborhood",
        default=Neighborhood.MOORE8.value,
        choices=[n.value for n in Neighborhood],
        help="Grid neighbors a PE can be switched to (default: moore8).",
    )
    parser.add_argument(
        "--replication-budget",
        type=_positive_int,
        default=4,
        help="Maximum PE instances per edge (default: 4).",
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_non_negative_int, default=0, help="Random seed (default: 0).")
    common.add_argument(
        "--format",
        default="text",
        choices=["text", "json"],
        help="Output format on stdout (default: text).",
    )
    common.add_argument("--quiet", action="store_true", help="Only log errors.")

    parser = argparse.ArgumentParser(
        prog="nfst-overlay",
        description=(
            "Compile byte-level transducer rulesets onto a simulated PE array, run input streams through\n"
            "it, check it against the reference interpreter, and estimate its memory footprint.\n\n"
            "Examples:\n"
            "  nfst-overlay compile hello_hi_lp.rules -o hello.bin\n"
            "  nfst-overlay run hello.bin input.txt -n 5 --policy first\n"
            "  nfst-overlay verify hello_hi_lp.rules --cases 100 --seed 7\n"
            "  nfst-overlay verify --random --cases 1000\n"
            "  nfst-overlay sweep --sizes 4x4,8x8,16x16 -o sweep.csv\n\n"
            + EXIT_CODES_HELP
        ),
        formatter_class=argparse.RawTextHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "compile",
        parents=[common],
        help="Compile a ruleset into an overlay image.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawTextHelpFormatter,
    )
    p.add_argument("ruleset", help="Ruleset file.")
    p.add_argument("-o", "--output", required=True, help="Image file to write.")
    _add_grid_args(p, 4, 4)
    p.add_argument("--json", dest="json_path", default=None, help="Also write a JSON dump of the image.")
    p.add_argument(
        "--save-pretrained",
        dest="pretrained_dir",
        default=None,
        help="Also write config.json + overlay.bin into this directory.",
    )

    p = sub.add_parser(
        "run",
        parents=[common],
        help="Stream an input file through a compiled image.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawTextHelpFormatter,
    )
    p.add_argument("image", help="Image file, or a directory written with --save-pretrained.")
    p.add_argument("input", help="Input file read as raw bytes ('-' for stdin).")
    p.add_argument("-n", "--window-length", type=_positive_int, default=None, help="Window length (default: 8).")
    p.add_argument("--policy", choices=list(POLICIES), default=None, help="Output policy (default: all).")
    p.add_argument("--workers", type=_positive_int, default=None, help="Windows simulated in parallel.")
    p.add_argument("--fifo", type=_positive_int, default=None, help="FIFO capacity in vectors (default: 4).")
    p.add_argument("--trace", default=None, help="Write the per-step trace to this file.")

    p = sub.add_parser(
        "verify",
        parents=[common],
        help="Check overlay results against the reference interpreter.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawTextHelpFormatter,
    )
    p.add_argument("ruleset", nargs="?", default=None, help="Ruleset file (omit with --random).")
    p.add_argument("--random", action="store_true", help="Draw a random machine per case.")
    p.add_argument("--image", default=None, help="Check this image instead of compiling the ruleset.")
    p.add_argument("--cases", type=_non_negative_int, default=100, help="Number of cases (default: 100).")
    p.add_argument("--max-window", type=_positive_int, default=8, help="Largest window length (default: 8).")
    p.add_argument("--max-input", type=_non_negative_int, default=64, help="Longest input stream (default: 64).")
    p.add_argument("--workers", type=_positive_int, default=1, help="Windows simulated in parallel.")
    _add_grid_args(p, 8, 8)

    p = sub.add_parser(
        "sweep",
        parents=[common],
        help="Emit memory-bit estimates across grid sizes as CSV.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawTextHelpFormatter,
    )
    p.add_argument("--sizes", required=True, help="Comma-separated grid sizes, e.g. 4x4,8x8,16x16.")
    p.add_argument("--fifo", type=_positive_int, default=4, help="FIFO capacity in vectors (default: 4).")
    p.add_argument("-o", "--output", default=None, help="CSV file to write (default: stdout).")
    return parser


def _overlay_config(args: argparse.Namespace, engine: Optional[Dict[str, Any]] = None) -> OverlayConfig:
    return OverlayConfig(
        rows=args.rows,
        cols=args.cols,
        neighborhood=args.neighborhood,
        replication_budget=args.replication_budget,
        engine_config=EngineConfig(**(engine or {})),
    )


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _emit(args: argparse.Namespace, text: str, payload: Dict[str, Any]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_compile(args: argparse.Namespace) -> int:
    config = _overlay_config(args)
    fst = parse_ruleset(_read_text(args.ruleset))
    transducer = OverlayTransducer.from_fst(fst, config)
    image = transducer.image

    payload = save_image(image)
    with open(args.output, "wb") as f:
        f.write(payload)
    if args.json_path is not None:
        with open(args.json_path, "w", encoding="utf-8") as f:
            f.write(image_to_json(image) + "\n")
    if args.pretrained_dir is not None:
        transducer.save_pretrained(args.pretrained_dir)

    summary = image.summary()
    _emit(
        args,
        str(summary),
        {
            "m": summary.m,
            "occupied": summary.occupied,
            "replications": summary.replications,
            "edges": summary.edges,
            "grid": str(image.grid),
        },
    )
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    engine = {k: v for k, v in (("fifo_capacity", args.fifo), ("max_workers", args.workers)) if v is not None}
    transducer = OverlayTransducer.load(args.image, **engine)
    if args.input == "-":
        data = sys.stdin.buffer.read()
    else:
        with open(args.input, "rb") as f:
            data = f.read()

    trace: Optional[List[str]] = [] if args.trace is not None else None
    stream = transducer.run(
        data,
        window_length=args.window_length,
        policy=args.policy,
        max_workers=args.workers,
        trace=trace,
    )
    if trace is not None:
        with open(args.trace, "w", encoding="utf-8") as f:
            f.write("".join(line + "\n" for line in trace))

    windows = [
        {
            "index": r.window_index,
            "outcome": r.outcome.value,
            "outputs": [escape_bytes(o) for o in r.outputs],
            "cycles": r.cycles,
        }
        for r in stream.results
    ]
    lines = [f"{'window':<8}{'outcome':<11}{'cycles':<8}outputs"]
    for w in windows:
        lines.append(f"{w['index']:<8}{w['outcome']:<11}{w['cycles']:<8}{' '.join(w['outputs'])}".rstrip())
    lines.append(
        f"total_cycles={stream.total_cycles} windows={len(windows)} n={stream.window_length} m={stream.m}"
    )
    _emit(
        args,
        "\n".join(lines),
        {"windows": windows, "total_cycles": stream.total_cycles, "n": stream.window_length, "m": stream.m},
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.random == (args.ruleset is not None):
        raise UsageError("verify needs exactly one of a ruleset path or --random")
    if args.random and args.image is not None:
        raise UsageError("--image checks an image against its ruleset; it cannot be combined with --random")

    fst = None
    image = None
    if args.ruleset is not None:
        fst = parse_ruleset(_read_text(args.ruleset))
        errors = [d for d in validate(fst) if d.is_error]
        if errors:
            raise ValidationError(errors)
    if args.image is not None:
        image = OverlayTransducer.load(args.image).image
    grid = GridSpec(args.rows, args.cols, Neighborhood(args.neighborhood))

    report = verify(
        fst=fst,
        image=image,
        cases=args.cases,
        seed=args.seed,
        grid=grid,
        max_window=args.max_window,
        max_input=args.max_input,
        replication_budget=args.replication_budget,
        max_workers=args.workers,
    )
    first = report.first_counterexample
    lines = [f"seed={report.seed} cases={report.cases} rejected={report.rejected}", str(report)]
    if first is not None:
        lines.append(str(first))
    _emit(
        args,
        "\n".join(lines),
        {
            "seed": report.seed,
            "cases": report.cases,
            "passed": report.passed,
            "failed": report.failed,
            "rejected": report.rejected,
            "counterexample": None if first is None else str(first),
        },
    )
    return EXIT_OK if report.ok else EXIT_COUNTEREXAMPLE


def cmd_sweep(args: argparse.Namespace) -> int:
    sizes = [s for s in args.sizes.split(",") if s.strip()]
    if not sizes:
        raise UsageError("--sizes needs at least one RxC grid size")
    try:
        grids = [parse_grid(s) for s in sizes]
    except ValueError as e:
        raise UsageError(str(e)) from e

    reports = scaling_sweep(grids, args.fifo)
    if args.format == "json":
        text = json.dumps([asdict(r) for r in reports], sort_keys=True) + "\n"
    else:
        text = to_csv(reports)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {len(reports)} rows to {args.output}")
    return EXIT_OK


COMMANDS = {
    "compile": cmd_compile,
    "run": cmd_run,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, UsageError):
        return EXIT_USAGE
    if isinstance(error, OSError):
        return EXIT_IO
    if isinstance(error, RulesetError):
        return EXIT_RULESET
    if isinstance(error, (ValidationError, UnsupportedEpsilonOutput)):
        return EXIT_VALIDATION
    if isinstance(error, CompileError):
        return EXIT_COMPILE
    if isinstance(error, ImageFormatError):
        return EXIT_IMAGE
    if isinstance(error, EngineError):
        return EXIT_ENGINE
    return EXIT_UNEXPECTED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.quiet:
        logging.set_verbosity_error()
    else:
        logging.set_verbosity_info()

    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        code = exit_code_for(e)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        if code == EXIT_UNEXPECTED:
            logger.exception("unexpected failure")
        return code


if __name__ == "__main__":
    raise SystemExit(main())
