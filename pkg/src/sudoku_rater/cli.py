"""Command-line surface tying the toolkit together.

Subcommands: rate (full pipeline over a corpus), solve (one puzzle),
encode (DIMACS export), bins (fit bin ranges from a value file), and
correlate (Spearman rho from a label/value CSV).  Exit codes: 0 success,
1 any rejected record or runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .board import (
    InvalidPuzzle,
    ParseError,
    format_grid,
    parse_grid,
    render_grid,
)
from .dataset import (
    EmptyCorpus,
    RatingConfig,
    emit_histograms,
    emit_report,
    load_corpus,
    rate_corpus,
)
from .nishio import UnsatisfiablePuzzle, heuristic_nishio, randomized_nishio
from .rating import dump_bin_config, equal_count_bins, spearman_rho
from .sat import (
    DegenerateDistribution,
    Encoding,
    clause_length_distribution,
    encode_maximum,
    encode_minimum,
    export_dimacs,
    solve_grid_via_sat,
)
from .strategies import solve_by_strategies


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sudoku-rater",
        description="Rate Sudoku difficulty via SAT clause statistics and "
        "strategy-interleaved Nishio solving.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rate = sub.add_parser("rate", help="rate a puzzle corpus and emit a report")
    rate.add_argument("corpus", help="puzzle file (lines or csv)")
    rate.add_argument("--format", choices=("json", "csv"), default="json",
                      help="report output format")
    rate.add_argument("--input-format", choices=("lines", "csv"), default=None,
                      help="corpus format (default: by file suffix)")
    rate.add_argument("--starts", type=int, default=50,
                      help="random starts per puzzle and strategy count")
    rate.add_argument("--seed", type=int, default=0, help="seed base")
    rate.add_argument("--strategies", default="2,4",
                      help="comma-separated strategy counts (subset of 2,3,4)")
    rate.add_argument("--bins", default="fit",
                      help="'fit', 'builtin', or a bin config path")
    rate.add_argument("--workers", type=int, default=1, help="parallel workers")
    rate.add_argument("--skip-uniqueness", action="store_true",
                      help="skip the solution-uniqueness check on ingest")
    rate.add_argument("--out", default=None, help="report file (default: stdout)")
    rate.add_argument("--emit-histograms", action="store_true",
                      help="write width-1 histogram CSV sidecars next to --out")

    solve = sub.add_parser("solve", help="solve a single puzzle")
    solve.add_argument("puzzle", help="81-character puzzle line, or @FILE")
    solve.add_argument("--method", default="nishio-heuristic",
                       choices=("strategies", "nishio-random", "nishio-heuristic", "sat"))
    solve.add_argument("--strategies", type=int, default=4, choices=(2, 3, 4),
                       help="strategy count for strategy-based methods")
    solve.add_argument("--seed", type=int, default=0, help="seed for nishio-random")
    solve.add_argument("--encoding", choices=("min", "max"), default="min",
                       help="encoding for --method sat")
    solve.add_argument("--trace", action="store_true",
                       help="print per-step solver events")

    encode = sub.add_parser("encode", help="export a puzzle as DIMACS CNF")
    encode.add_argument("puzzle", help="81-character puzzle line, or @FILE")
    group = encode.add_mutually_exclusive_group(required=True)
    group.add_argument("--min", action="store_true", help="candidate-pruned encoding")
    group.add_argument("--max", action="store_true", help="full encoding")
    encode.add_argument("--annotate", action="store_true",
                        help="add clause-kind comment lines")
    encode.add_argument("--out", default=None, help="output file (default: stdout)")

    bins = sub.add_parser("bins", help="fit equal-count bins from a value file")
    bins.add_argument("values", help="file with one numeric value per line")
    bins.add_argument("--metric", default="cycles", help="metric name for the output")
    bins.add_argument("--direction", choices=("ascending", "descending"),
                      default="ascending")

    corr = sub.add_parser("correlate", help="Spearman rho from a label/value CSV")
    corr.add_argument("csv", help="csv file with label and value columns")
    corr.add_argument("--label-col", default="label")
    corr.add_argument("--value-col", default="value")
    return parser


def _read_puzzle(arg: str):
    if arg.startswith("@"):
        text = Path(arg[1:]).read_text()
    elif arg == "-":
        text = sys.stdin.read()
    else:
        text = arg
    return parse_grid(text)


def _print_trace(event: str, cells, masks, detail: dict) -> None:
    if event.startswith("strategy:"):
        if detail["placements"] or detail["eliminations"]:
            print(
                f"  {event[9:]}: {detail['placements']} placed, "
                f"{detail['eliminations']} eliminated"
            )
    elif event == "guess":
        print(f"  guess digit {detail['digit']} at {detail['cell']}")
    elif event == "backtrack":
        print(f"  backtrack: rule out digit {detail['digit']} at {detail['cell']}")


def _cmd_rate(args) -> int:
    try:
        counts = tuple(int(part) for part in args.strategies.split(",") if part)
    except ValueError:
        print(f"bad --strategies value: {args.strategies}", file=sys.stderr)
        return 2
    try:
        config = RatingConfig(
            starts=args.starts,
            seed_base=args.seed,
            strategy_counts=counts,
            bin_source=args.bins,
            workers=args.workers,
        )
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    try:
        records, rejects = load_corpus(
            args.corpus, args.input_format, check_uniqueness=not args.skip_uniqueness
        )
    except EmptyCorpus as exc:
        print(str(exc), file=sys.stderr)
        for reject in exc.rejects:
            print(f"  line {reject.line_no}: {reject.reason}", file=sys.stderr)
        return 1
    except (OSError, ParseError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return 1

    report = rate_corpus(records, config)
    for reject in rejects:
        report.rejects.insert(
            0, {"index": reject.line_no, "reason": reject.reason, "id": reject.snippet}
        )
    report.metadata["reject_count"] = len(report.rejects)

    if args.out:
        with open(args.out, "w") as sink:
            emit_report(report, sink, args.format)
        if args.emit_histograms:
            for path in emit_histograms(report, args.out):
                print(f"wrote {path}", file=sys.stderr)
    else:
        emit_report(report, sys.stdout, args.format)
        if args.emit_histograms:
            print("--emit-histograms requires --out", file=sys.stderr)
            return 2
    for reject in rejects:
        print(f"rejected line {reject.line_no}: {reject.reason}", file=sys.stderr)
    return 1 if report.rejects else 0


def _cmd_solve(args) -> int:
    grid = _read_puzzle(args.puzzle)
    observer = _print_trace if args.trace else None
    if args.method == "strategies":
        result = solve_by_strategies(grid, args.strategies, observer)
        solved, cycles, final = result.solved, result.cycles, result.grid
        print(f"method=strategies({args.strategies}) solved={solved} cycles={cycles}")
    elif args.method == "sat":
        encoding = Encoding.MINIMUM if args.encoding == "min" else Encoding.MAXIMUM
        final = solve_grid_via_sat(grid, encoding)
        solved = True
        print(f"method=sat({args.encoding}) solved=True")
    else:
        if args.method == "nishio-random":
            run = randomized_nishio(grid, args.strategies, args.seed, observer)
            print(
                f"method=nishio-random({args.strategies}) seed={args.seed} "
                f"solved={run.solved} cycles={run.cycles} guesses={run.guesses}"
            )
        else:
            run = heuristic_nishio(grid, args.strategies, observer)
            print(
                f"method=nishio-heuristic({args.strategies}) "
                f"solved={run.solved} cycles={run.cycles} guesses={run.guesses}"
            )
        solved, final = run.solved, run.grid
    print(format_grid(final))
    if solved:
        print(render_grid(final))
    return 0 if solved else 1


def _cmd_encode(args) -> int:
    grid = _read_puzzle(args.puzzle)
    formula = encode_minimum(grid) if args.min else encode_maximum(grid)
    if args.min:
        try:
            clause_length_distribution(formula)
        except DegenerateDistribution as exc:
            print(f"warning: {exc}", file=sys.stderr)
    text = export_dimacs(formula, annotate=args.annotate)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bins(args) -> int:
    values = []
    for line in Path(args.values).read_text().splitlines():
        line = line.strip()
        if line:
            values.append(float(line))
    ranges = equal_count_bins(values, direction=args.direction)
    sys.stdout.write(dump_bin_config({args.metric: ranges}))
    return 0


def _cmd_correlate(args) -> int:
    labels, values = [], []
    with open(args.csv, newline="") as handle:
        for row in csv.DictReader(handle):
            labels.append(float(row[args.label_col]))
            values.append(float(row[args.value_col]))
    rho = spearman_rho(labels, values)
    print(f"spearman_rho = {rho:.4f}")
    return 0


_COMMANDS = {
    "rate": _cmd_rate,
    "solve": _cmd_solve,
    "encode": _cmd_encode,
    "bins": _cmd_bins,
    "correlate": _cmd_correlate,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, InvalidPuzzle, UnsatisfiablePuzzle, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
