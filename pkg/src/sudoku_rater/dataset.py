"""Corpus ingestion, batch rating orchestration, and report emission.

Input formats:
  lines  one 81-character puzzle per line, optionally followed by
         ",level" (rank indices are then assigned by order of first
         appearance of each level in the file);
  csv    header id,puzzle,website,level,rank.

Reports are deterministic for a fixed (corpus, config): per-puzzle seeds
derive from the configured seed base and the puzzle's position, never from
worker identity, so parallel and serial runs emit identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Optional, Sequence

from . import __version__
from .board import Grid, ParseError, InvalidPuzzle, parse_grid, render_grid
from .nishio import (
    RNG_ALGORITHM,
    CycleStats,
    NishioRun,
    UnsatisfiablePuzzle,
    heuristic_nishio,
    nishio_human_cycles,
)
from .rating import (
    BinRanges,
    LevelSummary,
    UndefinedCorrelation,
    classify_value,
    equal_count_bins,
    load_bin_config,
    spearman_rho,
    summarize_level,
)
from .sat import (
    ClauseLengthDistribution,
    EmptyCandidateCell,
    clause_length_distribution,
    count_solutions,
    encode_minimum,
)
from .strategies import solve_by_strategies

BUILTIN_BINS_RESOURCE = "universal-bins.cfg"

# spreads per-(puzzle, strategy-count) seed blocks far enough apart that
# 50-start ensembles never overlap, and keeps the 2- and 4-strategy
# experiments on independent seed streams
SEED_STRIDE = 1_000_003
SEED_SCHEME = "seed_base + (puzzle_index * 8 + strategy_count) * 1000003 + start_index"


class EmptyCorpus(ValueError):
    """No usable puzzle records were found."""

    def __init__(self, message: str, rejects: Optional[list] = None):
        super().__init__(message)
        self.rejects = rejects or []


@dataclass(frozen=True)
class PuzzleRecord:
    id: str
    grid: Grid
    website: Optional[str] = None
    level: Optional[str] = None
    rank_index: Optional[int] = None

    def __post_init__(self):
        if (self.level is None) != (self.rank_index is None):
            raise ValueError("rank_index must be present exactly when level is")


@dataclass(frozen=True)
class RejectedRecord:
    line_no: int
    reason: str
    snippet: str


@dataclass(frozen=True)
class PuzzleMetrics:
    cycles: dict[int, CycleStats]  # strategy count -> randomized ensemble
    heuristic: dict[int, NishioRun]
    clause_lengths: ClauseLengthDistribution
    solved_by: dict[int, bool]  # k in {2, 3, 4}

    @property
    def short_clause_pct(self) -> float:
        return self.clause_lengths.short_pct


@dataclass
class RatingConfig:
    starts: int = 50
    seed_base: int = 0
    strategy_counts: tuple[int, ...] = (2, 4)
    bin_source: str = "fit"  # "fit", "builtin", or a config file path
    workers: int = 1

    def __post_init__(self):
        self.strategy_counts = tuple(sorted(set(self.strategy_counts)))
        if not self.strategy_counts:
            raise ValueError("need at least one strategy count")
        for k in self.strategy_counts:
            if k not in (2, 3, 4):
                raise ValueError(f"strategy counts must be in {{2, 3, 4}}, got {k}")
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class RatingReport:
    metadata: dict
    bins: dict[str, BinRanges]
    puzzles: list[dict]
    levels: list[dict]
    correlations: dict
    rejects: list[dict] = field(default_factory=list)


def _parse_lines(text: str):
    level_order: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        puzzle, _, label = line.partition(",")
        level = label.strip() or None
        rank = None
        if level is not None:
            rank = level_order.setdefault(level, len(level_order) + 1)
        yield line_no, f"p{line_no:04d}", puzzle.strip(), None, level, rank


def _parse_csv(text: str):
    reader = csv.DictReader(io.StringIO(text))
    required = {"id", "puzzle"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ParseError("csv corpus needs at least the columns: id, puzzle")
    for line_no, row in enumerate(reader, start=2):
        level = (row.get("level") or "").strip() or None
        rank_text = (row.get("rank") or "").strip() or None
        rank = None
        if rank_text is not None:
            try:
                rank = int(rank_text)
            except ValueError:
                yield line_no, row["id"], None, None, None, None
                continue
        website = (row.get("website") or "").strip() or None
        yield line_no, row["id"], (row.get("puzzle") or "").strip(), website, level, rank


def load_corpus(
    path, fmt: Optional[str] = None, check_uniqueness: bool = True
) -> tuple[list[PuzzleRecord], list[RejectedRecord]]:
    """Parse, validate, and (optionally) uniqueness-check a puzzle file.

    Per-record failures land in the rejects list with their line numbers;
    raises EmptyCorpus when nothing usable remains.
    """
    path = Path(path)
    text = path.read_text()
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "lines"
    if fmt not in ("lines", "csv"):
        raise ValueError(f"unknown corpus format {fmt!r}")

    records: list[PuzzleRecord] = []
    rejects: list[RejectedRecord] = []
    rows = _parse_csv(text) if fmt == "csv" else _parse_lines(text)
    for line_no, rec_id, puzzle, website, level, rank in rows:
        if puzzle is None:
            rejects.append(RejectedRecord(line_no, "bad rank value", rec_id))
            continue
        try:
            grid = parse_grid(puzzle)
        except (ParseError, InvalidPuzzle) as exc:
            rejects.append(RejectedRecord(line_no, str(exc), puzzle[:20]))
            continue
        if check_uniqueness:
            try:
                n = count_solutions(encode_minimum(grid), cap=2)
            except EmptyCandidateCell:
                n = 0
            if n == 0:
                rejects.append(RejectedRecord(line_no, "UnsatisfiablePuzzle", puzzle[:20]))
                continue
            if n > 1:
                rejects.append(RejectedRecord(line_no, "NonUniqueSolution", puzzle[:20]))
                continue
        if level is not None and rank is None:
            rejects.append(RejectedRecord(line_no, "level without rank", puzzle[:20]))
            continue
        records.append(PuzzleRecord(rec_id, grid, website, level, rank))

    if not records:
        raise EmptyCorpus(f"no usable puzzles in {path}", rejects)
    return records, rejects


def _seed_base_for(config: RatingConfig, puzzle_index: int, strategy_count: int) -> int:
    return config.seed_base + (puzzle_index * 8 + strategy_count) * SEED_STRIDE


def _rate_one(args) -> tuple[int, Optional[PuzzleMetrics], Optional[str]]:
    index, record, config = args
    try:
        cycles = {
            k: nishio_human_cycles(
                record.grid, k, config.starts, _seed_base_for(config, index, k)
            )
            for k in config.strategy_counts
        }
        heuristic = {k: heuristic_nishio(record.grid, k) for k in config.strategy_counts}
        dist = clause_length_distribution(encode_minimum(record.grid))
        solved = {k: solve_by_strategies(record.grid, k).solved for k in (2, 3, 4)}
        return index, PuzzleMetrics(cycles, heuristic, dist, solved), None
    except (UnsatisfiablePuzzle, EmptyCandidateCell, InvalidPuzzle) as exc:
        return index, None, f"{type(exc).__name__}: {exc}"


def compute_metrics(
    records: Sequence[PuzzleRecord], config: RatingConfig
) -> tuple[list[tuple[PuzzleRecord, PuzzleMetrics]], list[RejectedRecord]]:
    """Per-puzzle metrics for every record, optionally fanned out over
    worker processes; result order follows the input order either way."""
    tasks = [(i, record, config) for i, record in enumerate(records)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_rate_one, tasks, chunksize=4))
    else:
        results = [_rate_one(task) for task in tasks]
    results.sort(key=lambda item: item[0])

    rated: list[tuple[PuzzleRecord, PuzzleMetrics]] = []
    rejects: list[RejectedRecord] = []
    for index, metrics, error in results:
        if metrics is None:
            rejects.append(RejectedRecord(index, error or "rating failed", records[index].id))
        else:
            rated.append((records[index], metrics))
    return rated, rejects


def resolve_bins(
    bin_source: str, cycle_values: Sequence[float], clause_values: Sequence[float]
) -> dict[str, BinRanges]:
    """Fit bins on the corpus or load them from a config source."""
    if bin_source == "fit":
        return {
            "cycles": equal_count_bins(cycle_values, direction="ascending"),
            "short_clause_pct": equal_count_bins(clause_values, direction="descending"),
        }
    if bin_source == "builtin":
        text = resources.files(__package__).joinpath(BUILTIN_BINS_RESOURCE).read_text()
    else:
        text = Path(bin_source).read_text()
    bins = load_bin_config(text)
    missing = {"cycles", "short_clause_pct"} - set(bins)
    if missing:
        raise ValueError(f"bin config missing metrics: {sorted(missing)}")
    return bins


def rate_corpus(records: Sequence[PuzzleRecord], config: RatingConfig) -> RatingReport:
    """Run the full pipeline: metrics, bins, categories, level summaries,
    and rank correlations where difficulty labels exist."""
    if not records:
        raise EmptyCorpus("no records to rate")
    rated, rejects = compute_metrics(records, config)
    if not rated:
        raise EmptyCorpus("every record failed metric computation", list(rejects))

    classify_count = max(config.strategy_counts)
    cycle_values = [m.cycles[classify_count].mean for _, m in rated]
    clause_values = [m.short_clause_pct for _, m in rated]
    bins = resolve_bins(config.bin_source, cycle_values, clause_values)

    puzzles = [
        _puzzle_row(record, metrics, bins, classify_count) for record, metrics in rated
    ]

    levels: list[dict] = []
    by_level: dict[tuple, list[tuple[PuzzleRecord, PuzzleMetrics]]] = {}
    for record, metrics in rated:
        if record.level is not None:
            key = (record.website or "", record.rank_index, record.level)
            by_level.setdefault(key, []).append((record, metrics))
    for (website, rank, level), group in sorted(by_level.items()):
        summary = summarize_level(
            website=website or None,
            level=level,
            rank_index=rank,
            cycles={
                k: [m.cycles[k].mean for _, m in group] for k in config.strategy_counts
            },
            heuristic_cycles={
                k: [m.heuristic[k].cycles for _, m in group]
                for k in config.strategy_counts
            },
            short_clause_pcts=[m.short_clause_pct for _, m in group],
            solved_by={k: [m.solved_by[k] for _, m in group] for k in (2, 3, 4)},
            cycle_bins=bins["cycles"],
            clause_bins=bins["short_clause_pct"],
            classify_count=classify_count,
        )
        levels.append(_level_row(summary, config.strategy_counts))

    correlations = _correlations(rated, config.strategy_counts, classify_count)

    metadata = {
        "toolkit_version": __version__,
        "rng": RNG_ALGORITHM,
        "seed_base": config.seed_base,
        "seed_scheme": SEED_SCHEME,
        "starts": config.starts,
        "strategy_counts": list(config.strategy_counts),
        "bin_source": config.bin_source,
        "classify_strategy_count": classify_count,
        "puzzle_count": len(records),
        "rated_count": len(rated),
        "reject_count": len(rejects),
    }
    return RatingReport(
        metadata=metadata,
        bins=bins,
        puzzles=puzzles,
        levels=levels,
        correlations=correlations,
        rejects=[
            {"index": r.line_no, "reason": r.reason, "id": r.snippet} for r in rejects
        ],
    )


def _correlations(rated, strategy_counts, classify_count) -> dict:
    groups: dict[str, list[tuple[PuzzleRecord, PuzzleMetrics]]] = {}
    for record, metrics in rated:
        if record.rank_index is not None:
            groups.setdefault(record.website or "", []).append((record, metrics))
    correlations: dict = {}
    for website, group in sorted(groups.items()):
        labels = [record.rank_index for record, _ in group]
        columns = {"short_clause_pct": [m.short_clause_pct for _, m in group]}
        for k in strategy_counts:
            columns[f"cycles_{k}"] = [m.cycles[k].mean for _, m in group]
        site: dict[str, Optional[float]] = {}
        for name, values in columns.items():
            try:
                site[name] = spearman_rho(labels, values)
            except (UndefinedCorrelation, ValueError):
                site[name] = None
        correlations[website or "(unlabeled)"] = site
    return correlations


_ROUND_KEYS = "rounded"
_PRECISE_KEYS = "precise"


def _num(value: float) -> dict:
    """Table value rounded to two decimals, full precision alongside."""
    return {_ROUND_KEYS: round(value, 2), _PRECISE_KEYS: float(value)}


def _puzzle_row(record, metrics, bins, classify_count) -> dict:
    cycles_value = metrics.cycles[classify_count].mean
    row = {
        "id": record.id,
        "puzzle": render_grid(record.grid),
        "website": record.website,
        "level": record.level,
        "rank": record.rank_index,
    }
    for k, stats in sorted(metrics.cycles.items()):
        row[f"cycles_{k}_mean"] = _num(stats.mean)
        row[f"cycles_{k}_median"] = _num(stats.median)
    for k, run in sorted(metrics.heuristic.items()):
        row[f"heuristic_cycles_{k}"] = run.cycles
    row["short_clause_pct"] = _num(metrics.short_clause_pct)
    for k in (2, 3, 4):
        row[f"solved_by_{k}"] = metrics.solved_by[k]
    row["cycles_category"] = classify_value(cycles_value, bins["cycles"]).label
    row["clause_category"] = classify_value(
        metrics.short_clause_pct, bins["short_clause_pct"]
    ).label
    return row


def _level_row(summary: LevelSummary, strategy_counts) -> dict:
    row = {
        "website": summary.website,
        "level": summary.level,
        "rank": summary.rank_index,
        "size": summary.size,
    }
    for k in strategy_counts:
        row[f"cycles_{k}_mean"] = _num(summary.mean_cycles[k])
        row[f"cycles_{k}_median"] = _num(summary.median_cycles[k])
        row[f"heuristic_cycles_{k}_mean"] = _num(summary.heuristic_mean_cycles[k])
        row[f"heuristic_cycles_{k}_median"] = _num(summary.heuristic_median_cycles[k])
    row["short_clause_pct_mean"] = _num(summary.mean_short_clause_pct)
    row["short_clause_pct_median"] = _num(summary.median_short_clause_pct)
    for k in (2, 3, 4):
        row[f"pct_solved_by_{k}"] = _num(summary.pct_solved_by[k])
    for name, category in summary.categories.items():
        row[f"category_{name}"] = category.label
    for k, skewed in sorted(summary.skewed_right.items()):
        row[f"skewed_right_{k}"] = skewed
    return row


def _bins_obj(bins: dict[str, BinRanges]) -> dict:
    obj = {}
    for metric, b in bins.items():
        obj[metric] = {
            "direction": b.direction,
            "intervals": {
                cat.label: [start, end] for cat, (start, end) in b.intervals().items()
            },
        }
    return obj


def report_to_obj(report: RatingReport) -> dict:
    return {
        "metadata": report.metadata,
        "bins": _bins_obj(report.bins),
        "puzzles": report.puzzles,
        "levels": report.levels,
        "correlations": report.correlations,
        "rejects": report.rejects,
    }


def _flatten(row: dict) -> dict:
    flat = {}
    for key, value in row.items():
        if isinstance(value, dict) and set(value) == {_ROUND_KEYS, _PRECISE_KEYS}:
            flat[key] = value[_ROUND_KEYS]
            flat[f"{key}_precise"] = repr(value[_PRECISE_KEYS])
        else:
            flat[key] = value
    return flat


def emit_report(report: RatingReport, sink: IO[str], fmt: str = "json") -> None:
    """Serialize the report with stable field order; csv output is emitted
    in sections separated by '# <name>' marker lines."""
    if fmt == "json":
        json.dump(report_to_obj(report), sink, indent=2)
        sink.write("\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")

    def write_section(name: str, rows: list[dict]):
        sink.write(f"# {name}\n")
        if not rows:
            return
        flat_rows = [_flatten(row) for row in rows]
        writer = csv.DictWriter(sink, fieldnames=list(flat_rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat_rows)

    meta_rows = [{"key": k, "value": json.dumps(v)} for k, v in report.metadata.items()]
    bins_rows = [
        {
            "metric": metric,
            "direction": info["direction"],
            **{
                label.split()[-1].lower(): json.dumps(iv)
                for label, iv in info["intervals"].items()
            },
        }
        for metric, info in _bins_obj(report.bins).items()
    ]
    corr_rows = [
        {"website": site, "metric": metric, "rho": "" if rho is None else repr(rho)}
        for site, cols in report.correlations.items()
        for metric, rho in cols.items()
    ]
    write_section("metadata", meta_rows)
    write_section("bins", bins_rows)
    write_section("puzzles", report.puzzles)
    write_section("levels", report.levels)
    write_section("correlations", corr_rows)
    write_section("rejects", report.rejects)


def emit_histograms(report: RatingReport, base_path) -> list[Path]:
    """Write per-metric histogram CSVs: cycle counts in width-1 bins and
    short-clause percentages in one-percentage-point bins."""
    base = Path(base_path)
    classify_count = report.metadata["classify_strategy_count"]
    cycles = [row[f"cycles_{classify_count}_mean"][_PRECISE_KEYS] for row in report.puzzles]
    shorts = [row["short_clause_pct"][_PRECISE_KEYS] for row in report.puzzles]
    paths = []
    for suffix, values in (("cycles", cycles), ("short-clause", shorts)):
        path = base.with_name(base.name + f".hist-{suffix}.csv")
        lo = int(min(values))
        hi = int(max(values)) + 1
        counts = dict.fromkeys(range(lo, hi), 0)
        for v in values:
            counts[min(int(v), hi - 1)] += 1
        with open(path, "w") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["bin_start", "bin_end", "count"])
            for start, count in counts.items():
                writer.writerow([start, start + 1, count])
        paths.append(path)
    return paths
