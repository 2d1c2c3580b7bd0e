"""Difficulty metrics aggregated into a universal three-bin rating.

The classifier is an unsupervised equal-count binning over one metric axis:
cycle counts ascend with difficulty, short-clause percentages descend.  Bin
boundaries are the 1/3 and 2/3 empirical quantiles; a value equal to a
boundary belongs to the harder bin, and values outside the fitted range
clamp to the nearest extreme category.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Sequence

from .board import Grid
from .strategies import solve_by_strategies


class DegenerateBinning(ValueError):
    """Too few distinct values to place three equal-count bins."""


class UndefinedCorrelation(ValueError):
    """A rank vector has zero variance; the correlation does not exist."""


class UniversalCategory(IntEnum):
    EASY = 1
    MEDIUM = 2
    HARD = 3

    @property
    def label(self) -> str:
        return f"Universal {self.name.capitalize()}"


ASCENDING = "ascending"
DESCENDING = "descending"


@dataclass(frozen=True)
class BinRanges:
    """Three half-open intervals over one metric axis.

    Edges are stored in numeric order (lo <= inner_low <= inner_high <= hi).
    With an ascending axis the easy bin sits at the low end; with a
    descending axis (short-clause percentage) it sits at the high end.
    """

    lo: float
    inner_low: float
    inner_high: float
    hi: float
    direction: str = ASCENDING

    def __post_init__(self):
        if self.direction not in (ASCENDING, DESCENDING):
            raise ValueError(f"unknown direction {self.direction!r}")
        if not self.lo <= self.inner_low <= self.inner_high <= self.hi:
            raise ValueError("bin edges must be in numeric order")

    def intervals(self) -> dict[UniversalCategory, tuple[float, float]]:
        """Category -> (start, end) along the axis direction."""
        if self.direction == ASCENDING:
            return {
                UniversalCategory.EASY: (self.lo, self.inner_low),
                UniversalCategory.MEDIUM: (self.inner_low, self.inner_high),
                UniversalCategory.HARD: (self.inner_high, self.hi),
            }
        return {
            UniversalCategory.EASY: (self.hi, self.inner_high),
            UniversalCategory.MEDIUM: (self.inner_high, self.inner_low),
            UniversalCategory.HARD: (self.inner_low, self.lo),
        }


def equal_count_bins(
    values: Sequence[float], bins: int = 3, direction: str = ASCENDING
) -> BinRanges:
    """Fit three equal-count bins; boundaries are observed values at the
    1/3 and 2/3 quantiles, with boundary ties going to the harder bin."""
    if bins != 3:
        raise ValueError("only three bins are supported")
    if not values:
        raise ValueError("cannot bin an empty value list")
    if len(set(values)) < 3:
        raise DegenerateBinning("need at least 3 distinct values")

    ordered = sorted(values)
    if direction == DESCENDING:
        mirrored = equal_count_bins([-v for v in values], bins, ASCENDING)
        return BinRanges(
            ordered[0], -mirrored.inner_high, -mirrored.inner_low, ordered[-1], DESCENDING
        )

    n = len(ordered)
    boundaries = []
    for frac in (1, 2):
        need = math.ceil(frac * n / 3)
        boundary = None
        for j in range(need, n):
            if ordered[j] > ordered[need - 1]:
                boundary = ordered[j]
                break
        if boundary is None:
            raise DegenerateBinning(
                "values are too heavily tied to place equal-count boundaries"
            )
        boundaries.append(boundary)
    b1, b2 = boundaries
    return BinRanges(ordered[0], b1, b2, ordered[-1], ASCENDING)


def classify_value(value: float, bins: BinRanges) -> UniversalCategory:
    """Interval membership along the axis; out-of-range values clamp."""
    if bins.direction == ASCENDING:
        if value < bins.inner_low:
            return UniversalCategory.EASY
        if value < bins.inner_high:
            return UniversalCategory.MEDIUM
        return UniversalCategory.HARD
    if value > bins.inner_high:
        return UniversalCategory.EASY
    if value > bins.inner_low:
        return UniversalCategory.MEDIUM
    return UniversalCategory.HARD


def classify_level(
    values: Sequence[float], bins: BinRanges
) -> tuple[UniversalCategory, UniversalCategory]:
    """Classify a difficulty level by its mean and, separately, its median."""
    if not values:
        raise ValueError("cannot classify an empty level")
    return (
        classify_value(statistics.fmean(values), bins),
        classify_value(float(statistics.median(values)), bins),
    )


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman_rho(labels: Sequence[float], metric: Sequence[float]) -> float:
    """Spearman rank correlation with average-rank tie handling, computed
    as the Pearson correlation of the two rank vectors."""
    if len(labels) != len(metric):
        raise ValueError("label and metric vectors must have equal length")
    if len(labels) < 2:
        raise ValueError("need at least two observations")
    rx = _average_ranks(labels)
    ry = _average_ranks(metric)
    mx = statistics.fmean(rx)
    my = statistics.fmean(ry)
    sxy = sxx = syy = 0.0
    for a, b in zip(rx, ry):
        dx = a - mx
        dy = b - my
        sxy += dx * dy
        sxx += dx * dx
        syy += dy * dy
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("a rank vector has zero variance")
    return sxy / math.sqrt(sxx * syy)


def percent_solved_by_strategies(puzzles: Sequence[Grid], strategy_count: int) -> float:
    """Share of puzzles (in percent) the strategies alone can finish."""
    if not puzzles:
        raise ValueError("cannot rate an empty puzzle list")
    solved = sum(1 for g in puzzles if solve_by_strategies(g, strategy_count).solved)
    return 100.0 * solved / len(puzzles)


@dataclass(frozen=True)
class LevelSummary:
    """Aggregates for one (website, level) group of rated puzzles."""

    website: Optional[str]
    level: str
    rank_index: int
    size: int
    mean_cycles: dict[int, float]  # strategy count -> mean of per-puzzle means
    median_cycles: dict[int, float]
    heuristic_mean_cycles: dict[int, float]
    heuristic_median_cycles: dict[int, float]
    mean_short_clause_pct: float
    median_short_clause_pct: float
    pct_solved_by: dict[int, float]  # k in {2, 3, 4} -> percent
    categories: dict[str, UniversalCategory] = field(default_factory=dict)
    skewed_right: dict[int, bool] = field(default_factory=dict)  # mean > median


def summarize_level(
    website: Optional[str],
    level: str,
    rank_index: int,
    cycles: dict[int, Sequence[float]],
    heuristic_cycles: dict[int, Sequence[float]],
    short_clause_pcts: Sequence[float],
    solved_by: dict[int, Sequence[bool]],
    cycle_bins: Optional[BinRanges] = None,
    clause_bins: Optional[BinRanges] = None,
    classify_count: Optional[int] = None,
) -> LevelSummary:
    """Aggregate per-puzzle metric values for one difficulty level."""
    sizes = {len(v) for v in cycles.values()} | {len(short_clause_pcts)}
    if len(sizes) != 1 or not short_clause_pcts:
        raise ValueError("level metric vectors must be nonempty and equal-length")
    size = len(short_clause_pcts)

    mean_cycles = {k: statistics.fmean(v) for k, v in cycles.items()}
    median_cycles = {k: float(statistics.median(v)) for k, v in cycles.items()}
    heur_mean = {k: statistics.fmean(v) for k, v in heuristic_cycles.items()}
    heur_median = {k: float(statistics.median(v)) for k, v in heuristic_cycles.items()}
    pct = {k: 100.0 * sum(flags) / len(flags) for k, flags in solved_by.items()}

    categories: dict[str, UniversalCategory] = {}
    if classify_count is None and cycles:
        classify_count = max(cycles)
    if cycle_bins is not None and classify_count in cycles:
        categories["cycles_mean"] = classify_value(mean_cycles[classify_count], cycle_bins)
        categories["cycles_median"] = classify_value(
            median_cycles[classify_count], cycle_bins
        )
    mean_short = statistics.fmean(short_clause_pcts)
    median_short = float(statistics.median(short_clause_pcts))
    if clause_bins is not None:
        categories["short_clause_mean"] = classify_value(mean_short, clause_bins)
        categories["short_clause_median"] = classify_value(median_short, clause_bins)

    return LevelSummary(
        website=website,
        level=level,
        rank_index=rank_index,
        size=size,
        mean_cycles=mean_cycles,
        median_cycles=median_cycles,
        heuristic_mean_cycles=heur_mean,
        heuristic_median_cycles=heur_median,
        mean_short_clause_pct=mean_short,
        median_short_clause_pct=median_short,
        pct_solved_by=pct,
        categories=categories,
        skewed_right={k: mean_cycles[k] > median_cycles[k] for k in mean_cycles},
    )


def load_bin_config(text: str) -> dict[str, BinRanges]:
    """Parse a key/value bin-range config.

    Expected lines per metric:
        <metric>.direction = ascending|descending
        <metric>.easy = <start> <end>
        <metric>.medium = <start> <end>
        <metric>.hard = <start> <end>
    Interval endpoints are given along the axis direction.
    """
    raw: dict[str, dict[str, object]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line or "." not in line.split("=", 1)[0]:
            raise ValueError(f"bad bin config line {lineno}: {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        metric, attr = key.rsplit(".", 1)
        entry = raw.setdefault(metric, {})
        if attr == "direction":
            entry[attr] = value
        elif attr in ("easy", "medium", "hard"):
            parts = value.split()
            if len(parts) != 2:
                raise ValueError(f"bad interval on bin config line {lineno}: {raw_line!r}")
            entry[attr] = (float(parts[0]), float(parts[1]))
        else:
            raise ValueError(f"unknown bin config key {key!r} on line {lineno}")

    result: dict[str, BinRanges] = {}
    for metric, entry in raw.items():
        missing = {"direction", "easy", "medium", "hard"} - set(entry)
        if missing:
            raise ValueError(f"bin config for {metric!r} missing {sorted(missing)}")
        direction = entry["direction"]
        easy, medium, hard = entry["easy"], entry["medium"], entry["hard"]
        if direction == ASCENDING:
            edges = (easy[0], medium[0], hard[0], hard[1])
        else:
            edges = (hard[1], hard[0], medium[0], easy[0])
        result[metric] = BinRanges(*edges, direction=direction)
    return result


def dump_bin_config(bins: dict[str, BinRanges]) -> str:
    """Render bin ranges in the config format accepted by load_bin_config."""
    lines = []
    for metric, b in bins.items():
        lines.append(f"{metric}.direction = {b.direction}")
        for category, (start, end) in b.intervals().items():
            lines.append(f"{metric}.{category.name.lower()} = {start:g} {end:g}")
    return "\n".join(lines) + "\n"
