"""Trial-and-error solving: assume a candidate, propagate, backtrack.

Both solvers interleave the human strategies with a depth-first guess
stack.  Strategy cycles run to fixpoint before every guess; a cycle is one
ordered pass of the enabled strategies, and the count accumulates across
failed branches.  The randomized variant picks guesses uniformly at random
from an explicit seed; the heuristic variant picks the cell with the fewest
candidates (ties broken by candidate-occurrence sums, then position) and
assumes its most frequently occurring candidate first.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass
from typing import Optional

from .board import CandidateGrid, Grid, MASK_DIGITS, _compute_masks, _place
from .strategies import Observer, _check_strategy_count, _run_cycle

RNG_ALGORITHM = "python-random-mt19937"


class UnsatisfiablePuzzle(ValueError):
    """The guess tree was exhausted: the puzzle has no solution."""


@dataclass(frozen=True)
class NishioRun:
    """Outcome of one simulated solve."""

    solved: bool
    cycles: int
    seed: Optional[int]
    strategy_count: int
    guesses: int
    grid: Grid


@dataclass(frozen=True)
class CycleStats:
    mean: float
    median: float
    runs: tuple[NishioRun, ...]


class _Frame:
    """Saved state for one open guess."""

    __slots__ = ("cells", "masks", "filled", "index", "digit")

    def __init__(self, cells, masks, filled, index, digit):
        self.cells = cells
        self.masks = masks
        self.filled = filled
        self.index = index
        self.digit = digit


_OPEN, _SOLVED, _CONTRADICTED = 0, 1, 2


def _initial_status(cells, masks, filled):
    if filled == 81:
        return _SOLVED
    for i in range(81):
        if not cells[i] and not masks[i]:
            return _CONTRADICTED
    return _OPEN


def _nishio(grid, strategy_count, chooser, seed, observer):
    _check_strategy_count(strategy_count)
    cells = list(grid.cells)
    masks = _compute_masks(cells)
    filled = 81 - cells.count(0)
    stack: list[_Frame] = []
    cycles = 0
    guesses = 0
    status = _initial_status(cells, masks, filled)

    while True:
        while status == _OPEN:
            p, e, contra = _run_cycle(cells, masks, strategy_count, observer)
            cycles += 1
            filled += p
            if contra:
                status = _CONTRADICTED
            elif filled == 81:
                status = _SOLVED
            elif p + e == 0:
                break

        if status == _SOLVED:
            solved_grid = Grid.__new__(Grid)
            solved_grid.cells = cells
            solved_grid.given = list(grid.given)
            return NishioRun(True, cycles, seed, strategy_count, guesses, solved_grid)

        if status == _CONTRADICTED:
            # Pop the most recent guess, restore its saved state, and rule
            # the guessed digit out.  An exhausted cell contradicts the
            # parent level, so keep popping.
            while True:
                if not stack:
                    raise UnsatisfiablePuzzle("guess tree exhausted; puzzle has no solution")
                frame = stack.pop()
                cells = frame.cells
                masks = frame.masks
                filled = frame.filled
                masks[frame.index] &= ~(1 << (frame.digit - 1))
                if observer is not None:
                    observer(
                        "backtrack",
                        cells,
                        masks,
                        {
                            "cell": (frame.index // 9 + 1, frame.index % 9 + 1),
                            "digit": frame.digit,
                        },
                    )
                if masks[frame.index]:
                    break
            status = _OPEN
            continue

        # Open but stuck: guess.
        index, digit = chooser(cells, masks)
        if observer is not None:
            observer(
                "guess",
                cells,
                masks,
                {"cell": (index // 9 + 1, index % 9 + 1), "digit": digit},
            )
        stack.append(_Frame(list(cells), list(masks), filled, index, digit))
        guesses += 1
        _, contra = _place(cells, masks, index, digit)
        filled += 1
        status = _CONTRADICTED if contra else _OPEN


def randomized_nishio(
    grid: Grid,
    strategy_count: int,
    seed: int,
    observer: Optional[Observer] = None,
) -> NishioRun:
    """Solve with uniformly random guesses; deterministic for a fixed seed."""
    rng = random.Random(seed)

    def chooser(cells, masks):
        empties = [i for i in range(81) if not cells[i]]
        index = rng.choice(empties)
        return index, rng.choice(MASK_DIGITS[masks[index]])

    return _nishio(grid, strategy_count, chooser, seed, observer)


def candidate_occurrence_counts(candidates: CandidateGrid) -> dict[int, int]:
    """How many empty cells hold each digit as a candidate."""
    counts = dict.fromkeys(range(1, 10), 0)
    for m in candidates.masks:
        for d in MASK_DIGITS[m]:
            counts[d] += 1
    return counts


def _heuristic_choice(cells, masks):
    occ = [0] * 10
    for i in range(81):
        if not cells[i]:
            for d in MASK_DIGITS[masks[i]]:
                occ[d] += 1
    best = -1
    best_key = (10, 0)
    for i in range(81):
        if cells[i]:
            continue
        digits = MASK_DIGITS[masks[i]]
        key = (len(digits), -sum(occ[d] for d in digits))
        if key < best_key:
            best = i
            best_key = key
    digit = max(MASK_DIGITS[masks[best]], key=lambda d: (occ[d], -d))
    return best, digit


def heuristic_nishio(
    grid: Grid,
    strategy_count: int,
    observer: Optional[Observer] = None,
) -> NishioRun:
    """Deterministic Nishio: fewest-candidates cell first, most frequent
    candidate first; occurrence counts are recomputed at every guess."""
    return _nishio(grid, strategy_count, _heuristic_choice, None, observer)


def nishio_human_cycles(
    grid: Grid,
    strategy_count: int,
    starts: int = 50,
    seed_base: int = 0,
) -> CycleStats:
    """Mean and median cycle counts over `starts` seeded random solves."""
    if starts < 1:
        raise ValueError("starts must be at least 1")
    runs = tuple(
        randomized_nishio(grid, strategy_count, seed_base + i) for i in range(starts)
    )
    values = [run.cycles for run in runs]
    return CycleStats(statistics.fmean(values), float(statistics.median(values)), runs)
