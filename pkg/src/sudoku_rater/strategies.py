"""The four human strategies and their fixed-order application cycle.

Strategies are pure state transformers over (Grid, CandidateGrid).  Each one
runs its own internal fixpoint: it is re-applied until it stops making
progress, before control moves to the next strategy in rank order
(naked singles < hidden singles < naked twins < x-wing).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Optional

from .board import (
    CandidateGrid,
    Grid,
    GridStatus,
    MASK_DIGITS,
    ROWS,
    COLS,
    UNITS,
    _compute_masks,
    _place,
)


class StrategyId(IntEnum):
    """The four strategies in increasing order of difficulty."""

    NAKED_SINGLES = 1
    HIDDEN_SINGLES = 2
    NAKED_TWINS = 3
    X_WING = 4


STRATEGY_ORDER = (
    StrategyId.NAKED_SINGLES,
    StrategyId.HIDDEN_SINGLES,
    StrategyId.NAKED_TWINS,
    StrategyId.X_WING,
)

# observer callback: (event, cells, masks, detail) with event one of
# "strategy:<name>", "guess", "backtrack"; used for tracing and audits.
# cells/masks are the solver's live working lists: treat them as read-only
# and copy anything kept beyond the callback.
Observer = Callable[[str, list, list, dict], None]


@dataclass(frozen=True)
class StrategyOutcome:
    placements: int
    eliminations: int

    @property
    def progressed(self) -> bool:
        return self.placements + self.eliminations > 0


@dataclass(frozen=True)
class StrategySolveResult:
    grid: Grid
    candidates: CandidateGrid
    solved: bool
    cycles: int


def _naked_singles(cells, masks):
    """Fill every cell whose candidate set is a singleton, to fixpoint."""
    placements = eliminations = 0
    again = True
    while again:
        again = False
        for i in range(81):
            if not cells[i]:
                m = masks[i]
                if m and not m & (m - 1):
                    elim, contra = _place(cells, masks, i, m.bit_length())
                    placements += 1
                    eliminations += elim
                    if contra:
                        return placements, eliminations, True
                    again = True
    return placements, eliminations, False


def _hidden_singles(cells, masks):
    """Place digits that appear as a candidate in only one cell of a unit."""
    placements = eliminations = 0
    again = True
    while again:
        again = False
        for unit in UNITS:
            once = 0
            multi = 0
            for i in unit:
                m = masks[i]
                multi |= once & m
                once |= m
            single = once & ~multi
            if not single:
                continue
            for d in MASK_DIGITS[single]:
                bit = 1 << (d - 1)
                spot = -1
                for i in unit:
                    if masks[i] & bit:
                        if spot >= 0:
                            spot = -1  # earlier placement reshaped the unit
                            break
                        spot = i
                if spot >= 0:
                    elim, contra = _place(cells, masks, spot, d)
                    placements += 1
                    eliminations += elim
                    if contra:
                        return placements, eliminations, True
                    again = True
    return placements, eliminations, False


def _naked_twins(cells, masks):
    """Strip twin-pair digits from the other cells of each sharing unit."""
    eliminations = 0
    again = True
    while again:
        again = False
        for unit in UNITS:
            pairs: dict[int, list[int]] = {}
            for i in unit:
                m = masks[i]
                if m and m.bit_count() == 2:
                    pairs.setdefault(m, []).append(i)
            for pair_mask, spots in pairs.items():
                if len(spots) != 2:
                    continue  # three or more sharers is not a twin
                a, b = spots
                for i in unit:
                    if i != a and i != b:
                        hit = masks[i] & pair_mask
                        if hit:
                            m = masks[i] & ~pair_mask
                            masks[i] = m
                            eliminations += hit.bit_count()
                            again = True
                            if not m:
                                return 0, eliminations, True
    return 0, eliminations, False


def _x_wing(cells, masks):
    """Row- and column-based X-wing eliminations for every digit."""
    eliminations = 0
    again = True
    while again:
        again = False
        for d in range(1, 10):
            bit = 1 << (d - 1)
            for lines, cross in ((ROWS, COLS), (COLS, ROWS)):
                twos = []
                for li, line in enumerate(lines):
                    spots = [k for k, i in enumerate(line) if masks[i] & bit]
                    if len(spots) == 2:
                        twos.append((li, spots[0], spots[1]))
                for a in range(len(twos)):
                    la, p, q = twos[a]
                    for b in range(a + 1, len(twos)):
                        lb, p2, q2 = twos[b]
                        if p != p2 or q != q2:
                            continue
                        for k in (p, q):
                            for li, i in enumerate(cross[k]):
                                if li != la and li != lb and masks[i] & bit:
                                    m = masks[i] & ~bit
                                    masks[i] = m
                                    eliminations += 1
                                    again = True
                                    if not m:
                                        return 0, eliminations, True
    return 0, eliminations, False


_STRATEGY_FUNCS = {
    StrategyId.NAKED_SINGLES: _naked_singles,
    StrategyId.HIDDEN_SINGLES: _hidden_singles,
    StrategyId.NAKED_TWINS: _naked_twins,
    StrategyId.X_WING: _x_wing,
}


def _run_strategy(func, grid, candidates):
    new_grid = grid.copy()
    new_cands = candidates.copy()
    placements, eliminations, _ = func(new_grid.cells, new_cands.masks)
    return new_grid, new_cands, StrategyOutcome(placements, eliminations)


def apply_naked_singles(grid: Grid, candidates: CandidateGrid):
    return _run_strategy(_naked_singles, grid, candidates)


def apply_hidden_singles(grid: Grid, candidates: CandidateGrid):
    return _run_strategy(_hidden_singles, grid, candidates)


def apply_naked_twins(grid: Grid, candidates: CandidateGrid):
    return _run_strategy(_naked_twins, grid, candidates)


def apply_x_wing(grid: Grid, candidates: CandidateGrid):
    return _run_strategy(_x_wing, grid, candidates)


def _check_strategy_count(strategy_count: int) -> None:
    if strategy_count not in (2, 3, 4):
        raise ValueError(f"strategy count must be 2, 3, or 4, got {strategy_count}")


def _run_cycle(cells, masks, strategy_count, observer: Optional[Observer] = None):
    """One ordered pass over the first strategy_count strategies.

    Each strategy runs to its own fixpoint.  The pass stops early when the
    state becomes solved or contradicted.  Returns (placements,
    eliminations, contradicted).
    """
    placements = eliminations = 0
    for sid in STRATEGY_ORDER[:strategy_count]:
        p, e, contra = _STRATEGY_FUNCS[sid](cells, masks)
        placements += p
        eliminations += e
        if observer is not None:
            observer(
                f"strategy:{sid.name.lower()}",
                cells,
                masks,
                {"placements": p, "eliminations": e},
            )
        if contra:
            return placements, eliminations, True
        if 0 not in cells:
            break
    return placements, eliminations, False


def run_strategy_cycle(
    grid: Grid,
    candidates: CandidateGrid,
    strategy_count: int,
    observer: Optional[Observer] = None,
):
    """Apply the first strategy_count strategies once, in rank order."""
    _check_strategy_count(strategy_count)
    new_grid = grid.copy()
    new_cands = candidates.copy()
    if _status(new_grid.cells, new_cands.masks) is not GridStatus.OPEN:
        return new_grid, new_cands, StrategyOutcome(0, 0)
    p, e, _ = _run_cycle(new_grid.cells, new_cands.masks, strategy_count, observer)
    return new_grid, new_cands, StrategyOutcome(p, e)


def _status(cells, masks) -> GridStatus:
    if 0 not in cells:
        return GridStatus.SOLVED
    for i in range(81):
        if not cells[i] and not masks[i]:
            return GridStatus.CONTRADICTED
    return GridStatus.OPEN


def solve_by_strategies(
    grid: Grid, strategy_count: int, observer: Optional[Observer] = None
) -> StrategySolveResult:
    """Run strategy cycles until solved or a cycle makes no progress.

    Never guesses; the final pass that detects no progress counts as a
    cycle, matching the cycle accounting used by the Nishio solvers.
    """
    _check_strategy_count(strategy_count)
    new_grid = grid.copy()
    cells = new_grid.cells
    masks = _compute_masks(cells)
    cycles = 0
    while _status(cells, masks) is GridStatus.OPEN:
        p, e, contra = _run_cycle(cells, masks, strategy_count, observer)
        cycles += 1
        if contra or p + e == 0:
            break
    return StrategySolveResult(
        new_grid, CandidateGrid(masks), 0 not in cells, cycles
    )
