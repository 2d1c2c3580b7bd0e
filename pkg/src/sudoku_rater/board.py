"""Core 9x9 board representation: parsing, candidates, placement, status.

Cells are addressed 1-based as (row, col).  Internally the grid is a flat
row-major list of 81 ints (0 = empty) and candidates are 9-bit masks
(bit d-1 set means digit d is a candidate), which keeps the solver hot
loops cheap while the public surface speaks plain sets of digits.
"""

from __future__ import annotations

from enum import Enum

Cell = tuple[int, int]  # 1-based (row, col)

DIGITS = tuple(range(1, 10))
ALL_CANDIDATES = 0x1FF  # all nine digits


class ParseError(ValueError):
    """Puzzle text is not a well-formed 81-character line."""


class InvalidPuzzle(ValueError):
    """A digit repeats within a row, column, or box."""


class IllegalPlacement(ValueError):
    """Attempt to place a digit that is not a candidate of the cell."""


class GridStatus(Enum):
    SOLVED = "solved"
    CONTRADICTED = "contradicted"
    OPEN = "open"


def cell_index(row: int, col: int) -> int:
    """Flat 0-based index of 1-based (row, col)."""
    return 9 * (row - 1) + (col - 1)


def cell_of(index: int) -> Cell:
    return index // 9 + 1, index % 9 + 1


def box_of(row: int, col: int) -> int:
    """1-based box number of a cell, numbered row-major."""
    return 3 * ((row - 1) // 3) + (col - 1) // 3 + 1


ROWS = tuple(tuple(9 * r + c for c in range(9)) for r in range(9))
COLS = tuple(tuple(9 * r + c for r in range(9)) for c in range(9))
BOXES = tuple(
    tuple(9 * (3 * (b // 3) + i) + 3 * (b % 3) + j for i in range(3) for j in range(3))
    for b in range(9)
)
UNITS = ROWS + COLS + BOXES
UNIT_NAMES = tuple(
    [f"row {i + 1}" for i in range(9)]
    + [f"column {i + 1}" for i in range(9)]
    + [f"box {i + 1}" for i in range(9)]
)

PEERS = tuple(
    tuple(
        sorted(
            (set(ROWS[i // 9]) | set(COLS[i % 9]) | set(BOXES[3 * (i // 27) + (i % 9) // 3]))
            - {i}
        )
    )
    for i in range(81)
)

# mask -> ascending tuple of member digits, for all 512 possible masks
MASK_DIGITS = tuple(
    tuple(d for d in DIGITS if m >> (d - 1) & 1) for m in range(512)
)

_CELL_UNITS = tuple(
    tuple(u for u, unit in enumerate(UNITS) if i in unit) for i in range(81)
)


def digit_bit(digit: int) -> int:
    return 1 << (digit - 1)


def mask_to_set(mask: int) -> set[int]:
    return set(MASK_DIGITS[mask])


class Grid:
    """An 81-cell puzzle state plus the mask of original given cells."""

    __slots__ = ("cells", "given")

    def __init__(self, cells, given=None, validate: bool = True):
        cells = list(cells)
        if len(cells) != 81:
            raise ParseError(f"grid needs 81 cells, got {len(cells)}")
        if given is None:
            given = [v != 0 for v in cells]
        else:
            given = list(given)
            if len(given) != 81:
                raise ParseError("given mask needs 81 entries")
            for i, g in enumerate(given):
                if g and cells[i] == 0:
                    raise InvalidPuzzle(f"cell {cell_of(i)} marked given but empty")
        self.cells = cells
        self.given = given
        if validate:
            _check_valid(cells)

    def copy(self) -> "Grid":
        g = Grid.__new__(Grid)
        g.cells = list(self.cells)
        g.given = list(self.given)
        return g

    def value(self, row: int, col: int) -> int:
        """Digit at (row, col), 0 if empty."""
        return self.cells[cell_index(row, col)]

    def is_complete(self) -> bool:
        return 0 not in self.cells

    def given_count(self) -> int:
        return sum(self.given)

    def empty_count(self) -> int:
        return self.cells.count(0)

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.cells == other.cells
            and self.given == other.given
        )

    def __hash__(self):
        return hash((tuple(self.cells), tuple(self.given)))

    def __repr__(self):
        return f"Grid({render_grid(self)!r})"


class CandidateGrid:
    """Per-cell candidate masks; filled cells carry the empty mask."""

    __slots__ = ("masks",)

    def __init__(self, masks):
        masks = list(masks)
        if len(masks) != 81:
            raise ParseError(f"candidate grid needs 81 masks, got {len(masks)}")
        self.masks = masks

    def copy(self) -> "CandidateGrid":
        k = CandidateGrid.__new__(CandidateGrid)
        k.masks = list(self.masks)
        return k

    def candidates(self, row: int, col: int) -> set[int]:
        return mask_to_set(self.masks[cell_index(row, col)])

    def mask(self, row: int, col: int) -> int:
        return self.masks[cell_index(row, col)]

    def count(self, row: int, col: int) -> int:
        return self.masks[cell_index(row, col)].bit_count()

    def __eq__(self, other):
        return isinstance(other, CandidateGrid) and self.masks == other.masks

    def __repr__(self):
        nonempty = sum(1 for m in self.masks if m)
        return f"<CandidateGrid {nonempty} open cells>"


def _check_valid(cells) -> None:
    for u, unit in enumerate(UNITS):
        seen = 0
        for i in unit:
            v = cells[i]
            if v:
                bit = 1 << (v - 1)
                if seen & bit:
                    raise InvalidPuzzle(f"digit {v} repeats in {UNIT_NAMES[u]}")
                seen |= bit


def parse_grid(text: str) -> Grid:
    """Parse an 81-character puzzle line; '.' and '0' mark empty cells."""
    compact = "".join(text.split())
    if len(compact) != 81:
        raise ParseError(f"puzzle line needs 81 characters, got {len(compact)}")
    cells = []
    for ch in compact:
        if ch in ".0":
            cells.append(0)
        elif "1" <= ch <= "9":
            cells.append(int(ch))
        else:
            raise ParseError(f"illegal character {ch!r} in puzzle line")
    return Grid(cells)


def render_grid(grid: Grid) -> str:
    """ 81-character line with '.' for empty cells; inverse of parse_grid."""
    return "".join(str(v) if v else "." for v in grid.cells)


def format_grid(grid: Grid) -> str:
    """Multi-line human-readable rendering with box separators."""
    lines = []
    for r in range(9):
        if r in (3, 6):
            lines.append("------+-------+------")
        row = []
        for c in range(9):
            v = grid.cells[9 * r + c]
            row.append(str(v) if v else ".")
            if c in (2, 5):
                row.append("|")
        lines.append(" ".join(row))
    return "\n".join(lines)


def compute_candidates(grid: Grid) -> CandidateGrid:
    """Candidates = digits absent from the cell's row, column, and box."""
    return CandidateGrid(_compute_masks(grid.cells))


def _compute_masks(cells) -> list[int]:
    row_used = [0] * 9
    col_used = [0] * 9
    box_used = [0] * 9
    for i, v in enumerate(cells):
        if v:
            bit = 1 << (v - 1)
            row_used[i // 9] |= bit
            col_used[i % 9] |= bit
            box_used[3 * (i // 27) + (i % 9) // 3] |= bit
    masks = [0] * 81
    for i, v in enumerate(cells):
        if not v:
            used = row_used[i // 9] | col_used[i % 9] | box_used[3 * (i // 27) + (i % 9) // 3]
            masks[i] = ALL_CANDIDATES & ~used
    return masks


def _place(cells, masks, index: int, digit: int) -> tuple[int, bool]:
    """Fill a cell in-place and strip the digit from peer masks.

    Returns (eliminations, contradicted); contradicted is True when a peer
    cell is left empty with no candidates.
    """
    cells[index] = digit
    masks[index] = 0
    bit = 1 << (digit - 1)
    eliminated = 0
    contradicted = False
    for p in PEERS[index]:
        m = masks[p]
        if m & bit:
            m &= ~bit
            masks[p] = m
            eliminated += 1
            if not m:
                contradicted = True
    return eliminated, contradicted


def place_digit(
    grid: Grid, candidates: CandidateGrid, cell: Cell, digit: int
) -> tuple[Grid, CandidateGrid]:
    """Place a candidate digit, propagating the elimination to all peers."""
    i = cell_index(*cell)
    if grid.cells[i]:
        raise IllegalPlacement(f"cell {cell} already holds {grid.cells[i]}")
    if not candidates.masks[i] & digit_bit(digit):
        raise IllegalPlacement(f"digit {digit} is not a candidate of cell {cell}")
    new_grid = grid.copy()
    new_cands = candidates.copy()
    _place(new_grid.cells, new_cands.masks, i, digit)
    return new_grid, new_cands


def eliminate_candidate(
    candidates: CandidateGrid, cell: Cell, digit: int
) -> CandidateGrid:
    """Remove a digit from one cell's candidate set; no-op if absent."""
    new_cands = candidates.copy()
    new_cands.masks[cell_index(*cell)] &= ~digit_bit(digit)
    return new_cands


def grid_status(grid: Grid, candidates: CandidateGrid) -> GridStatus:
    """Solved, Contradicted (an empty cell with no candidates), or Open."""
    cells = grid.cells
    if 0 not in cells:
        return GridStatus.SOLVED
    masks = candidates.masks
    for i in range(81):
        if not cells[i] and not masks[i]:
            return GridStatus.CONTRADICTED
    return GridStatus.OPEN
