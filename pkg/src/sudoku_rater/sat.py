"""CNF encodings of a puzzle, clause statistics, DIMACS I/O, and a complete
DPLL solver used as the correctness oracle and uniqueness checker.

Variables are C(x, y, z): "cell (x, y) contains digit z", with the bijective
integer index 81(x-1) + 9(y-1) + z in [1, 729].  The maximum encoding emits
every cell/row/column/box constraint over all nine digits; the minimum
encoding restricts every clause to the current candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import IO, Optional

from .board import (
    BOXES,
    COLS,
    Grid,
    InvalidPuzzle,
    MASK_DIGITS,
    ROWS,
    UNIT_NAMES,
    _compute_masks,
    cell_of,
)

NUM_VARIABLES = 729


class EmptyCandidateCell(ValueError):
    """The puzzle is contradicted; the candidate encoding refuses it."""


class MultipleDigitsInCell(ValueError):
    """An assignment sets more than one digit in some cell."""


class NoDigitInCell(ValueError):
    """An assignment leaves some cell without a digit."""


class DegenerateDistribution(ValueError):
    """No at-least-one clauses exist (fully solved puzzle)."""


class Encoding(Enum):
    MAXIMUM = "maximum"
    MINIMUM = "minimum"


class ClauseKind(Enum):
    ALO_CELL = "alo-cell"
    ALO_ROW = "alo-row"
    ALO_COL = "alo-col"
    ALO_BOX = "alo-box"
    AMO_CELL = "amo-cell"
    AMO_ROW = "amo-row"
    AMO_COL = "amo-col"
    AMO_BOX = "amo-box"
    GIVEN = "given"


AT_LEAST_ONE_KINDS = frozenset(
    {ClauseKind.ALO_CELL, ClauseKind.ALO_ROW, ClauseKind.ALO_COL, ClauseKind.ALO_BOX}
)
AT_MOST_ONE_KINDS = frozenset(
    {ClauseKind.AMO_CELL, ClauseKind.AMO_ROW, ClauseKind.AMO_COL, ClauseKind.AMO_BOX}
)


@dataclass(frozen=True)
class Literal:
    x: int
    y: int
    z: int
    negated: bool = False

    @property
    def index(self) -> int:
        return 81 * (self.x - 1) + 9 * (self.y - 1) + self.z

    def to_int(self) -> int:
        return -self.index if self.negated else self.index

    @classmethod
    def from_int(cls, value: int) -> "Literal":
        if value == 0 or abs(value) > NUM_VARIABLES:
            raise ValueError(f"literal integer out of range: {value}")
        idx = abs(value) - 1
        return cls(idx // 81 + 1, idx % 81 // 9 + 1, idx % 9 + 1, value < 0)


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]
    kind: ClauseKind

    def __len__(self) -> int:
        return len(self.literals)

    def to_ints(self) -> tuple[int, ...]:
        return tuple(lit.to_int() for lit in self.literals)


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple[Clause, ...]
    encoding: Encoding
    variable_count: int = NUM_VARIABLES

    def __len__(self) -> int:
        return len(self.clauses)

    def count_kind(self, *kinds: ClauseKind) -> int:
        wanted = frozenset(kinds)
        return sum(1 for c in self.clauses if c.kind in wanted)


def _pos(x, y, z) -> Literal:
    return Literal(x, y, z)


def _neg(x, y, z) -> Literal:
    return Literal(x, y, z, True)


# (x, y) 1-based coordinates for each unit, reused by both encoders
_ROW_CELLS = tuple(tuple(cell_of(i) for i in unit) for unit in ROWS)
_COL_CELLS = tuple(tuple(cell_of(i) for i in unit) for unit in COLS)
_BOX_CELLS = tuple(tuple(cell_of(i) for i in unit) for unit in BOXES)

_SUBGROUPS = (
    (ClauseKind.ALO_ROW, ClauseKind.AMO_ROW, _ROW_CELLS),
    (ClauseKind.ALO_COL, ClauseKind.AMO_COL, _COL_CELLS),
    (ClauseKind.ALO_BOX, ClauseKind.AMO_BOX, _BOX_CELLS),
)


def encode_maximum(grid: Grid) -> CnfFormula:
    """Full constraint encoding: 11988 clauses plus one unit per given."""
    clauses: list[Clause] = []

    for x in range(1, 10):
        for y in range(1, 10):
            clauses.append(
                Clause(tuple(_pos(x, y, z) for z in range(1, 10)), ClauseKind.ALO_CELL)
            )
    for alo_kind, _, cell_groups in _SUBGROUPS:
        for cells in cell_groups:
            for z in range(1, 10):
                clauses.append(
                    Clause(tuple(_pos(x, y, z) for x, y in cells), alo_kind)
                )

    for x in range(1, 10):
        for y in range(1, 10):
            for z1, z2 in itertools.combinations(range(1, 10), 2):
                clauses.append(
                    Clause((_neg(x, y, z1), _neg(x, y, z2)), ClauseKind.AMO_CELL)
                )
    for _, amo_kind, cell_groups in _SUBGROUPS:
        for cells in cell_groups:
            for z in range(1, 10):
                for (x1, y1), (x2, y2) in itertools.combinations(cells, 2):
                    clauses.append(
                        Clause((_neg(x1, y1, z), _neg(x2, y2, z)), amo_kind)
                    )

    givens = 0
    for i, v in enumerate(grid.cells):
        if v:
            x, y = cell_of(i)
            clauses.append(Clause((_pos(x, y, v),), ClauseKind.GIVEN))
            givens += 1

    formula = CnfFormula(tuple(clauses), Encoding.MAXIMUM)
    assert formula.count_kind(*AT_LEAST_ONE_KINDS) == 324
    for kind in AT_MOST_ONE_KINDS:
        assert formula.count_kind(kind) == 2916
    assert len(formula) == 11988 + givens
    return formula


def encode_minimum(grid: Grid) -> CnfFormula:
    """Candidate-pruned encoding; every clause ranges over live candidates."""
    masks = _compute_masks(grid.cells)
    cells = grid.cells
    for i in range(81):
        if not cells[i] and not masks[i]:
            raise EmptyCandidateCell(
                f"cell {cell_of(i)} is empty with no candidates; puzzle is contradicted"
            )

    clauses: list[Clause] = []
    empty_count = 0

    for i in range(81):
        if not cells[i]:
            empty_count += 1
            x, y = cell_of(i)
            clauses.append(
                Clause(
                    tuple(_pos(x, y, z) for z in MASK_DIGITS[masks[i]]),
                    ClauseKind.ALO_CELL,
                )
            )

    subgroup_spots: list[tuple[ClauseKind, ClauseKind, int, int, list]] = []
    for gi, (alo_kind, amo_kind, cell_groups) in enumerate(_SUBGROUPS):
        for ui, group in enumerate(cell_groups):
            placed = 0
            for x, y in group:
                v = cells[9 * (x - 1) + (y - 1)]
                if v:
                    placed |= 1 << (v - 1)
            for z in MASK_DIGITS[0x1FF & ~placed]:
                bit = 1 << (z - 1)
                spots = [
                    (x, y) for x, y in group if masks[9 * (x - 1) + (y - 1)] & bit
                ]
                if not spots:
                    raise EmptyCandidateCell(
                        f"digit {z} has no candidate cell in {UNIT_NAMES[9 * gi + ui]};"
                        " puzzle is contradicted"
                    )
                clauses.append(
                    Clause(tuple(_pos(x, y, z) for x, y in spots), alo_kind)
                )
                subgroup_spots.append((alo_kind, amo_kind, z, ui, spots))

    for i in range(81):
        if not cells[i]:
            x, y = cell_of(i)
            for z1, z2 in itertools.combinations(MASK_DIGITS[masks[i]], 2):
                clauses.append(
                    Clause((_neg(x, y, z1), _neg(x, y, z2)), ClauseKind.AMO_CELL)
                )

    for _, amo_kind, z, _, spots in subgroup_spots:
        for (x1, y1), (x2, y2) in itertools.combinations(spots, 2):
            clauses.append(Clause((_neg(x1, y1, z), _neg(x2, y2, z)), amo_kind))

    for i, v in enumerate(cells):
        if v:
            x, y = cell_of(i)
            clauses.append(Clause((_pos(x, y, v),), ClauseKind.GIVEN))

    formula = CnfFormula(tuple(clauses), Encoding.MINIMUM)
    for kind in (ClauseKind.ALO_CELL, ClauseKind.ALO_ROW, ClauseKind.ALO_COL, ClauseKind.ALO_BOX):
        assert formula.count_kind(kind) == empty_count
    return formula


@dataclass(frozen=True)
class ClauseLengthDistribution:
    """Percentages of at-least-one clauses (given units included) by length."""

    percentages: dict[int, float]  # k in 1..9 -> P_k
    short_pct: float  # k in {1, 2}
    medium_pct: float  # k in {3, 4, 5}
    long_pct: float  # k in {6..9}
    total: int


def clause_length_distribution(formula: CnfFormula) -> ClauseLengthDistribution:
    """Length histogram over at-least-one and given clauses, as percentages."""
    if formula.encoding is not Encoding.MINIMUM:
        raise ValueError("clause length distribution is defined for the minimum encoding")
    counted_kinds = AT_LEAST_ONE_KINDS | {ClauseKind.GIVEN}
    freq = dict.fromkeys(range(1, 10), 0)
    has_alo = False
    for clause in formula.clauses:
        if clause.kind in counted_kinds:
            freq[len(clause)] += 1
            if clause.kind is not ClauseKind.GIVEN:
                has_alo = True
    if not has_alo:
        raise DegenerateDistribution("no at-least-one clauses; puzzle has no empty cells")
    total = sum(freq.values())
    pct = {k: 100.0 * f / total for k, f in freq.items()}
    return ClauseLengthDistribution(
        percentages=pct,
        short_pct=pct[1] + pct[2],
        medium_pct=pct[3] + pct[4] + pct[5],
        long_pct=pct[6] + pct[7] + pct[8] + pct[9],
        total=total,
    )


def _solve_ints(clauses, num_vars):
    """Complete DPLL with two watched literals and unit propagation.

    Branches on the first unassigned literal of an unsatisfied clause with
    the fewest unassigned literals (scanning in formula order), trying the
    satisfying polarity first.  Returns a list of true literals covering
    every variable that occurs in the formula, or None when unsatisfiable.
    """
    assign = bytearray(num_vars + 1)  # 0 unknown, 1 true, 2 false
    trail: list[int] = []
    clause_lits: list[list[int]] = []
    # watch lists indexed by 2*var + (1 if negated)
    watch: list[list[int]] = [[] for _ in range(2 * num_vars + 2)]
    units: list[int] = []

    for lits in clauses:
        if not lits:
            return None
        if len(lits) == 1:
            units.append(lits[0])
            continue
        ci = len(clause_lits)
        clause_lits.append(list(lits))
        for lit in lits[:2]:
            watch[2 * abs(lit) + (lit < 0)].append(ci)

    def enqueue(lit):
        v = abs(lit)
        val = assign[v]
        if val:
            return (val == 1) == (lit > 0)
        assign[v] = 1 if lit > 0 else 2
        trail.append(lit)
        return True

    qhead = 0

    def propagate():
        nonlocal qhead
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            falsified = -lit
            wl = watch[2 * abs(falsified) + (falsified < 0)]
            i = 0
            while i < len(wl):
                ci = wl[i]
                lits = clause_lits[ci]
                if lits[0] == falsified:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                fv = assign[abs(first)]
                if fv and (fv == 1) == (first > 0):
                    i += 1
                    continue
                moved = False
                for j in range(2, len(lits)):
                    lj = lits[j]
                    v = assign[abs(lj)]
                    if not v or (v == 1) == (lj > 0):
                        lits[1], lits[j] = lj, lits[1]
                        wl[i] = wl[-1]
                        wl.pop()
                        watch[2 * abs(lj) + (lj < 0)].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                if fv:  # first is false: conflict
                    return False
                if not enqueue(first):
                    return False
                i += 1
        return True

    for lit in units:
        if not enqueue(lit):
            return None
    if not propagate():
        return None

    def pick_branch():
        best_lit = 0
        best_n = 10**9
        for lits in clause_lits:
            n = 0
            first_unassigned = 0
            satisfied = False
            for lit in lits:
                v = assign[abs(lit)]
                if not v:
                    n += 1
                    if not first_unassigned:
                        first_unassigned = lit
                elif (v == 1) == (lit > 0):
                    satisfied = True
                    break
            if satisfied or not n:
                continue
            if n < best_n:
                best_n = n
                best_lit = first_unassigned
                if n <= 2:
                    break
        return best_lit

    decisions: list[list] = []  # [trail mark, literal, flipped]
    while True:
        lit = pick_branch()
        if not lit:
            return list(trail)
        decisions.append([len(trail), lit, False])
        enqueue(lit)
        ok = propagate()
        while not ok:
            while decisions and decisions[-1][2]:
                decisions.pop()
            if not decisions:
                return None
            mark, dlit, _ = decisions[-1]
            for undone in trail[mark:]:
                assign[abs(undone)] = 0
            del trail[mark:]
            qhead = mark
            decisions[-1] = [mark, -dlit, True]
            enqueue(-dlit)
            ok = propagate()


Assignment = dict[int, bool]


def sat_solve(formula: CnfFormula) -> Optional[Assignment]:
    """Satisfying assignment over all variables, or None when unsatisfiable."""
    result = _solve_ints([c.to_ints() for c in formula.clauses], formula.variable_count)
    if result is None:
        return None
    assignment = dict.fromkeys(range(1, formula.variable_count + 1), False)
    for lit in result:
        assignment[abs(lit)] = lit > 0
    return assignment


def decode_assignment(assignment: Assignment) -> Grid:
    """Read the solved grid out of an assignment; rejects malformed ones."""
    cells = []
    for x in range(1, 10):
        for y in range(1, 10):
            base = 81 * (x - 1) + 9 * (y - 1)
            digits = [z for z in range(1, 10) if assignment.get(base + z)]
            if len(digits) > 1:
                raise MultipleDigitsInCell(f"cell ({x}, {y}) holds digits {digits}")
            if not digits:
                raise NoDigitInCell(f"cell ({x}, {y}) holds no digit")
            cells.append(digits[0])
    return Grid(cells, given=[False] * 81)


def count_solutions(formula: CnfFormula, cap: int = 2) -> int:
    """Count distinct solved grids up to cap, by blocking each solution."""
    clauses = [c.to_ints() for c in formula.clauses]
    count = 0
    while count < cap:
        result = _solve_ints(clauses, formula.variable_count)
        if result is None:
            return count
        positives = {lit for lit in result if lit > 0}
        blocker = []
        for cell in range(81):
            base = 9 * cell
            placed = [base + z for z in range(1, 10) if base + z in positives]
            if len(placed) > 1:
                raise MultipleDigitsInCell(
                    f"model places {len(placed)} digits in cell {cell_of(cell)}"
                )
            if not placed:
                raise NoDigitInCell(f"model places no digit in cell {cell_of(cell)}")
            blocker.append(-placed[0])
        clauses.append(tuple(blocker))
        count += 1
    return count


def export_dimacs(
    formula: CnfFormula, sink: Optional[IO[str]] = None, annotate: bool = False
) -> str:
    """Standard DIMACS CNF text; annotate adds clause-kind comment lines."""
    lines = [f"p cnf {formula.variable_count} {len(formula.clauses)}"]
    for clause in formula.clauses:
        if annotate:
            lines.append(f"c kind={clause.kind.value}")
        lines.append(" ".join(str(i) for i in clause.to_ints()) + " 0")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """Read a DIMACS CNF file back into (variable count, clause list)."""
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            val = int(tok)
            if val == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(val)
    if pending:
        raise ValueError("unterminated clause at end of DIMACS input")
    if num_vars is None:
        raise ValueError("missing DIMACS header")
    return num_vars, clauses


def solve_grid_via_sat(grid: Grid, encoding: Encoding = Encoding.MINIMUM) -> Grid:
    """Encode, solve, and decode in one step; raises on unsatisfiable input."""
    formula = (
        encode_minimum(grid) if encoding is Encoding.MINIMUM else encode_maximum(grid)
    )
    assignment = sat_solve(formula)
    if assignment is None:
        raise InvalidPuzzle("puzzle has no solution")
    return decode_assignment(assignment)
