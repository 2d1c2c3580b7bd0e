import random
from pathlib import Path

import pytest

from sudoku_rater.board import parse_grid

DATA_DIR = Path(__file__).parent / "data"

# strategy-only solvable (all singles)
EASY = "003020600900305001001806400008102900700000008006708200002609500800203009005010300"
# ultra-hard anchors
PLATINUM_BLONDE = "000000012000000003002300400001800005060070800000009000008500000900040500470006000"
GOLDEN_NUGGET = "000000039000001005003050800008090006070002000100400000009080050020000600400700000"
# a known 17-given puzzle
SEVENTEEN = "000000010400000000020000000000050407008000300001090000300400200050100000000806000"


@pytest.fixture(scope="session")
def corpus_lines():
    return DATA_DIR.joinpath("corpus100.txt").read_text().split()


@pytest.fixture(scope="session")
def corpus_grids(corpus_lines):
    return [parse_grid(line) for line in corpus_lines]


@pytest.fixture(scope="session")
def sample_grids(corpus_lines):
    """A deterministic 12-puzzle spread across the corpus, for slower checks."""
    lines = corpus_lines
    picks = [lines[i] for i in range(0, len(lines), max(1, len(lines) // 12))][:12]
    return [parse_grid(line) for line in picks]


def random_valid_grid(rng: random.Random, fills: int):
    """Random valid (not necessarily solvable) grid with up to `fills` digits."""
    from sudoku_rater.board import Grid, compute_candidates, place_digit

    grid = Grid([0] * 81)
    cands = compute_candidates(grid)
    cells = [(r, c) for r in range(1, 10) for c in range(1, 10)]
    rng.shuffle(cells)
    placed = 0
    for cell in cells:
        if placed >= fills:
            break
        options = sorted(cands.candidates(*cell))
        if options:
            grid, cands = place_digit(grid, cands, cell, rng.choice(options))
            placed += 1
    return grid


def transform_puzzle(line: str, rng: random.Random) -> str:
    """Validity- and uniqueness-preserving random symmetry of a puzzle."""
    rows = [list(line[9 * r : 9 * r + 9]) for r in range(9)]
    # permute digits
    digits = list("123456789")
    mapping = dict(zip("123456789", rng.sample(digits, 9)))
    rows = [[mapping.get(ch, ch) for ch in row] for row in rows]
    # permute rows within each band, then permute bands
    for band in range(3):
        order = rng.sample(range(3), 3)
        rows[3 * band : 3 * band + 3] = [rows[3 * band + i] for i in order]
    band_order = rng.sample(range(3), 3)
    rows = sum(([rows[3 * b + i] for i in range(3)] for b in band_order), [])
    # same for columns
    cols = list(map(list, zip(*rows)))
    for stack in range(3):
        order = rng.sample(range(3), 3)
        cols[3 * stack : 3 * stack + 3] = [cols[3 * stack + i] for i in order]
    stack_order = rng.sample(range(3), 3)
    cols = sum(([cols[3 * s + i] for i in range(3)] for s in stack_order), [])
    rows = list(map(list, zip(*cols)))
    if rng.random() < 0.5:
        rows = list(map(list, zip(*rows)))  # transpose
    return "".join("".join(row) for row in rows)
