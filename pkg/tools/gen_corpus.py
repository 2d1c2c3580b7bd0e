#!/usr/bin/env python3
"""Regenerate tests/data/corpus100.txt.

Produces a deterministic 100-puzzle mixed-difficulty corpus: a handful of
well-known published puzzles plus seeded generated ones (dig-from-solution
with a uniqueness check at every removal).  The output file is checked in;
rerun this only when the corpus needs to change.
"""

import random
import sys
from pathlib import Path

FAMOUS = [
    # name, line
    ("platinum-blonde", "000000012000000003002300400001800005060070800000009000008500000900040500470006000"),
    ("golden-nugget", "000000039000001005003050800008090006070002000100400000009080050020000600400700000"),
    ("inkala-2012", "800000000003600000070090200050007000000045700000100030001000068008500010090000400"),
    ("ai-escargot", "100007090030020008009600500005300900010080002600004000300000010040000007007000300"),
    ("backtrack-heavy-17", "4.....8.5.3..........7......2.....6.....8.4......1.......6.3.7.5..2.....1.4......"),
    ("minimal-17", "000000010400000000020000000000050407008000300001090000300400200050100000000806000"),
]

CELLS = range(81)
PEERS = []
for i in CELLS:
    r, c, b = i // 9, i % 9, 3 * (i // 27) + (i % 9) // 3
    peers = {j for j in CELLS if j != i and (j // 9 == r or j % 9 == c or 3 * (j // 27) + (j % 9) // 3 == b)}
    PEERS.append(sorted(peers))


def count_solutions(cells, cap=2):
    """MRV backtracking count, independent of the package solver."""
    masks = [0] * 81
    for i in CELLS:
        if not cells[i]:
            used = {cells[p] for p in PEERS[i] if cells[p]}
            masks[i] = sum(1 << (d - 1) for d in range(1, 10) if d not in used)
            if not masks[i]:
                return 0

    count = 0

    def rec(masks, empties):
        nonlocal count
        if not empties:
            count += 1
            return
        best = min(empties, key=lambda i: masks[i].bit_count())
        m = masks[best]
        while m and count < cap:
            bit = m & -m
            m &= m - 1
            new_masks = list(masks)
            new_masks[best] = 0
            dead = False
            for p in PEERS[best]:
                if new_masks[p] & bit:
                    new_masks[p] &= ~bit
                    if not new_masks[p] and p in empties:
                        dead = True
                        break
            if not dead:
                rec(new_masks, empties - {best})

    rec(masks, frozenset(i for i in CELLS if not cells[i]))
    return count


def random_solution(rng):
    cells = [0] * 81
    masks = [0x1FF] * 81

    def fill(pos):
        if pos == 81:
            return True
        i = min((j for j in CELLS if not cells[j]), key=lambda j: masks[j].bit_count())
        digits = [d for d in range(1, 10) if masks[i] >> (d - 1) & 1]
        rng.shuffle(digits)
        for d in digits:
            bit = 1 << (d - 1)
            cells[i] = d
            saved = [(p, masks[p]) for p in PEERS[i] if masks[p] & bit]
            dead = False
            for p, _ in saved:
                masks[p] &= ~bit
                if not masks[p] and not cells[p]:
                    dead = True
            old = masks[i]
            masks[i] = 0
            if not dead and fill(pos + 1):
                return True
            cells[i] = 0
            masks[i] = old
            for p, m in saved:
                masks[p] = m
        return False

    assert fill(0)
    return cells


def dig(solution, rng, min_givens):
    cells = list(solution)
    order = list(CELLS)
    rng.shuffle(order)
    givens = 81
    for i in order:
        if givens <= min_givens:
            break
        saved = cells[i]
        cells[i] = 0
        if count_solutions(list(cells)) == 1:
            givens -= 1
        else:
            cells[i] = saved
    return cells


def main():
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus100.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240723)
    lines = [line for _, line in FAMOUS]
    targets = [44] * 16 + [38] * 16 + [32] * 26 + [28] * 20 + [22] * 16
    for target in targets:
        solution = random_solution(rng)
        cells = dig(solution, rng, target)
        lines.append("".join(str(v) if v else "." for v in cells))
    assert len(lines) == 100
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} puzzles to {out}")


if __name__ == "__main__":
    sys.setrecursionlimit(10000)
    main()
