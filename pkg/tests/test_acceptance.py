"""Acceptance suite: one test per release criterion, each printing a
PASS line with its headline numbers when it holds."""

import io
import random
import statistics

import pytest

from sudoku_rater.board import parse_grid
from sudoku_rater.dataset import (
    RatingConfig,
    emit_report,
    load_corpus,
    rate_corpus,
)
from sudoku_rater.nishio import (
    heuristic_nishio,
    nishio_human_cycles,
    randomized_nishio,
)
from sudoku_rater.rating import (
    BinRanges,
    UniversalCategory,
    classify_value,
    equal_count_bins,
    spearman_rho,
)
from sudoku_rater.sat import (
    AT_LEAST_ONE_KINDS,
    Clause,
    ClauseKind,
    CnfFormula,
    Encoding,
    count_solutions,
    decode_assignment,
    encode_maximum,
    encode_minimum,
    sat_solve,
)
from sudoku_rater.strategies import solve_by_strategies

from conftest import EASY, GOLDEN_NUGGET, PLATINUM_BLONDE, transform_puzzle

CYCLE_BINS = BinRanges(1.30, 3.48, 6.52, 98.14, "ascending")


def report(n, message):
    print(f"ACCEPTANCE {n:02d} PASS - {message}")


class TestCriterion01MaximumEncodingCounts:
    def test_criterion(self, corpus_grids):
        empty = encode_maximum(parse_grid("." * 81))
        assert len(empty) == 11988

        for grid in [parse_grid(PLATINUM_BLONDE)] + corpus_grids[10:20]:
            formula = encode_maximum(grid)
            assert len(formula) == 11988 + grid.given_count()
            assert formula.count_kind(*AT_LEAST_ONE_KINDS) == 324
            per_cell = {}
            for clause in formula.clauses:
                if clause.kind is ClauseKind.AMO_CELL:
                    key = (clause.literals[0].x, clause.literals[0].y)
                    per_cell[key] = per_cell.get(key, 0) + 1
            assert len(per_cell) == 81 and set(per_cell.values()) == {36}
        report(1, "maximum encoding: 11988 + givens, 324 at-least-one, 36 per cell")


class TestCriterion02MinimumEncodingIdentities:
    def test_criterion(self, corpus_lines):
        rng = random.Random(20250809)
        checked = 0
        for i in range(100):
            line = transform_puzzle(corpus_lines[i], rng)
            grid = parse_grid(line)
            formula = encode_minimum(grid)

            c = grid.empty_count()
            assert formula.count_kind(*AT_LEAST_ONE_KINDS) == 4 * c

            from sudoku_rater.board import compute_candidates

            cands = compute_candidates(grid)
            per_cell = {}
            for clause in formula.clauses:
                if clause.kind is ClauseKind.AMO_CELL:
                    key = (clause.literals[0].x, clause.literals[0].y)
                    per_cell[key] = per_cell.get(key, 0) + 1
            for r in range(1, 10):
                for col in range(1, 10):
                    n = len(cands.candidates(r, col))
                    assert per_cell.get((r, col), 0) == n * (n - 1) // 2

            trimmed = CnfFormula(
                tuple(
                    cl
                    for cl in formula.clauses
                    if cl.kind
                    not in (ClauseKind.AMO_ROW, ClauseKind.AMO_COL, ClauseKind.AMO_BOX)
                ),
                Encoding.MINIMUM,
            )
            full = decode_assignment(sat_solve(formula))
            reduced = decode_assignment(sat_solve(trimmed))
            assert full.cells == reduced.cells
            checked += 1
        assert checked == 100
        report(2, "minimum encoding on 100 puzzles: 4c at-least-one, (n choose 2) "
                  "per cell, at-most sub-group clauses redundant")


@pytest.fixture(scope="module")
def oracle_solutions(corpus_grids):
    """Criteria 3 and 4 share one instrumented pass over the corpus."""
    violations = []
    solutions = []

    for index, grid in enumerate(corpus_grids):
        gmin = decode_assignment(sat_solve(encode_minimum(grid)))
        gmax = decode_assignment(sat_solve(encode_maximum(grid)))
        assert gmin.cells == gmax.cells
        solution = gmin.cells

        def consistent(cells, masks):
            for i in range(81):
                if cells[i]:
                    if cells[i] != solution[i]:
                        return False
                elif not masks[i] >> (solution[i] - 1) & 1:
                    return False
            return True

        state = {"ok": True}

        def observer(event, cells, masks, detail):
            if event == "guess":
                r, c = detail["cell"]
                if solution[9 * (r - 1) + (c - 1)] != detail["digit"]:
                    state["ok"] = False
                return
            now = consistent(cells, masks)
            if event.startswith("strategy:"):
                if state["ok"] and not now:
                    violations.append((index, event))
            state["ok"] = now

        state["ok"] = True
        run_r = randomized_nishio(grid, 4, seed=31400 + index, observer=observer)
        state["ok"] = True
        run_h = heuristic_nishio(grid, 4, observer=observer)
        state["ok"] = True
        solve_by_strategies(grid, 4, observer=observer)

        assert run_r.solved and run_h.solved
        assert run_r.grid.cells == solution
        assert run_h.grid.cells == solution
        from _reference import is_valid_solution

        assert is_valid_solution([solution[9 * r : 9 * r + 9] for r in range(9)])
        solutions.append(solution)

    return solutions, violations


class TestCriterion03OracleAgreement:
    def test_criterion(self, corpus_lines, corpus_grids, oracle_solutions):
        solutions, _ = oracle_solutions
        assert len(solutions) == len(corpus_grids) == 100
        assert PLATINUM_BLONDE in corpus_lines
        assert GOLDEN_NUGGET in corpus_lines
        report(3, "SAT(min), SAT(max), heuristic and randomized Nishio agree "
                  "on all 100 corpus puzzles")


class TestCriterion04StrategySoundness:
    def test_criterion(self, oracle_solutions):
        _, violations = oracle_solutions
        assert violations == []
        report(4, "zero solution-digit eliminations across all intermediate "
                  "states of all criterion-3 solves")


class TestCriterion05UltraHardAnchor:
    def test_criterion(self):
        stats = nishio_human_cycles(parse_grid(PLATINUM_BLONDE), 4, starts=50,
                                    seed_base=0)
        assert 250 <= stats.mean <= 4000
        assert stats.mean > 10 * 6.52
        report(5, f"Platinum Blonde mean cycles {stats.mean:.2f} in [250, 4000], "
                  f"an order of magnitude above the 6.52 hard bound")


class TestCriterion06HeuristicDominance:
    def test_criterion(self, corpus_grids):
        means = {}
        for k in (2, 4):
            rand = statistics.fmean(
                randomized_nishio(g, k, seed=500 + i).cycles
                for i, g in enumerate(corpus_grids)
            )
            heur = statistics.fmean(
                heuristic_nishio(g, k).cycles for g in corpus_grids
            )
            assert heur <= rand
            means[k] = (heur, rand)
        report(6, "corpus-mean heuristic cycles <= randomized cycles: "
                  f"k=2 {means[2][0]:.2f} <= {means[2][1]:.2f}, "
                  f"k=4 {means[4][0]:.2f} <= {means[4][1]:.2f}")


class TestCriterion07BinningProperties:
    def test_criterion(self):
        rng = random.Random(99)
        values = rng.sample(range(10**7), 999)
        bins = equal_count_bins([float(v) for v in values])
        counts = [0, 0, 0]
        for v in values:
            counts[classify_value(v, bins) - 1] += 1
        assert counts == [333, 333, 333]

        small = equal_count_bins([float(v) for v in range(1, 11)])
        small_counts = [0, 0, 0]
        for v in range(1, 11):
            small_counts[classify_value(v, small) - 1] += 1
        assert max(small_counts) - min(small_counts) <= 1

        anchors = [
            (1.61, UniversalCategory.EASY),  # published easy-level mean
            (1.73, UniversalCategory.EASY),
            (2.45, UniversalCategory.EASY),
            (5.93, UniversalCategory.MEDIUM),
            (6.74, UniversalCategory.HARD),
            (13.18, UniversalCategory.HARD),  # published hard-level mean
            (12.90, UniversalCategory.HARD),
        ]
        for value, expected in anchors:
            assert classify_value(value, CYCLE_BINS) is expected
        report(7, "equal-count bins 333/333/333 and <=1 spread; published "
                  "level means classify to the expected categories")


class TestCriterion08SpearmanOracle:
    def test_criterion(self):
        assert spearman_rho([1, 2, 3, 4, 5], [2.0, 4.0, 8.0, 16.0, 32.0]) == 1.0
        assert spearman_rho([1, 2, 3, 4, 5], [9.0, 7.0, 5.0, 3.0, 1.0]) == -1.0
        tie = spearman_rho([1, 1, 2, 2], [1.0, 2.0, 3.0, 4.0])
        assert tie == pytest.approx(0.894, abs=1e-3)

        rng = random.Random(42)
        for _ in range(50):
            n = rng.randint(4, 60)
            labels = [rng.randint(1, 6) for _ in range(n)]
            metric = [rng.uniform(0.1, 99.0) for _ in range(n)]
            if len(set(labels)) < 2 or len(set(metric)) < 2:
                continue
            base = spearman_rho(labels, metric)
            transformed = spearman_rho(labels, [v**3 + 10 for v in metric])
            assert abs(base - transformed) < 1e-9
        report(8, "Spearman: +/-1 on monotone inputs, 0.894 tie case, invariant "
                  "under strictly monotone transforms")


class TestCriterion09Determinism:
    def test_criterion(self, tmp_path, corpus_lines):
        corpus = tmp_path / "det.csv"
        rows = [
            ("a", corpus_lines[6], "site", "easy", 1),
            ("b", corpus_lines[7], "site", "easy", 1),
            ("c", corpus_lines[45], "site", "medium", 2),
            ("d", corpus_lines[46], "site", "medium", 2),
            ("e", corpus_lines[95], "site", "hard", 3),
            ("f", corpus_lines[88], "site", "hard", 3),
        ]
        import csv as _csv

        with open(corpus, "w", newline="") as handle:
            writer = _csv.writer(handle)
            writer.writerow(["id", "puzzle", "website", "level", "rank"])
            writer.writerows(rows)
        records, rejects = load_corpus(corpus)
        assert not rejects

        bodies = []
        for workers in (1, 4, 1):
            config = RatingConfig(
                starts=5, seed_base=11, strategy_counts=(2, 4), workers=workers
            )
            sink = io.StringIO()
            emit_report(rate_corpus(records, config), sink, "json")
            bodies.append(sink.getvalue())
        assert bodies[0] == bodies[1] == bodies[2]
        report(9, "byte-identical reports across reruns and worker counts {1, 4}")


class TestCriterion10PercentSolvedMonotone:
    def test_criterion(self, corpus_grids):
        from sudoku_rater.rating import percent_solved_by_strategies

        values = [percent_solved_by_strategies(corpus_grids, k) for k in (2, 3, 4)]
        assert values == sorted(values)

        singles_only = [parse_grid(EASY)]
        from conftest import SEVENTEEN

        singles_only.append(parse_grid(SEVENTEEN))
        for grid in corpus_grids:
            if len(singles_only) >= 10:
                break
            if solve_by_strategies(grid, 2).solved:
                singles_only.append(grid)
        assert percent_solved_by_strategies(singles_only, 2) == 100.0
        report(10, f"percent solved monotone {values[0]:.1f} <= {values[1]:.1f} "
                   f"<= {values[2]:.1f}; singles corpus 100% at k=2")


class TestCorpusIntegrity:
    """The checked-in corpus itself: 100 unique-solution puzzles."""

    def test_all_unique(self, corpus_grids):
        for grid in corpus_grids:
            assert count_solutions(encode_minimum(grid), cap=2) == 1
