"""Sudoku difficulty rating toolkit.

Two solving pipelines — candidate-pruned SAT encodings and trial-and-error
(Nishio) interleaved with four human strategies — drive two difficulty
metrics, an unsupervised three-bin universal classifier, and rank
correlation against labeled puzzle corpora.
"""

__version__ = "0.1.0"

from .board import (
    CandidateGrid,
    Cell,
    Grid,
    GridStatus,
    IllegalPlacement,
    InvalidPuzzle,
    ParseError,
    box_of,
    compute_candidates,
    eliminate_candidate,
    grid_status,
    parse_grid,
    place_digit,
    render_grid,
)
from .strategies import (
    StrategyId,
    StrategyOutcome,
    StrategySolveResult,
    apply_hidden_singles,
    apply_naked_singles,
    apply_naked_twins,
    apply_x_wing,
    run_strategy_cycle,
    solve_by_strategies,
)
from .nishio import (
    CycleStats,
    NishioRun,
    UnsatisfiablePuzzle,
    candidate_occurrence_counts,
    heuristic_nishio,
    nishio_human_cycles,
    randomized_nishio,
)
from .sat import (
    Clause,
    ClauseKind,
    ClauseLengthDistribution,
    CnfFormula,
    DegenerateDistribution,
    EmptyCandidateCell,
    Encoding,
    Literal,
    MultipleDigitsInCell,
    NoDigitInCell,
    clause_length_distribution,
    count_solutions,
    decode_assignment,
    encode_maximum,
    encode_minimum,
    export_dimacs,
    parse_dimacs,
    sat_solve,
    solve_grid_via_sat,
)
from .rating import (
    BinRanges,
    DegenerateBinning,
    LevelSummary,
    UndefinedCorrelation,
    UniversalCategory,
    classify_level,
    classify_value,
    equal_count_bins,
    percent_solved_by_strategies,
    spearman_rho,
    summarize_level,
)
from .dataset import (
    EmptyCorpus,
    PuzzleMetrics,
    PuzzleRecord,
    RatingConfig,
    RatingReport,
    RejectedRecord,
    emit_histograms,
    emit_report,
    load_corpus,
    rate_corpus,
)
