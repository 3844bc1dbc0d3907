"""rpslab: a simulation and verification lab for Ramsey, Paper, Scissors.

Exact game mechanics with replayable transcripts, the structured proposer
and random-decider strategies, the Coins-and-Buckets auxiliary game with
its tail bounds, independence certification, and Monte Carlo estimation of
the win threshold.
"""

from .game import (
    GameError,
    GameState,
    IllegalMoveError,
    PairStatus,
    PairView,
    PlannedPairUnavailableError,
    ProtocolViolationError,
    Transcript,
    TranscriptParseError,
    TurnRecord,
    apply_turn,
    is_terminal,
    legal_moves,
    new_game,
    pair_status,
    play_game,
    replay_transcript,
)
from .strategies import (
    DeciderPolicy,
    EpochSchedule,
    Partition,
    PeriodPlan,
    ProposerPolicy,
    StrategyInvariantError,
    UnsupportedNError,
    build_partition,
    compile_period_list,
    decider_from_descriptor,
    epoch_schedule,
    log_star,
    make_decider,
    paper_proposer,
    proposer_from_descriptor,
    uniform_random_proposer,
)
from .coins import (
    CBParams,
    CBResult,
    HeadsPolicy,
    cb_score,
    empirical_tail,
    make_heads_policy,
    martingale_mean,
    play_coins_buckets,
    sample_x_ab,
    tail_bound_bohman,
    tail_bound_bucket,
    tail_bound_simple,
    wilson_interval,
)
from .analysis import (
    CertificateError,
    EpochStats,
    GraphView,
    IndependentSetCertificate,
    SizeLimitError,
    ThresholdEstimate,
    ValidationReport,
    certify_graph,
    count_closed_by_outside,
    coupled_clairvoyant_decider,
    estimate_threshold,
    exact_independence_number,
    greedy_independent_set,
    is_maximal_triangle_free,
    is_reachable_subgraph,
    is_triangle_free,
    open_density,
    period_epoch_stats,
    play_clairvoyant_game,
    shearer_bound,
    verify_transcript,
)
from .seeding import SeedStream, mix, splitmix64

__version__ = "0.1.0"
