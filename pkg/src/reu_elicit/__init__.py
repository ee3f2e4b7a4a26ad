"""Measure the risk attitude and subjective probabilities of a rank-dependent
maximizer purely from its preferences over gambles."""

from .domain import (
    Agent,
    Event,
    Gamble,
    Labeled,
    LinearCurve,
    LogCurve,
    Money,
    PowerCurve,
    ProbabilityModel,
    SampleSpace,
    TableCurve,
    UtilityFunction,
)
from .elicitation import (
    DecisionWeightSample,
    EstimateMethod,
    FairLotterySource,
    IndifferencePoint,
    ProbabilityEstimate,
    RiskGridSpec,
    better_prize_half,
    decision_weight,
    find_indifference_money,
    invert_risk,
    lottery_event,
    measure_risk_grid,
    probability_by_inversion,
    probability_by_squeeze,
    reconstruct_risk,
    verify_fair_lottery,
)
from .engine import CanonicalGamble, Preference, canonicalize, compare, eu, reu
from .errors import (
    AnswerTimeoutError,
    ConfigError,
    ElicitError,
    FairnessUnavailableError,
    InconsistentAnswersError,
    InvalidEventError,
    InvalidGambleError,
    InvalidPartitionError,
    MonotonicityViolationError,
    QueryMismatchError,
    ReplayDivergenceError,
    SessionClosedError,
    SessionStateError,
    UnknownOutcomeError,
    UtilityDomainError,
)
from .oracle import (
    NoisyOracle,
    Oracle,
    OracleStats,
    PreferenceQuery,
    ReplayOracle,
    SessionOracle,
    SimulatedOracle,
    Transcript,
)
from .risk import (
    ExpoRisk,
    IdentityRisk,
    PowerRisk,
    PrelecRisk,
    RiskFunction,
    TabulatedRisk,
)
from .runners import replay, run_procedure
from .worlds import (
    BlockLotteryProvider,
    SkewedFirstProvider,
    World,
    block_partition,
    perturbed_uniform_world,
    product_world,
    uniform_world,
)

__version__ = "0.1.0"
