"""Measurement procedures: indifference search, decision weights, fair-lottery
verification, risk-grid measurement, and the two probability estimators.

Every procedure is a sequential loop of preference queries against an oracle.
Given a fixed oracle and configuration the query sequence is deterministic,
so transcripts replay exactly.

The measurement logic in one paragraph: for a binary gamble "best prize on E,
worst prize otherwise", the certain amount m the agent trades for the gamble
pins down the decision weight of E as (u(m) - u(w)) / (u(b) - u(w)). Decision
weights of events with exactly known rational probabilities (unions of fair
lottery tickets) trace out the risk function on a rational grid; the risk
function is then inverted to turn measured decision weights of arbitrary
events back into subjective probabilities. Alternatively an event's
probability is bracketed directly between lottery events it beats and loses
to, squeezing the bracket through finer lotteries.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol, Sequence

from .domain import Event, Gamble, Money, SampleSpace, UtilityFunction, exact
from .engine import Preference
from .errors import (
    FairnessUnavailableError,
    InconsistentAnswersError,
    InvalidPartitionError,
    MonotonicityViolationError,
)
from .oracle import Oracle
from .risk import RiskFunction, TabulatedRisk


@dataclass(frozen=True)
class DecisionWeightSample:
    """One measured point of the risk function: r-hat(k/n) at exact prob k/n."""

    prob: Fraction
    weight: float
    numerator: int
    denominator: int
    query_ids: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.prob <= 1:
            raise ValueError(f"grid probability {self.prob} outside [0, 1]")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"decision weight {self.weight} outside [0, 1]")

    @classmethod
    def anchor(cls, value: int) -> "DecisionWeightSample":
        """The axiomatic endpoints r(0) = 0 and r(1) = 1."""
        return cls(Fraction(value), float(value), value, 1)


@dataclass(frozen=True)
class RiskGridSpec:
    """What to measure: lottery denominators, prizes, and search tolerance.

    Numerators run 1..n-1 for each denominator; rationals that repeat across
    denominators (1/2 = 2/4 = ...) are measured once. `confirm_depth` > 0
    re-asks bisection answers down to that depth once (majority of three on
    disagreement), which hardens the search against answer noise.
    """

    denominators: tuple[int, ...]
    epsilon: float = 1e-6
    best: Money = Money(1.0)
    worst: Money = Money(0.0)
    utility: UtilityFunction = field(default_factory=UtilityFunction)
    confirm_depth: int = 0

    def __init__(
        self,
        denominators: Iterable[int],
        epsilon: float = 1e-6,
        best: Money = Money(1.0),
        worst: Money = Money(0.0),
        utility: UtilityFunction | None = None,
        confirm_depth: int = 0,
    ):
        denominators = tuple(int(n) for n in denominators)
        if not denominators:
            raise ValueError("need at least one lottery denominator")
        if any(n < 1 for n in denominators):
            raise ValueError("lottery denominators must be positive")
        if epsilon <= 0:
            raise ValueError("indifference tolerance must be positive")
        object.__setattr__(self, "denominators", denominators)
        object.__setattr__(self, "epsilon", float(epsilon))
        object.__setattr__(self, "best", best)
        object.__setattr__(self, "worst", worst)
        object.__setattr__(self, "utility", utility or UtilityFunction())
        object.__setattr__(self, "confirm_depth", int(confirm_depth))

    @classmethod
    def dyadic(cls, depth: int, **kwargs) -> "RiskGridSpec":
        """Denominators 2, 4, ..., 2**depth."""
        return cls([2**d for d in range(1, depth + 1)], **kwargs)


class EstimateMethod(str, enum.Enum):
    SQUEEZE = "squeeze"
    INVERSION = "inversion"
    EXACT_LOTTERY = "exact-lottery"


@dataclass(frozen=True)
class ProbabilityEstimate:
    """A probability with an exact rational bracket and its query cost."""

    value: float
    bracket: tuple[Fraction, Fraction]
    method: EstimateMethod
    query_count: int
    converged: bool = True

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo <= hi:
            raise ValueError(f"bracket {self.bracket} is inverted")

    @property
    def width(self) -> Fraction:
        return self.bracket[1] - self.bracket[0]


@dataclass(frozen=True)
class IndifferencePoint:
    """Result of a bisection for the certain equivalent of a binary gamble."""

    money: float
    lo: float
    hi: float
    query_ids: tuple[int, ...]
    exact: bool = False

    @property
    def outcome(self) -> Money:
        return Money(self.money)


def _majority(answers: Sequence[Preference]) -> Preference:
    counts = Counter(answers)
    top = counts.most_common()
    if len(top) > 1 and top[0][1] == top[1][1]:
        return Preference.INDIFFERENT
    return top[0][0]


def _ask_confirmed(
    oracle: Oracle, left: Gamble, right: Gamble, depth: int, confirm_depth: int
) -> Preference:
    first = oracle.query(left, right)
    if depth > confirm_depth or first is Preference.INDIFFERENT:
        return first
    second = oracle.query(left, right)
    if second == first:
        return first
    return _majority([first, second, oracle.query(left, right)])


def find_indifference_money(
    oracle: Oracle,
    event: Event,
    best: Money,
    worst: Money,
    u: UtilityFunction,
    epsilon: float,
    confirm_depth: int = 0,
) -> IndifferencePoint:
    """Locate m with "m for sure" indifferent to "best on event, else worst".

    Bisection on the money amount between the prizes; terminates when the
    bracket is narrower than `epsilon` or the oracle reports indifference
    outright. Raises MonotonicityViolationError when the agent's endpoint
    answers contradict worst < m < best.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not u.money(worst.amount) < u.money(best.amount):
        raise ValueError("need u(worst) < u(best) for the prize pair")
    space = oracle.space
    gamble = Gamble.prize_on(space, event, best, worst)
    first_id = len(oracle.transcript)

    def ids() -> tuple[int, ...]:
        return tuple(range(first_id, len(oracle.transcript)))

    answer = _ask_confirmed(oracle, Gamble.constant(space, best), gamble, 1, confirm_depth)
    if answer is Preference.INDIFFERENT:
        return IndifferencePoint(best.amount, best.amount, best.amount, ids(), exact=True)
    if answer is Preference.RIGHT:
        raise MonotonicityViolationError(
            "agent prefers the gamble over its best prize for certain"
        )
    answer = _ask_confirmed(oracle, Gamble.constant(space, worst), gamble, 1, confirm_depth)
    if answer is Preference.INDIFFERENT:
        return IndifferencePoint(worst.amount, worst.amount, worst.amount, ids(), exact=True)
    if answer is Preference.LEFT:
        raise MonotonicityViolationError(
            "agent prefers the worst prize for certain over the gamble"
        )

    lo, hi = worst.amount, best.amount
    depth = 1
    while hi - lo > epsilon:
        depth += 1
        mid = 0.5 * (lo + hi)
        answer = _ask_confirmed(
            oracle, Gamble.constant(space, Money(mid)), gamble, depth, confirm_depth
        )
        if answer is Preference.INDIFFERENT:
            return IndifferencePoint(mid, mid, mid, ids(), exact=True)
        if answer is Preference.LEFT:
            hi = mid
        else:
            lo = mid
    return IndifferencePoint(0.5 * (lo + hi), lo, hi, ids())


def weight_from_money(u: UtilityFunction, best: Money, worst: Money, m: float) -> float:
    """Normalized utility position of m between the prizes."""
    uw = u.money(worst.amount)
    return (u.money(m) - uw) / (u.money(best.amount) - uw)


def decision_weight(
    oracle: Oracle,
    event: Event,
    best: Money,
    worst: Money,
    u: UtilityFunction,
    epsilon: float,
    confirm_depth: int = 0,
) -> float:
    """Measured decision weight of `event`: r(p(event)) for a consistent agent.

    Reading this number directly as a probability is the classic betting-odds
    estimate; it is only correct for risk-indifferent agents.
    """
    point = find_indifference_money(oracle, event, best, worst, u, epsilon, confirm_depth)
    return weight_from_money(u, best, worst, point.money)


def better_prize_half(oracle: Oracle, event: Event, best: Money, worst: Money) -> bool:
    """True iff the agent does not care on which side of `event` the prize sits.

    Indifference here forces p(event) = 1/2 for any strictly increasing risk
    attitude, because equal decision weights imply equal probabilities.
    """
    comp = oracle.space.complement(event)
    straight = Gamble([(event, best), (comp, worst)])
    swapped = Gamble([(event, worst), (comp, best)])
    return oracle.query(straight, swapped) is Preference.INDIFFERENT


def check_partition(space: SampleSpace, partition: Sequence[Event]) -> None:
    if not partition:
        raise InvalidPartitionError("empty partition")
    total = 0
    seen: set[int] = set()
    for e in partition:
        e.validate_for(space)
        total += e.size
        seen |= e.atom_indices
    if total != len(seen) or len(seen) != space.n_atoms:
        raise InvalidPartitionError("events do not partition the sample space")


def verify_fair_lottery(
    oracle: Oracle, partition: Sequence[Event], best: Money, worst: Money
) -> bool:
    """Ask whether every partition cell carries the same decision weight.

    Compares "best on E_1" against "best on E_i" for i = 2..n; all indifferent
    means all cells are equiprobable (probability 1/n each). Returns False at
    the first strict answer.
    """
    check_partition(oracle.space, partition)
    if len(partition) == 1:
        return True
    space = oracle.space
    reference = Gamble([(partition[0], best), (space.complement(partition[0]), worst)])
    for cell in partition[1:]:
        candidate = Gamble([(cell, best), (space.complement(cell), worst)])
        if oracle.query(reference, candidate) is not Preference.INDIFFERENT:
            return False
    return True


def lottery_event(partition: Sequence[Event], k: int) -> Event:
    """Union of the first k cells: probability exactly k/n under a fair lottery."""
    if not 0 <= k <= len(partition):
        raise ValueError(f"k={k} outside 0..{len(partition)}")
    indices: set[int] = set()
    for cell in partition[:k]:
        indices |= cell.atom_indices
    return Event(indices)


class LotteryProvider(Protocol):
    """Supplies candidate partitions for a requested denominator."""

    def candidates(self, n: int) -> Iterable[Sequence[Event]]: ...


class FairLotterySource:
    """Caches one usable partition per denominator, optionally query-verified.

    With `verify=True` every candidate is checked through the oracle with the
    generalized prize-swap test before use; with `verify=False` candidates
    are trusted (appropriate when the caller constructed them fair).
    """

    def __init__(
        self,
        provider: LotteryProvider,
        oracle: Oracle | None = None,
        best: Money | None = None,
        worst: Money | None = None,
        verify: bool = True,
    ):
        if verify and (oracle is None or best is None or worst is None):
            raise ValueError("verification needs an oracle and a prize pair")
        self.provider = provider
        self.oracle = oracle
        self.best = best
        self.worst = worst
        self.verify = verify
        self._cache: dict[int, list[Event]] = {}

    def partition(self, n: int) -> list[Event]:
        cached = self._cache.get(n)
        if cached is not None:
            return cached
        for candidate in self.provider.candidates(n):
            candidate = list(candidate)
            if not self.verify or verify_fair_lottery(
                self.oracle, candidate, self.best, self.worst
            ):
                self._cache[n] = candidate
                return candidate
        raise FairnessUnavailableError([n])


def measure_risk_grid(
    oracle: Oracle,
    spec: RiskGridSpec,
    lotteries: LotteryProvider | FairLotterySource,
) -> list[DecisionWeightSample]:
    """Measure decision weights on the rational grid defined by `spec`.

    Fairness of every denominator's partition is established first (all
    failures are reported together); each new grid rational k/n then gets a
    bisection measurement. The anchors (0, 0) and (1, 1) are included
    axiomatically, and the result is sorted by probability.
    """
    if not isinstance(lotteries, FairLotterySource):
        lotteries = FairLotterySource(lotteries, oracle, spec.best, spec.worst)
    partitions: dict[int, list[Event]] = {}
    unavailable: list[int] = []
    for n in spec.denominators:
        try:
            partitions[n] = lotteries.partition(n)
        except FairnessUnavailableError:
            unavailable.append(n)
    if unavailable:
        raise FairnessUnavailableError(unavailable)

    samples = [DecisionWeightSample.anchor(0), DecisionWeightSample.anchor(1)]
    seen = {Fraction(0), Fraction(1)}
    for n in spec.denominators:
        for k in range(1, n):
            prob = Fraction(k, n)
            if prob in seen:
                continue
            seen.add(prob)
            point = find_indifference_money(
                oracle,
                lottery_event(partitions[n], k),
                spec.best,
                spec.worst,
                spec.utility,
                spec.epsilon,
                spec.confirm_depth,
            )
            weight = weight_from_money(spec.utility, spec.best, spec.worst, point.money)
            samples.append(
                DecisionWeightSample(prob, weight, k, n, point.query_ids)
            )
    samples.sort(key=lambda s: s.prob)
    return samples


def reconstruct_risk(
    samples: Sequence[DecisionWeightSample], rule: str = "linear"
) -> TabulatedRisk:
    """Monotone interpolant through measured samples (anchors required).

    Raises InconsistentAnswersError when the measured weights are not
    strictly increasing: either the agent is not a rank-dependent maximizer
    or noise exceeded the measurement tolerance.
    """
    ordered = sorted(samples, key=lambda s: s.prob)
    probs = [s.prob for s in ordered]
    weights = [s.weight for s in ordered]
    if len(ordered) < 2 or probs[0] != 0 or probs[-1] != 1:
        raise ValueError("samples must include the anchors at probability 0 and 1")
    if any(b <= a for a, b in zip(probs, probs[1:])):
        raise ValueError("duplicate grid probabilities")
    if any(b <= a for a, b in zip(weights, weights[1:])):
        raise InconsistentAnswersError(
            "measured weights are not strictly increasing; the agent violated "
            "the risk-ordering axioms or noise exceeded the tolerance"
        )
    return TabulatedRisk(probs, weights, rule)


def invert_risk(r: RiskFunction, weight: float, tol: float = 1e-9) -> float:
    """The probability q with r(q) = weight, by bisection on [0, 1]."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"decision weight {weight!r} outside [0, 1]")
    if weight == 0.0:
        return 0.0
    if weight == 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        value = r(mid)
        if abs(value - weight) <= tol:
            return mid
        if value < weight:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 5e-17:
            break
    return mid


def probability_by_inversion(
    oracle: Oracle,
    event: Event,
    riskfn: RiskFunction,
    best: Money,
    worst: Money,
    u: UtilityFunction,
    epsilon: float,
    invert_tol: float = 1e-9,
    confirm_depth: int = 0,
) -> ProbabilityEstimate:
    """p(event) as r-inverse of the measured decision weight.

    `riskfn` is the agent's risk function, previously measured (a
    reconstructed interpolant) or known in closed form.
    """
    first = len(oracle.transcript)
    point = find_indifference_money(oracle, event, best, worst, u, epsilon, confirm_depth)
    value = invert_risk(
        riskfn, weight_from_money(u, best, worst, point.money), invert_tol
    )
    q_lo = invert_risk(riskfn, weight_from_money(u, best, worst, point.lo), invert_tol)
    q_hi = invert_risk(riskfn, weight_from_money(u, best, worst, point.hi), invert_tol)
    bracket = (
        min(Fraction(q_lo), Fraction(value)),
        max(Fraction(q_hi), Fraction(value)),
    )
    return ProbabilityEstimate(
        value, bracket, EstimateMethod.INVERSION, len(oracle.transcript) - first
    )


def probability_by_squeeze(
    oracle: Oracle,
    event: Event,
    best: Money,
    worst: Money,
    lotteries: FairLotterySource,
    schedule: Sequence[int],
    tol: float | Fraction,
) -> ProbabilityEstimate:
    """Bracket p(event) between fair-lottery probabilities.

    At each denominator n the procedure binary-searches the ticket count k,
    comparing "best on event" with "best on the first k of n tickets": the
    preferred gamble carries the more probable event, and indifference is an
    exact rational hit. Stops when the exact bracket is narrower than `tol`;
    if the schedule runs out first the estimate is flagged not converged.
    """
    if not schedule:
        raise ValueError("empty denominator schedule")
    tol_f = exact(tol)
    space = oracle.space
    event_gamble = Gamble.prize_on(space, event, best, worst)
    first = len(oracle.transcript)
    lo, hi = Fraction(0), Fraction(1)
    for n in schedule:
        if hi - lo <= tol_f:
            break
        partition = lotteries.partition(n)
        klo = (lo.numerator * n) // lo.denominator
        khi = -((-hi.numerator * n) // hi.denominator)  # ceil
        while khi - klo > 1:
            kmid = (klo + khi) // 2
            lottery_gamble = Gamble.prize_on(space, lottery_event(partition, kmid), best, worst)
            answer = oracle.query(event_gamble, lottery_gamble)
            if answer is Preference.INDIFFERENT:
                hit = Fraction(kmid, n)
                return ProbabilityEstimate(
                    float(hit),
                    (hit, hit),
                    EstimateMethod.EXACT_LOTTERY,
                    len(oracle.transcript) - first,
                )
            if answer is Preference.LEFT:
                klo = kmid
            else:
                khi = kmid
        lo = max(lo, Fraction(klo, n))
        hi = min(hi, Fraction(khi, n))
    return ProbabilityEstimate(
        float((lo + hi) / 2),
        (lo, hi),
        EstimateMethod.SQUEEZE,
        len(oracle.transcript) - first,
        converged=hi - lo <= tol_f,
    )
