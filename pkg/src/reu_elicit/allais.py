"""The classic four-gamble choice pattern on a 100-ticket world.

Gamble 1: one million for certain.
Gamble 2: 89% one million, 10% five million, 1% nothing.
Gamble 3: 11% one million, 89% nothing.
Gamble 4: 10% five million, 90% nothing.

Preferring 1 over 2 while also preferring 4 over 3 is impossible for any
expected-utility maximizer but falls out of a risk-averse weighting such as
r(q) = q**3. Amounts are in millions so linear utility stays small.
"""

from __future__ import annotations

from .domain import Agent, Gamble, Money, ProbabilityModel, SampleSpace, UtilityFunction
from .engine import eu
from .risk import PowerRisk, RiskFunction

NOTHING = Money(0.0)
ONE_MILLION = Money(1.0)
FIVE_MILLION = Money(5.0)


def allais_space() -> SampleSpace:
    return SampleSpace.tickets(100)


def allais_gambles(space: SampleSpace) -> list[Gamble]:
    low = space.event([0])            # 1%
    mid = space.event(range(1, 11))   # 10%
    high = space.event(range(11, 100))  # 89%
    return [
        Gamble.constant(space, ONE_MILLION),
        Gamble([(low, NOTHING), (mid, FIVE_MILLION), (high, ONE_MILLION)]),
        Gamble([(low | mid, ONE_MILLION), (high, NOTHING)]),
        Gamble([(mid, FIVE_MILLION), (low | high, NOTHING)]),
    ]


def allais_agent(risk: RiskFunction | None = None) -> Agent:
    return Agent(
        ProbabilityModel.uniform(100),
        UtilityFunction.linear(),
        risk if risk is not None else PowerRisk(3.0),
    )


def eu_consistent_ratios(step: float = 1e-3) -> list[float]:
    """Utility ratios u(1M)/u(5M) under which plain EU shows both preferences.

    Scans strictly increasing utilities over {0, 1M, 5M} normalized to
    u(0) = 0, u(5M) = 1; returns every ratio in (0, 1) at which EU prefers
    gamble 1 over 2 and gamble 4 over 3. Empty for every step size: the two
    preferences bracket the same threshold from opposite sides.
    """
    space = allais_space()
    g1, g2, g3, g4 = allais_gambles(space)
    hits: list[float] = []
    steps = round(1.0 / step)
    for i in range(1, steps):
        t = i * step
        agent = Agent(
            ProbabilityModel.uniform(100),
            UtilityFunction.from_table([(0.0, 0.0), (1.0, t), (5.0, 1.0)]),
            PowerRisk(1.0),
        )
        if eu(agent, g1) > eu(agent, g2) and eu(agent, g4) > eu(agent, g3):
            hits.append(t)
    return hits
