import math
import random

import pytest

from reu_elicit import (
    Agent,
    ExpoRisk,
    Gamble,
    IdentityRisk,
    Money,
    PowerRisk,
    PrelecRisk,
    ProbabilityModel,
    SampleSpace,
    SimulatedOracle,
    UtilityFunction,
)

#: Exponent making r(1/2) = 0.1 in the power family: the canonical
#: risk-averse agent who pays at most 10 cents for a fair dollar coin flip.
RISK_AVERSE_HALF_TO_TENTH = math.log(0.1) / math.log(0.5)

#: Ground-truth risk families exercised across recovery tests.
RISK_FAMILIES = {
    "identity": IdentityRisk(),
    "power-0.5": PowerRisk(0.5),
    "power-3": PowerRisk(3.0),
    "prelec-0.65": PrelecRisk(0.65),
    "expo-2": ExpoRisk(2.0),
}


@pytest.fixture
def coin():
    """Two-atom fair-coin world."""
    space = SampleSpace(["heads", "tails"])
    return space, ProbabilityModel.uniform(2)


@pytest.fixture
def bob(coin):
    """Linear-utility agent who decision-weights a fair coin at 0.1."""
    space, model = coin
    agent = Agent(model, UtilityFunction.linear(), PowerRisk(RISK_AVERSE_HALF_TO_TENTH))
    return agent, space


def coin_gamble(space):
    return Gamble.prize_on(space, space.event([0]), Money(1.0), Money(0.0))


def random_gamble(rng: random.Random, space, model, max_branches=8, lo=0.0, hi=10.0):
    """Random partition of the space with random money outcomes."""
    n = space.n_atoms
    branch_count = rng.randint(1, min(max_branches, n))
    indices = list(range(n))
    rng.shuffle(indices)
    cuts = sorted(rng.sample(range(1, n), branch_count - 1)) if branch_count > 1 else []
    bounds = [0] + cuts + [n]
    branches = []
    for a, b in zip(bounds, bounds[1:]):
        branches.append(
            (space.event(indices[a:b]), Money(round(rng.uniform(lo, hi), 6)))
        )
    return Gamble(branches)


def random_world(rng: random.Random, max_atoms=12):
    """Random space with exact rational weights."""
    n = rng.randint(2, max_atoms)
    raw = [rng.randint(1, 100) for _ in range(n)]
    total = sum(raw)
    from fractions import Fraction

    space = SampleSpace.tickets(n)
    model = ProbabilityModel([Fraction(r, total) for r in raw])
    return space, model


def simulated(agent, space, tol=1e-9):
    return SimulatedOracle(agent, space, tol=tol)
