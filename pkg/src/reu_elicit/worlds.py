"""Simulated worlds: spaces, weight assignments, and candidate lottery pools.

A "world" couples a sample space with the simulated agent's probability over
it. Lottery candidates are consecutive-block partitions; a product world
splits every ticket into a hit/miss pair so that a target event of arbitrary
probability coexists with exactly uniform ticket marginals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .domain import Event, ProbabilityModel, SampleSpace, WeightLike, exact


@dataclass(frozen=True)
class World:
    space: SampleSpace
    model: ProbabilityModel


def uniform_world(tickets: int) -> World:
    """`tickets` equally likely atoms; fair lotteries exist for every n | tickets."""
    return World(SampleSpace.tickets(tickets), ProbabilityModel.uniform(tickets))


def weighted_world(weights: Sequence[WeightLike]) -> World:
    return World(SampleSpace.tickets(len(weights)), ProbabilityModel(weights))


def perturbed_uniform_world(tickets: int, bump: WeightLike, index: int = 0) -> World:
    """Uniform weights with one atom raised by `bump`, the rest renormalized.

    Exact arithmetic: the weights still sum to one exactly, so the world is
    valid but no uniform block partition is fair any more.
    """
    bump = exact(bump)
    raised = Fraction(1, tickets) + bump
    if not 0 <= raised <= 1:
        raise ValueError("bump pushes the atom weight outside [0, 1]")
    rest = (1 - raised) / (tickets - 1)
    weights = [rest] * tickets
    weights[index] = raised
    return World(SampleSpace.tickets(tickets), ProbabilityModel(weights))


def product_world(tickets: int, hit_prob: WeightLike) -> tuple[World, Event]:
    """Tickets crossed with a hit/miss coordinate carrying `hit_prob`.

    Atom (t, hit) has weight hit_prob/tickets and (t, miss) the complement
    share, so every ticket's marginal is exactly 1/tickets while the union of
    hit atoms has probability exactly `hit_prob` (as the binary value of the
    float supplied). Block partitions by ticket stay exactly fair.
    """
    theta = exact(hit_prob)
    if not 0 <= theta <= 1:
        raise ValueError("event probability must lie in [0, 1]")
    labels: list[str] = []
    numerators: list[int] = []
    hit, miss = theta.numerator, theta.denominator - theta.numerator
    for t in range(tickets):
        labels.append(f"ticket-{t + 1}:hit")
        labels.append(f"ticket-{t + 1}:miss")
        numerators.append(hit)
        numerators.append(miss)
    model = ProbabilityModel.from_numerators(numerators, tickets * theta.denominator)
    world = World(SampleSpace(labels), model)
    hit_event = Event(range(0, 2 * tickets, 2))
    return world, hit_event


def block_partition(space: SampleSpace, n: int, group: int = 1) -> list[Event]:
    """Split the atoms into n consecutive blocks of whole groups.

    `group` > 1 keeps runs of that many atoms together (a product world's
    hit/miss pairs use group=2 so cells respect ticket boundaries).
    """
    units = space.n_atoms // group
    if space.n_atoms % group or units % n:
        raise ValueError(
            f"cannot split {space.n_atoms} atoms (group {group}) into {n} blocks"
        )
    per = units // n * group
    return [Event(range(i * per, (i + 1) * per)) for i in range(n)]


class BlockLotteryProvider:
    """Candidate partitions: the consecutive-block split, when it exists."""

    def __init__(self, space: SampleSpace, group: int = 1):
        self.space = space
        self.group = group

    def candidates(self, n: int) -> Iterable[Sequence[Event]]:
        units = self.space.n_atoms // self.group
        if self.space.n_atoms % self.group == 0 and units % n == 0:
            yield block_partition(self.space, n, self.group)


class SkewedFirstProvider:
    """Yields a deliberately unfair candidate before the fair block split.

    The first candidate moves one atom from the first block to the second,
    so a verifying consumer must reject it and fall through to the fair one.
    Exercises the rejection path of fairness checking.
    """

    def __init__(self, space: SampleSpace, group: int = 1):
        self._blocks = BlockLotteryProvider(space, group)

    def candidates(self, n: int) -> Iterable[Sequence[Event]]:
        for fair in self._blocks.candidates(n):
            if n >= 2 and fair[0].size >= 2:
                first = fair[0].sorted_indices()
                moved = first[-1]
                skew = [Event(first[:-1]), Event(sorted(fair[1].atom_indices | {moved}))]
                skew.extend(fair[2:])
                yield skew
            yield fair
