"""Evaluation of gambles: expected utility, risk-weighted expected utility,
and preference comparison.

The risk-weighted value of a gamble is computed on its canonical form
(branches sorted by utility, equal-utility branches merged) as

    u_1 + sum_{j >= 2} r(P_j) * (u_j - u_{j-1}),

where P_j is the probability of receiving utility u_j or better. Because
r(1) = 1, this telescoped form equals the rank-dependent sum over utility
levels and reduces to plain expected utility when r is the identity.
Upper-tail probabilities are accumulated exactly and converted to float only
where r is applied.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .domain import Agent, Event, Gamble, Outcome, UtilityFunction


class Preference(enum.Enum):
    """Answer to "which of these two gambles do you prefer?"."""

    LEFT = "left"
    RIGHT = "right"
    INDIFFERENT = "indifferent"

    def flipped(self) -> "Preference":
        if self is Preference.LEFT:
            return Preference.RIGHT
        if self is Preference.RIGHT:
            return Preference.LEFT
        return self


@dataclass(frozen=True)
class CanonicalEntry:
    outcome: Outcome
    event: Event
    utility: float


@dataclass(frozen=True)
class CanonicalGamble:
    """Branches sorted by strictly increasing utility, equal utilities merged."""

    entries: tuple[CanonicalEntry, ...]


def canonicalize(g: Gamble, u: UtilityFunction) -> CanonicalGamble:
    """Sort branches by utility and merge branches with equal utility.

    The merged form carries the same risk-weighted value as any other
    arrangement of the same gamble.
    """
    evaluated = sorted(
        ((u(outcome), event, outcome) for event, outcome in g.branches),
        key=lambda t: t[0],
    )
    entries: list[CanonicalEntry] = []
    for util, event, outcome in evaluated:
        if entries and entries[-1].utility == util:
            prev = entries[-1]
            entries[-1] = CanonicalEntry(prev.outcome, prev.event | event, util)
        else:
            entries.append(CanonicalEntry(outcome, event, util))
    return CanonicalGamble(tuple(entries))


def eu(agent: Agent, g: Gamble, validate: bool = True) -> float:
    """Plain expected utility: sum of p(E_i) * u(o_i) over branches."""
    if validate:
        g.validate_atoms(agent.p.n_atoms)
    return sum(agent.p.event_probability(e) * agent.u(o) for e, o in g.branches)


def reu(agent: Agent, g: Gamble, validate: bool = True) -> float:
    """Risk-weighted expected utility of `g` for `agent`.

    The result lies between the smallest and largest branch utility.
    """
    if validate:
        g.validate_atoms(agent.p.n_atoms)
    entries = canonicalize(g, agent.u).entries
    value = entries[0].utility
    if len(entries) == 1:
        return value
    # Upper-tail probabilities, accumulated exactly from the top entry down.
    tail = Fraction(0)
    tails: list[Fraction] = []
    for entry in reversed(entries[1:]):
        tail += agent.p.event_probability_exact(entry.event)
        tails.append(tail)
    tails.reverse()
    r = agent.r
    for entry_prev, entry, tail in zip(entries, entries[1:], tails):
        value += r(min(float(tail), 1.0)) * (entry.utility - entry_prev.utility)
    return value


def compare(
    agent: Agent, f: Gamble, g: Gamble, tol: float = 1e-9, validate: bool = True
) -> Preference:
    """Preference between `f` (left) and `g` (right), indifferent within `tol`."""
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    vf = reu(agent, f, validate=validate)
    vg = reu(agent, g, validate=validate)
    if abs(vf - vg) <= tol:
        return Preference.INDIFFERENT
    return Preference.LEFT if vf > vg else Preference.RIGHT
