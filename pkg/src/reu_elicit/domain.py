"""Core value types: sample spaces, events, outcomes, gambles, probability and utility.

All types are immutable after construction and safe to share across threads.
Atom weights are kept as exact rationals internally (integer numerators over a
common denominator); probabilities become floats only where they enter a
risk-weighted evaluation.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import (
    InvalidEventError,
    InvalidGambleError,
    UnknownOutcomeError,
    UtilityDomainError,
)
from .risk import RiskFunction

WeightLike = Union[int, float, str, Fraction]

#: Tolerance for the "atom weights sum to one" invariant.
WEIGHT_SUM_TOL = 1e-12


def exact(value: WeightLike) -> Fraction:
    """Convert a weight-like value to an exact Fraction.

    Floats convert to their exact binary value, so arithmetic downstream is
    exact with respect to what the caller actually supplied. Strings accept
    "k/n" and decimal literals.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"weight must be finite, got {value!r}")
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class Event:
    """A subset of a sample space, stored as atom indices."""

    atom_indices: frozenset[int]

    def __init__(self, atom_indices: Iterable[int]):
        object.__setattr__(self, "atom_indices", frozenset(atom_indices))

    @property
    def size(self) -> int:
        return len(self.atom_indices)

    def __or__(self, other: "Event") -> "Event":
        return Event(self.atom_indices | other.atom_indices)

    def __and__(self, other: "Event") -> "Event":
        return Event(self.atom_indices & other.atom_indices)

    def isdisjoint(self, other: "Event") -> bool:
        return self.atom_indices.isdisjoint(other.atom_indices)

    def validate_for(self, space: "SampleSpace") -> None:
        if not self.atom_indices:
            return
        if min(self.atom_indices) < 0 or max(self.atom_indices) >= space.n_atoms:
            raise InvalidEventError(
                f"event atoms {sorted(self.atom_indices)[:8]}... outside space of "
                f"{space.n_atoms} atoms"
            )

    def sorted_indices(self) -> list[int]:
        return sorted(self.atom_indices)



@dataclass(frozen=True)
class SampleSpace:
    """Finite ordered set of atoms (maximally specific states)."""

    atoms: tuple[str, ...]

    def __init__(self, atoms: Iterable[str]):
        atoms = tuple(atoms)
        if len(atoms) < 1:
            raise ValueError("a sample space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom labels must be unique")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def tickets(cls, count: int, prefix: str = "ticket") -> "SampleSpace":
        """Space of `count` lottery tickets with generated labels."""
        return cls(f"{prefix}-{i + 1}" for i in range(count))

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def event(self, indices: Iterable[int]) -> Event:
        e = Event(indices)
        e.validate_for(self)
        return e

    @property
    def full_event(self) -> Event:
        return Event(range(self.n_atoms))

    def complement(self, e: Event) -> Event:
        e.validate_for(self)
        return Event(i for i in range(self.n_atoms) if i not in e.atom_indices)


@dataclass(frozen=True)
class Money:
    """A monetary prize. Amounts are in whatever unit the utility curve uses."""

    amount: float

    def __post_init__(self):
        if not math.isfinite(self.amount):
            raise ValueError(f"money amount must be finite, got {self.amount!r}")


@dataclass(frozen=True)
class Labeled:
    """A non-monetary prize identified by name; utility comes from a table."""

    name: str


Outcome = Union[Money, Labeled]


@dataclass(frozen=True)
class Gamble:
    """Finite assignment of outcomes to a partition of events.

    Branch events must be pairwise disjoint and jointly cover the space;
    empty events are permitted (they contribute nothing).
    """

    branches: tuple[tuple[Event, Outcome], ...]

    def __init__(self, branches: Iterable[tuple[Event, Outcome]]):
        branches = tuple((e, o) for e, o in branches)
        if not branches:
            raise InvalidGambleError("a gamble needs at least one branch")
        object.__setattr__(self, "branches", branches)

    def validate(self, space: SampleSpace) -> None:
        self.validate_atoms(space.n_atoms)

    def validate_atoms(self, n_atoms: int) -> None:
        total = 0
        seen: set[int] = set()
        for e, _ in self.branches:
            if e.atom_indices and (min(e.atom_indices) < 0 or max(e.atom_indices) >= n_atoms):
                raise InvalidEventError(
                    f"branch event refers to atoms outside a space of {n_atoms}"
                )
            total += e.size
            seen |= e.atom_indices
        if len(seen) != total:
            raise InvalidGambleError("branch events overlap")
        if len(seen) != n_atoms:
            raise InvalidGambleError("branch events do not cover the sample space")

    @classmethod
    def constant(cls, space: SampleSpace, outcome: Outcome) -> "Gamble":
        """The gamble that yields `outcome` no matter what."""
        return cls([(space.full_event, outcome)])

    @classmethod
    def prize_on(
        cls, space: SampleSpace, event: Event, best: Outcome, worst: Outcome
    ) -> "Gamble":
        """`best` if `event` obtains, `worst` otherwise."""
        return cls([(event, best), (space.complement(event), worst)])


class ProbabilityModel:
    """Finitely additive probability over a sample space's atoms.

    Weights are normalized to integer numerators over one common denominator,
    so event probabilities are exact and additivity holds exactly.
    """

    __slots__ = ("_numerators", "_denominator", "_cache")

    def __init__(self, weights: Iterable[WeightLike]):
        fracs = [exact(w) for w in weights]
        if not fracs:
            raise ValueError("need at least one atom weight")
        if any(f < 0 for f in fracs):
            raise ValueError("atom weights must be non-negative")
        denom = math.lcm(*(f.denominator for f in fracs))
        self._bind(
            [f.numerator * (denom // f.denominator) for f in fracs], denom
        )

    def _bind(self, numerators: list[int], denominator: int) -> None:
        total = sum(numerators)
        if abs(total - denominator) > WEIGHT_SUM_TOL * denominator:
            raise ValueError(
                f"atom weights sum to {total / denominator!r}, expected 1"
            )
        self._numerators: tuple[int, ...] = tuple(numerators)
        self._denominator: int = denominator
        self._cache: dict[Event, int] = {}

    @classmethod
    def from_numerators(
        cls, numerators: Iterable[int], denominator: int
    ) -> "ProbabilityModel":
        """Exact construction from integer weights over a common denominator."""
        model = cls.__new__(cls)
        numerators = [int(n) for n in numerators]
        if not numerators:
            raise ValueError("need at least one atom weight")
        if denominator <= 0 or any(n < 0 for n in numerators):
            raise ValueError("weights must be non-negative over a positive denominator")
        model._bind(numerators, denominator)
        return model

    @classmethod
    def uniform(cls, n_atoms: int) -> "ProbabilityModel":
        return cls.from_numerators([1] * n_atoms, n_atoms)

    @property
    def n_atoms(self) -> int:
        return len(self._numerators)

    @property
    def atom_weights(self) -> tuple[Fraction, ...]:
        d = self._denominator
        return tuple(Fraction(n, d) for n in self._numerators)

    def _event_numerator(self, e: Event) -> int:
        cached = self._cache.get(e)
        if cached is not None:
            return cached
        nums = self._numerators
        if e.atom_indices and (min(e.atom_indices) < 0 or max(e.atom_indices) >= len(nums)):
            raise InvalidEventError(
                f"event atoms outside model with {len(nums)} atoms"
            )
        num = sum(nums[i] for i in e.atom_indices)
        self._cache[e] = num
        return num

    def event_probability_exact(self, e: Event) -> Fraction:
        return Fraction(self._event_numerator(e), self._denominator)

    def event_probability(self, e: Event) -> float:
        return float(self.event_probability_exact(e))


class MoneyCurve:
    """Strictly increasing continuous utility-of-money curve on [lo, hi]."""

    lo: float
    hi: float

    def value(self, x: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def spec(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class LinearCurve(MoneyCurve):
    slope: float = 1.0
    intercept: float = 0.0
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if self.slope <= 0:
            raise ValueError("linear utility needs a positive slope")

    def value(self, x: float) -> float:
        return self.slope * x + self.intercept

    def spec(self) -> dict:
        return {
            "kind": "linear",
            "slope": self.slope,
            "intercept": self.intercept,
            "lo": self.lo,
            "hi": self.hi,
        }


@dataclass(frozen=True)
class PowerCurve(MoneyCurve):
    exponent: float = 0.5
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if self.exponent <= 0:
            raise ValueError("power utility needs a positive exponent")
        if self.lo < 0:
            raise ValueError("power utility is defined for non-negative money")

    def value(self, x: float) -> float:
        return x**self.exponent

    def spec(self) -> dict:
        return {"kind": "power", "exponent": self.exponent, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class LogCurve(MoneyCurve):
    shift: float = 1.0
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if self.lo + self.shift <= 0:
            raise ValueError("log utility needs lo + shift > 0")

    def value(self, x: float) -> float:
        return math.log(x + self.shift)

    def spec(self) -> dict:
        return {"kind": "log", "shift": self.shift, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class TableCurve(MoneyCurve):
    """Breakpoint table with linear interpolation between points."""

    xs: tuple[float, ...] = (0.0, 1.0)
    ys: tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("table needs >= 2 (x, y) points of equal length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("table x-values must be strictly increasing")
        if any(b <= a for a, b in zip(self.ys, self.ys[1:])):
            raise ValueError("table y-values must be strictly increasing")

    @property
    def lo(self) -> float:
        return self.xs[0]

    @property
    def hi(self) -> float:
        return self.xs[-1]

    def value(self, x: float) -> float:
        i = bisect.bisect_right(self.xs, x)
        if i == 0:
            return self.ys[0]
        if i == len(self.xs):
            return self.ys[-1]
        x0, x1 = self.xs[i - 1], self.xs[i]
        y0, y1 = self.ys[i - 1], self.ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def spec(self) -> dict:
        return {"kind": "table", "points": [list(p) for p in zip(self.xs, self.ys)]}


@dataclass(frozen=True)
class UtilityFunction:
    """Utility of outcomes: a money curve plus a table for labeled outcomes."""

    curve: MoneyCurve = field(default_factory=LinearCurve)
    labels: Mapping[str, float] = field(default_factory=dict)

    def money(self, amount: float) -> float:
        if not (self.curve.lo <= amount <= self.curve.hi):
            raise UtilityDomainError(
                f"money amount {amount} outside utility domain "
                f"[{self.curve.lo}, {self.curve.hi}]"
            )
        return self.curve.value(amount)

    def __call__(self, outcome: Outcome) -> float:
        if isinstance(outcome, Money):
            return self.money(outcome.amount)
        if isinstance(outcome, Labeled):
            try:
                return self.labels[outcome.name]
            except KeyError:
                raise UnknownOutcomeError(
                    f"no utility entry for labeled outcome {outcome.name!r}"
                ) from None
        raise TypeError(f"not an outcome: {outcome!r}")

    @classmethod
    def linear(
        cls,
        slope: float = 1.0,
        intercept: float = 0.0,
        lo: float = -math.inf,
        hi: float = math.inf,
        labels: Mapping[str, float] | None = None,
    ) -> "UtilityFunction":
        return cls(LinearCurve(slope, intercept, lo, hi), dict(labels or {}))

    @classmethod
    def from_table(
        cls, points: Iterable[tuple[float, float]], labels: Mapping[str, float] | None = None
    ) -> "UtilityFunction":
        pts = sorted(points)
        return cls(
            TableCurve(tuple(x for x, _ in pts), tuple(y for _, y in pts)),
            dict(labels or {}),
        )


@dataclass(frozen=True)
class Agent:
    """A rank-dependent maximizer: probability model, utility, risk attitude."""

    p: ProbabilityModel
    u: UtilityFunction
    r: RiskFunction
