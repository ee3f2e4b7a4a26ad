"""Risk functions: continuous strictly increasing maps of [0,1] onto itself.

A risk function sends subjective probability to decision weight. All variants
satisfy r(0) = 0 and r(1) = 1 exactly and are strictly increasing in between.
Identity recovers plain expected utility; exponents below/above one give
risk-loving/risk-averse attitudes in the power family.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class RiskFunction:
    """Base class; subclasses implement `_weight` on the open interval."""

    def __call__(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"probability {q!r} outside [0, 1]")
        if q == 0.0:
            return 0.0
        if q == 1.0:
            return 1.0
        return self._weight(q)

    def _weight(self, q: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def spec(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityRisk(RiskFunction):
    """r(q) = q; the agent weights events by their bare probability."""

    def _weight(self, q: float) -> float:
        return q

    def spec(self) -> dict:
        return {"variant": "identity"}


@dataclass(frozen=True)
class PowerRisk(RiskFunction):
    """r(q) = q**exponent. Exponent > 1 is risk-averse, < 1 risk-loving."""

    exponent: float

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError("power risk needs exponent > 0")

    def _weight(self, q: float) -> float:
        return q**self.exponent

    def spec(self) -> dict:
        return {"variant": "power", "k": self.exponent}


@dataclass(frozen=True)
class PrelecRisk(RiskFunction):
    """r(q) = exp(-(-ln q)**alpha), with r(0) = 0 by continuity."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("prelec risk needs alpha > 0")

    def _weight(self, q: float) -> float:
        return math.exp(-((-math.log(q)) ** self.alpha))

    def spec(self) -> dict:
        return {"variant": "prelec", "alpha": self.alpha}


@dataclass(frozen=True)
class ExpoRisk(RiskFunction):
    """r(q) = (1 - exp(-rate*q)) / (1 - exp(-rate)), rate != 0."""

    rate: float

    def __post_init__(self):
        if self.rate == 0:
            raise ValueError("expo risk needs rate != 0 (use IdentityRisk)")

    def _weight(self, q: float) -> float:
        return math.expm1(-self.rate * q) / math.expm1(-self.rate)

    def spec(self) -> dict:
        return {"variant": "expo", "rate": self.rate}


@dataclass(frozen=True)
class TabulatedRisk(RiskFunction):
    """Monotone interpolant through measured (probability, weight) samples.

    The default rule is piecewise-linear, which preserves strict monotonicity
    of the samples outright. Rule "pchip" uses a monotone cubic instead.
    Anchors (0, 0) and (1, 1) must be present.
    """

    probs: tuple[float, ...]
    weights: tuple[float, ...]
    rule: str = "linear"

    def __init__(
        self,
        probs: Sequence[float | Fraction],
        weights: Sequence[float],
        rule: str = "linear",
    ):
        probs = tuple(float(p) for p in probs)
        weights = tuple(float(w) for w in weights)
        if len(probs) != len(weights) or len(probs) < 2:
            raise ValueError("need >= 2 (prob, weight) samples of equal length")
        if probs[0] != 0.0 or probs[-1] != 1.0 or weights[0] != 0.0 or weights[-1] != 1.0:
            raise ValueError("samples must include the anchors (0, 0) and (1, 1)")
        if any(b <= a for a, b in zip(probs, probs[1:])):
            raise ValueError("sample probabilities must be strictly increasing")
        if any(b <= a for a, b in zip(weights, weights[1:])):
            raise ValueError("sample weights must be strictly increasing")
        if rule not in ("linear", "pchip"):
            raise ValueError(f"unknown interpolation rule {rule!r}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rule", rule)
        if rule == "pchip":
            from scipy.interpolate import PchipInterpolator

            object.__setattr__(self, "_pchip", PchipInterpolator(probs, weights))

    def _weight(self, q: float) -> float:
        if self.rule == "pchip":
            return float(self._pchip(q))  # type: ignore[attr-defined]
        i = bisect.bisect_right(self.probs, q)
        q0, q1 = self.probs[i - 1], self.probs[i]
        w0, w1 = self.weights[i - 1], self.weights[i]
        return w0 + (w1 - w0) * (q - q0) / (q1 - q0)

    def spec(self) -> dict:
        return {
            "variant": "tabulated",
            "samples": [list(p) for p in zip(self.probs, self.weights)],
            "rule": self.rule,
        }


def risk_from_spec(data: dict) -> RiskFunction:
    """Build a risk function from its JSON form (inverse of `spec()`)."""
    variant = data.get("variant")
    if variant == "identity":
        return IdentityRisk()
    if variant == "power":
        return PowerRisk(float(data["k"]))
    if variant == "prelec":
        return PrelecRisk(float(data["alpha"]))
    if variant == "expo":
        return ExpoRisk(float(data["rate"]))
    if variant == "tabulated":
        samples = data["samples"]
        return TabulatedRisk(
            [Fraction(str(p)) if isinstance(p, str) else p for p, _ in samples],
            [w for _, w in samples],
            data.get("rule", "linear"),
        )
    raise ValueError(f"unknown risk variant {variant!r}")
