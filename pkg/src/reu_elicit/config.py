"""JSON schemas and codecs: agent files, utility/risk specs, gambles, hashing.

Agent configuration file::

    {
      "atoms": ["ticket-1", ...],          # or {"tickets": 32}
      "weights": [0.25, "1/4", ...],       # strings allow exact rationals
      "utility": {"money": {"kind": "linear", ...}, "labels": {...}},
      "risk": {"variant": "power", "k": 3.0}
    }

`atoms`/`weights` may be omitted when the caller constructs the world (the
elicitation commands do); `utility` defaults to linear.
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from typing import Any

from .domain import (
    Agent,
    Event,
    Gamble,
    Labeled,
    LinearCurve,
    LogCurve,
    Money,
    MoneyCurve,
    Outcome,
    PowerCurve,
    ProbabilityModel,
    SampleSpace,
    TableCurve,
    UtilityFunction,
)
from .errors import ConfigError
from .risk import risk_from_spec


def canonical_json(data: Any) -> str:
    """Stable serialization used for hashing and byte-identical outputs."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Outcomes and gambles
# ---------------------------------------------------------------------------

def outcome_to_json(o: Outcome) -> dict:
    if isinstance(o, Money):
        return {"money": o.amount}
    return {"label": o.name}


def outcome_from_json(data: dict) -> Outcome:
    if "money" in data:
        return Money(float(data["money"]))
    if "label" in data:
        return Labeled(str(data["label"]))
    raise ConfigError(f"not an outcome: {data!r}", field="outcome")


def gamble_to_json(g: Gamble) -> dict:
    return {
        "branches": [
            {"event": e.sorted_indices(), "outcome": outcome_to_json(o)}
            for e, o in g.branches
        ]
    }


def gamble_from_json(data: dict) -> Gamble:
    try:
        branches = data["branches"]
    except (KeyError, TypeError):
        raise ConfigError("missing 'branches'", field="gamble") from None
    return Gamble(
        (Event(int(i) for i in b["event"]), outcome_from_json(b["outcome"]))
        for b in branches
    )


# ---------------------------------------------------------------------------
# Utility
# ---------------------------------------------------------------------------

def _curve_from_json(data: dict) -> MoneyCurve:
    kind = data.get("kind", "linear")
    lo = float(data.get("lo", -math.inf))
    hi = float(data.get("hi", math.inf))
    if kind == "linear":
        return LinearCurve(float(data.get("slope", 1.0)), float(data.get("intercept", 0.0)), lo, hi)
    if kind == "power":
        return PowerCurve(float(data.get("exponent", 0.5)), max(lo, 0.0), hi)
    if kind == "log":
        return LogCurve(float(data.get("shift", 1.0)), lo, hi)
    if kind == "table":
        pts = sorted((float(x), float(y)) for x, y in data["points"])
        return TableCurve(tuple(x for x, _ in pts), tuple(y for _, y in pts))
    raise ConfigError(f"unknown money curve kind {kind!r}", field="utility.money.kind")


def utility_from_json(data: dict | None) -> UtilityFunction:
    if data is None:
        return UtilityFunction()
    curve = _curve_from_json(data.get("money", {}))
    labels = {str(k): float(v) for k, v in data.get("labels", {}).items()}
    return UtilityFunction(curve, labels)


def utility_to_json(u: UtilityFunction) -> dict:
    out: dict[str, Any] = {"money": _finite_spec(u.curve.spec())}
    if u.labels:
        out["labels"] = dict(u.labels)
    return out


def _finite_spec(spec: dict) -> dict:
    # JSON has no infinity; drop unbounded endpoints.
    return {
        k: v
        for k, v in spec.items()
        if not (isinstance(v, float) and math.isinf(v))
    }


# ---------------------------------------------------------------------------
# Agents
# ---------------------------------------------------------------------------

def space_from_json(data: dict) -> SampleSpace:
    atoms = data.get("atoms")
    if atoms is None:
        raise ConfigError("missing 'atoms'", field="atoms")
    if isinstance(atoms, dict) and "tickets" in atoms:
        return SampleSpace.tickets(int(atoms["tickets"]))
    return SampleSpace(str(a) for a in atoms)


def weight_from_json(w: Any) -> Fraction:
    if isinstance(w, str):
        return Fraction(w)
    if isinstance(w, (int, float)):
        return Fraction(w)
    raise ConfigError(f"bad weight {w!r}", field="weights")


def agent_from_json(data: dict) -> tuple[Agent, SampleSpace]:
    """Load a fully specified agent (probability, utility, risk) plus its space."""
    space = space_from_json(data)
    weights = data.get("weights")
    if weights is None:
        model = ProbabilityModel.uniform(space.n_atoms)
    else:
        if len(weights) != space.n_atoms:
            raise ConfigError(
                f"{len(weights)} weights for {space.n_atoms} atoms", field="weights"
            )
        model = ProbabilityModel(weight_from_json(w) for w in weights)
    u = utility_from_json(data.get("utility"))
    try:
        r = risk_from_spec(data.get("risk", {"variant": "identity"}))
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc), field="risk") from exc
    return Agent(model, u, r), space


def agent_to_json(agent: Agent, space: SampleSpace) -> dict:
    return {
        "atoms": list(space.atoms),
        "weights": [
            w if isinstance(w, int) else f"{w.numerator}/{w.denominator}"
            for w in agent.p.atom_weights
        ],
        "utility": utility_to_json(agent.u),
        "risk": agent.r.spec(),
    }


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data: Any, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(data))
        fh.write("\n")

