"""Named procedures over a config dict and an oracle, plus replay.

The same runner serves the batch CLI (simulated oracle), the HTTP session
service (live oracle), and replay (recorded oracle), so results are
structurally identical across transports. Configs are plain JSON data; the
world they describe is the observer's side only (atom count, lottery blocks,
target event). The answering agent lives entirely inside the oracle.
"""

from __future__ import annotations

import io
from fractions import Fraction
from typing import Callable

from .config import canonical_json, config_hash, utility_from_json
from .domain import Money, SampleSpace
from .elicitation import (
    DecisionWeightSample,
    FairLotterySource,
    ProbabilityEstimate,
    RiskGridSpec,
    measure_risk_grid,
    probability_by_inversion,
    probability_by_squeeze,
    reconstruct_risk,
)
from .errors import ConfigError
from .oracle import Oracle, ReplayOracle, Transcript
from .risk import risk_from_spec
from .worlds import BlockLotteryProvider

PROCEDURES = ("risk-grid", "prob-squeeze", "prob-inversion")


def space_from_config(config: dict) -> SampleSpace:
    atoms = config.get("atoms")
    if isinstance(atoms, int):
        if atoms < 1:
            raise ConfigError("atom count must be positive", field="atoms")
        return SampleSpace.tickets(atoms)
    if isinstance(atoms, list) and atoms:
        return SampleSpace(str(a) for a in atoms)
    raise ConfigError("need an atom count or label list", field="atoms")


def _money_pair(config: dict) -> tuple[Money, Money]:
    best = Money(float(config.get("best", 1.0)))
    worst = Money(float(config.get("worst", 0.0)))
    return best, worst


def _tolerance(value, field: str) -> Fraction:
    try:
        return Fraction(str(value)) if isinstance(value, str) else Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ConfigError(f"bad tolerance {value!r}", field=field) from None


def _event_from_config(config: dict, space: SampleSpace):
    indices = config.get("event")
    if not isinstance(indices, list) or not indices:
        raise ConfigError("need a non-empty list of atom indices", field="event")
    return space.event(int(i) for i in indices)


def _grid_spec(config: dict) -> RiskGridSpec:
    denominators = config.get("denominators")
    if not isinstance(denominators, list) or not denominators:
        raise ConfigError("need a non-empty denominator list", field="denominators")
    best, worst = _money_pair(config)
    try:
        return RiskGridSpec(
            denominators,
            epsilon=float(config.get("epsilon", 1e-6)),
            best=best,
            worst=worst,
            utility=utility_from_json(config.get("utility")),
            confirm_depth=int(config.get("confirm_depth", 0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), field="denominators") from exc


def validate_config(procedure: str, config: dict) -> None:
    """Raise ConfigError with a field diagnostic for an unusable config."""
    if procedure not in PROCEDURES:
        raise ConfigError(f"unknown procedure {procedure!r}", field="procedure")
    space = space_from_config(config)
    if procedure == "risk-grid":
        _grid_spec(config)
        return
    _event_from_config(config, space)
    best, worst = _money_pair(config)
    if worst.amount >= best.amount:
        raise ConfigError("worst prize must be below best prize", field="worst")
    if procedure == "prob-squeeze":
        schedule = config.get("schedule")
        if not isinstance(schedule, list) or not schedule:
            raise ConfigError("need a non-empty denominator schedule", field="schedule")
        _tolerance(config.get("tolerance", "1/4096"), "tolerance")
    else:
        if "risk" not in config:
            raise ConfigError(
                "inversion needs a measured or known risk function", field="risk"
            )
        try:
            risk_from_spec(config["risk"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc), field="risk") from exc


def _lottery_source(config: dict, space: SampleSpace, oracle: Oracle) -> FairLotterySource:
    provider = BlockLotteryProvider(space, int(config.get("group", 1)))
    best, worst = _money_pair(config)
    verify = bool(config.get("verify_lotteries", True))
    return FairLotterySource(provider, oracle, best, worst, verify=verify)


def sample_to_json(s: DecisionWeightSample) -> dict:
    return {
        "k": s.numerator,
        "n": s.denominator,
        "prob": f"{s.prob.numerator}/{s.prob.denominator}",
        "prob_float": float(s.prob),
        "weight": s.weight,
        "query_ids": list(s.query_ids),
    }


def sample_from_json(data: dict) -> DecisionWeightSample:
    return DecisionWeightSample(
        Fraction(data["prob"]),
        float(data["weight"]),
        int(data["k"]),
        int(data["n"]),
        tuple(data.get("query_ids", ())),
    )


def estimate_to_json(e: ProbabilityEstimate) -> dict:
    lo, hi = e.bracket
    return {
        "value": e.value,
        "bracket": [f"{lo.numerator}/{lo.denominator}", f"{hi.numerator}/{hi.denominator}"],
        "bracket_float": [float(lo), float(hi)],
        "method": e.method.value,
        "query_count": e.query_count,
        "converged": e.converged,
    }


def run_risk_grid(config: dict, oracle: Oracle) -> dict:
    spec = _grid_spec(config)
    source = _lottery_source(config, oracle.space, oracle)
    samples = measure_risk_grid(oracle, spec, source)
    curve = reconstruct_risk(samples, config.get("rule", "linear"))
    return {
        "samples": [sample_to_json(s) for s in samples],
        "risk_curve": {
            "knots": [[p, w] for p, w in zip(curve.probs, curve.weights)],
            "rule": curve.rule,
        },
        "query_count": len(oracle.transcript),
    }


def run_prob_squeeze(config: dict, oracle: Oracle) -> dict:
    space = oracle.space
    event = _event_from_config(config, space)
    best, worst = _money_pair(config)
    source = _lottery_source(config, space, oracle)
    estimate = probability_by_squeeze(
        oracle,
        event,
        best,
        worst,
        source,
        [int(n) for n in config["schedule"]],
        _tolerance(config.get("tolerance", "1/4096"), "tolerance"),
    )
    return {
        "estimates": [estimate_to_json(estimate)],
        "query_count": len(oracle.transcript),
    }


def run_prob_inversion(config: dict, oracle: Oracle) -> dict:
    space = oracle.space
    event = _event_from_config(config, space)
    best, worst = _money_pair(config)
    estimate = probability_by_inversion(
        oracle,
        event,
        risk_from_spec(config["risk"]),
        best,
        worst,
        utility_from_json(config.get("utility")),
        float(config.get("epsilon", 1e-6)),
        invert_tol=float(config.get("invert_tol", 1e-9)),
        confirm_depth=int(config.get("confirm_depth", 0)),
    )
    return {
        "estimates": [estimate_to_json(estimate)],
        "query_count": len(oracle.transcript),
    }


_RUNNERS: dict[str, Callable[[dict, Oracle], dict]] = {
    "risk-grid": run_risk_grid,
    "prob-squeeze": run_prob_squeeze,
    "prob-inversion": run_prob_inversion,
}


def run_procedure(procedure: str, config: dict, oracle: Oracle) -> dict:
    validate_config(procedure, config)
    oracle.transcript.metadata.update(
        {
            "procedure": procedure,
            "oracle_kind": oracle.kind,
            "config_hash": config_hash(config),
        }
    )
    return _RUNNERS[procedure](config, oracle)


def bundle(procedure: str, config: dict, results: dict) -> dict:
    return {
        "procedure": procedure,
        "config": config,
        "config_hash": config_hash(config),
        "results": results,
    }


def replay(transcript: Transcript, procedure: str, config: dict) -> dict:
    """Re-run `procedure` consuming recorded answers; returns the result bundle.

    Raises ReplayDivergenceError if the procedure's queries stop matching the
    record (wrong config, edited transcript, or truncation).
    """
    oracle = ReplayOracle(space_from_config(config), transcript)
    results = run_procedure(procedure, config, oracle)
    return bundle(procedure, config, results)


def samples_csv(samples: list[dict]) -> str:
    out = io.StringIO()
    out.write("k,n,prob_exact,weight\n")
    for s in samples:
        out.write(f"{s['k']},{s['n']},{s['prob']},{canonical_json(s['weight'])}\n")
    return out.getvalue()
