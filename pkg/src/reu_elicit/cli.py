"""Batch command line: evaluate gambles, run elicitation experiments against
simulated agents, verify lotteries, replay transcripts, serve the live UI.

Experiments are deterministic under a fixed seed: transcripts use a logical
clock and all randomness is seeded, so rerunning a config reproduces every
output file byte for byte.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import allais
from .config import (
    agent_from_json,
    canonical_json,
    gamble_from_json,
    load_json,
    utility_to_json,
)
from .domain import Agent
from .engine import Preference, compare, eu, reu
from .errors import ElicitError
from .oracle import LogicalClock, NoisyOracle, SimulatedOracle, Transcript
from .risk import PowerRisk
from .runners import bundle, replay, run_procedure, samples_csv
from .worlds import product_world

DATA_DIR_ENV = "REU_ELICIT_DATA_DIR"


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _out_dir(args) -> str:
    out = args.out or os.environ.get(DATA_DIR_ENV) or "out"
    os.makedirs(out, exist_ok=True)
    return out


def _make_oracle(agent, space, args, transcript):
    if getattr(args, "noise", 0.0):
        return NoisyOracle(
            agent,
            space,
            flip_prob=args.noise,
            repeats=args.repeats,
            seed=args.seed,
            transcript=transcript,
        )
    return SimulatedOracle(agent, space, transcript=transcript)


def _write_outputs(out_dir: str, result_bundle: dict, transcript: Transcript) -> None:
    with open(os.path.join(out_dir, "bundle.json"), "w", encoding="utf-8") as fh:
        fh.write(canonical_json(result_bundle) + "\n")
    samples = result_bundle["results"].get("samples")
    if samples:
        with open(os.path.join(out_dir, "samples.csv"), "w", encoding="utf-8") as fh:
            fh.write(samples_csv(samples))
    transcript.save(os.path.join(out_dir, "transcript.jsonl"))


def cmd_evaluate(args) -> int:
    agent, space = agent_from_json(load_json(args.agent))
    gamble = gamble_from_json(load_json(args.gamble))
    gamble.validate(space)
    print(f"EU  = {eu(agent, gamble):.9g}")
    print(f"REU = {reu(agent, gamble):.9g}")
    if args.gamble2:
        other = gamble_from_json(load_json(args.gamble2))
        other.validate(space)
        print(f"EU'  = {eu(agent, other):.9g}")
        print(f"REU' = {reu(agent, other):.9g}")
        verdict = compare(agent, gamble, other, args.tol)
        print(f"preference: {verdict.value}")
    return 0


def _agent_for_grid(args) -> tuple[Agent, object, dict]:
    spec = load_json(args.agent)
    denominators = _int_list(args.denominators)
    if "atoms" not in spec:
        tickets = args.tickets or math.lcm(*denominators)
        spec = {**spec, "atoms": {"tickets": tickets}}
    agent, space = agent_from_json(spec)
    config = {
        "atoms": space.n_atoms,
        "group": 1,
        "denominators": denominators,
        "epsilon": args.epsilon,
        "best": args.best,
        "worst": args.worst,
        "utility": utility_to_json(agent.u),
        "confirm_depth": args.confirm_depth,
        "rule": args.rule,
        "seed": args.seed,
    }
    return agent, space, config


def cmd_elicit_risk(args) -> int:
    agent, space, config = _agent_for_grid(args)
    transcript = Transcript(clock=LogicalClock())
    oracle = _make_oracle(agent, space, args, transcript)
    results = run_procedure("risk-grid", config, oracle)
    result_bundle = bundle("risk-grid", config, results)
    out_dir = _out_dir(args)
    _write_outputs(out_dir, result_bundle, transcript)
    print(f"measured {len(results['samples'])} grid points "
          f"with {results['query_count']} queries -> {out_dir}/")
    return 0


def cmd_elicit_prob(args) -> int:
    spec = load_json(args.agent)
    schedule = _int_list(args.schedule)
    tickets = args.tickets or math.lcm(*schedule)
    world, event = product_world(tickets, args.event_prob)
    agent_spec = {**spec, "atoms": {"tickets": 2 * tickets}}
    agent_shell, _ = agent_from_json(agent_spec)
    agent = Agent(world.model, agent_shell.u, agent_shell.r)
    base_config = {
        "atoms": 2 * tickets,
        "group": 2,
        "event": event.sorted_indices(),
        "best": args.best,
        "worst": args.worst,
        "seed": args.seed,
    }
    out_dir = _out_dir(args)
    methods = ["squeeze", "inversion"] if args.method == "both" else [args.method]
    status = 0
    for method in methods:
        transcript = Transcript(clock=LogicalClock())
        oracle = _make_oracle(agent, world.space, args, transcript)
        if method == "squeeze":
            config = {
                **base_config,
                "schedule": schedule,
                "tolerance": args.tolerance,
                "verify_lotteries": args.verify_lotteries,
            }
            results = run_procedure("prob-squeeze", config, oracle)
        else:
            if args.risk_curve is None:
                risk_spec = agent.r.spec()
            else:
                curve = load_json(args.risk_curve)["results"]["risk_curve"]
                risk_spec = {
                    "variant": "tabulated",
                    "samples": curve["knots"],
                    "rule": curve["rule"],
                }
            config = {
                **base_config,
                "epsilon": args.epsilon,
                "utility": utility_to_json(agent.u),
                "risk": risk_spec,
                "confirm_depth": args.confirm_depth,
            }
            results = run_procedure("prob-inversion", config, oracle)
        result_bundle = bundle(f"prob-{method}", config, results)
        method_dir = os.path.join(out_dir, method)
        os.makedirs(method_dir, exist_ok=True)
        _write_outputs(method_dir, result_bundle, transcript)
        est = results["estimates"][0]
        print(
            f"{method}: p = {est['value']:.6g} "
            f"bracket [{est['bracket'][0]}, {est['bracket'][1]}] "
            f"({est['query_count']} queries, converged={est['converged']})"
        )
        if not est["converged"]:
            status = 3
    return status


def cmd_verify_lottery(args) -> int:
    from .domain import Money
    from .elicitation import verify_fair_lottery
    from .worlds import block_partition

    spec = load_json(args.agent)
    if "atoms" not in spec:
        spec = {**spec, "atoms": {"tickets": math.lcm(*_int_list(args.denominators))}}
    agent, space = agent_from_json(spec)
    oracle = SimulatedOracle(agent, space)
    best, worst = Money(args.best), Money(args.worst)
    all_fair = True
    for n in _int_list(args.denominators):
        if space.n_atoms % n:
            print(f"n={n}: unavailable ({space.n_atoms} atoms not divisible)")
            all_fair = False
            continue
        fair = verify_fair_lottery(oracle, block_partition(space, n), best, worst)
        print(f"n={n}: {'fair' if fair else 'rejected'}")
        all_fair = all_fair and fair
    return 0 if all_fair else 1


def cmd_replay(args) -> int:
    recorded_bundle = load_json(args.bundle)
    transcript = Transcript.load(args.transcript)
    reproduced = replay(
        transcript, recorded_bundle["procedure"], recorded_bundle["config"]
    )
    if canonical_json(reproduced["results"]) == canonical_json(
        recorded_bundle["results"]
    ):
        print(f"replay ok: {len(transcript)} answers reproduce the bundle exactly")
        return 0
    print("replay DIVERGED: results differ from the recorded bundle")
    return 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    data_dir = args.data_dir or os.environ.get(DATA_DIR_ENV) or "sessions"
    app = create_app(data_dir, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_demo_allais(args) -> int:
    space = allais.allais_space()
    agent = allais.allais_agent(PowerRisk(args.risk_k))
    gambles = allais.allais_gambles(space)
    print(f"risk function: r(q) = q^{args.risk_k}; linear utility in millions\n")
    print("gamble  EU        REU")
    for i, g in enumerate(gambles, start=1):
        print(f"  {i}     {eu(agent, g):<8.6g}  {reu(agent, g):.6g}")
    first = compare(agent, gambles[0], gambles[1])
    second = compare(agent, gambles[2], gambles[3])
    print(f"\n1 vs 2: prefers {'1' if first is Preference.LEFT else '2'}")
    print(f"3 vs 4: prefers {'3' if second is Preference.LEFT else '4'}")
    hits = allais.eu_consistent_ratios(args.scan_step)
    print(
        f"\nEU scan over u(1M)/u(5M) in steps of {args.scan_step}: "
        f"{len(hits)} ratios produce both preferences"
        + ("" if not hits else f" (e.g. {hits[0]})")
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reu-elicit",
        description="Measure risk attitudes and subjective probabilities from preferences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="EU/REU of gambles for an agent")
    p.add_argument("--agent", required=True)
    p.add_argument("--gamble", required=True)
    p.add_argument("--gamble2")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("elicit-risk", help="measure the risk function on a rational grid")
    p.add_argument("--agent", required=True)
    p.add_argument("--denominators", default="2,4,8,16,32")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--best", type=float, default=1.0)
    p.add_argument("--worst", type=float, default=0.0)
    p.add_argument("--tickets", type=int)
    p.add_argument("--rule", choices=["linear", "pchip"], default="linear")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--repeats", type=int, default=2)
    p.add_argument("--confirm-depth", dest="confirm_depth", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_elicit_risk)

    p = sub.add_parser("elicit-prob", help="estimate an event's subjective probability")
    p.add_argument("--agent", required=True)
    p.add_argument("--method", choices=["squeeze", "inversion", "both"], default="both")
    p.add_argument("--event-prob", dest="event_prob", type=float, required=True)
    p.add_argument("--schedule", default="2,4,8,16,32,64,128,256,512,1024,2048,4096")
    p.add_argument("--tolerance", default="1/4096")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--best", type=float, default=1.0)
    p.add_argument("--worst", type=float, default=0.0)
    p.add_argument("--tickets", type=int)
    p.add_argument("--risk-curve", dest="risk_curve")
    p.add_argument("--verify-lotteries", dest="verify_lotteries", action="store_true")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--repeats", type=int, default=2)
    p.add_argument("--confirm-depth", dest="confirm_depth", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_elicit_prob)

    p = sub.add_parser("verify-lottery", help="check block partitions for fairness")
    p.add_argument("--agent", required=True)
    p.add_argument("--denominators", default="2,3,4,8")
    p.add_argument("--best", type=float, default=1.0)
    p.add_argument("--worst", type=float, default=0.0)
    p.set_defaults(func=cmd_verify_lottery)

    p = sub.add_parser("replay", help="re-run a transcript and compare to its bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--transcript", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the live elicitation HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", dest="data_dir")
    p.add_argument("--static", default=os.path.join("frontend", "dist"))
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("demo-allais", help="show the four-gamble risk-aversion pattern")
    p.add_argument("--risk-k", dest="risk_k", type=float, default=3.0)
    p.add_argument("--scan-step", dest="scan_step", type=float, default=1e-3)
    p.set_defaults(func=cmd_demo_allais)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ElicitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
