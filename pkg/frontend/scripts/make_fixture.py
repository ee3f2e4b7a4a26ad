"""Record a complete wire-level session for the frontend tests.

Drives the real HTTP service in-process with a scripted answer policy (a
simulated square-risk agent) and dumps every query payload, the submitted
answers, and the final results. The frontend test suite replays this fixture
through a mock server so client behavior is checked against genuine service
traffic without needing a Python process.

Usage: python3 scripts/make_fixture.py [out.json]
"""

import json
import sys
import tempfile

from fastapi.testclient import TestClient

from reu_elicit import Agent, PowerRisk, SimulatedOracle, UtilityFunction, compare, run_procedure
from reu_elicit.config import canonical_json, gamble_from_json
from reu_elicit.service import create_app
from reu_elicit.worlds import uniform_world

CONFIG = {
    "atoms": 8,
    "group": 1,
    "denominators": [2, 4, 8],
    "epsilon": 1e-4,
    "best": 1.0,
    "worst": 0.0,
    "utility": {"money": {"kind": "linear"}},
}


def main(out_path: str) -> None:
    world = uniform_world(8)
    agent = Agent(world.model, UtilityFunction.linear(), PowerRisk(2.0))

    library = run_procedure("risk-grid", CONFIG, SimulatedOracle(agent, world.space))

    queries, answers = [], []
    with TestClient(create_app(tempfile.mkdtemp())) as client:
        sid = client.post(
            "/api/v1/sessions", json={"procedure": "risk-grid", "config": CONFIG}
        ).json()["id"]
        while True:
            nxt = client.get(f"/api/v1/sessions/{sid}/next").json()
            if nxt.get("done"):
                break
            answer = compare(
                agent,
                gamble_from_json(nxt["left"]),
                gamble_from_json(nxt["right"]),
                tol=1e-9,
            ).value
            queries.append(nxt)
            answers.append(answer)
            client.post(
                f"/api/v1/sessions/{sid}/answer",
                json={"query_id": nxt["query_id"], "answer": answer},
            )
        results = client.get(f"/api/v1/sessions/{sid}/results").json()
        transcript = client.get(f"/api/v1/sessions/{sid}/transcript").text

    assert canonical_json(results) == canonical_json(library), "service != library"
    fixture = {
        "procedure": "risk-grid",
        "config": CONFIG,
        "queries": queries,
        "answers": answers,
        "results": results,
        "transcript": transcript,
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out_path}: {len(queries)} queries")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/session_power2.json")
