import json
import os

import pytest

from reu_elicit.cli import main
from reu_elicit.config import gamble_to_json
from reu_elicit.allais import allais_gambles, allais_space

POWER3 = {"utility": {"money": {"kind": "linear"}}, "risk": {"variant": "power", "k": 3.0}}
POWER2 = {"utility": {"money": {"kind": "linear"}}, "risk": {"variant": "power", "k": 2.0}}
IDENTITY = {"utility": {"money": {"kind": "linear"}}, "risk": {"variant": "identity"}}


@pytest.fixture
def agent_files(tmp_path):
    paths = {}
    for name, spec in (("power3", POWER3), ("power2", POWER2), ("identity", IDENTITY)):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(spec))
        paths[name] = str(path)
    return paths


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestEvaluate:
    def test_identity_agent_prints_equal_eu_reu(self, agent_files, tmp_path, capsys):
        spec = {**IDENTITY, "atoms": {"tickets": 100}}
        agent_path = tmp_path / "identity100.json"
        agent_path.write_text(json.dumps(spec))
        gamble_path = tmp_path / "allais2.json"
        gamble_path.write_text(
            json.dumps(gamble_to_json(allais_gambles(allais_space())[1]))
        )
        assert main(["evaluate", "--agent", str(agent_path), "--gamble", str(gamble_path)]) == 0
        out = capsys.readouterr().out
        eu_line, reu_line = out.strip().splitlines()
        assert eu_line.split("=")[1].strip() == reu_line.split("=")[1].strip()

    def test_two_gamble_comparison(self, tmp_path, capsys):
        spec = {**POWER3, "atoms": {"tickets": 100}}
        agent_path = tmp_path / "power3-100.json"
        agent_path.write_text(json.dumps(spec))
        gambles = allais_gambles(allais_space())
        paths = []
        for i in (0, 1):
            p = tmp_path / f"g{i + 1}.json"
            p.write_text(json.dumps(gamble_to_json(gambles[i])))
            paths.append(str(p))
        assert main([
            "evaluate", "--agent", str(agent_path),
            "--gamble", paths[0], "--gamble2", paths[1],
        ]) == 0
        assert "preference: left" in capsys.readouterr().out

    def test_missing_file_is_a_clean_error(self, capsys):
        assert main(["evaluate", "--agent", "nope.json", "--gamble", "also-nope.json"]) == 2
        assert "error:" in capsys.readouterr().err


class TestElicitRisk:
    def test_samples_accuracy_and_outputs(self, agent_files, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code = main([
            "elicit-risk", "--agent", agent_files["power3"],
            "--denominators", "2,4,8,16,32", "--epsilon", "1e-7", "--out", out_dir,
        ])
        assert code == 0
        bundle = json.loads(read(os.path.join(out_dir, "bundle.json")))
        assert len(bundle["results"]["samples"]) == 33
        for s in bundle["results"]["samples"]:
            p = s["prob_float"]
            assert abs(s["weight"] - p**3) <= 1e-6
        csv_text = read(os.path.join(out_dir, "samples.csv")).decode()
        assert csv_text.splitlines()[0] == "k,n,prob_exact,weight"

    def test_same_config_same_bytes(self, agent_files, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        argv = ["elicit-risk", "--agent", agent_files["power2"], "--denominators", "2,4"]
        assert main(argv + ["--out", out1]) == 0
        assert main(argv + ["--out", out2]) == 0
        for name in ("bundle.json", "samples.csv", "transcript.jsonl"):
            assert read(os.path.join(out1, name)) == read(os.path.join(out2, name))

    def test_replay_of_emitted_transcript(self, agent_files, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        main([
            "elicit-risk", "--agent", agent_files["power2"],
            "--denominators", "2,4,8", "--out", out_dir,
        ])
        code = main([
            "replay",
            "--bundle", os.path.join(out_dir, "bundle.json"),
            "--transcript", os.path.join(out_dir, "transcript.jsonl"),
        ])
        assert code == 0
        assert "replay ok" in capsys.readouterr().out


class TestElicitProb:
    def test_inversion_close_to_truth(self, agent_files, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code = main([
            "elicit-prob", "--agent", agent_files["power2"], "--method", "inversion",
            "--event-prob", "0.2", "--schedule", "2,4,8",
            "--epsilon", "1e-6", "--out", out_dir,
        ])
        assert code == 0
        bundle = json.loads(read(os.path.join(out_dir, "inversion", "bundle.json")))
        est = bundle["results"]["estimates"][0]
        assert abs(est["value"] - 0.2) <= 1e-3

    def test_both_methods_agree(self, agent_files, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        code = main([
            "elicit-prob", "--agent", agent_files["power3"], "--method", "both",
            "--event-prob", "0.41", "--schedule", "2,4,8,16,32,64,128",
            "--tolerance", "1/128", "--out", out_dir,
        ])
        assert code == 0
        squeeze = json.loads(read(os.path.join(out_dir, "squeeze", "bundle.json")))
        inversion = json.loads(read(os.path.join(out_dir, "inversion", "bundle.json")))
        sq = squeeze["results"]["estimates"][0]["value"]
        inv = inversion["results"]["estimates"][0]["value"]
        assert abs(sq - inv) <= 1 / 128 + 1e-3

    def test_risk_curve_from_prior_bundle(self, agent_files, tmp_path):
        grid_dir = str(tmp_path / "grid")
        main([
            "elicit-risk", "--agent", agent_files["power2"],
            "--denominators", "2,4,8,16,32", "--epsilon", "1e-7", "--out", grid_dir,
        ])
        prob_dir = str(tmp_path / "prob")
        code = main([
            "elicit-prob", "--agent", agent_files["power2"], "--method", "inversion",
            "--event-prob", "0.37", "--schedule", "2,4,8",
            "--risk-curve", os.path.join(grid_dir, "bundle.json"),
            "--out", prob_dir,
        ])
        assert code == 0
        bundle = json.loads(read(os.path.join(prob_dir, "inversion", "bundle.json")))
        assert abs(bundle["results"]["estimates"][0]["value"] - 0.37) <= 2e-3


class TestVerifyLottery:
    def test_uniform_accepts(self, agent_files, capsys):
        assert main([
            "verify-lottery", "--agent", agent_files["identity"],
            "--denominators", "2,3,4",
        ]) == 0
        out = capsys.readouterr().out
        assert out.count("fair") == 3

    def test_perturbed_rejects(self, tmp_path, capsys):
        from fractions import Fraction

        weights = [Fraction(1, 8) + Fraction(1, 50)] + [
            (1 - Fraction(1, 8) - Fraction(1, 50)) / 7
        ] * 7
        spec = {
            **IDENTITY,
            "atoms": {"tickets": 8},
            "weights": [f"{w.numerator}/{w.denominator}" for w in weights],
        }
        path = tmp_path / "skew.json"
        path.write_text(json.dumps(spec))
        assert main(["verify-lottery", "--agent", str(path), "--denominators", "2,4"]) == 1
        assert "rejected" in capsys.readouterr().out


class TestDemo:
    def test_allais_demo(self, capsys):
        assert main(["demo-allais"]) == 0
        out = capsys.readouterr().out
        assert "prefers 1" in out and "prefers 4" in out
        assert "0 ratios" in out
