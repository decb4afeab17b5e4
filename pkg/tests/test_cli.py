import csv
import json

import pytest

from nidgames.cli import main
from nidgames.experiments import ExperimentSpec, make_alice, make_bob, parse_strategy, run_experiment, write_csv
from nidgames.oracle import SyntheticSpec, make_synthetic_oracle


def test_parse_strategy():
    assert parse_strategy("clamp") == ("clamp", {})
    name, params = parse_strategy("random:arena=3,reckless=1/20,mode=constant")
    assert name == "random" and params["arena"] == 3 and params["mode"] == "constant"
    with pytest.raises(ValueError):
        parse_strategy("random:arena")
    with pytest.raises(ValueError):
        make_alice("nobody")
    with pytest.raises(ValueError):
        make_bob("oracle")


def test_play_h_example(tmp_path, capsys):
    path = tmp_path / "h.jsonl"
    code = main(["play", "--game", "h", "--n", "16", "--eps", "3/10", "--a", "1/100", "--alice", "strat-h",
                 "--bob", "clamp:eps=1/4", "--threshold", "const:1", "--transcript", str(path)])
    out = capsys.readouterr().out
    assert code == 0 and "reason=req_a" in out
    assert main(["replay", str(path)]) == 0
    assert main(["replay", "--full-check", str(path)]) == 0
    assert "reason=req_a" in capsys.readouterr().out


def test_play_g_example(capsys):
    code = main(["play", "--game", "g", "--n", "10", "--c", "1", "--k", "0", "--alice", "strat-g", "--bob", "clamp"])
    assert code == 0 and "reason=req_k" in capsys.readouterr().out


def test_bob_win_exit_code(capsys):
    code = main(["play", "--game", "h", "--n", "16", "--eps", "3/10", "--a", "1/2", "--alice", "strat-h", "--bob", "clamp"])
    assert code == 1 and "winner=bob" in capsys.readouterr().out


def test_malformed_inputs(tmp_path, capsys):
    assert main(["play", "--game", "g", "--n", "0", "--c", "1", "--k", "0", "--alice", "random", "--bob", "clamp"]) == 2
    assert main(["play", "--game", "g", "--n", "4", "--c", "1", "--k", "0", "--alice", "x", "--bob", "clamp"]) == 2
    assert main(["play", "--bogus"]) == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n")
    assert main(["replay", str(bad)]) == 2
    assert main(["replay", str(tmp_path / "missing.jsonl")]) == 2


def test_corrupted_transcript_exit_code(tmp_path):
    path = tmp_path / "h.jsonl"
    main(["play", "--game", "h", "--n", "16", "--eps", "3/10", "--a", "1/100", "--alice", "strat-h",
          "--bob", "clamp", "--threshold", "const:1", "--transcript", str(path)])
    lines = path.read_text().splitlines()
    last = json.loads(lines[-1])
    last["verdict"]["winner"] = "bob"
    lines[-1] = json.dumps(last)
    path.write_text("\n".join(lines) + "\n")
    assert main(["replay", str(path)]) == 2


def test_oracle_bob_from_file(tmp_path, capsys):
    o = make_synthetic_oracle(SyntheticSpec(n=3), seed=0)
    spec = tmp_path / "oracle.json"
    spec.write_text(json.dumps(o.to_spec()))
    code = main(["play", "--game", "g", "--n", "3", "--c", "1", "--k", "1000", "--alice", "random:arena=3",
                 "--bob", f"oracle:spec={spec}", "--max-rounds", "10"])
    assert code in (0, 1)
    assert "reason=" in capsys.readouterr().out


def test_fuzz_command(capsys):
    assert main(["fuzz", "--seeds", "0"]) == 0
    assert "0 seeds, 0 failures" in capsys.readouterr().out
    assert main(["fuzz", "--seeds", "20", "--game", "g"]) == 0


def test_check_lemmas_command(capsys):
    assert main(["check-lemmas", "--only", "oscillations-help", "--scale", "0.05"]) == 0
    assert main(["check-lemmas", "--only", "claim"]) == 1
    assert main(["check-lemmas", "--only", "nope"]) == 2


def test_empty_sweep_writes_header(tmp_path):
    spec = ExperimentSpec.from_dict({"game": "h", "n": [], "alice": "strat-h", "bob": "clamp"})
    out = tmp_path / "r.csv"
    write_csv(run_experiment(spec), out)
    rows = list(csv.reader(out.open()))
    assert len(rows) == 1 and rows[0][0] == "game"


def test_sweep_rows_are_reproducible(tmp_path, capsys):
    spec = {"game": "h", "n": [14, 16], "eps": "3/10", "a": "100", "threshold": "const:1",
            "alice": "strat-h", "bob": "clamp", "seeds": 2}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.csv"
        assert main(["experiment", str(path), "--output", str(out), "--no-timing"]) == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
    rows = list(csv.DictReader(open(tmp_path / "r0.csv")))
    assert len(rows) == 4
    assert "min_drop=" in capsys.readouterr().out


def test_bad_experiment_spec(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text("{}")
    assert main(["experiment", str(path)]) == 2
