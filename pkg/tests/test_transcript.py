import json
from fractions import Fraction as F

import pytest

from nidgames.alice import RandomAlice
from nidgames.bob import ClampBob, RandomBob
from nidgames.match import ReplayDivergence, replay, replay_game, revalidate, run_match
from nidgames.referee import GameConfig
from nidgames.transcript import MalformedTranscript, Transcript


def _match(seed=5):
    cfg = GameConfig("H", 5, eps=F(1, 4), a=F(1, 2), threshold="const:2", max_rounds=40)
    return run_match(RandomAlice(arena=5, max_tokens=30), RandomBob(), cfg, seed=seed)


def test_round_trip_is_bit_exact(tmp_path):
    tr = _match()
    path = tmp_path / "t.jsonl"
    tr.write(path)
    back = Transcript.read(path)
    assert back.dumps() == tr.dumps()
    assert replay(back) == tr.verdict


def test_full_check_mode_agrees():
    for seed in range(20):
        tr = _match(seed)
        assert replay(tr, incremental=False) == replay(tr, incremental=True)


def test_determinism():
    assert _match(7).dumps() == _match(7).dumps()


def _corrupt(text: str) -> str:
    lines = text.splitlines()
    for i, ln in enumerate(lines[1:], start=1):
        rec = json.loads(ln)
        if rec.get("player") == "bob" and rec.get("f_updates"):
            rec["f_updates"][0]["value"] = "1000/1"
            lines[i] = json.dumps(rec)
            return "\n".join(lines)
    raise AssertionError("no Bob update to corrupt")


def test_hand_corrupted_transcript_is_detected():
    cfg = GameConfig("G", 4, c=1, k=5, max_rounds=30)
    for seed in range(30):
        tr = run_match(RandomAlice(arena=4, max_tokens=30), ClampBob(), cfg, seed=seed)
        if any(r.get("f_updates") for r in tr.records) and tr.verdict.round > 2:
            break
    bad = Transcript.loads(_corrupt(tr.dumps()))
    with pytest.raises(ReplayDivergence):
        replay(bad)


def test_malformed_inputs():
    with pytest.raises(MalformedTranscript):
        Transcript.loads("")
    with pytest.raises(MalformedTranscript):
        Transcript.loads('{"nope": 1}\n')
    cfg = json.dumps({"config": GameConfig("G", 3, c=1, k=0).to_dict()})
    with pytest.raises(MalformedTranscript):
        Transcript.loads(cfg + '\n{"verdict": {"winner": "bob", "reason": "alice_no_move", "round": 1}}\n{"round": 1, "player": "alice"}\n')


def test_verdicts_revalidate():
    for seed in range(30):
        assert revalidate(_match(seed))


def test_replay_rejects_moves_after_the_end():
    tr = _match(2)
    tr.records.append(dict(tr.records[-1]))
    with pytest.raises(ReplayDivergence):
        replay_game(tr)
