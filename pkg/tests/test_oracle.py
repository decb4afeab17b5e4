import json
from fractions import Fraction as F

import numpy as np
import pytest

from nidgames.alice import ShadowAlice
from nidgames.bob import ApproxOracleBob
from nidgames.core import Player, UPair
from nidgames.match import run_match
from nidgames.oracle import (
    ApproxOracle, OracleDefect, SyntheticSpec, load_oracle, make_synthetic_oracle, oracle_from_spec, prefix_offset,
)
from nidgames.referee import GameConfig


def test_staircase_queries():
    o = ApproxOracle(3, {1: [(2, 2), (4, 1)]}, {(1, 2): [(3, 1)]})
    assert [o.cx(1, s) for s in range(6)] == [3, 3, 2, 2, 1, 1]
    assert o.cx(0, 4) == 3
    assert o.cz((2, 1), 3) == 1
    assert o.ratio((1, 2), 1) == F(3, 3)
    assert o.ratio((1, 2), 4) == F(1, 3)
    assert o.fprime((1, 2), 100) == o.ratio((1, 2), 100)


def test_defects_are_rejected():
    with pytest.raises(OracleDefect):
        ApproxOracle(3, {0: [(1, 1), (2, 2)]}, {})
    with pytest.raises(OracleDefect):
        ApproxOracle(3, {0: [(1, 0)]}, {})
    with pytest.raises(ValueError):
        ApproxOracle(3, {}, {}, mode="psychic")


def test_lag_mode_delays_fprime():
    o = ApproxOracle(3, {}, {(0, 1): [(2, 1)]}, mode="lag", lag=3)
    assert o.fprime((0, 1), 4) == F(1)
    assert o.fprime((0, 1), 5) == F(1, 3)


def test_noise_bound_and_convergence():
    eps = F(1, 5)
    o = make_synthetic_oracle(SyntheticSpec(n=4, mode="noise", eps_prime=eps), seed=3)
    diff = o.FP - o.RATIO
    assert all(abs(d) <= eps for d in diff.ravel())
    assert all(d == 0 for d in diff[o.horizon])


def test_spec_round_trip(tmp_path):
    o = make_synthetic_oracle(SyntheticSpec(n=4, mode="lag", lag=2), seed=1)
    path = tmp_path / "o.json"
    path.write_text(json.dumps(o.to_spec()))
    back = load_oracle(path)
    assert (back.CX == o.CX).all() and (back.CZ == o.CZ).all() and (back.FP == o.FP).all()
    assert oracle_from_spec(o.to_spec()).horizon == o.horizon


def test_synthetic_counting_constraints():
    for seed in range(30):
        o = make_synthetic_oracle(SyntheticSpec(n=3, strings=8, pairs=20), seed)
        assert o.counting_ok()


def test_prefix_offset():
    assert prefix_offset(16) == 16
    assert prefix_offset(10) == 14


def test_stabilised_oracle_bob_wins():
    o = make_synthetic_oracle(SyntheticSpec(n=4, strings=5, pairs=8), seed=2)
    cfg = GameConfig("G", 4, c=1, k=10_000, max_rounds=30)
    bob = ApproxOracleBob(o)
    tr = run_match(ShadowAlice(o, c=1), bob, cfg, seed=2)
    assert tr.verdict.winner is Player.BOB
    assert bob.sandwich_ok
    rs = [s for _, s in bob.trace]
    assert rs == sorted(set(rs))


def test_lag_oracle_f_is_subsequence_of_fprime():
    o = ApproxOracle(3, {0: [(1, 2)], 1: [(1, 2)]}, {(0, 1): [(2, 1)]}, mode="lag", lag=3)
    cfg = GameConfig("G", 3, c=1, k=100, max_rounds=10)
    bob = ApproxOracleBob(o)
    tr = run_match(ShadowAlice(o, c=1), bob, cfg)
    f = tr.game.series_of(UPair(0, 1)).values
    it = iter(o.fprime_series((0, 1)))
    assert all(any(x == y for y in it) for x in f)


def test_zero_search_cap_stalls():
    o = ApproxOracle(3, {0: [(1, 2)]}, {})
    cfg = GameConfig("G", 3, c=1, k=100)
    tr = run_match(ShadowAlice(o, c=1), ApproxOracleBob(o, s_max=0), cfg)
    assert tr.verdict.reason == "bob_stall" and tr.verdict.winner is Player.ALICE


def test_size_mismatch_is_an_error():
    o = ApproxOracle(3, {}, {})
    with pytest.raises(ValueError, match="oracle is for n=3"):
        run_match(ShadowAlice(o), ApproxOracleBob(o), GameConfig("G", 4, c=1, k=1))
