from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nidgames.alice import (
    StratG, StratH, claim_bounds, delta_for, h_level_schedule, probe_token, rho_proof, rho_stated, verify_claim,
)
from nidgames.blocks import build_blocks_avg, build_blocks_main_help, select_block_h
from nidgames.bob import BudgetBob, Clamp, ClampBob, RandomBob, clamp_margin, reduction_eps
from nidgames.lemmas import separation_threshold
from nidgames.core import Grid, Player, TokenPlacement, UPair
from nidgames.match import run_match
from nidgames.referee import AliceMove, GameConfig, GameState, band_eps, interval_c, passes_c, passes_eps

A, B = Player.ALICE, Player.BOB


# ---------------------------------------------------------------- blocks

def test_blocks_avg_small_exhaustive_case():
    A_ = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    perm, s, total = build_blocks_avg(A_, 2, np.random.default_rng(0))
    assert s * 2 >= total
    assert sorted(perm.tolist()) == [0, 1, 2, 3]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_blocks_avg_beats_global_average(log_n, seed):
    N = 1 << log_n
    rng = np.random.default_rng(seed)
    E = 1 << int(rng.integers(1, log_n))
    A_ = rng.integers(0, 5, size=(N, N))
    perm, s, total = build_blocks_avg(A_, E, rng, samples=2)
    b = N // E
    assert s == sum(A_[j * b:(j + 1) * b][:, perm[j * b:(j + 1) * b]].sum() for j in range(E))
    assert s * E >= total


def test_blocks_input_validation():
    with pytest.raises(ValueError):
        build_blocks_avg(np.zeros((4, 4)), 3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_blocks_avg(np.zeros((4, 4)), 4, np.random.default_rng(0))
    g = GameState(GameConfig("G", 4, c=1, k=1))
    with pytest.raises(ValueError):
        build_blocks_main_help([[0, 1]], list(range(4, 8)), g, 2, 4)


def test_main_help_blocks_are_disjoint():
    g = GameState(GameConfig("H", 6, eps=F(1, 4), a=F(1), threshold="const:1"))
    U = [[0, 1], [2, 3]]
    V = list(range(8, 16))
    # Z_uv < log E = 1 on a few pairs
    g.apply_alice(AliceMove([TokenPlacement(Grid.Z, UPair(0, 8), 0, A), TokenPlacement(Grid.Z, UPair(2, 9), 0, A)]))
    blocks = build_blocks_main_help(U, V, g, 2, 8)
    assert not set(blocks[0]) & set(blocks[1])
    assert 8 not in blocks[0] and 9 not in blocks[1]


def test_select_block_h():
    g = GameState(GameConfig("H", 5, eps=F(1, 4), a=F(1), threshold="const:1"))
    g.apply_alice(AliceMove([TokenPlacement(Grid.X, 0, 0, A)]))
    assert select_block_h(g, [[0, 1], [2, 3]], 1) == 1


# ---------------------------------------------------------------- Alice

def test_delta_and_rates():
    assert delta_for(F(3, 10)) == F(2, 25)
    assert delta_for(0) == F(1, 5)
    assert rho_proof(F(1, 4)) > rho_stated(F(1, 4)) > 0


def test_probe_token():
    p = probe_token(0, 16)
    assert p.grid is Grid.Z and p.column == UPair(0, 0) and p.row == 15


def test_strat_h_with_sqrt_threshold_at_n16_stops_at_once():
    assert h_level_schedule(16, F(3, 10), 4) == []
    cfg = GameConfig("H", 16, eps=F(3, 10), a=F(1, 2))
    tr = run_match(StratH(), ClampBob(), cfg)
    assert tr.verdict.winner is B and tr.verdict.reason == "alice_no_move" and tr.verdict.round == 1


def test_strat_h_single_level_trace():
    cfg = GameConfig("H", 16, eps=F(3, 10), a=F(100), threshold="const:1")
    alice = StratH()
    tr = run_match(alice, ClampBob(), cfg)
    assert [r["d"] for r in alice.levels] == [1]
    assert alice.levels[0]["E"] == 1 << 14
    assert alice.levels[0]["min_drop"] >= F(2, 25)
    assert tr.verdict.winner is B


def test_claim_bounds_and_verification():
    # at c = 3 the rise is never forced: (n+3)(n+4) > (n-3)(n+10) for every n
    assert not any(claim_bounds(3, n)["rise_forced"] for n in range(13, 2000))
    assert separation_threshold(3) is None
    b = claim_bounds(4, 100)
    assert b["rise_forced"] and b["fall_forced"]
    assert separation_threshold(4) == 31
    b = claim_bounds(3, 13)
    assert b["f_prev_upper"] == F(16, 23) and b["f_mid_lower"] == F(10, 17) and b["f_next_upper"] == F(4, 11)
    assert not b["rise_forced"] and b["fall_forced"]
    assert verify_claim(0, 100, 100, 0, 1, 0, 0, 1, 100, 12, 3) == "void"
    assert verify_claim(110, 98, 98, F(1, 2), F(99, 100), F(1, 2), 0, 1, 100, 12, 3) == "holds"
    assert verify_claim(110, 98, 98, F(1, 2), F(99, 100), F(1, 2), 0, 0, 100, 12, 3) == "violated"


def test_strat_g_out_of_range_warns(caplog):
    cfg = GameConfig("G", 8, c=1, k=3)
    alice = StratG(samples=4)
    with caplog.at_level("WARNING"):
        tr = run_match(alice, ClampBob(), cfg)
    assert alice.flagged and "outside c >= 3" in caplog.text
    assert tr.verdict.reason != "strategy_error"


def test_strat_g_relaxed_runs():
    cfg = GameConfig("G", 8, c=1, k=1000, relaxed=True)
    alice = StratG(relaxed=True, samples=4)
    tr = run_match(alice, ClampBob(), cfg)
    assert tr.verdict.reason != "strategy_error"
    assert all(r["star_holds"] for r in alice.levels)


# ---------------------------------------------------------------- Bob

@settings(max_examples=300, deadline=None)
@given(st.integers(2, 12), st.integers(1, 4), st.integers(0, 12), st.integers(0, 12),
       st.fractions(min_value=0, max_value=10))
def test_clamp_g_lands_inside_interval(n, c, z, m, prev):
    z, m = min(z, n), min(m, n)
    out = Clamp("G", n, c=c)(z, m, prev)
    assert passes_c(out, z, m, c)
    lo, hi = interval_c(z, m, c)
    if lo < prev and (hi is None or prev < hi):
        assert out == prev


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 12), st.integers(0, 12), st.integers(1, 12), st.fractions(min_value=0, max_value=10))
def test_clamp_h_lands_in_band(n, z, m, prev):
    z, m = min(z, n), min(m, n)
    eps = F(1, 4)
    out = Clamp("H", n, eps=eps, t=2)(z, m, prev)
    assert passes_eps(out, z, m, eps, 2)
    lo, hi = band_eps(z, m, eps)
    if m >= 2:
        assert abs(out - prev) == max(F(0), lo - prev, prev - hi)


def test_clamp_examples():
    assert clamp_margin(4, 1) == F(1, 80)
    cl = Clamp("G", 12, c=3)
    assert cl(5, 10, F(1, 2)) == F(1, 2)
    assert cl(5, 10, F(1)) == F(4, 5) - clamp_margin(12, 3)


def test_budget_bob_spends_x_to_keep_f():
    cfg = GameConfig("G", 6, c=1, k=10)
    g = GameState(cfg)
    bob = BudgetBob()
    bob.start(g, np.random.default_rng(0))
    g.apply_alice(AliceMove([TokenPlacement(Grid.X, 0, 5, A), TokenPlacement(Grid.X, 1, 5, A)]))
    mv = bob.move(g)
    g.apply_bob(mv)
    f_before = g.f(UPair(0, 1))
    g.apply_alice(AliceMove([TokenPlacement(Grid.Z, UPair(0, 1), 3, A)]))
    mv = bob.move(g)
    assert any(p.grid is Grid.X for p in mv.placements)
    assert UPair(0, 1) not in mv.f_updates
    assert g.apply_bob(mv) is None
    assert g.f(UPair(0, 1)) == f_before


def test_random_bob_constant_mode_never_moves():
    cfg = GameConfig("G", 4, c=2, k=3)
    g = GameState(cfg)
    bob = RandomBob(mode="constant")
    bob.start(g, np.random.default_rng(0))
    g.apply_alice(AliceMove([TokenPlacement(Grid.X, 0, 3, A)]))
    mv = bob.move(g)
    assert not mv.placements and not mv.f_updates and mv.f_default is not None
    with pytest.raises(ValueError):
        RandomBob(mode="wild")


def test_reduction_eps_is_at_least_eps_prime():
    e = reduction_eps(6, 1, 5, F(1, 5))
    assert F(1, 5) < e < 1
