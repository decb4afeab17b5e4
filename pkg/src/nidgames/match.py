"""Running matches between strategies, replaying and re-validating transcripts."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import Grid, GridState, Player, UPair, place_token
from .referee import (
    AliceMove,
    BobMove,
    GameConfig,
    GameState,
    RuleError,
    Verdict,
    passes_a,
    passes_c,
    passes_eps,
    passes_k,
)
from .seqstats import min_oscillations, total_variation
from .transcript import (
    MalformedTranscript,
    Transcript,
    alice_record,
    bob_record,
    error_record,
    move_from_record,
)

log = logging.getLogger(__name__)


class BobStall(Exception):
    """Bob could not find a reply (e.g. an oracle search hit its cap)."""


class Strategy:
    """Base for both players: ``start`` once per match, then ``move`` every turn."""

    name = "strategy"

    def start(self, game: GameState, rng: np.random.Generator) -> None:
        self.rng = rng

    def move(self, game: GameState):
        raise NotImplementedError

    def finish(self, game: GameState) -> None:
        """Called once after the verdict; strategies may close their bookkeeping."""


class ReplayDivergence(Exception):
    def __init__(self, round_no: int, message: str):
        super().__init__(f"round {round_no}: {message}")
        self.round = round_no


def _rngs(seed: int):
    return np.random.default_rng([seed, 0]), np.random.default_rng([seed, 1])


def run_match(alice: Strategy, bob: Strategy, config: GameConfig, seed: int = 0,
              incremental: bool = True, game: Optional[GameState] = None) -> Transcript:
    """Alternate the two strategies until a verdict; returns the full transcript."""
    game = game or GameState(config, incremental=incremental)
    ra, rb = _rngs(seed)
    alice.start(game, ra)
    bob.start(game, rb)
    tr = Transcript(config)
    cap = config.round_cap
    while game.verdict is None:
        t = game.round
        if t > cap:
            game._end(Player.BOB, "round_limit", {"cap": cap})
            break
        try:
            amove = alice.move(game)
        except Exception as e:  # strategy bug: Alice forfeits
            log.debug("alice failed", exc_info=True)
            tr.records.append(error_record(t, Player.ALICE, f"{type(e).__name__}: {e}"))
            game._end(Player.BOB, "strategy_error", {"player": "alice", "error": str(e)})
            break
        tr.records.append(alice_record(t, amove))
        try:
            if game.apply_alice(amove) is not None:
                break
        except RuleError as e:
            tr.records[-1] = error_record(t, Player.ALICE, f"RuleError: {e}")
            game._end(Player.BOB, "strategy_error", {"player": "alice", "error": str(e)})
            break
        try:
            bmove = bob.move(game)
        except BobStall as e:
            tr.records.append(error_record(t, Player.BOB, f"BobStall: {e}"))
            game._end(Player.ALICE, "bob_stall", {"detail": str(e)})
            break
        except Exception as e:
            log.debug("bob failed", exc_info=True)
            tr.records.append(error_record(t, Player.BOB, f"{type(e).__name__}: {e}"))
            game._end(Player.ALICE, "strategy_error", {"player": "bob", "error": str(e)})
            break
        tr.records.append(bob_record(t, bmove))
        try:
            game.apply_bob(bmove)
        except RuleError as e:
            tr.records[-1] = error_record(t, Player.BOB, f"RuleError: {e}")
            game._end(Player.ALICE, "strategy_error", {"player": "bob", "error": str(e)})
    for s in (alice, bob):
        try:
            s.finish(game)
        except Exception:  # bookkeeping only, never changes the verdict
            log.debug("finish hook failed", exc_info=True)
    tr.verdict = game.verdict
    tr.series = game.series
    tr.game = game
    return tr


def replay_game(transcript: Transcript, incremental: bool = True) -> GameState:
    """Re-simulate every recorded half-turn; raises ReplayDivergence on mismatch."""
    cfg = transcript.config
    game = GameState(cfg, incremental=incremental)
    records = transcript.records
    for i, rec in enumerate(records):
        t = rec["round"]
        if game.verdict is not None:
            raise ReplayDivergence(t, f"game ended in round {game.verdict.round} but the transcript continues")
        if t != game.round:
            raise ReplayDivergence(t, f"expected round {game.round}")
        if t > cfg.round_cap:
            raise ReplayDivergence(t, "round cap exceeded")
        player = Player(rec["player"])
        if player is not game.phase:
            raise ReplayDivergence(t, f"{player.value} moved out of turn")
        if "error" in rec:
            err = rec["error"]
            if player is Player.BOB and err.startswith("BobStall"):
                game._end(Player.ALICE, "bob_stall", {"detail": err.split(": ", 1)[-1]})
            else:
                game._end(player.other, "strategy_error", {"player": player.value, "error": err.split(": ", 1)[-1]})
            continue
        move = move_from_record(rec)
        try:
            if player is Player.ALICE:
                game.apply_alice(move)
            else:
                game.apply_bob(move)
        except RuleError as e:
            raise ReplayDivergence(t, f"illegal move: {e}") from e
    if game.verdict is None and game.round > cfg.round_cap:
        game._end(Player.BOB, "round_limit", {"cap": cfg.round_cap})
    return game


def replay(transcript: Transcript, incremental: bool = True) -> Verdict:
    game = replay_game(transcript, incremental=incremental)
    got = game.verdict
    want = transcript.verdict
    if got is None:
        raise ReplayDivergence(game.round, "transcript ends without a verdict")
    if want is not None and (got.winner, got.reason, got.round) != (want.winner, want.reason, want.round):
        raise ReplayDivergence(got.round, f"replayed verdict {got.reason}/{got.winner.value} differs from recorded {want.reason}/{want.winner.value}")
    if want is not None and _norm(got.witness) != _norm(want.witness):
        raise ReplayDivergence(got.round, "witness differs")
    return got


def _norm(w: dict) -> dict:
    import json

    return json.loads(json.dumps(w, sort_keys=True))


# ---------------------------------------------------------------- verdict soundness

def _scratch_column(cells_by_player, key, n) -> int:
    best = n
    for cells in cells_by_player.values():
        mask = cells.get(key, 0)
        for r in range(n):
            if mask >> r & 1:
                best = min(best, r)
                break
    return best


def _scratch_series(transcript: Transcript, pair: UPair, upto: int) -> list:
    """Declared f(pair, 1..upto) rebuilt from the raw records, one value per round."""
    values = []
    current = None
    for rec in transcript.records:
        if rec["player"] != "bob" or "error" in rec or rec["round"] > upto:
            continue
        if "f_default" in rec:
            current = Fraction(rec["f_default"])
        for u in rec.get("f_updates", []):
            if (min(u["lo"], u["hi"]), max(u["lo"], u["hi"])) == tuple(pair):
                current = Fraction(u["value"])
        values.append(current)
    return values


def revalidate(transcript: Transcript) -> bool:
    """Check that the recorded verdict is justified by a from-scratch evaluation."""
    game = replay_game(transcript)
    v = transcript.verdict
    if v is None:
        return False
    cfg = transcript.config
    n = cfg.n
    grid: GridState = game.grid
    w = v.witness
    if v.reason in ("req_c", "req_eps", "req_k", "req_a"):
        pair = UPair(*w["pair"])
        z = _scratch_column(grid.z_cells, pair, n)
        xs = [_scratch_column(grid.x_cells, u, n) for u in (pair.lo, pair.hi)]
        m = max(xs)
        seq = _scratch_series(transcript, pair, v.round)
        f = seq[-1]
        t = cfg.t
        if v.reason == "req_c":
            return not passes_c(f, z, m, cfg.c)
        if v.reason == "req_eps":
            return not passes_eps(f, z, m, cfg.eps, t)
        if v.reason == "req_k":
            return not passes_k(min_oscillations(seq), cfg.k)
        return not passes_a(total_variation(seq), m, cfg.a, t)
    if v.reason in ("row_restriction", "alice_row_restriction"):
        player = Player(w["player"])
        row = w["row"]
        if w["grid"] == Grid.X.value:
            return grid.remaining_x(player, row) == 0
        return grid.remaining_z(player, w["slice"], row) == 0
    if v.reason == "alice_no_move":
        last = transcript.records[-1]
        if last["player"] != "alice":
            return False
        if not last["placements"]:
            return True
        # every placement must have been a no-op
        move = move_from_record(last)
        return all(p.row >= n or grid.occupied(p) for p in move.placements)
    if v.reason == "round_limit":
        return game.round > cfg.round_cap
    if v.reason in ("strategy_error", "bob_stall"):
        return "error" in transcript.records[-1]
    return False


def check_transcript_file(path) -> Verdict:
    return replay(Transcript.read(path))
