"""Alice's recursive strategies for the games H and G, plus a random player.

Both recursive strategies open the very first level with a single *probe*
token (Z at the singleton pair {u0} of the first string, row n-1) in place of
the X move, which deeper levels make.  Without it Bob's first declaration of f
would come after Alice's first Z drop and that level could not force an update.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .blocks import build_blocks_avg, build_blocks_main_help, select_block_h
from .core import Grid, Player, TokenPlacement, UPair, canonical_pair
from .match import Strategy
from .referee import AliceMove, GameState

log = logging.getLogger(__name__)

QUARTER = Fraction(1, 4)


def x_tokens(strings, row: int) -> list:
    return [TokenPlacement(Grid.X, u, row, Player.ALICE) for u in strings]


def probe_token(u0: int, n: int) -> TokenPlacement:
    return TokenPlacement(Grid.Z, UPair(u0, u0), n - 1, Player.ALICE)


def delta_for(eps) -> Fraction:
    return (1 - 2 * Fraction(eps)) / 5


def rho_stated(eps) -> float:
    """Rate in the statement of the H-strategy lemma (constant 12)."""
    q = 1 - 2 * float(eps)
    return q / (12 * math.log2(10 / q))


def rho_proof(eps) -> float:
    """Rate at the end of the H-strategy proof (constant 10), the larger of the two."""
    q = 1 - 2 * float(eps)
    return q / (10 * math.log2(10 / q))


def h_level_schedule(n: int, eps, t: int) -> list:
    """The n' values of the levels the H-strategy completes, without playing."""
    delta = delta_for(eps)
    levels = []
    np_ = n - 1
    while True:
        d = math.floor(delta * np_)
        if d < t or d < 1:
            return levels
        levels.append(np_)
        np_ = d - 1


def r_formula(n: int, eps) -> float:
    """Predicted level count log_{2/delta}(delta (n-1) / (2 sqrt n))."""
    delta = float(delta_for(eps))
    return math.log(delta * (n - 1) / (2 * math.sqrt(n))) / math.log(2 / delta)


class StratH(Strategy):
    name = "strat-h"

    def __init__(self, eps=None):
        self.eps = None if eps is None else Fraction(eps)

    def start(self, game: GameState, rng):
        super().start(game, rng)
        cfg = game.config
        if self.eps is None:
            if cfg.kind != "H":
                raise ValueError("strat-h needs eps when not playing game H")
            self.eps = cfg.eps
        self.delta = delta_for(self.eps)
        n = game.n
        half = 1 << (n - 1)
        self.U = list(range(half))
        self.V = list(range(half, 2 * half))
        self.n_cur = n - 1
        self.phase = "level_start"
        self.levels: list = []
        self.x_row_placed: dict = {}
        self.terminated = False

    def _level_start(self, game: GameState) -> Optional[AliceMove]:
        n = game.n
        d = math.floor(self.delta * self.n_cur)
        if d < game.t or d < 1:
            self.terminated = True
            log.info("strat-h terminates at n'=%d (d=%d < t=%d)", self.n_cur, d, game.t)
            return None
        self.d = d
        self.phase = "place_z"
        if self.n_cur < n - 1:
            row = self.n_cur + 1
            self.x_row_placed[row] = self.x_row_placed.get(row, 0) + len(self.U) + len(self.V)
            return AliceMove(x_tokens(self.U + self.V, row))
        return AliceMove([probe_token(self.U[0], n)])

    def _place_z(self, game: GameState) -> AliceMove:
        n_cur, d = self.n_cur, self.d
        N = 1 << n_cur
        E = 1 << (n_cur - d)
        size = 1 << (d - 1)
        self.U_blocks = [self.U[j * size:(j + 1) * size] for j in range(E)]
        self.V_blocks = build_blocks_main_help(self.U_blocks, self.V, game, E, N)
        self.E = E
        self.f_before = {}
        placements = []
        for Uj, Vj in zip(self.U_blocks, self.V_blocks):
            for u in Uj:
                for v in Vj:
                    p = canonical_pair(u, v)
                    self.f_before[p] = game.f(p)
                    placements.append(TokenPlacement(Grid.Z, p, d, Player.ALICE))
        self.phase = "select"
        return AliceMove(placements)

    def _select(self, game: GameState):
        log_e = self.n_cur - self.d
        j = select_block_h(game, self.U_blocks, log_e)
        Uj, Vj = self.U_blocks[j], self.V_blocks[j]
        drops = [self.f_before[p] - game.f(p) for p in (canonical_pair(u, v) for u in Uj for v in Vj)]
        rec = {
            "level": len(self.levels) + 1,
            "n_prime": self.n_cur,
            "d": self.d,
            "E": self.E,
            "j": j,
            "pairs": len(drops),
            "min_drop": min(drops),
            "forced": min(drops) >= self.delta,
        }
        self.levels.append(rec)
        log.info("strat-h level %(level)d: n'=%(n_prime)d d=%(d)d E=%(E)d j=%(j)d min drop %(min_drop)s", rec)
        self.U, self.V = list(Uj), list(Vj)
        self.n_cur = self.d - 1
        self.phase = "level_start"

    def move(self, game: GameState) -> Optional[AliceMove]:
        if self.phase == "select":
            self._select(game)
        if self.phase == "level_start":
            return self._level_start(game)
        if self.phase == "place_z":
            return self._place_z(game)
        raise AssertionError(f"bad phase {self.phase}")

    def finish(self, game: GameState) -> None:
        # Bob's last reply was applied in full when he lost on a requirement
        v = game.verdict
        if self.phase == "select" and v is not None and v.reason.startswith("req_"):
            self._select(game)
            self.levels[-1]["final"] = True


# ---------------------------------------------------------------- game G

def claim_bounds(c: int, n_prime: int, e: Optional[int] = None) -> dict:
    """The three bracketing bounds on f(t-1), f(t), f(t+1) and whether they separate."""
    if e is None:
        e = 4 * c
    up_prev = Fraction(n_prime + c, n_prime + e - 2)
    low_mid = Fraction(n_prime - 3, n_prime + 1 + c)
    up_next = Fraction(n_prime - e + c, n_prime - 2)
    return {
        "f_prev_upper": up_prev,
        "f_mid_lower": low_mid,
        "f_next_upper": up_next,
        "rise_forced": up_prev <= low_mid,
        "fall_forced": up_next <= low_mid,
    }


def verify_claim(x_prev_u: int, z_mid: int, x_next_u: int, f_prev, f_mid, f_next,
                 osc_prev: int, osc_next: int, n_prime: int, e: int, c: int) -> str:
    """'void' if a hypothesis fails, else 'holds' or 'violated'.

    Checks the three bracketing inequalities (consequences of requirement (c))
    and that the oscillation count grew by at least one.
    """
    if not (x_prev_u >= n_prime + e - 2 and z_mid >= n_prime - 2 and x_next_u >= n_prime - 2):
        return "void"
    b = claim_bounds(c, n_prime, e)
    ok = (
        f_prev < b["f_prev_upper"]
        and f_mid > b["f_mid_lower"]
        and f_next < b["f_next_upper"]
        and osc_next >= 1 + osc_prev
    )
    return "holds" if ok else "violated"


def _frac_avg(total, count) -> Fraction:
    return Fraction(int(total), int(count))


class StratG(Strategy):
    name = "strat-g"

    def __init__(self, c: Optional[int] = None, relaxed: bool = False, samples: int = 32):
        self.c = c
        self.relaxed = relaxed
        self.samples = samples

    def start(self, game: GameState, rng):
        super().start(game, rng)
        cfg = game.config
        if self.c is None:
            if cfg.kind != "G":
                raise ValueError("strat-g needs c when not playing game G")
            self.c = cfg.c
        n = game.n
        self.flagged = self.c < 3 or n <= 16 * self.c * self.c
        if self.flagged and not (self.relaxed or cfg.relaxed):
            log.warning("strat-g: c=%d, n=%d is outside c >= 3, n > 16c^2; running relaxed, claims are checked not assumed",
                        self.c, n)
        self.e = 4 * self.c
        half = 1 << (n - 1)
        self.U = list(range(half))
        self.V = list(range(half, 2 * half))
        self.n_cur = n - 1
        self.phase = "level_start"
        self.levels: list = []
        self.x_row_placed: dict = {}
        self.terminated = False

    # --- objective helpers
    def _index(self):
        self.u_index = {u: i for i, u in enumerate(self.U)}
        self.v_index = {v: i for i, v in enumerate(self.V)}

    def _osc_matrix(self, game: GameState) -> np.ndarray:
        A = np.zeros((len(self.U), len(self.V)), dtype=np.int64)
        v_index = self.v_index
        for iu, u in enumerate(self.U):
            for pair in game.partners.get(u, ()):
                iv = v_index.get(pair.other(u))
                if iv is not None:
                    A[iu, iv] = game.osc(pair)
        return A

    def _z_indicator(self, game: GameState, k: int) -> np.ndarray:
        # default-class pairs have Z = n >= k
        I = np.ones((len(self.U), len(self.V)), dtype=np.int64)
        v_index = self.v_index
        for iu, u in enumerate(self.U):
            for pair in game.partners.get(u, ()):
                iv = v_index.get(pair.other(u))
                if iv is not None and game.z(pair) < k:
                    I[iu, iv] = 0
        return I

    def _x_vector(self, game: GameState, strings) -> np.ndarray:
        return np.array([game.x(u) for u in strings], dtype=np.int64)

    # --- phases
    def _level_start(self, game: GameState) -> Optional[AliceMove]:
        n = game.n
        if self.n_cur <= self.e:
            self.terminated = True
            log.info("strat-g terminates at n'=%d <= e=%d", self.n_cur, self.e)
            return None
        self._index()
        self.t = game.round  # the level's first round
        self.osc_prev = self._osc_matrix(game)
        self.x_prev = self._x_vector(game, self.U)
        self.I1 = (self.x_prev >= self.n_cur + self.e - 2).astype(np.int64)
        self.phase = "place_z"
        if self.n_cur < n - 1:
            row = self.n_cur + 1
            self.x_row_placed[row] = self.x_row_placed.get(row, 0) + len(self.U) + len(self.V)
            return AliceMove(x_tokens(self.U + self.V, row))
        return AliceMove([probe_token(self.U[0], n)])

    def _place_z(self, game: GameState) -> AliceMove:
        n_cur, e = self.n_cur, self.e
        N = 1 << n_cur
        E = 1 << e
        b = N // E
        self.I2 = self._z_indicator(game, n_cur - 2)
        objective = self.osc_prev + self.I1[:, None] * self.I2
        perm, s_sum, total = build_blocks_avg(objective, E, self.rng, samples=self.samples)
        self.objective_sum_S, self.objective_total = int(s_sum), int(total)
        self.E, self.b = E, b
        self.U_blocks = [list(range(j * b, (j + 1) * b)) for j in range(E)]  # indices into U
        self.V_blocks = [sorted(int(i) for i in perm[j * b:(j + 1) * b]) for j in range(E)]
        placements = []
        row = n_cur - e
        for Uj, Vj in zip(self.U_blocks, self.V_blocks):
            for iu in Uj:
                u = self.U[iu]
                for iv in Vj:
                    placements.append(TokenPlacement(Grid.Z, canonical_pair(u, self.V[iv]), row, Player.ALICE))
        self.phase = "select"
        return AliceMove(placements)

    def _select(self, game: GameState):
        n_cur, e, c, t = self.n_cur, self.e, self.c, self.t
        N = len(self.U)
        x_next = self._x_vector(game, self.U)
        I3 = (x_next >= n_cur - 2).astype(np.int64)
        level_no = len(self.levels) + 1
        check_claims = level_no > 1
        claims = {"holds": 0, "void": 0, "violated": 0}
        block_scores = []
        sum_S_next = 0
        sum_S_prev_I12 = 0
        sum_S_prev_I123 = 0
        for Uj, Vj in zip(self.U_blocks, self.V_blocks):
            score = 0
            for iu in Uj:
                u = self.U[iu]
                for iv in Vj:
                    v = self.V[iv]
                    pair = canonical_pair(u, v)
                    osc_next = game.osc(pair)
                    score += osc_next + int(I3[iu])
                    osc_prev = int(self.osc_prev[iu, iv])
                    i12 = int(self.I1[iu] * self.I2[iu, iv])
                    sum_S_prev_I12 += osc_prev + i12
                    sum_S_prev_I123 += osc_prev + i12 * int(I3[iu])
                    if check_claims:
                        s = game.series_of(pair)
                        verdict = verify_claim(
                            int(self.x_prev[iu]), n_cur if self.I2[iu, iv] else 0, int(x_next[iu]),
                            s.value_at(t - 1), s.value_at(t), s.value_at(t + 1),
                            osc_prev, osc_next, n_cur, e, c,
                        ) if self.I2[iu, iv] else "void"
                        claims[verdict] += 1
            block_scores.append(score)
            sum_S_next += score
        j = int(np.argmax(block_scores))
        bsz = self.b * self.b
        S_size = self.E * bsz
        UV = N * N
        prev_avg = _frac_avg(self.osc_prev.sum() + self.I1.sum() * N, UV)
        lhs = Fraction(block_scores[j], bsz)
        chain = {
            "A0": prev_avg - QUARTER,
            "A1": _frac_avg(self.osc_prev.sum() + (self.I1[:, None] * self.I2).sum(), UV),
            "A2": Fraction(sum_S_prev_I12, S_size),
            "A3": Fraction(sum_S_prev_I123, S_size) + QUARTER,
            "A4": Fraction(sum_S_next, S_size) - Fraction(1, 2),
            "A5": lhs - Fraction(1, 2),
        }
        rec = {
            "level": level_no,
            "n_prime": n_cur,
            "round": t,
            "E": self.E,
            "j": j,
            "lhs": lhs,
            "rhs": QUARTER + prev_avg,
            "star_holds": lhs >= QUARTER + prev_avg,
            "chain": chain,
            "claims": claims,
            "high_ratio_ok": self.objective_sum_S * self.E >= self.objective_total,
        }
        self.levels.append(rec)
        log.info("strat-g level %d: n'=%d E=%d j=%d lhs=%s rhs=%s claims=%s",
                 level_no, n_cur, self.E, j, lhs, rec["rhs"], claims)
        self.U = [self.U[i] for i in self.U_blocks[j]]
        self.V = [self.V[i] for i in self.V_blocks[j]]
        self.n_cur = n_cur - e
        self.phase = "level_start"

    def move(self, game: GameState) -> Optional[AliceMove]:
        if self.phase == "select":
            self._select(game)
        if self.phase == "level_start":
            return self._level_start(game)
        if self.phase == "place_z":
            return self._place_z(game)
        raise AssertionError(f"bad phase {self.phase}")

    def finish(self, game: GameState) -> None:
        # Bob's last reply was applied in full when he lost on a requirement
        v = game.verdict
        if self.phase == "select" and v is not None and v.reason.startswith("req_"):
            self._select(game)
            self.levels[-1]["final"] = True


# ---------------------------------------------------------------- random play

class RandomAlice(Strategy):
    """Budget-respecting random play inside a small arena of strings.

    ``reckless`` is the probability of ignoring the budget for one token, which
    exercises the alice_row_restriction verdict.
    """

    name = "random"

    def __init__(self, arena: int = 4, max_tokens: Optional[int] = None, reckless: float = 0.0,
                 min_row: int = 0):
        self.arena_size = arena
        self.max_tokens = max_tokens
        self.reckless = reckless
        self.min_row = min_row

    def start(self, game: GameState, rng):
        super().start(game, rng)
        n = game.n
        k = min(self.arena_size, 1 << n)
        self.arena = sorted(int(u) for u in rng.choice(1 << n, size=k, replace=False))
        self.budget = self.max_tokens if self.max_tokens is not None else int(rng.integers(1, 40))
        self.spent = 0

    def _candidate(self, game: GameState) -> TokenPlacement:
        rng = self.rng
        n = game.n
        lo = min(self.min_row, n - 1)
        row = int(rng.integers(lo, n))
        if rng.random() < 0.5:
            return TokenPlacement(Grid.X, int(rng.choice(self.arena)), row, Player.ALICE)
        u, v = (int(x) for x in rng.choice(self.arena, size=2))
        return TokenPlacement(Grid.Z, canonical_pair(u, v), row, Player.ALICE)

    def _affordable(self, game: GameState, p: TokenPlacement, pending) -> bool:
        g = game.grid
        if g.occupied(p) or p in pending:
            return True
        used = sum(1 for q in pending if q.grid is p.grid and q.row == p.row
                   and (p.grid is Grid.X or set(q.column) & set(p.column)))
        if p.grid is Grid.X:
            return g.remaining_x(Player.ALICE, p.row) - used >= 1
        return all(g.remaining_z(Player.ALICE, u, p.row) - used >= 1 for u in set(p.column))

    def move(self, game: GameState) -> Optional[AliceMove]:
        if self.spent >= self.budget:
            return None
        want = int(self.rng.integers(1, 4))
        placements: list = []
        for _ in range(want * 8):
            if len(placements) >= want:
                break
            p = self._candidate(game)
            if p in placements or game.grid.occupied(p):
                continue
            if self.rng.random() < self.reckless or self._affordable(game, p, placements):
                placements.append(p)
        self.spent += max(1, len(placements))
        return AliceMove(placements) if placements else None


class ShadowAlice(Strategy):
    """Random play that never contradicts an oracle's final values.

    Tokens go only to rows r with final cx(u) < r + c (resp. final cz < r + c),
    the situation in which the reduction Bob is guaranteed to find a reply.
    """

    name = "shadow"

    def __init__(self, oracle, c: int = 1, per_round: int = 2):
        self.oracle = oracle
        self.c = c
        self.per_round = per_round

    def move(self, game: GameState) -> Optional[AliceMove]:
        o = self.oracle
        rng = self.rng
        n = game.n
        grid = game.grid
        H = o.horizon
        out: list = []
        for _ in range(40):
            if len(out) >= self.per_round:
                break
            if rng.random() < 0.5:
                u = int(rng.integers(0, o.num_strings))
                lo = max(0, int(o.CX[H, u]) - self.c + 1)
                if lo >= n:
                    continue
                p = TokenPlacement(Grid.X, u, int(rng.integers(lo, n)), Player.ALICE)
                ok = grid.remaining_x(Player.ALICE, p.row) > sum(1 for q in out if q.grid is Grid.X and q.row == p.row)
            else:
                i = int(rng.integers(0, o.num_pairs))
                pair = UPair.from_index(i)
                lo = max(0, int(o.CZ[H, i]) - self.c + 1)
                if lo >= n:
                    continue
                p = TokenPlacement(Grid.Z, pair, int(rng.integers(lo, n)), Player.ALICE)
                ok = all(grid.remaining_z(Player.ALICE, w, p.row)
                         > sum(1 for q in out if q.grid is Grid.Z and q.row == p.row and w in q.column)
                         for w in set(pair))
            if ok and p not in out and not grid.occupied(p):
                out.append(p)
        return AliceMove(out) if out else None
