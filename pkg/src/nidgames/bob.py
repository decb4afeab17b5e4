"""Bob's strategies: clamping, budget-spending, random, and the oracle-driven reduction."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import Grid, Player, TokenPlacement, UPair, canonical_pair
from .match import BobStall, Strategy
from .oracle import ApproxOracle, OracleDefect
from .referee import BobMove, GameState, band_eps, interval_c

log = logging.getLogger(__name__)


def clamp_margin(n: int, c: int) -> Fraction:
    return Fraction(1, 4 * n * (n + c))


class Clamp:
    """Nearest admissible value for requirement (c) or (eps), cached by (Z, M, prev)."""

    def __init__(self, kind: str, n: int, c: Optional[int] = None, eps=None, t: int = 0):
        self.kind = kind
        self.n = n
        self.c = c
        self.eps = None if eps is None else Fraction(eps)
        self.t = t
        self.mu = clamp_margin(n, c or 0)
        self._cache: dict = {}

    def __call__(self, z: int, m: int, prev: Fraction) -> Fraction:
        key = (z, m, prev)
        out = self._cache.get(key)
        if out is None:
            out = self._cache[key] = self._clamp(z, m, prev)
        return out

    def _clamp(self, z, m, prev):
        if self.kind == "G":
            lo, hi = interval_c(z, m, self.c)
            assert hi is None or lo < hi, "empty admissible interval"
            if lo < prev and (hi is None or prev < hi):
                return prev
            mu = self.mu if hi is None else min((hi - lo) / 2, self.mu)
            return lo + mu if prev <= lo else hi - mu
        if m < self.t:
            return prev
        lo, hi = band_eps(z, m, self.eps)
        return min(max(prev, lo), hi)


def _default_pairs_virtual(game: GameState, vx: dict, m: int) -> list:
    """Non-explicit pairs whose max X equals m under the virtual X map ``vx``."""
    tops = sorted(u for u, x in vx.items() if x == m)
    lows = sorted(u for u, x in vx.items() if x <= m)
    out = []
    seen = set()
    for u in tops:
        for w in lows:
            p = canonical_pair(u, w)
            if p not in seen and p not in game.explicit:
                seen.add(p)
                out.append(p)
    return out


def clamp_pass(game: GameState, clamp: Clamp, f_default: Fraction, candidates, lowered: Optional[dict] = None,
               x_changed: bool = True) -> dict:
    """f updates that bring every candidate pair (and every failing default group) into range.

    ``lowered`` maps strings to the X value they will have after Bob's own tokens.
    """
    lowered = lowered or {}

    def vx(u):
        x = lowered.get(u)
        return game.x(u) if x is None else x

    n = game.n
    updates: dict = {}

    def visit(p):
        if p in updates:
            return
        prev = game.f(p) if game.f_default is not None else f_default
        if prev is None:
            prev = f_default
        new = clamp(game.z(p), max(vx(p.lo), vx(p.hi)), prev)
        if new != prev:
            updates[p] = new

    for p in candidates:
        visit(p)
    if x_changed:
        xmap = dict(game.grid.x_val)
        xmap.update(lowered)
        for m in sorted(set(xmap.values())):
            if m >= n or clamp(n, m, f_default) == f_default:
                continue
            for p in _default_pairs_virtual(game, xmap, m):
                visit(p)
    return updates


class ClampBob(Strategy):
    """Places no tokens; moves f to the nearest admissible value when forced."""

    name = "clamp"

    def __init__(self, eps=None, prior=Fraction(1, 2)):
        self.eps = None if eps is None else Fraction(eps)
        self.prior = Fraction(prior)

    def start(self, game: GameState, rng):
        super().start(game, rng)
        cfg = game.config
        if cfg.kind == "G":
            self.clamp = Clamp("G", game.n, c=cfg.c)
        else:
            self.clamp = Clamp("H", game.n, eps=self.eps if self.eps is not None else cfg.eps, t=game.t)

    def _candidates(self, game: GameState, extra=()):
        if game.round == 1:
            return sorted(game.explicit, key=lambda p: p.index)
        cand = set(game.alice_changed_z) | game.explicit_pairs_of(game.alice_changed_x)
        cand.update(extra)
        return sorted(cand, key=lambda p: p.index)

    def move(self, game: GameState) -> BobMove:
        n = game.n
        if game.round == 1:
            f_default = self.clamp(n, n, self.prior)
            ups = clamp_pass(game, self.clamp, f_default, self._candidates(game))
            return BobMove([], f_default, ups)
        ups = clamp_pass(game, self.clamp, game.f_default, self._candidates(game),
                         x_changed=bool(game.alice_changed_x))
        return BobMove([], None, ups)


class BudgetBob(ClampBob):
    """Spends X tokens to restore ratios instead of moving f, when budgets allow.

    For a pair whose Z Alice lowered, Bob looks for the largest m' below the
    pair's current M at which the previous f is still admissible, and lowers
    both endpoints to m' if his row-m' budget covers them.  Whatever is left is
    clamped.  ``pain`` is the f change Bob tolerates before spending tokens.
    """

    name = "budget"

    def __init__(self, eps=None, prior=Fraction(1, 2), pain=Fraction(0)):
        super().__init__(eps, prior)
        self.pain = Fraction(pain)

    def _restore_row(self, game: GameState, z: int, m: int, prev: Fraction) -> Optional[int]:
        for mp in range(m - 1, -1, -1):
            if self.clamp(z, mp, prev) == prev:
                return mp
        return None

    def move(self, game: GameState) -> BobMove:
        if game.round == 1:
            return super().move(game)
        grid = game.grid
        lowered: dict = {}
        spent: dict = {}
        placements = []
        for p in sorted(game.alice_changed_z, key=lambda q: q.index):
            prev = game.f(p)
            z = game.z(p)
            m = max(lowered.get(p.lo, game.x(p.lo)), lowered.get(p.hi, game.x(p.hi)))
            if abs(self.clamp(z, m, prev) - prev) <= self.pain:
                continue
            mp = self._restore_row(game, z, m, prev)
            if mp is None:
                continue
            need = [u for u in {p.lo, p.hi} if lowered.get(u, game.x(u)) > mp]
            if len(need) > grid.remaining_x(Player.BOB, mp) - spent.get(mp, 0):
                continue
            for u in need:
                lowered[u] = mp
                spent[mp] = spent.get(mp, 0) + 1
                placements.append(TokenPlacement(Grid.X, u, mp, Player.BOB))
        extra = set()
        if lowered:
            touched = set(game.grid.x_val) | set(lowered)
            for u in lowered:
                for w in touched:
                    extra.add(canonical_pair(u, w))
            extra |= game.explicit_pairs_of(lowered)
        cand = self._candidates(game, extra)
        ups = clamp_pass(game, self.clamp, game.f_default, cand, lowered,
                         x_changed=bool(game.alice_changed_x) or bool(lowered))
        return BobMove(placements, None, ups)


class RandomBob(Strategy):
    """Seeded random play for referee fuzzing; loses often by design.

    ``mode``: "mixed" (random tokens and a mix of random and clamped f values),
    or "constant" (no tokens, never updates f).
    """

    name = "random"

    def __init__(self, mode: str = "mixed", p_random_f: float = 0.2, p_overspend: float = 0.02,
                 max_tokens: int = 3):
        if mode not in ("mixed", "constant"):
            raise ValueError(f"unknown random-bob mode {mode!r}")
        self.mode = mode
        self.p_random_f = p_random_f
        self.p_overspend = p_overspend
        self.max_tokens = max_tokens

    def start(self, game: GameState, rng):
        super().start(game, rng)
        cfg = game.config
        if cfg.kind == "G":
            self.clamp = Clamp("G", game.n, c=cfg.c)
        else:
            self.clamp = Clamp("H", game.n, eps=cfg.eps, t=game.t)

    def _random_f(self) -> Fraction:
        return Fraction(int(self.rng.integers(0, 25)), int(self.rng.integers(1, 13)))

    def _tokens(self, game: GameState) -> list:
        rng = self.rng
        n = game.n
        grid = game.grid
        touched = sorted(set(grid.x_val) | {u for p in game.explicit for u in p})
        pool = touched or [0]
        out = []
        for _ in range(int(rng.integers(0, self.max_tokens + 1))):
            row = int(rng.integers(0, n))
            if rng.random() < 0.5:
                u = int(rng.choice(pool)) if rng.random() < 0.8 else int(rng.integers(0, 1 << n))
                p = TokenPlacement(Grid.X, u, row, Player.BOB)
                ok = grid.remaining_x(Player.BOB, row) > sum(1 for q in out if q.grid is Grid.X and q.row == row)
            else:
                a, b = (int(x) for x in rng.choice(pool, size=2))
                p = TokenPlacement(Grid.Z, canonical_pair(a, b), row, Player.BOB)
                ok = all(grid.remaining_z(Player.BOB, w, row) > sum(1 for q in out if q.grid is Grid.Z and q.row == row and w in q.column)
                         for w in set(p.column))
            if p in out:
                continue
            if ok or rng.random() < self.p_overspend:
                out.append(p)
        return out

    def move(self, game: GameState) -> BobMove:
        n = game.n
        rng = self.rng
        first = game.round == 1
        if self.mode == "constant":
            return BobMove([], self.clamp(n, n, Fraction(1, 2)) if first else None, {})
        placements = self._tokens(game)
        f_default = None
        if first:
            f_default = self._random_f() if rng.random() < self.p_random_f else self.clamp(n, n, Fraction(1, 2))
        fd = f_default if first else game.f_default
        cand = set(game.explicit if first else game.alice_changed_z | game.explicit_pairs_of(game.alice_changed_x))
        cand |= {q.column for q in placements if q.grid is Grid.Z}
        cand |= game.explicit_pairs_of(q.column for q in placements if q.grid is Grid.X)
        cand |= set(game.explicit) if rng.random() < 0.3 else set()
        updates = {}
        lowered = {}
        for q in placements:
            if q.grid is Grid.X:
                lowered[q.column] = min(lowered.get(q.column, game.x(q.column)), q.row)
        zmap = {}
        for q in placements:
            if q.grid is Grid.Z:
                zmap[q.column] = min(zmap.get(q.column, game.z(q.column)), q.row)
        for p in sorted(cand, key=lambda q: q.index):
            prev = game.f(p) if not first else fd
            if rng.random() < self.p_random_f:
                v = self._random_f()
            else:
                m = max(lowered.get(p.lo, game.x(p.lo)), lowered.get(p.hi, game.x(p.hi)))
                v = self.clamp(zmap.get(p, game.z(p)), m, prev)
            if v != prev:
                updates[p] = v
        return BobMove(placements, f_default, updates)


# ---------------------------------------------------------------- reduction Bob

class ApproxOracleBob(Strategy):
    """Bob driven by an approximation oracle.

    Variant "G": search s > r_prev with cx < X + c and cz < Z + c everywhere and
    fprime equal to the exact ratio.  Variant "H": only pairs whose larger cx
    reaches the threshold matter, the inequalities are non-strict and fprime may
    be within eps' of the ratio.  Pairs and strings are enumerated in full, so
    this Bob is meant for small n.
    """

    name = "oracle"

    def __init__(self, oracle: ApproxOracle, variant: Optional[str] = None, c: Optional[int] = None,
                 s_max: Optional[int] = None, eps_prime=None):
        self.oracle = oracle
        self.variant = variant
        self.c = c
        self.s_max = s_max
        self.eps_prime = oracle.eps_prime if eps_prime is None else Fraction(eps_prime)

    def start(self, game: GameState, rng):
        super().start(game, rng)
        cfg = game.config
        if self.oracle.n != game.n:
            raise ValueError(f"oracle is for n={self.oracle.n}, game has n={game.n}")
        if self.variant is None:
            self.variant = cfg.kind
        if self.c is None:
            self.c = cfg.c if cfg.kind == "G" else 1
        self.r_prev = 0
        self.trace: list = []  # (round, s)
        self.sandwich_ok = True
        o = self.oracle
        self.N = o.num_strings
        self.P = o.num_pairs
        self.lo, self.hi = o._pair_lo, o._pair_hi
        self.pairs = [UPair(int(a), int(b)) for a, b in zip(self.lo, self.hi)]
        # the threshold mask depends only on s, so precompute it
        cxmax = np.maximum(o.CX[:, self.lo], o.CX[:, self.hi])
        self.mask = cxmax >= game.t

    def _board(self, game: GameState):
        X = np.array([game.x(u) for u in range(self.N)], dtype=np.int64)
        Z = np.array([game.z(p) for p in self.pairs], dtype=np.int64)
        return X, Z

    def _qualifies(self, s: int, X, Z) -> bool:
        o = self.oracle
        si = min(s, o.horizon)
        cx, cz = o.CX[si], o.CZ[si]
        c = self.c
        if self.variant == "G":
            if not ((cx < X + c).all() and (cz < Z + c).all()):
                return False
            return bool((o.FP[si] == o.RATIO[si]).all())
        mask = self.mask[si]
        if not (cx <= X + c).all() or not (cz[mask] <= Z[mask] + c).all():
            return False
        diff = o.FP[si][mask] - o.RATIO[si][mask]
        return all(abs(d) <= self.eps_prime for d in diff)

    def move(self, game: GameState) -> BobMove:
        o = self.oracle
        X, Z = self._board(game)
        found = None
        s = self.r_prev + 1
        cap = float("inf") if self.s_max is None else self.s_max
        while s <= cap:
            if self._qualifies(s, X, Z):
                found = s
                break
            if s >= o.horizon:
                break  # the oracle is constant from here on
            s += 1
        if found is None:
            raise BobStall(f"no s in ({self.r_prev}, {min(cap, max(s, o.horizon))}] satisfies the search conditions")
        si = min(found, o.horizon)
        if self.r_prev:
            pi = min(self.r_prev, o.horizon)
            if (o.CX[si] > o.CX[pi]).any() or (o.CZ[si] > o.CZ[pi]).any():
                raise OracleDefect(f"approximation increased between s={self.r_prev} and s={found}")
        self.r_prev = found
        self.trace.append((game.round, found))
        n = game.n
        cx, cz = o.CX[si], o.CZ[si]
        grid = game.grid
        placements = []
        bx = grid.x_cells[Player.BOB]
        for u in range(self.N):
            r = int(cx[u])
            if r < n and not bx.get(u, 0) >> r & 1:
                placements.append(TokenPlacement(Grid.X, u, r, Player.BOB))
        bz = grid.z_cells[Player.BOB]
        for i, p in enumerate(self.pairs):
            r = int(cz[i]) + 1
            if r < n and not bz.get(p, 0) >> r & 1:
                placements.append(TokenPlacement(Grid.Z, p, r, Player.BOB))
        # post-move sandwich X <= cx < X + c, Z - 1 <= cz < Z + c (non-strict upper side for H)
        Xa = np.minimum(X, np.where(cx < n, cx, n))
        Za = np.minimum(Z, np.where(cz + 1 < n, cz + 1, n))
        strict = self.variant == "G"
        upper_x = (cx < Xa + self.c) if strict else (cx <= Xa + self.c)
        upper_z = (cz < Za + self.c) if strict else (cz <= Za + self.c)
        if self.variant == "H":
            upper_z = upper_z | ~self.mask[si]
        if not ((Xa <= cx).all() and upper_x.all() and (Za - 1 <= cz).all() and upper_z.all()):
            self.sandwich_ok = False
        fp = o.FP[si]
        first = game.round == 1
        f_default = Fraction(1) if first else None
        base = f_default if first else None
        updates = {}
        for i, p in enumerate(self.pairs):
            prev = base if first else game.f(p)
            if fp[i] != prev:
                updates[p] = fp[i]
        return BobMove(placements, f_default, updates)


def reduction_eps(n: int, c: int, t: int, eps_prime) -> Fraction:
    """Smallest eps for which the H-variant reduction Bob provably keeps requirement (eps).

    After his move Z - 1 <= cz <= Z + c and M <= max cx <= M + c, so the exact
    ratio cz / max cx is within max(c/M, (M + Zc) / (M(M + c))) of Z/M; fprime
    adds at most eps'.
    """
    worst = Fraction(0)
    for m in range(max(t, 1), n + 1):
        for z in range(0, n + 1):
            worst = max(worst, Fraction(c, m), Fraction(m + z * c, m * (m + c)))
    return Fraction(eps_prime) + worst
