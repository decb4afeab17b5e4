"""Rules of the games G(n, c, k) and H(n, eps, a).

Bob's declaration of f over all unordered pairs is kept sparse: a default value
declared in round 1 plus per-pair overrides.  A pair is *explicit* once it holds
a Z token or has been named in an override; every other pair belongs to the
default class, which has Z = n and the constant series [f_default].  The
default class is checked per value m of max{X_u, X_v} by counting, so boards
with 2^(2n) pairs never have to be enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .core import (
    ACCEPTED,
    NOOP,
    BudgetViolation,
    Grid,
    GridState,
    Player,
    TokenPlacement,
    UPair,
    canonical_pair,
    place_token,
)
from .seqstats import ValueSeries, as_fraction


class RuleError(Exception):
    """A call that breaks the turn protocol or a malformed move."""


# ---------------------------------------------------------------- configuration

def _ceil_root(n: int, alpha: Fraction) -> int:
    """Smallest integer m >= n**alpha, computed exactly."""
    p, q = alpha.numerator, alpha.denominator
    target = n**p
    m = max(0, int(round(n ** float(alpha))) - 2)
    while m**q < target:
        m += 1
    return m


def threshold_value(spec: str, n: int) -> int:
    """Integer form of the activation threshold: max{X_u, X_v} >= t(n)."""
    if spec == "sqrt":
        return _ceil_root(n, Fraction(1, 2))
    kind, _, arg = spec.partition(":")
    if kind == "const":
        value = int(arg)
        if value < 1:
            raise ValueError("constant threshold must be >= 1")
        return value
    if kind == "pow":
        return _ceil_root(n, Fraction(arg).limit_denominator(1000))
    raise ValueError(f"unknown threshold spec {spec!r}")


@dataclass(frozen=True)
class GameConfig:
    kind: str  # "G" or "H"
    n: int
    c: Optional[int] = None
    k: Optional[int] = None
    eps: Optional[Fraction] = None
    a: Optional[Fraction] = None
    threshold: str = "sqrt"
    max_rounds: Optional[int] = None
    relaxed: bool = False

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in ("G", "H"):
            raise ValueError(f"unknown game kind {self.kind!r}")
        if not isinstance(self.n, int) or not 1 <= self.n <= 30:
            raise ValueError(f"n must be an integer in [1, 30], got {self.n!r}")
        if kind == "G":
            if self.c is None or self.k is None:
                raise ValueError("game G needs c and k")
            if self.eps is not None or self.a is not None:
                raise ValueError("eps/a are parameters of game H")
            if self.c < 1 or self.k < 0:
                raise ValueError("game G needs c >= 1 and k >= 0")
        else:
            if self.eps is None or self.a is None:
                raise ValueError("game H needs eps and a")
            if self.c is not None or self.k is not None:
                raise ValueError("c/k are parameters of game G")
            object.__setattr__(self, "eps", as_fraction(self.eps))
            object.__setattr__(self, "a", as_fraction(self.a))
            if not 0 < self.eps < 1:
                raise ValueError("eps must lie in (0, 1)")
            if self.a < 0:
                raise ValueError("a must be >= 0")
        threshold_value(self.threshold, self.n)
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")

    @property
    def t(self) -> int:
        return threshold_value(self.threshold, self.n)

    @property
    def round_cap(self) -> int:
        """Alice's total budget bounds the number of rounds."""
        if self.max_rounds is not None:
            return self.max_rounds
        per_grid = (1 << self.n) - 1
        return per_grid * ((1 << self.n) + 1)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "threshold": self.threshold}
        if self.kind == "G":
            d.update(c=self.c, k=self.k)
        else:
            d.update(eps=frac_str(self.eps), a=frac_str(self.a))
        if self.max_rounds is not None:
            d["max_rounds"] = self.max_rounds
        if self.relaxed:
            d["relaxed"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GameConfig":
        d = dict(d)
        for key in ("eps", "a"):
            if key in d and d[key] is not None:
                d[key] = Fraction(d[key])
        return cls(**d)

    @classmethod
    def prefix_variant(cls, n: int, k: int, **kw) -> "GameConfig":
        """Game G with c = ceil(5 log2 n), the setting used for prefix complexity."""
        return cls("G", n, c=max(1, math.ceil(5 * math.log2(n))), k=k, **kw)


def frac_str(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------- moves / verdicts

@dataclass
class AliceMove:
    placements: list


@dataclass
class BobMove:
    placements: list = field(default_factory=list)
    f_default: Optional[Fraction] = None
    f_updates: dict = field(default_factory=dict)


REASONS = (
    "row_restriction",
    "req_c",
    "req_k",
    "req_eps",
    "req_a",
    "alice_no_move",
    "alice_row_restriction",
    "strategy_error",
    "bob_stall",
    "round_limit",
)


@dataclass(frozen=True)
class Verdict:
    winner: Player
    reason: str
    round: int
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"winner": self.winner.value, "reason": self.reason, "round": self.round, "witness": self.witness}

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(Player(d["winner"]), d["reason"], d["round"], d.get("witness", {}))


# ---------------------------------------------------------------- requirement formulas

def interval_c(z: int, m: int, c: int):
    """Open interval ((Z-1)/(M+c), (Z+c)/M); the upper end is None (infinite) when M = 0."""
    lo = Fraction(z - 1, m + c)
    hi = Fraction(z + c, m) if m > 0 else None
    return lo, hi


def passes_c(f, z: int, m: int, c: int) -> bool:
    lo, hi = interval_c(z, m, c)
    return lo < f and (hi is None or f < hi)


def band_eps(z: int, m: int, eps):
    r = Fraction(z, m)
    return r - eps, r + eps


def passes_eps(f, z: int, m: int, eps, t: int) -> bool:
    if m < t:
        return True
    return abs(f - Fraction(z, m)) <= eps


def passes_a(tv, m: int, a, t: int) -> bool:
    return m < t or tv <= a


def passes_k(osc: int, k: int) -> bool:
    return osc <= k


# ---------------------------------------------------------------- game state

def _tri(k: int) -> int:
    return k * (k + 1) // 2


class GameState:
    def __init__(self, config: GameConfig, incremental: bool = True):
        self.config = config
        self.n = config.n
        self.t = config.t
        self.grid = GridState(config.n)
        self.round = 1
        self.phase = Player.ALICE
        self.verdict: Optional[Verdict] = None
        self.f_default: Optional[Fraction] = None
        self.default_series: Optional[ValueSeries] = None
        self.series: dict = {}
        self.explicit: set = set()
        self.partners: dict = {}
        self.incremental = incremental
        self.history: list = []
        # what changed during the current round, per half-turn
        self.alice_changed_x: set = set()
        self.alice_changed_z: set = set()
        self._round_changed_x: set = set()
        self._round_changed_z: set = set()

    # --- views used by strategies
    def x(self, u: int) -> int:
        return self.grid.x(u)

    def z(self, pair: UPair) -> int:
        return self.grid.z(pair)

    def m(self, pair: UPair) -> int:
        return self.grid.m(pair)

    def f(self, pair: UPair) -> Fraction:
        s = self.series.get(pair)
        if s is not None:
            return s.values[-1]
        return self.f_default

    def series_of(self, pair: UPair) -> ValueSeries:
        return self.series.get(pair) or self.default_series

    def osc(self, pair: UPair) -> int:
        s = self.series.get(pair)
        return s.count if s is not None else 0

    def tv(self, pair: UPair) -> Fraction:
        s = self.series.get(pair)
        return s.tv if s is not None else Fraction(0)

    def _make_explicit(self, pair: UPair):
        if pair not in self.explicit:
            self.explicit.add(pair)
            self.partners.setdefault(pair.lo, set()).add(pair)
            if pair.hi != pair.lo:
                self.partners.setdefault(pair.hi, set()).add(pair)

    def explicit_pairs_of(self, strings: Iterable[int]) -> set:
        out: set = set()
        for u in strings:
            out |= self.partners.get(u, set())
        return out

    def strings_with_x_at_most(self, m: int) -> list:
        out = []
        for v, us in self.grid.x_by_value.items():
            if v <= m:
                out.extend(us)
        return out

    def realized_m_values(self) -> list:
        n = self.n
        vals = sorted(v for v, us in self.grid.x_by_value.items() if us)
        if len(self.grid.x_val) < (1 << n):
            vals.append(n)
        return vals

    def default_pairs_with_m(self, m: int, limit: Optional[int] = None) -> list:
        """Non-explicit pairs with max{X_u, X_v} = m (m < n), sorted."""
        if m >= self.n:
            raise ValueError("the M = n default class is not enumerable")
        tops = sorted(self.grid.x_by_value.get(m, ()))
        lows = sorted(self.strings_with_x_at_most(m))
        out = []
        seen = set()
        for u in tops:
            for w in lows:
                p = canonical_pair(u, w)
                if p in seen or p in self.explicit:
                    continue
                seen.add(p)
                out.append(p)
                if limit is not None and len(out) >= limit:
                    return out
        return out

    def _count_pairs_with_max(self, m: int) -> int:
        n = self.n
        if m >= n:
            below = len(self.grid.x_val)
            return _tri(1 << n) - _tri(below)
        le = sum(len(us) for v, us in self.grid.x_by_value.items() if v <= m)
        lt = sum(len(us) for v, us in self.grid.x_by_value.items() if v < m)
        return _tri(le) - _tri(lt)

    def _count_explicit_with_max(self, m: int) -> int:
        if m >= self.n:
            return sum(1 for p in self.explicit if self.m(p) == m)
        cand = self.explicit_pairs_of(self.grid.x_by_value.get(m, ()))
        return sum(1 for p in cand if self.m(p) == m)

    def default_class_has(self, m: int) -> bool:
        return self._count_pairs_with_max(m) > self._count_explicit_with_max(m)

    def _default_witness(self, m: int) -> UPair:
        n = self.n
        if m < n:
            return self.default_pairs_with_m(m, limit=1)[0]
        untouched = (u for u in range(1 << n) if u not in self.grid.x_val)
        for u in untouched:
            for w in range(u, 1 << n):
                if w in self.grid.x_val:
                    continue
                p = UPair(u, w)
                if p not in self.explicit:
                    return p
        raise AssertionError("default class unexpectedly empty")

    # --- half-turns
    def _apply_placements(self, placements, player: Player):
        """Returns (violation | None, number of non-noop placements)."""
        grid = self.grid
        applied = 0
        for p in placements:
            if p.player is not player:
                raise RuleError(f"{player.value} submitted a {p.player.value} token")
            if p.grid is Grid.X:
                before = grid.x(p.column)
                res = place_token(grid, p)
                if res is ACCEPTED and grid.x(p.column) != before:
                    self._round_changed_x.add(p.column)
            else:
                before = grid.z(p.column)
                res = place_token(grid, p)
                if res is ACCEPTED:
                    self._make_explicit(p.column)
                    if grid.z(p.column) != before:
                        self._round_changed_z.add(p.column)
            if isinstance(res, BudgetViolation):
                return res, applied
            if res is not NOOP:
                applied += 1
        return None, applied

    def apply_alice(self, move: Optional[AliceMove]) -> Optional[Verdict]:
        if self.verdict is not None:
            raise RuleError("game is over")
        if self.phase is not Player.ALICE:
            raise RuleError("not Alice's turn")
        self._round_changed_x = set()
        self._round_changed_z = set()
        placements = list(move.placements) if move is not None else []
        self.history.append([move, None])
        if not placements:
            return self._end(Player.BOB, "alice_no_move", {})
        violation, applied = self._apply_placements(placements, Player.ALICE)
        if violation is not None:
            return self._end(Player.BOB, "alice_row_restriction", _violation_witness(violation))
        if applied == 0:
            return self._end(Player.BOB, "alice_no_move", {"detail": "only no-op placements"})
        self.alice_changed_x = set(self._round_changed_x)
        self.alice_changed_z = set(self._round_changed_z)
        self.phase = Player.BOB
        return None

    def apply_bob(self, move: BobMove) -> Optional[Verdict]:
        if self.verdict is not None:
            raise RuleError("game is over")
        if self.phase is not Player.BOB:
            raise RuleError("not Bob's turn")
        t = self.round
        if t == 1:
            if move.f_default is None:
                raise RuleError("round 1 requires f_default")
        elif move.f_default is not None:
            raise RuleError("f_default may only be declared in round 1")
        self.history[-1][1] = move
        violation, _ = self._apply_placements(move.placements, Player.BOB)
        if violation is not None:
            return self._end(Player.ALICE, "row_restriction", _violation_witness(violation))
        if t == 1:
            self.f_default = as_fraction(move.f_default)
            self.default_series = ValueSeries([self.f_default], [1])
        updated = set()
        for pair, value in move.f_updates.items():
            if not isinstance(pair, UPair):
                pair = canonical_pair(*pair)
            value = as_fraction(value)
            s = self.series.get(pair)
            if s is None:
                s = ValueSeries() if t == 1 else self.default_series.copy()
                self.series[pair] = s
            if s.rounds and s.rounds[-1] == t:
                raise RuleError(f"pair {pair} updated twice in round {t}")
            s.append(value, t)
            self._make_explicit(pair)
            updated.add(pair)
        verdict = self._check_requirements(updated)
        if verdict is not None:
            return verdict
        self.round += 1
        self.phase = Player.ALICE
        return None

    def _end(self, winner: Player, reason: str, witness: dict) -> Verdict:
        self.verdict = Verdict(winner, reason, self.round, witness)
        return self.verdict

    # --- requirement checks
    def pairs_to_check(self, updated: set) -> list:
        if not self.incremental or self.round == 1:
            pairs = self.explicit
        else:
            pairs = set(updated) | self._round_changed_z | self.explicit_pairs_of(self._round_changed_x)
        return sorted(pairs, key=lambda p: p.index)

    def _check_requirements(self, updated: set) -> Optional[Verdict]:
        pairs = self.pairs_to_check(updated)
        check_default = not self.incremental or self.round == 1 or bool(self._round_changed_x)
        cfg = self.config
        first = "req_c" if cfg.kind == "G" else "req_eps"
        second = "req_k" if cfg.kind == "G" else "req_a"
        for p in pairs:
            if not self.pair_passes(p, first):
                return self._end(Player.ALICE, first, self._pair_witness(p, first))
        if check_default:
            for m in self.realized_m_values():
                if not self._default_passes(m) and self.default_class_has(m):
                    p = self._default_witness(m)
                    return self._end(Player.ALICE, first, self._pair_witness(p, first))
        for p in pairs:
            if not self.pair_passes(p, second):
                return self._end(Player.ALICE, second, self._pair_witness(p, second))
        # the default series is constant: 0 oscillations and 0 total update
        return None

    def _default_passes(self, m: int) -> bool:
        cfg = self.config
        f = self.f_default
        if cfg.kind == "G":
            return passes_c(f, self.n, m, cfg.c)
        return passes_eps(f, self.n, m, cfg.eps, self.t)

    def pair_passes(self, p: UPair, req: str) -> bool:
        cfg = self.config
        if req == "req_c":
            return passes_c(self.f(p), self.z(p), self.m(p), cfg.c)
        if req == "req_eps":
            return passes_eps(self.f(p), self.z(p), self.m(p), cfg.eps, self.t)
        if req == "req_k":
            return passes_k(self.osc(p), cfg.k)
        if req == "req_a":
            return passes_a(self.tv(p), self.m(p), cfg.a, self.t)
        raise ValueError(req)

    def _pair_witness(self, p: UPair, req: str) -> dict:
        w = {
            "pair": [p.lo, p.hi],
            "Z": self.z(p),
            "X": [self.x(p.lo), self.x(p.hi)],
            "f": frac_str(self.f(p)),
        }
        if req == "req_k":
            w["osc"] = self.osc(p)
        if req == "req_a":
            w["tv"] = frac_str(self.tv(p))
        return w


def _violation_witness(v: BudgetViolation) -> dict:
    return {"player": v.player.value, "grid": v.grid.value, "slice": v.slice, "row": v.row}


def new_game(config: GameConfig, incremental: bool = True) -> GameState:
    return GameState(config, incremental=incremental)


def apply_alice(state: GameState, move: Optional[AliceMove]) -> Optional[Verdict]:
    return state.apply_alice(move)


def apply_bob(state: GameState, move: BobMove) -> Optional[Verdict]:
    return state.apply_bob(move)


def check_req_c(state: GameState, pair: UPair) -> bool:
    return state.pair_passes(pair, "req_c")


def check_req_k(state: GameState, pair: UPair) -> bool:
    return state.pair_passes(pair, "req_k")


def check_req_eps(state: GameState, pair: UPair) -> bool:
    return state.pair_passes(pair, "req_eps")


def check_req_a(state: GameState, pair: UPair) -> bool:
    return state.pair_passes(pair, "req_a")
