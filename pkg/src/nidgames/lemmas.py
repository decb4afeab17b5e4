"""Randomised and exhaustive checkers for the combinatorial lemmas the strategies rely on.

Every checker returns a ``LemmaReport``; ``run_all`` drives them for the CLI.
"""

from __future__ import annotations

import inspect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .alice import claim_bounds, h_level_schedule, r_formula, rho_proof, rho_stated
from .blocks import build_blocks_avg, build_blocks_main_help
from .core import ACCEPTED, Grid, GridState, Player, TokenPlacement, canonical_pair, place_token
from .referee import GameConfig, GameState, threshold_value
from .seqstats import log_bound, min_oscillations, min_oscillations_bruteforce, ratio_tv


@dataclass
class LemmaReport:
    name: str
    trials: int = 0
    failures: int = 0
    counterexamples: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, example, keep: int = 5):
        self.failures += 1
        if len(self.counterexamples) < keep:
            self.counterexamples.append(example)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" first counterexample: {self.counterexamples[0]}" if self.counterexamples else ""
        return f"{status} {self.name}: {self.trials} trials, {self.failures} failures{extra}"


# ---------------------------------------------------------------- oscillations

def check_oscillation_oracle(max_len: int = 9, random_trials: int = 1000, random_len: int = 12, seed: int = 0) -> LemmaReport:
    """Greedy oscillation count against exhaustive segmentation."""
    rep = LemmaReport("oscillations greedy == brute force")
    for length in range(max_len + 1):
        for seq in itertools.product((0, 1, 2), repeat=length):
            rep.trials += 1
            if min_oscillations(seq) != min_oscillations_bruteforce(seq, max_len=max_len):
                rep.fail(list(seq))
    rng = np.random.default_rng([seed, 1])
    for _ in range(random_trials):
        length = int(rng.integers(0, random_len + 1))
        seq = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(0, 6, length), rng.integers(1, 4, length))]
        rep.trials += 1
        if min_oscillations(seq) != min_oscillations_bruteforce(seq, max_len=random_len):
            rep.fail([str(x) for x in seq])
    return rep


# ---------------------------------------------------------------- ratio total variation

def random_monotone_pair(rng, m: int, max_len: int = 128, c: int = 0):
    """Non-decreasing a, b in [1, m] with a_i <= b_i + c, length <= min(m, max_len)."""
    length = int(rng.integers(1, min(m, max_len) + 1))
    if rng.random() < 0.5:
        ys = rng.integers(1, m + 1, size=length)
    else:  # log-uniform values stress the small end, where the ratio moves most
        ys = np.minimum(m, np.floor(np.exp(rng.uniform(0, math.log(m + 1), size=length)))).astype(np.int64)
        ys = np.maximum(ys, 1)
    xs = np.array([int(rng.integers(1, min(m, y + c) + 1)) for y in ys])
    return sorted(int(x) for x in xs), sorted(int(y) for y in ys)


def interleaved_doubling(m: int):
    """(1,1), (1,2), (2,2), (2,4), ... up to (m,m) for m a power of two."""
    a, b = [1], [1]
    v = 1
    while v < m:
        a.append(v)
        b.append(2 * v)
        v *= 2
        a.append(v)
        b.append(v)
    return a, b


def check_ratio_tv(trials: int = 10_000, max_m: int = 1 << 16, seed: int = 0, max_len: int = 128) -> LemmaReport:
    rep = LemmaReport("ratio total variation <= 2 ln m (c = 0)")
    rng = np.random.default_rng([seed, 2])
    for i in range(trials):
        m = int(rng.integers(2, max_m + 1))
        a, b = random_monotone_pair(rng, m, max_len)
        rep.trials += 1
        tv = ratio_tv(a, b, 0, m)
        if float(tv) > log_bound(m):
            rep.fail({"trial": i, "m": m, "tv": str(tv)})
    a, b = interleaved_doubling(1024)
    tv = ratio_tv(a, b, 0, 1024)
    rep.info["doubling_tv"] = tv
    rep.info["doubling_bound"] = log_bound(1024)
    rep.trials += 1
    if tv != 10 or float(tv) > log_bound(1024):
        rep.fail({"doubling_tv": str(tv)})
    return rep


# ---------------------------------------------------------------- averaging over low tokens

def random_budget_board(rng, n: int, player: Player, x_attempts: int, z_pairs: Optional[list] = None,
                        z_attempts: int = 0, low_bias: float = 0.7) -> GridState:
    """Random token layout for one player that respects the row restriction."""
    g = GridState(n)
    N = 1 << n
    for _ in range(x_attempts):
        row = int(rng.integers(0, n)) if rng.random() > low_bias else int(rng.integers(0, max(1, n // 2)))
        place_token(g, TokenPlacement(Grid.X, int(rng.integers(0, N)), row, player))
    if z_pairs:
        for _ in range(z_attempts):
            row = int(rng.integers(0, n)) if rng.random() > low_bias else int(rng.integers(0, max(1, n // 2)))
            u, v = z_pairs[int(rng.integers(0, len(z_pairs)))]
            place_token(g, TokenPlacement(Grid.Z, canonical_pair(u, v), row, player))
    return g


def _rand_unit(rng, size) -> list:
    return [Fraction(int(k), 8) for k in rng.integers(0, 9, size=size)]


def check_oscillations_help(trials: int = 500, seed: int = 0, max_n: int = 6) -> LemmaReport:
    """(EX) and (EZ) on random single-player boards, exact rationals.

    U' and V' are the two halves of {0,1}^n (so n' = n - 1); every i in 0..n'
    is tested.  (EZ) is checked with h on both sides of the inequality.
    """
    rep = LemmaReport("averaging over low tokens (EX)/(EZ)")
    rng = np.random.default_rng([seed, 3])
    for trial in range(trials):
        n = int(rng.integers(2, max_n + 1))
        np_ = n - 1
        half = 1 << np_
        U = list(range(half))
        V = list(range(half, 2 * half))
        pairs = [(u, v) for u in U for v in V]
        player = Player.BOB if rng.random() < 0.5 else Player.ALICE
        g_board = random_budget_board(rng, n, player, x_attempts=int(rng.integers(0, 4 * half + 1)),
                                      z_pairs=pairs, z_attempts=int(rng.integers(0, 4 * len(pairs) + 1)))
        gfun = _rand_unit(rng, half)
        hfun = _rand_unit(rng, len(pairs))
        for i in range(0, np_ + 1):
            k = np_ - i
            slack = Fraction(1, 1 << i)
            lhs = sum((gv for u, gv in zip(U, gfun) if g_board.x(u) >= k), Fraction(0)) / half
            rhs = sum(gfun, Fraction(0)) / half - slack
            rep.trials += 1
            if lhs < rhs:
                rep.fail({"trial": trial, "ineq": "EX", "n": n, "i": i})
            lhs = sum((hv for (u, v), hv in zip(pairs, hfun) if g_board.z(canonical_pair(u, v)) >= k), Fraction(0)) / len(pairs)
            rhs = sum(hfun, Fraction(0)) / len(pairs) - slack
            rep.trials += 1
            if lhs < rhs:
                rep.fail({"trial": trial, "ineq": "EZ", "n": n, "i": i})
    return rep


# ---------------------------------------------------------------- block construction

def adversarial_main_help_board(rng, n_prime: int, log_e: int):
    """A game whose Z columns are lowered below log E by Bob as much as his slice budgets allow.

    Blockers concentrate on the front of the V pool to stress the greedy choice.
    """
    n = n_prime + 1
    cfg = GameConfig("H", n, eps=Fraction(1, 4), a=Fraction(1), threshold="const:1")
    game = GameState(cfg)
    half = 1 << n_prime
    U = list(range(half))
    V = list(range(half, 2 * half))
    front = V[: min(len(V), 4 << log_e)]
    for u in U:
        if rng.random() < 0.3:
            continue
        for row in range(log_e):
            budget = 1 << row
            for v in rng.choice(front, size=min(budget, len(front)), replace=False):
                p = TokenPlacement(Grid.Z, canonical_pair(u, int(v)), row, Player.BOB)
                if place_token(game.grid, p) is ACCEPTED:
                    game._make_explicit(p.column)
    return game, U, V


def check_main_help(trials: int = 200, seed: int = 0, max_log_n: int = 10) -> LemmaReport:
    rep = LemmaReport("main-help blocks: Z >= log E on U_j x V_j, V_j disjoint")
    rng = np.random.default_rng([seed, 4])
    for trial in range(trials):
        n_prime = int(rng.integers(1, max_log_n + 1))
        N = 1 << n_prime
        log_e = int(rng.integers(0, n_prime))  # E <= N/2
        E = 1 << log_e
        game, U, V = adversarial_main_help_board(rng, n_prime, log_e)
        size = N // (2 * E)
        U_blocks = [U[j * size:(j + 1) * size] for j in range(E)]
        rep.trials += 1
        try:
            V_blocks = build_blocks_main_help(U_blocks, V, game, E, N)
        except AssertionError as e:
            rep.fail({"trial": trial, "error": str(e)})
            continue
        flat = [v for b in V_blocks for v in b]
        ok = len(flat) == len(set(flat)) and all(len(b) == size for b in V_blocks)
        ok = ok and all(game.z(canonical_pair(u, v)) >= log_e
                        for Uj, Vj in zip(U_blocks, V_blocks) for u in Uj for v in Vj)
        if not ok:
            rep.fail({"trial": trial, "N": N, "E": E})
    return rep


def _avg_ok(A, perm, E) -> bool:
    N = A.shape[0]
    b = N // E
    s = sum(A[j * b + r, perm[j * b + q]] for j in range(E) for r in range(b) for q in range(b))
    return s * E >= A.sum()


def check_blocks_avg(trials: int = 200, seed: int = 0, max_log_n: int = 6) -> LemmaReport:
    rep = LemmaReport("averaging blocks: avg_S >= avg_total")
    rng = np.random.default_rng([seed, 5])
    for trial in range(trials):
        log_n = int(rng.integers(1, max_log_n + 1))
        N = 1 << log_n
        E = 1 << int(rng.integers(1, log_n + 1)) if log_n > 1 else 1
        E = min(E, N // 2)
        if rng.random() < 0.5:
            A = rng.integers(0, 4, size=(N, N)).astype(np.int64)
        else:  # sparse spikes are the hard case for random sampling
            A = np.zeros((N, N), dtype=np.int64)
            A[rng.integers(0, N, size=3), rng.integers(0, N, size=3)] = 5
        rep.trials += 1
        perm, s, total = build_blocks_avg(A, E, rng, samples=4)
        if sorted(int(x) for x in perm) != list(range(N)) or not _avg_ok(A, perm, E):
            rep.fail({"trial": trial, "N": N, "E": E})
    # exhaustive: N = 4, E = 2, rational objectives
    for trial in range(50):
        A = np.empty((4, 4), dtype=object)
        for i in range(4):
            for j in range(4):
                A[i, j] = Fraction(int(rng.integers(0, 7)), int(rng.integers(1, 5)))
        total = A.sum()
        all_perms = list(itertools.permutations(range(4)))
        sums = [sum(A[r, p[q]] for j in range(2) for r in range(2 * j, 2 * j + 2) for q in range(2 * j, 2 * j + 2))
                for p in all_perms]
        rep.trials += 1
        # the mean over all partitions equals the global average (probabilistic method)
        if sum(sums, Fraction(0)) * 2 != total * len(all_perms) or max(sums) * 2 < total:
            rep.fail({"exhaustive": trial, "kind": "expectation"})
        perm, s, _ = build_blocks_avg(A, 2, rng, samples=1)
        if not _avg_ok(A, perm, 2):
            rep.fail({"exhaustive": trial, "kind": "algorithm"})
    return rep


# ---------------------------------------------------------------- claim bracketing

def separation_threshold(c: int, e: Optional[int] = None, limit: int = 10_000) -> Optional[int]:
    """Smallest n' > e from which the rise f(t-1) < f(t) is forced, or None below ``limit``."""
    e = 4 * c if e is None else e
    for np_ in range(e + 1, limit):
        if all(claim_bounds(c, q, e)["rise_forced"] for q in range(np_, np_ + 50)):
            return np_
    return None


def check_claim_worst_case(c: int = 3, n_prime: int = 13) -> LemmaReport:
    """Do the three bracketing bounds force f(t-1) < f(t) > f(t+1) at the worst case?"""
    rep = LemmaReport(f"claim bracketing at c = {c}, n' = {n_prime}")
    b = claim_bounds(c, n_prime)
    rep.info.update({k: str(v) for k, v in b.items()})
    rep.trials = 2
    if not b["rise_forced"]:
        rep.fail({"need": f"{b['f_prev_upper']} <= {b['f_mid_lower']}"})
    if not b["fall_forced"]:
        rep.fail({"need": f"{b['f_next_upper']} <= {b['f_mid_lower']}"})
    rep.info["rise_forced_from"] = separation_threshold(c) if c >= 4 else None
    return rep


# ---------------------------------------------------------------- level counts and rates

def check_h_levels(ns=(2**12, 2**16, 2**20, 2**24), eps_values=(Fraction(0), Fraction(1, 10), Fraction(1, 4))) -> LemmaReport:
    """Completed levels of the H-strategy (default threshold) against the closed-form r.

    The closed form assumes n' shrinks by a factor 2/delta per level while the
    strategy actually shrinks it by about 1/delta, so r is a lower bound on the
    level count; ``within_one`` records whether the two also agree to +-1.
    """
    rep = LemmaReport("H-strategy level count >= closed form")
    for n in ns:
        t = threshold_value("sqrt", n)
        for eps in eps_values:
            levels = len(h_level_schedule(n, eps, t))
            r = r_formula(n, eps)
            rep.info[(n, str(eps))] = {"levels": levels, "r": round(r, 3), "within_one": abs(levels - r) <= 1}
            if r < 1:
                continue
            rep.trials += 1
            if levels < math.floor(r):
                rep.fail({"n": n, "eps": str(eps), "levels": levels, "r": r})
    rep.info["rho"] = {str(e): (rho_stated(e), rho_proof(e)) for e in eps_values}
    return rep


CHECKS: dict[str, Callable[..., LemmaReport]] = {
    "oscillations": check_oscillation_oracle,
    "upperbound": check_ratio_tv,
    "oscillations-help": check_oscillations_help,
    "main-help": check_main_help,
    "high-ratio": check_blocks_avg,
    "claim": check_claim_worst_case,
    "h-levels": check_h_levels,
}


def run_all(names=None, seed: int = 0, scale: float = 1.0) -> list:
    names = names or list(CHECKS)
    out = []
    for name in names:
        fn = CHECKS[name]
        params = inspect.signature(fn).parameters
        kw = {}
        if "seed" in params:
            kw["seed"] = seed
        if "trials" in params and scale != 1.0:
            kw["trials"] = max(1, int(params["trials"].default * scale))
        out.append(fn(**kw))
    return out
