"""Synthetic approximation oracles for the reduction Bob.

An oracle answers three queries at time s: ``cx(u, s)`` and ``cz(pair, s)``
(non-increasing integer upper approximations) and ``fprime(pair, s)`` (a
rational that is eventually constant).  Synthetic oracles are staircases: a
string or pair without a schedule sits at value n forever.

The generator enforces the counting constraints that make the reduction Bob
budget-compliant: at most 2^i strings ever visit cx level i, and within a slice
at most 2^(i+1) pairs ever visit cz level i (levels >= n are free).  All values
are kept >= 1 so the ratio cz / max(cx_u, cx_v) is defined and the lower side of
requirement (c) stays strict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .core import UPair

MODES = ("exact", "lag", "noise")


class OracleDefect(ValueError):
    """The oracle breaks its own contract (monotonicity or value range)."""


def _staircase_table(steps, horizon: int, n: int) -> list:
    out = [n] * (horizon + 1)
    if not steps:
        return out
    steps = sorted((int(s), int(v)) for s, v in steps)
    last = n
    for s, v in steps:
        if s < 1:
            raise OracleDefect(f"step time {s} < 1")
        if v > last:
            raise OracleDefect(f"staircase increases ({last} -> {v} at s={s})")
        if v < 1:
            raise OracleDefect(f"value {v} < 1")
        last = v
    j = 0
    cur = n
    for s in range(horizon + 1):
        while j < len(steps) and steps[j][0] <= s:
            cur = steps[j][1]
            j += 1
        out[s] = cur
    return out


class ApproxOracle:
    """Table-backed oracle; times beyond the horizon repeat the final column."""

    def __init__(self, n: int, strings: dict, pairs: dict, mode: str = "exact",
                 eps_prime=Fraction(0), lag: int = 0, seed: int = 0, offset: int = 0):
        if mode not in MODES:
            raise ValueError(f"unknown fprime mode {mode!r}")
        self.n = n
        self.mode = mode
        self.eps_prime = Fraction(eps_prime)
        self.lag = lag
        self.seed = seed
        self.offset = offset
        self.string_steps = {int(u): list(v) for u, v in strings.items()}
        self.pair_steps = {UPair(*sorted(p)): list(v) for p, v in pairs.items()}
        last = [s for st in list(self.string_steps.values()) + list(self.pair_steps.values()) for s, _ in st]
        stable = max(last, default=0)
        # fprime keeps changing for `lag` more steps (lag mode) or until noise dies out
        self.horizon = stable + max(lag, 1 if mode == "noise" else 0) + 1
        H = self.horizon
        N = 1 << n
        self.num_strings = N
        self.num_pairs = N * (N + 1) // 2
        self.CX = np.full((H + 1, N), n, dtype=np.int64)
        for u, st in self.string_steps.items():
            if not 0 <= u < N:
                raise OracleDefect(f"string {u} out of range")
            self.CX[:, u] = _staircase_table(st, H, n)
        self.CZ = np.full((H + 1, self.num_pairs), n, dtype=np.int64)
        for p, st in self.pair_steps.items():
            if not 0 <= p.lo <= p.hi < N:
                raise OracleDefect(f"pair {tuple(p)} out of range")
            self.CZ[:, p.index] = _staircase_table(st, H, n)
        if offset:
            self.CX = np.minimum(self.CX + offset, n + offset)
        self._pair_lo, self._pair_hi = _pair_endpoints(N)
        denom = np.maximum(self.CX[:, self._pair_lo], self.CX[:, self._pair_hi])
        self.RATIO = np.empty((H + 1, self.num_pairs), dtype=object)
        cache: dict = {}
        for s in range(H + 1):
            for i in range(self.num_pairs):
                key = (int(self.CZ[s, i]), int(denom[s, i]))
                r = cache.get(key)
                if r is None:
                    r = cache[key] = Fraction(*key)
                self.RATIO[s, i] = r
        self.FP = self._fprime_table()
        self.check_monotone()

    def _fprime_table(self) -> np.ndarray:
        H = self.horizon
        if self.mode == "exact":
            return self.RATIO.copy()
        if self.mode == "lag":
            FP = np.empty_like(self.RATIO)
            for s in range(H + 1):
                FP[s] = self.RATIO[max(0, s - self.lag)]
            return FP
        rng = np.random.default_rng([self.seed, 7])
        q = 1000
        k = int(self.eps_prime * q)
        noise = rng.integers(-k, k + 1, size=(H + 1, self.num_pairs))
        noise[H] = 0  # converged
        FP = np.empty_like(self.RATIO)
        for s in range(H + 1):
            for i in range(self.num_pairs):
                FP[s, i] = self.RATIO[s, i] + Fraction(int(noise[s, i]), q)
        return FP

    def check_monotone(self):
        if (np.diff(self.CX, axis=0) > 0).any() or (np.diff(self.CZ, axis=0) > 0).any():
            raise OracleDefect("approximation increases over time")

    def _s(self, s: int) -> int:
        if s < 0:
            raise ValueError("time must be >= 0")
        return min(s, self.horizon)

    def cx(self, u: int, s: int) -> int:
        return int(self.CX[self._s(s), u])

    def cz(self, pair, s: int) -> int:
        return int(self.CZ[self._s(s), UPair(*sorted(pair)).index])

    def fprime(self, pair, s: int) -> Fraction:
        return self.FP[self._s(s), UPair(*sorted(pair)).index]

    def ratio(self, pair, s: int) -> Fraction:
        return self.RATIO[self._s(s), UPair(*sorted(pair)).index]

    def fprime_series(self, pair, upto: Optional[int] = None) -> list:
        i = UPair(*sorted(pair)).index
        upto = self.horizon if upto is None else upto
        return [self.FP[self._s(s), i] for s in range(1, upto + 1)]

    # --- counting constraints
    def x_level_counts(self) -> dict:
        counts: dict = {}
        for u in range(self.num_strings):
            for lvl in set(int(v) for v in self.CX[:, u]):
                if lvl < self.n:
                    counts[lvl] = counts.get(lvl, 0) + 1
        return counts

    def z_slice_level_counts(self) -> dict:
        counts: dict = {}
        for p in self.pair_steps:
            levels = set(int(v) for v in self.CZ[:, p.index])
            for lvl in levels:
                if lvl + 1 < self.n:
                    for w in {p.lo, p.hi}:
                        counts[(w, lvl)] = counts.get((w, lvl), 0) + 1
        return counts

    def counting_ok(self) -> bool:
        if any(c > (1 << lvl) for lvl, c in self.x_level_counts().items()):
            return False
        return all(c <= (1 << (lvl + 1)) for (_, lvl), c in self.z_slice_level_counts().items())

    # --- serialisation
    def to_spec(self) -> dict:
        fp = {"mode": self.mode, "eps_prime": f"{self.eps_prime.numerator}/{self.eps_prime.denominator}", "lag": self.lag}
        return {
            "n": self.n,
            "seed": self.seed,
            "offset": self.offset,
            "strings": [{"string": u, "steps": [list(x) for x in st]} for u, st in sorted(self.string_steps.items())],
            "pairs": [{"lo": p.lo, "hi": p.hi, "steps": [list(x) for x in st]} for p, st in sorted(self.pair_steps.items())],
            "fprime": fp,
        }


def _pair_endpoints(N: int):
    lo = np.empty(N * (N + 1) // 2, dtype=np.int64)
    hi = np.empty_like(lo)
    i = 0
    for h in range(N):
        lo[i:i + h + 1] = np.arange(h + 1)
        hi[i:i + h + 1] = h
        i += h + 1
    return lo, hi


def oracle_from_spec(spec: dict) -> ApproxOracle:
    fp = spec.get("fprime", {})
    return ApproxOracle(
        spec["n"],
        {d["string"]: d["steps"] for d in spec.get("strings", [])},
        {(d["lo"], d["hi"]): d["steps"] for d in spec.get("pairs", [])},
        mode=fp.get("mode", "exact"),
        eps_prime=Fraction(fp.get("eps_prime", "0")),
        lag=int(fp.get("lag", 0)),
        seed=int(spec.get("seed", 0)),
        offset=int(spec.get("offset", 0)),
    )


def load_oracle(path) -> ApproxOracle:
    return oracle_from_spec(json.loads(Path(path).read_text()))


@dataclass
class SyntheticSpec:
    n: int
    strings: int = 4          # how many strings get a staircase
    pairs: int = 6            # how many pairs get a staircase
    max_steps: int = 3
    horizon: int = 12
    mode: str = "exact"
    eps_prime: Fraction = Fraction(0)
    lag: int = 0
    min_value: int = 1
    offset: int = 0
    extra: dict = field(default_factory=dict)


def _random_staircase(rng, n: int, horizon: int, max_steps: int, lo: int, fits) -> list:
    k = int(rng.integers(1, max_steps + 1))
    times = sorted(int(x) for x in rng.choice(np.arange(1, horizon + 1), size=min(k, horizon), replace=False))
    values = sorted((int(x) for x in rng.integers(lo, n, size=len(times))), reverse=True)
    steps = []
    for s, v in zip(times, values):
        if fits(v):
            steps.append((s, v))
        else:
            break
    return steps


def make_synthetic_oracle(spec: SyntheticSpec, seed: int = 0) -> ApproxOracle:
    """Random staircases that respect the counting constraints."""
    rng = np.random.default_rng([seed, 11])
    n = spec.n
    N = 1 << n
    lo = max(1, spec.min_value)
    x_count: dict = {}
    strings = {}
    for u in rng.choice(N, size=min(spec.strings, N), replace=False):
        u = int(u)
        visited: set = set()

        def fits_x(v, visited=visited):
            ok = v >= n or v in visited or x_count.get(v, 0) < (1 << v)
            if ok and v < n and v not in visited:
                visited.add(v)
                x_count[v] = x_count.get(v, 0) + 1
            return ok

        st = _random_staircase(rng, n, spec.horizon, spec.max_steps, lo, fits_x)
        if st:
            strings[u] = st
    z_count: dict = {}
    pairs = {}
    for _ in range(spec.pairs):
        a, b = (int(x) for x in rng.integers(0, N, size=2))
        p = UPair(min(a, b), max(a, b))
        if p in pairs:
            continue
        visited = set()

        def fits_z(v, p=p, visited=visited):
            if v + 1 >= n or v in visited:
                return True
            if any(z_count.get((w, v), 0) >= (1 << (v + 1)) for w in {p.lo, p.hi}):
                return False
            visited.add(v)
            for w in {p.lo, p.hi}:
                z_count[(w, v)] = z_count.get((w, v), 0) + 1
            return True

        st = _random_staircase(rng, n, spec.horizon, spec.max_steps, lo, fits_z)
        if st:
            pairs[p] = st
    oracle = ApproxOracle(n, strings, pairs, mode=spec.mode, eps_prime=spec.eps_prime, lag=spec.lag,
                          seed=seed, offset=spec.offset)
    assert oracle.counting_ok(), "generator broke the counting constraints"
    return oracle


def prefix_offset(n: int) -> int:
    """The 4 log n offset folded into final values for the prefix-complexity variant."""
    return math.ceil(4 * math.log2(n))
