"""Oscillation counting and total variation over exact rationals.

A sequence has k oscillations when it is the concatenation of k monotone
(non-increasing or non-decreasing) pieces; a constant sequence has 0.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from numbers import Rational
from typing import Sequence


def _sign(x) -> int:
    return (x > 0) - (x < 0)


class ValueSeries:
    """Append-only sequence with incremental oscillation count and total variation.

    ``rounds`` optionally records the game round at which each value was declared;
    rounds without a declaration carry the previous value, which changes neither
    the oscillation count nor the total variation.
    """

    __slots__ = ("values", "rounds", "count", "direction", "tv")

    def __init__(self, values=(), rounds=None):
        self.values: list = []
        self.rounds: list = []
        self.count = 0
        self.direction = 0  # direction of the current piece, 0 while it is flat
        self.tv = Fraction(0)
        for i, v in enumerate(values):
            self.append(v, None if rounds is None else rounds[i])

    def append(self, v, round_no: int | None = None) -> "ValueSeries":
        values = self.values
        if values:
            last = values[-1]
            s = _sign(v - last)
            if s:
                self.tv += abs(v - last)
                if self.direction == 0:
                    if self.count == 0:
                        self.count = 1
                    self.direction = s
                elif s != self.direction:
                    # v opens a new piece whose direction is not yet known
                    self.count += 1
                    self.direction = 0
        values.append(v)
        self.rounds.append(round_no)
        return self

    @property
    def last(self):
        return self.values[-1]

    def value_at(self, round_no: int):
        """Value in force at the end of ``round_no`` (requires recorded rounds)."""
        i = bisect_right(self.rounds, round_no)
        if i == 0:
            raise ValueError(f"no value declared up to round {round_no}")
        return self.values[i - 1]

    def prefix(self, round_no: int) -> list:
        return self.values[: bisect_right(self.rounds, round_no)]

    def copy(self) -> "ValueSeries":
        c = ValueSeries()
        c.values = list(self.values)
        c.rounds = list(self.rounds)
        c.count, c.direction, c.tv = self.count, self.direction, self.tv
        return c

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"ValueSeries({[str(v) for v in self.values]}, osc={self.count}, tv={self.tv})"


def append_value(s: ValueSeries, v) -> ValueSeries:
    return s.append(v)


def min_oscillations(seq: Sequence) -> int:
    """Minimal number of monotone pieces; greedy longest-first-piece scan."""
    count = 0
    direction = 0
    for prev, cur in zip(seq, seq[1:]):
        s = _sign(cur - prev)
        if not s:
            continue
        if direction == 0:
            if count == 0:
                count = 1
            direction = s
        elif s != direction:
            count += 1
            direction = 0
    return count


def _monotone(seg) -> bool:
    pairs = list(zip(seg, seg[1:]))
    return all(a <= b for a, b in pairs) or all(a >= b for a, b in pairs)


def min_oscillations_bruteforce(seq: Sequence, max_len: int = 12) -> int:
    """Exhaustive minimum over all ways to cut ``seq`` into monotone pieces."""
    seq = list(seq)
    if len(seq) > max_len:
        raise ValueError(f"sequence of length {len(seq)} exceeds brute-force limit {max_len}")
    if len(set(seq)) <= 1:
        return 0
    best = len(seq)

    def search(start: int, pieces: int):
        nonlocal best
        if pieces >= best:
            return
        if start == len(seq):
            best = pieces
            return
        for end in range(len(seq), start, -1):
            if _monotone(seq[start:end]):
                search(end, pieces + 1)

    search(0, 0)
    return best


def total_variation(seq: Sequence) -> Fraction:
    return sum((abs(Fraction(b) - Fraction(a)) for a, b in zip(seq, seq[1:])), Fraction(0))


def _check_ratio_inputs(a, b, c, m):
    if len(a) != len(b):
        raise ValueError("sequences differ in length")
    if len(a) > m:
        raise ValueError(f"length {len(a)} exceeds m = {m}")
    for name, s in (("a", a), ("b", b)):
        if any(not isinstance(x, int) or not 1 <= x <= m for x in s):
            raise ValueError(f"{name} must be integers in [1, {m}]")
        if any(x > y for x, y in zip(s, s[1:])):
            raise ValueError(f"{name} is not non-decreasing")
    if any(x > y + c for x, y in zip(a, b)):
        raise ValueError(f"a_i <= b_i + {c} violated")


def ratio_tv(a: Sequence[int], b: Sequence[int], c: int = 0, m: int | None = None) -> Fraction:
    """Total variation of a_i / b_i for two non-decreasing integer sequences."""
    if m is None:
        m = max([len(a), *a, *b]) if a else 1
    _check_ratio_inputs(a, b, c, m)
    return total_variation([Fraction(x, y) for x, y in zip(a, b)])


def log_bound(m: int) -> float:
    return 2 * math.log(m)


def ratio_tv_within_bound(a, b, m: int | None = None) -> bool:
    """Companion predicate for c = 0: ratio_tv(a, b) <= 2 ln m."""
    if m is None:
        m = max([len(a), *a, *b]) if a else 1
    tv = ratio_tv(a, b, 0, m)
    return float(tv) <= log_bound(m)


def ratio_tv_excess(a, b, c: int, m: int | None = None) -> float:
    """Measured excess over 2 ln m; no bound is asserted for c > 0."""
    if m is None:
        m = max([len(a), *a, *b]) if a else 1
    return float(ratio_tv(a, b, c, m)) - log_bound(m)


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"refusing inexact value {v!r}")
