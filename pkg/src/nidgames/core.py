"""Bit strings, unordered pairs and the sparse token boards X and Z.

Columns of X are indexed by n-bit strings (stored as ints), columns of Z by
unordered pairs of such strings.  Only columns that hold at least one token are
materialized.  Each player may hold at most one token per cell; placing a token
on a cell the same player already occupies is a no-op and costs no budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Union

MAX_N = 30


class Player(str, Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def other(self) -> "Player":
        return Player.BOB if self is Player.ALICE else Player.ALICE


class Grid(str, Enum):
    X = "X"
    Z = "Z"


@dataclass(frozen=True, order=True)
class BitStr:
    n: int
    value: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"bit length {self.n} outside [1, {MAX_N}]")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def parse(cls, bits: str) -> "BitStr":
        return cls(len(bits), int(bits, 2))

    def __str__(self):
        return format(self.value, f"0{self.n}b")


class UPair(NamedTuple):
    """Canonical unordered pair ``lo <= hi``; ``UPair(u, u)`` is the singleton {u}."""

    lo: int
    hi: int

    @property
    def index(self) -> int:
        return self.hi * (self.hi + 1) // 2 + self.lo

    @classmethod
    def from_index(cls, idx: int) -> "UPair":
        # invert hi*(hi+1)/2 <= idx
        from math import isqrt

        hi = (isqrt(8 * idx + 1) - 1) // 2
        return cls(idx - hi * (hi + 1) // 2, hi)

    def other(self, u: int) -> int:
        return self.hi if u == self.lo else self.lo


def canonical_pair(u: Union[BitStr, int], v: Union[BitStr, int]) -> UPair:
    if isinstance(u, BitStr) or isinstance(v, BitStr):
        if not (isinstance(u, BitStr) and isinstance(v, BitStr)):
            raise TypeError("mixing BitStr and int columns")
        if u.n != v.n:
            raise ValueError(f"length mismatch: {u.n} vs {v.n}")
        u, v = u.value, v.value
    return UPair(u, v) if u <= v else UPair(v, u)


Column = Union[int, UPair]


@dataclass(frozen=True)
class TokenPlacement:
    grid: Grid
    column: Column
    row: int
    player: Player

    def __post_init__(self):
        if self.grid is Grid.Z and not isinstance(self.column, UPair):
            object.__setattr__(self, "column", canonical_pair(*self.column))


@dataclass(frozen=True)
class BudgetViolation:
    player: Player
    grid: Grid
    slice: int | None  # the string u of slice Z_u; None for grid X
    row: int


ACCEPTED = "accepted"
NOOP = "noop"


def _lowbit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass
class GridState:
    n: int
    x_cells: dict = field(default_factory=lambda: {Player.ALICE: {}, Player.BOB: {}})
    z_cells: dict = field(default_factory=lambda: {Player.ALICE: {}, Player.BOB: {}})
    x_row_counts: dict = field(default_factory=dict)
    z_slice_row_counts: dict = field(default_factory=lambda: {Player.ALICE: {}, Player.BOB: {}})
    x_val: dict = field(default_factory=dict)
    z_val: dict = field(default_factory=dict)
    # strings u whose X_u < n, grouped by value; kept for default-class checks
    x_by_value: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"board size {self.n} outside [1, {MAX_N}]")
        if not self.x_row_counts:
            self.x_row_counts = {p: [0] * self.n for p in Player}

    @property
    def num_strings(self) -> int:
        return 1 << self.n

    def x(self, u: int) -> int:
        return self.x_val.get(u, self.n)

    def z(self, pair: UPair) -> int:
        return self.z_val.get(pair, self.n)

    def m(self, pair: UPair) -> int:
        xv = self.x_val
        n = self.n
        return max(xv.get(pair.lo, n), xv.get(pair.hi, n))

    def slice_counts(self, player: Player, u: int) -> list:
        counts = self.z_slice_row_counts[player].get(u)
        if counts is None:
            counts = self.z_slice_row_counts[player][u] = [0] * self.n
        return counts

    def remaining_x(self, player: Player, row: int) -> int:
        return (1 << row) - self.x_row_counts[player][row]

    def remaining_z(self, player: Player, u: int, row: int) -> int:
        counts = self.z_slice_row_counts[player].get(u)
        return (1 << row) - (counts[row] if counts else 0)

    def occupied(self, p: TokenPlacement) -> bool:
        cells = self.x_cells if p.grid is Grid.X else self.z_cells
        return bool(cells[p.player].get(p.column, 0) >> p.row & 1)


def place_token(state: GridState, p: TokenPlacement):
    """Apply one placement; returns ACCEPTED, NOOP or a BudgetViolation.

    A violating placement leaves the state untouched.
    """
    if p.row < 0:
        raise ValueError(f"negative row {p.row}")
    n = state.n
    if p.row >= n:
        return NOOP
    bit = 1 << p.row
    if p.grid is Grid.X:
        u = p.column
        if not 0 <= u < (1 << n):
            raise ValueError(f"column {u} outside the {n}-bit range")
        cells = state.x_cells[p.player]
        mask = cells.get(u, 0)
        if mask & bit:
            return NOOP
        counts = state.x_row_counts[p.player]
        if counts[p.row] + 1 > bit:
            return BudgetViolation(p.player, Grid.X, None, p.row)
        counts[p.row] += 1
        cells[u] = mask | bit
        old = state.x_val.get(u, n)
        if p.row < old:
            state.x_val[u] = p.row
            if old < n:
                state.x_by_value[old].discard(u)
            state.x_by_value.setdefault(p.row, set()).add(u)
        return ACCEPTED

    pair = p.column
    if not 0 <= pair.lo <= pair.hi < (1 << n):
        raise ValueError(f"pair {pair} outside the {n}-bit range")
    cells = state.z_cells[p.player]
    mask = cells.get(pair, 0)
    if mask & bit:
        return NOOP
    slices = (pair.lo,) if pair.lo == pair.hi else (pair.lo, pair.hi)
    for u in slices:
        if state.remaining_z(p.player, u, p.row) < 1:
            return BudgetViolation(p.player, Grid.Z, u, p.row)
    for u in slices:
        state.slice_counts(p.player, u)[p.row] += 1
    cells[pair] = mask | bit
    if p.row < state.z_val.get(pair, n):
        state.z_val[pair] = p.row
    return ACCEPTED


def column_value(state: GridState, col: Union[BitStr, int, UPair]) -> int:
    if isinstance(col, UPair):
        return state.z(col)
    if isinstance(col, BitStr):
        col = col.value
    return state.x(col)


def recount(state: GridState) -> dict:
    """Recompute every ledger and column value from the raw cells."""
    n = state.n
    x_counts = {p: [0] * n for p in Player}
    z_counts = {p: {} for p in Player}
    x_val: dict = {}
    z_val: dict = {}
    for p in Player:
        for u, mask in state.x_cells[p].items():
            for r in range(n):
                if mask >> r & 1:
                    x_counts[p][r] += 1
            x_val[u] = min(x_val.get(u, n), _lowbit(mask))
        for pair, mask in state.z_cells[p].items():
            slices = (pair.lo,) if pair.lo == pair.hi else (pair.lo, pair.hi)
            for r in range(n):
                if mask >> r & 1:
                    for u in slices:
                        z_counts[p].setdefault(u, [0] * n)[r] += 1
            z_val[pair] = min(z_val.get(pair, n), _lowbit(mask))
    return {"x_row_counts": x_counts, "z_slice_row_counts": z_counts, "x_val": x_val, "z_val": z_val}


def ledgers_consistent(state: GridState) -> bool:
    fresh = recount(state)
    z_inc = {
        p: {u: c for u, c in state.z_slice_row_counts[p].items() if any(c)} for p in Player
    }
    by_value = {}
    for u, v in state.x_val.items():
        by_value.setdefault(v, set()).add(u)
    return (
        fresh["x_row_counts"] == state.x_row_counts
        and fresh["z_slice_row_counts"] == z_inc
        and fresh["x_val"] == state.x_val
        and fresh["z_val"] == state.z_val
        and by_value == {v: s for v, s in state.x_by_value.items() if s}
    )
