"""Choosing the product blocks U_j x V_j that Alice attacks.

The V_j are always pairwise disjoint: a string v shared by two blocks would
receive Z tokens from both in its slice Z_v and could break Alice's own row
restriction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import canonical_pair


def _is_pow2(x: int) -> bool:
    return x >= 1 and x & (x - 1) == 0


def build_blocks_main_help(U_blocks: Sequence[Sequence[int]], V_pool: Sequence[int], game, E: int, N: int) -> list:
    """Greedy disjoint V_j with Z_uv >= log2 E on every U_j x V_j.

    For one u fewer than E strings v have Z_uv < log E, so fewer than N/2 are
    excluded per block and the pool (size N) never runs dry.
    """
    if not (_is_pow2(E) and _is_pow2(N)) or E > N // 2:
        raise ValueError(f"need powers of two with E <= N/2, got E={E}, N={N}")
    if len(U_blocks) != E:
        raise ValueError(f"expected {E} blocks, got {len(U_blocks)}")
    size = N // (2 * E)
    if any(len(b) != size for b in U_blocks):
        raise ValueError(f"every U_j must have size N/(2E) = {size}")
    if len(V_pool) != N:
        raise ValueError(f"V pool must have size {N}")
    log_e = E.bit_length() - 1
    fresh = iter(V_pool)
    skipped: list = []  # unused strings passed over by earlier blocks, in pool order
    out = []
    for j, block in enumerate(U_blocks):
        forbidden = set()
        for u in block:
            for pair in game.partners.get(u, ()):
                if game.z(pair) < log_e:
                    forbidden.add(pair.other(u))
        chosen = []
        keep = []
        for v in skipped:
            (chosen if len(chosen) < size and v not in forbidden else keep).append(v)
        while len(chosen) < size:
            v = next(fresh, None)
            if v is None:
                raise AssertionError(f"V pool exhausted at block {j}: {len(forbidden)} forbidden")
            (keep if v in forbidden else chosen).append(v)
        skipped = keep
        out.append(chosen)
    return out


def _block_sum(A, perm, E: int, b: int):
    B = A[:, perm].reshape(E, b, E, b).sum(axis=(1, 3))
    return B.trace()


def build_blocks_avg(A, E: int, rng: np.random.Generator, samples: int = 32, max_swaps: int = 10_000):
    """Partition the columns of ``A`` into E blocks so that avg over S beats the global average.

    ``A`` is the objective on U' x V' with rows ordered as the concatenation of
    the U_j (each of size N/E).  Returns ``(perm, block_sum, total)``: block j
    is ``perm[j*b:(j+1)*b]`` as column indices.  The bound avg_S >= avg_total is
    ``block_sum * E >= total``, checked exactly.
    """
    N = A.shape[1]
    if A.shape[0] != N:
        raise ValueError("objective must be square")
    if not (_is_pow2(E) and _is_pow2(N)) or E > N // 2:
        raise ValueError(f"need powers of two with E <= N/2, got E={E}, N={N}")
    b = N // E
    total = A.sum()
    best = None
    for _ in range(samples):
        perm = rng.permutation(N)
        s = _block_sum(A, perm, E, b)
        if best is None or s > best[1]:
            best = (perm, s)
        if s * E >= total:
            return perm, s, total
    perm, s = best
    # swap improvement on per-block column sums
    W = A.reshape(E, b, N).sum(axis=1)  # W[j, v]: contribution of column v in block j
    block_of = np.empty(N, dtype=np.int64)
    for j in range(E):
        block_of[perm[j * b:(j + 1) * b]] = j
    for _ in range(max_swaps):
        if s * E >= total:
            break
        cur = W[block_of, np.arange(N)]
        P = W[block_of, :]  # P[w, v] = W[block of w, v]
        G = P.T + P - cur[:, None] - cur[None, :]
        flat = int(np.argmax(G))
        v, w = divmod(flat, N)
        gain_best = G[v, w]
        if not gain_best > 0:
            break
        block_of[v], block_of[w] = block_of[w], block_of[v]
        s = s + gain_best
    if s * E < total:
        raise AssertionError("no partition reached the global average")
    perm = np.concatenate([np.flatnonzero(block_of == j) for j in range(E)])
    return perm, s, total


def avg_fraction(total, count: int) -> Fraction:
    return Fraction(int(total) if not isinstance(total, Fraction) else total) / count


def select_block_h(game, U_blocks: Sequence[Sequence[int]], log_e: int) -> int:
    """Smallest j with X_u >= log E for every u in U_j."""
    for j, block in enumerate(U_blocks):
        if all(game.x(u) >= log_e for u in block):
            return j
    raise AssertionError("no block with X_u >= log E survives; fewer than E strings should be below log E")


def block_pairs(U_j, V_j):
    return [canonical_pair(u, v) for u in U_j for v in V_j]
