"""
Helpers for set functions over the subset lattice of {0, ..., n-1}.

Sets are encoded as bitmasks: item i belongs to the set iff bit i is on.
"""

from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import numpy as np


def mask_of(members: Iterable[int]) -> int:
    mask = 0
    for i in members:
        if i < 0:
            raise ValueError(f"Item index {i} is negative")
        mask |= 1 << i
    return mask


def members_of(mask: int) -> List[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=32)
def popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=32)
def states_by_descending_size(n: int) -> Tuple[int, ...]:
    """All 2^n masks ordered so that every proper superset comes before its subsets."""
    order = np.argsort(-popcounts(n), kind="stable")
    return tuple(int(s) for s in order)


def additive_table(weights: Sequence[float]) -> np.ndarray:
    table = np.zeros(1)
    for w in weights:
        table = np.concatenate([table, table + w])
    return table


def unit_demand_table(weights: Sequence[float]) -> np.ndarray:
    table = np.zeros(1)
    for w in weights:
        table = np.concatenate([table, np.maximum(table, w)])
    return table


def monotone_closure(table: np.ndarray) -> np.ndarray:
    """Return f'(S) = max over T subset of S of f(T)."""
    out = np.array(table, dtype=float, copy=True)
    size = len(out)
    n = size.bit_length() - 1
    idx = np.arange(size)
    for i in range(n):
        with_i = idx[(idx >> i) & 1 == 1]
        out[with_i] = np.maximum(out[with_i], out[with_i ^ (1 << i)])
    return out


def monotonicity_violation(table: np.ndarray, tolerance: float):
    """Return the first (smaller, larger) pair with f(smaller) > f(larger) + tolerance, or None."""
    size = len(table)
    n = size.bit_length() - 1
    idx = np.arange(size)
    for i in range(n):
        with_i = idx[(idx >> i) & 1 == 1]
        bad = table[with_i ^ (1 << i)] > table[with_i] + tolerance
        if bad.any():
            larger = int(with_i[np.argmax(bad)])
            return larger ^ (1 << i), larger
    return None


def subset_masks(mask: int) -> List[int]:
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return subs
