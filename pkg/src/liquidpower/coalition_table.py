"""Vectorized whole-game evaluation for small voter counts.

The solvers that score thousands of candidate delegation profiles (bribery
search, maximin search) need the power of one or all voters per profile,
fast.  This module computes, with numpy, the active-member weight of every
coalition mask at once, and derives swing counts from two table lookups per
coalition.  Results are exact integers; the pure-Python enumeration in
:mod:`liquidpower.exact` serves as the independent cross-check.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InstanceTooLargeForEnumeration

TABLE_LIMIT = 16  # 2^16 coalition masks is the comfort ceiling for this path

_MASK_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _masks_and_sizes(n: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _MASK_CACHE.get(n)
    if cached is None:
        masks = np.arange(1 << n, dtype=np.uint32)
        sizes = np.zeros(1 << n, dtype=np.int64)
        for b in range(n):
            sizes += (masks >> b) & 1
        cached = (masks, sizes)
        _MASK_CACHE[n] = cached
    return cached


def chain_masks_of(choices) -> list[int]:
    """Bitmask of each voter's delegation chain (voter included)."""
    n = len(choices)
    masks: list[int | None] = [None] * n
    for v in range(n):
        if masks[v] is not None:
            continue
        stack = []
        u = v
        while masks[u] is None:
            stack.append(u)
            if choices[u] is None:
                masks[u] = 1 << u
                break
            u = choices[u]
        for w in reversed(stack):
            if masks[w] is None:
                masks[w] = (1 << w) | masks[choices[w]]
    return masks  # type: ignore[return-value]


def coalition_weight_table(choices, weights) -> np.ndarray:
    """Active-member weight of every coalition mask, as an int64 array."""
    n = len(choices)
    if n > TABLE_LIMIT:
        raise InstanceTooLargeForEnumeration(
            f"{n} voters exceed the coalition-table limit of {TABLE_LIMIT}"
        )
    masks, _ = _masks_and_sizes(n)
    gamma = np.zeros(1 << n, dtype=np.int64)
    for v, cm in enumerate(chain_masks_of(choices)):
        gamma[(masks & cm) == cm] += weights[v]
    return gamma


def swing_counts_from_table(
    gamma: np.ndarray, n: int, quota: int, voter: int
) -> list[int]:
    """Per-size swing counts of one voter, from a precomputed weight table."""
    masks, sizes = _masks_and_sizes(n)
    without = masks[(masks >> voter) & 1 == 0]
    with_v = without | (1 << voter)
    swing = (gamma[without] < quota) & (gamma[with_v] >= quota)
    counts = np.bincount(sizes[without][swing], minlength=n)
    return [int(c) for c in counts[:n]]


def swing_counts_fast(choices, weights, quota, voter) -> list[int]:
    """Per-size swing counts of one voter for an arbitrary profile."""
    gamma = coalition_weight_table(choices, weights)
    return swing_counts_from_table(gamma, len(choices), quota, voter)


def banzhaf_fast(choices, weights, quota, voter) -> Fraction:
    n = len(choices)
    return Fraction(sum(swing_counts_fast(choices, weights, quota, voter)), 1 << n - 1)


def all_swing_counts_fast(choices, weights, quota) -> list[list[int]]:
    """Per-size swing counts of every voter (shared weight table)."""
    gamma = coalition_weight_table(choices, weights)
    n = len(choices)
    return [swing_counts_from_table(gamma, n, quota, v) for v in range(n)]
