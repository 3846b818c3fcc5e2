"""Exact offline optimum of the simple knapsack (best subset with total <= capacity)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .errors import InputTooLarge
from .model import CAPACITY, Instance, to_fraction

EXHAUSTIVE_LIMIT = 30
BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class Packing:
    selection: tuple[Fraction, ...]
    total: Fraction


def _integer_weights(items, capacity):
    scale = math.lcm(capacity.denominator, *(x.denominator for x in items))
    return [int(x * scale) for x in items], int(capacity * scale), scale


def _best_total(weights: list[int], cap: int) -> int:
    """Depth-first branch and bound over weights sorted in decreasing order."""
    weights = sorted((w for w in weights if w <= cap), reverse=True)
    suffix = [0] * (len(weights) + 1)
    for i in range(len(weights) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]
    if suffix[0] <= cap:
        return suffix[0]

    best = 0

    def dfs(i: int, total: int) -> bool:
        nonlocal best
        if total > best:
            best = total
            if best == cap:
                return True
        if i == len(weights) or min(cap, total + suffix[i]) <= best:
            return False
        if total + weights[i] <= cap and dfs(i + 1, total + weights[i]):
            return True
        return dfs(i + 1, total)

    dfs(0, 0)
    return best


def _smallest_selection(weights: list[int], target: int) -> list[int]:
    """Indices (into ascending-sorted weights) of the lexicographically smallest
    ascending selection summing exactly to ``target``."""
    asc = sorted(weights)

    @lru_cache(maxsize=None)
    def feasible(start: int, need: int) -> bool:
        if need == 0:
            return True
        tried = None
        for j in range(start, len(asc)):
            w = asc[j]
            if w > need:
                return False
            if w == tried:
                continue
            tried = w
            if feasible(j + 1, need - w):
                return True
        return False

    chosen = []
    pos, need = 0, target
    while need:
        tried = None
        for j in range(pos, len(asc)):
            w = asc[j]
            if w == tried:
                continue
            tried = w
            if w <= need and feasible(j + 1, need - w):
                chosen.append(w)
                pos, need = j + 1, need - w
                break
        else:  # pragma: no cover - target came from a feasible packing
            raise AssertionError("target total is not attainable")
    return chosen


def popt(items: Iterable, capacity=CAPACITY, limit: Optional[int] = EXHAUSTIVE_LIMIT) -> Packing:
    """Largest-total sub-multiset of ``items`` fitting into ``capacity``.

    Ties between selections of equal total are broken towards the
    lexicographically smallest ascending-sorted selection.  ``limit`` caps
    the number of items (``None`` disables the cap).
    """
    items = [to_fraction(x) for x in items]
    capacity = to_fraction(capacity)
    if limit is not None and len(items) > limit:
        raise InputTooLarge(f"{len(items)} items exceed the exhaustive limit of {limit}")
    if not items or capacity <= 0:
        return Packing((), Fraction(0))
    weights, cap, scale = _integer_weights(items, capacity)
    best = _best_total(weights, cap)
    chosen = _smallest_selection(weights, best)
    selection = tuple(Fraction(w, scale) for w in chosen)
    return Packing(selection, Fraction(best, scale))


def brute_force_popt(items: Iterable, capacity=CAPACITY) -> Packing:
    """Reference implementation: total of every subset, no pruning.

    Subset sums are built over bitmasks on integer-scaled sizes, so all
    ``2**n`` subsets are visited but each costs one addition.
    """
    items = [to_fraction(x) for x in items]
    if len(items) > BRUTE_FORCE_LIMIT:
        raise InputTooLarge(f"{len(items)} items exceed the brute-force limit of {BRUTE_FORCE_LIMIT}")
    capacity = to_fraction(capacity)
    scale = math.lcm(capacity.denominator, *(x.denominator for x in items))
    weights = [int(x * scale) for x in items]
    cap = capacity * scale
    sums = [0] * (1 << len(weights))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + weights[low.bit_length() - 1]
    best = max(total for total in sums if total <= cap)
    selection = min(
        tuple(sorted(items[i] for i in range(len(items)) if mask >> i & 1))
        for mask, total in enumerate(sums)
        if total == best
    )
    return Packing(selection, Fraction(best, scale))


def opt_gain(instance: Instance) -> Fraction:
    """Offline optimum: pack the best subset, never pay for reservations."""
    return popt(instance.items, limit=None).total
