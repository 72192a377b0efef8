"""Independent ground-truth optima.

``dp_optimal`` is an interval dynamic program over the allowed arities;
``exhaustive_optimal`` literally enumerates every tree shape (as leaf-level
vectors) for tiny inputs and is used to check the DP itself.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .core import (
    AlphaTree,
    Infeasible,
    PLUS_INF,
    TreeBuilder,
    validate_weights,
)

EXHAUSTIVE_MAX_N = 11


class RefusedSize(ValueError):
    """Input too large for literal enumeration."""


def _arity_set(arities) -> frozenset:
    s = frozenset(arities)
    if not s or not s <= {2, 3}:
        raise ValueError(f"arity set must be a nonempty subset of {{2, 3}}, got {set(arities)}")
    return s


def dp_optimal(weights: Sequence[int], arities=(2, 3)) -> Tuple[int, AlphaTree]:
    """Minimum weighted path length and one optimal tree.

    ``arities`` selects the allowed internal arities: {2} binary, {2, 3}
    mixed, {3} exact-ternary (odd leaf counts only).  Ties are broken toward
    the leftmost split points, binary splits first, so the returned tree is
    deterministic; the cost never depends on that choice.
    """
    ws = validate_weights(weights)
    allowed = _arity_set(arities)
    pure = allowed == {3}
    n = len(ws)
    if pure and n % 2 == 0:
        raise Infeasible("exact-ternary trees need an odd number of leaves")
    prefix = [0]
    for w in ws:
        prefix.append(prefix[-1] + w)

    cost = [[0] * n for _ in range(n)]
    choice = [[None] * n for _ in range(n)]
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            j = i + length - 1
            best = PLUS_INF
            pick = None
            if 2 in allowed:
                for m in range(i, j):
                    c = cost[i][m] + cost[m + 1][j]
                    if c < best:
                        best, pick = c, (m,)
            if 3 in allowed and length >= 3:
                for m1 in range(i, j - 1):
                    if pure and (m1 - i) % 2 == 1:
                        continue
                    left = cost[i][m1]
                    for m2 in range(m1 + 1, j):
                        if pure and (m2 - m1) % 2 == 0:
                            continue
                        c = left + cost[m1 + 1][m2] + cost[m2 + 1][j]
                        if c < best:
                            best, pick = c, (m1, m2)
            if pick is None:
                cost[i][j] = PLUS_INF
                continue
            cost[i][j] = best + (prefix[j + 1] - prefix[i])
            choice[i][j] = pick

    if not isinstance(cost[0][n - 1], int):
        raise Infeasible("no tree satisfies the arity constraints")

    builder = TreeBuilder(ws)

    def build(i, j):
        if i == j:
            return i
        pick = choice[i][j]
        if len(pick) == 1:
            (m,) = pick
            return builder.internal((build(i, m), build(m + 1, j)))
        m1, m2 = pick
        return builder.internal((build(i, m1), build(m1 + 1, m2), build(m2 + 1, j)))

    root = build(0, n - 1)
    return cost[0][n - 1], builder.finish([root])


@lru_cache(maxsize=None)
def _level_vectors(n: int, allowed: frozenset) -> tuple:
    """Leaf-level vectors of every ordered tree shape with the given arities.
    One entry per distinct shape; duplicates of equal vectors are kept."""
    if n == 1:
        return ((0,),)
    out = []
    for arity in sorted(allowed):
        if arity > n:
            continue
        for split in _compositions(n, arity):
            parts = [_level_vectors(k, allowed) for k in split]
            _cross(parts, 0, [], out)
    return tuple(out)


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _cross(parts, idx, acc, out):
    if idx == len(parts):
        out.append(tuple(l + 1 for vec in acc for l in vec))
        return
    for vec in parts[idx]:
        acc.append(vec)
        _cross(parts, idx + 1, acc, out)
        acc.pop()


def exhaustive_optimal(weights: Sequence[int], arities=(2, 3)) -> Tuple[int, int]:
    """Brute force over every tree shape: (minimum cost, number of optimal
    shapes).  Refuses n above EXHAUSTIVE_MAX_N."""
    ws = validate_weights(weights)
    allowed = _arity_set(arities)
    n = len(ws)
    if n > EXHAUSTIVE_MAX_N:
        raise RefusedSize(f"{n} leaves is past the enumeration limit {EXHAUSTIVE_MAX_N}")
    vectors = _level_vectors(n, allowed)
    if not vectors:
        raise Infeasible("no tree shape satisfies the arity constraints")
    if max(ws) * n * n < (1 << 62):  # cost fits int64
        mat = np.array(vectors, dtype=np.int64)
        costs = mat @ np.array(ws, dtype=np.int64)
        best = int(costs.min())
        count = int((costs == best).sum())
        return best, count
    best = None
    count = 0
    for vec in vectors:
        c = sum(w * l for w, l in zip(ws, vec))
        if best is None or c < best:
            best, count = c, 1
        elif c == best:
            count += 1
    return best, count
