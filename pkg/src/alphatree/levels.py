"""Level assignment and reconstruction shared by the binary and ternary engines.

Levels are signed: a combination can consume a previously combined leaf with
negative weight, and each such occurrence subtracts its depth.  Reconstruction
turns a level sequence back into the unique forest the rules below allow.
"""

from __future__ import annotations

from typing import Sequence

from .core import (
    AlphaTree,
    CombinationTrace,
    StructureError,
    TraceError,
    TreeBuilder,
    tree_cost,
    validate_weights,
)

MODE_BINARY = "binary"
MODE_MIXED = "ternary-mixed"
MODE_PURE = "pure-ternary"
_MODES = (MODE_BINARY, MODE_MIXED, MODE_PURE)


class InvalidLevelSequence(StructureError):
    """The level sequence admits no reconstruction under the requested mode."""


def signed_levels(trace: CombinationTrace) -> tuple:
    """Per-leaf level implied by a trace (complete or prefix).

    Every occurrence of a leaf among a circle's participants contributes
    sign * depth, where depth is measured with all participants (accordion
    elements included) as direct children of their circle.  Uncombined
    leaves sit at level 0.
    """
    n = trace.n_leaves
    consumer = {}
    for s in trace.steps:
        for p in s.participants:
            if p.ref >= n and p.sign > 0:
                if p.ref in consumer:
                    raise TraceError(f"circle {p.ref} consumed twice")
                consumer[p.ref] = s.circle
    depth = {}
    for s in reversed(trace.steps):
        c = s.circle
        depth[c] = depth[consumer[c]] + 1 if c in consumer else 0
    levels = [0] * n
    for s in trace.steps:
        d = depth[s.circle] + 1
        for p in s.participants:
            if p.ref < n:
                levels[p.ref] += p.sign * d
    return tuple(levels)


def _reconstruct(levels, weights, mode, pair_hints=frozenset()):
    """Single left-to-right pass with a stack; combining the top of the stack
    as soon as a complete group appears is equivalent to repeatedly combining
    the leftmost maximal run at the current maximum level."""
    ws = validate_weights(weights)
    if len(levels) != len(ws):
        raise StructureError("levels and weights differ in length")
    if any(l < 0 for l in levels):
        raise InvalidLevelSequence(f"negative level in {levels}")
    builder = TreeBuilder(ws)
    hints = frozenset(pair_hints)
    stack = []  # (node id, level, leftmost leaf, rightmost leaf)

    def hint_pair_on_top():
        if len(stack) < 2:
            return False
        a, b = stack[-2], stack[-1]
        if a[1] != b[1] or a[1] == 0:
            return False
        if len(stack) >= 3 and stack[-3][1] == a[1]:
            return False  # pair must start its run
        return a[2] == a[3] and b[2] == b[3] and (a[2], b[2]) in hints

    def cascade(lookahead: int):
        while True:
            if mode != MODE_BINARY and hint_pair_on_top():
                b = stack.pop()
                a = stack.pop()
                nid = builder.internal((a[0], b[0]))
                stack.append((nid, a[1] - 1, a[2], b[3]))
                continue
            if mode != MODE_BINARY and len(stack) >= 3:
                c3, c2, c1 = stack[-3], stack[-2], stack[-1]
                if c1[1] == c2[1] == c3[1] and c1[1] > 0:
                    stack.pop(), stack.pop(), stack.pop()
                    nid = builder.internal((c3[0], c2[0], c1[0]))
                    stack.append((nid, c1[1] - 1, c3[2], c1[3]))
                    continue
            if mode != MODE_PURE and len(stack) >= 2:
                b, a = stack[-1], stack[-2]
                if a[1] == b[1] and a[1] > 0:
                    # A run of exactly two may close as a pair only once no
                    # upcoming item can deepen or rejoin it (lookahead < run
                    # level: deeper runs reduce upward and could extend it).
                    run_of_two = len(stack) < 3 or stack[-3][1] != a[1]
                    if mode == MODE_BINARY or (run_of_two and lookahead < a[1]):
                        stack.pop(), stack.pop()
                        nid = builder.internal((a[0], b[0]))
                        stack.append((nid, a[1] - 1, a[2], b[3]))
                        continue
            break

    for i, lvl in enumerate(levels):
        cascade(lvl)
        stack.append((i, lvl, i, i))
    cascade(-1)

    leftovers = [item for item in stack if item[1] != 0]
    if leftovers:
        raise InvalidLevelSequence(
            f"cannot reduce levels {list(levels)} in {mode} mode; "
            f"stuck with {len(leftovers)} node(s) above level 0"
        )
    return builder.finish([item[0] for item in stack])


def reconstruct_from_levels(
    levels: Sequence[int], weights: Sequence[int], mode: str = MODE_MIXED
) -> AlphaTree:
    """Rebuild the forest/tree a level sequence describes.

    Scans runs of maximum-level nodes left to right.  Binary mode combines
    the leftmost adjacent pair; ternary modes combine the leftmost three of
    a run (a run of exactly two becomes a pair only when the mode permits
    binary nodes).  Raises InvalidLevelSequence when this cannot terminate,
    e.g. a singleton run, or a leftover pair in pure-ternary mode.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return _reconstruct(tuple(levels), weights, mode)


def reconstruct_from_trace(trace: CombinationTrace, weights: Sequence[int]) -> AlphaTree:
    """Deterministic replay of a complete trace into the final tree.

    Derives the signed levels, then reconstructs guided by the arities the
    trace recorded (its binary steps pin down where pairs sit).  The result
    is alphabetic and its cost equals the sum of the trace increments.
    """
    ws = validate_weights(weights)
    trace.validate(ws)
    levels = signed_levels(trace)
    arities = {s.arity for s in trace.steps}
    if not trace.steps:
        mode, hints = MODE_BINARY, frozenset()
    elif arities == {2}:
        mode, hints = MODE_BINARY, frozenset()
    elif 2 in {len(s.positive_refs()) for s in trace.steps}:
        mode, hints = MODE_MIXED, frozenset(trace.pair_steps())
    else:
        mode, hints = MODE_PURE, frozenset()
    tree = _reconstruct(levels, ws, mode, hints)
    got = tree_cost(tree, ws)
    want = trace.total()
    if got != want:
        raise TraceError(f"replayed tree costs {got}, trace increments sum to {want}")
    return tree
