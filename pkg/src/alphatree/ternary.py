"""Ternary tree engine.

Builds optimal alphabetic trees whose internal nodes have up to three
children.  A scan finds permanent runs (adjacent leaves whose sum is lighter
than both neighbours); each run becomes a subproblem solved as one subtree or
as a two-root forest, and the solver cost-compares those choices together
with the placement of the single bottom pair an even unit count requires.
The greedy combination phase then merges the cheapest compatible triple each
step, where the middle of a triple may be an accordion: an alternating chain
of live squares and previously combined centre leaves taken negatively.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .core import (
    CombinationStep,
    CombinationTrace,
    Infeasible,
    Participant,
    PLUS_INF,
    ROLE_ACCORDION,
    ROLE_OUTER,
    ROLE_PLAIN,
    SolveReport,
    StructureError,
    TreeBuilder,
    leaf_levels,
    tree_cost,
    validate_weights,
)
from .levels import MODE_PURE, reconstruct_from_levels, signed_levels


class EngineError(RuntimeError):
    """An internal invariant of the combination engine failed."""


# ---------------------------------------------------------------------------
# Permanent circular nodes


@dataclass(frozen=True)
class PcnNode:
    """A run of adjacent leaves lighter than both neighbours; solvable as a
    one-root subtree or a two-root forest."""

    lo: int
    hi: int
    weight: int
    children: tuple

    @property
    def span(self) -> Tuple[int, int]:
        return (self.lo, self.hi)


def detect_pcns(weights: Sequence[int]) -> tuple:
    """Hierarchical forest of all permanent runs (length >= 2, proper
    subspans only).  The sequence ends count as infinitely heavy neighbours,
    so boundary runs qualify; the full sequence itself never does."""
    ws = validate_weights(weights)
    n = len(ws)
    spans = []
    for i in range(n - 1):
        left = ws[i - 1] if i > 0 else PLUS_INF
        total = ws[i]
        for j in range(i + 1, n):
            total += ws[j]
            if (i, j) == (0, n - 1):
                continue
            right = ws[j + 1] if j + 1 < n else PLUS_INF
            if left > total and total < right:
                spans.append((i, j, total))
    spans.sort(key=lambda s: (s[0], -s[1]))
    root = (-1, n, 0, [])
    stack = [root]
    for lo, hi, w in spans:
        while not (stack[-1][0] <= lo and hi <= stack[-1][1]):
            stack.pop()
        node = (lo, hi, w, [])
        stack[-1][3].append(node)
        stack.append(node)

    def freeze(raw):
        lo, hi, w, kids = raw
        return PcnNode(lo, hi, w, tuple(freeze(k) for k in kids))

    return tuple(freeze(k) for k in root[3])


def is_pair_pcn_free(weights: Sequence[int]) -> bool:
    """True when no adjacent pair is lighter than both its neighbours, with
    the sequence ends treated as infinitely light (boundary pairs pass)."""
    ws = validate_weights(weights)
    n = len(ws)
    for i in range(n - 1):
        s = ws[i] + ws[i + 1]
        left = ws[i - 1] if i > 0 else None
        right = ws[i + 2] if i + 2 < n else None
        if left is not None and right is not None and left > s and s < right:
            return False
    return True


# ---------------------------------------------------------------------------
# Engine state


@dataclass(frozen=True)
class Unit:
    """One combinable element of the working sequence: an original leaf, or
    the opaque root of an already-solved subproblem."""

    weight: int
    ref: int  # node id used in the emitted trace
    is_square: bool  # True for original leaves
    leaf_lo: int  # leaf span covered, for accordion bookkeeping
    leaf_hi: int


@dataclass
class _Live:
    ref: int
    weight: int
    lo: int  # unit-coordinate span
    hi: int
    is_square: bool
    pos: Optional[int]  # unit position for squares


@dataclass(frozen=True)
class Candidate:
    """A combinable triple: (left, middle, right) where the middle is either
    a single sequence node or an accordion of alternating signed elements."""

    weight: int
    key: tuple
    participants: tuple  # Participant records in sequence order
    consumed_refs: tuple  # live node refs removed by this combination
    consumed_units: tuple  # unit positions consumed positively
    negatives: tuple  # unit positions used with negative sign
    span: tuple  # unit-coordinate hull (lo, hi)
    accordion_span: Optional[tuple]  # leaf-coordinate interval or None
    accordion_size: int  # 0 for plain triples


class EngineState:
    """Working state of the greedy combination phase over a unit sequence.

    Tracks the live sequence, the trace so far, which (leaf, circle)
    negative pairings are spent, and the most recent circle each unit was
    combined into.
    """

    def __init__(self, units: Sequence[Unit], allocator=None):
        self.units = tuple(units)
        u = len(self.units)
        if u % 2 == 0:
            raise Infeasible(f"exact-ternary combination needs an odd count, got {u}")
        if allocator is None:
            allocator = itertools.count(u).__next__
        self._alloc = allocator
        self.live: List[_Live] = [
            _Live(unit.ref, unit.weight, i, i, unit.is_square, i)
            for i, unit in enumerate(self.units)
        ]
        self.steps: List[CombinationStep] = []
        self._occ: List[tuple] = []  # (circle ref, ((target, sign), ...)) unit coords
        self.spent: Set[tuple] = set()
        self.last_consumer: Dict[int, int] = {}
        self.stats = {"steps": 0, "candidates": 0, "queue_steps": 0}

    # -- derived views ----------------------------------------------------

    @property
    def done(self) -> bool:
        return len(self.live) <= 1

    def live_square_positions(self) -> Set[int]:
        return {nd.pos for nd in self.live if nd.is_square}

    def unit_levels(self) -> tuple:
        """Signed levels of the units under the combinations made so far."""
        u = len(self.units)
        consumer = {}
        for circle, parts in self._occ:
            for target, sign in parts:
                if target >= u and sign > 0:
                    consumer[target] = circle
        depth = {}
        for circle, _parts in reversed(self._occ):
            depth[circle] = depth[consumer[circle]] + 1 if circle in consumer else 0
        levels = [0] * u
        for circle, parts in self._occ:
            d = depth[circle] + 1
            for target, sign in parts:
                if target < u:
                    levels[target] += sign * d
        return tuple(levels)

    def forest(self):
        """The cross-over-free forest the current levels describe."""
        levels = self.unit_levels()
        try:
            return reconstruct_from_levels(
                levels, [un.weight for un in self.units], MODE_PURE
            )
        except StructureError as exc:
            raise EngineError(
                f"cannot realise forest for unit levels {list(levels)}: {exc}"
            ) from exc

    # -- stepping ----------------------------------------------------------

    def advance(self) -> Candidate:
        if self.done:
            raise EngineError("combination already complete")
        if any(nd.pos is not None for nd in self.live):
            cand = self._choose_candidate()
        else:
            cand = self._queue_candidate()
            self.stats["queue_steps"] += 1
        self._apply(cand)
        self.stats["steps"] += 1
        return cand

    def run(self) -> None:
        while not self.done:
            self.advance()

    def trace_steps(self) -> tuple:
        return tuple(self.steps)

    # -- queue endgame -----------------------------------------------------

    def _queue_candidate(self) -> Candidate:
        """Only circles remain: combine the three oldest, in creation order."""
        oldest = sorted(self.live, key=lambda nd: nd.ref)[:3]
        trio = sorted(oldest, key=lambda nd: (nd.lo, nd.hi))
        w = sum(nd.weight for nd in trio)
        self.stats["candidates"] += 1
        return Candidate(
            weight=w,
            key=(w, trio[0].lo, 0, trio[-1].hi, trio[1].lo),
            participants=tuple(Participant(nd.ref, 1, ROLE_PLAIN) for nd in trio),
            consumed_refs=tuple(nd.ref for nd in trio),
            consumed_units=tuple(nd.pos for nd in trio if nd.pos is not None),
            negatives=(),
            span=(trio[0].lo, trio[-1].hi),
            accordion_span=None,
            accordion_size=0,
        )

    # -- candidate search ---------------------------------------------------

    def _choose_candidate(self) -> Candidate:
        best_w = self._fast_min_weight()
        cands = self._candidates_at(best_w)
        if not cands:
            raise EngineError("no candidate found at the computed minimum weight")
        return min(cands, key=lambda c: c.key)

    def _window_arrays(self):
        """Units (leaves and opaque subproblem roots) block compatibility;
        only combination circles are transparent."""
        live = self.live
        m = len(live)
        blk_after = [m] * m
        nxt = m
        for i in range(m - 1, -1, -1):
            blk_after[i] = nxt
            if live[i].pos is not None:
                nxt = i
        # min weight over [i .. first blocker at or after i], capped at the end
        min_to_blk = [0] * m
        for i in range(m - 1, -1, -1):
            w = live[i].weight
            if live[i].pos is not None or i == m - 1:
                min_to_blk[i] = w
            else:
                min_to_blk[i] = w if w < min_to_blk[i + 1] else min_to_blk[i + 1]
        return blk_after, min_to_blk

    def _merged_elements(self):
        """Live squares (sign +1), available negatives (sign -1), and live
        opaque units (sign 0, pure blockers), by unit position."""
        elems = [
            (nd.pos, nd.weight, 1 if nd.is_square else 0, nd.ref)
            for nd in self.live
            if nd.pos is not None
        ]
        for pos, w, _owner in available_negatives(self):
            elems.append((pos, w, -1, self.units[pos].ref))
        elems.sort()
        return elems

    def _accordion_slices(self, elems):
        """Yield (a, b, slice_weight) for every alternation-respecting slice
        that starts and ends on a positive element, length >= 2.  Blockers
        (sign 0) and equal adjacent signs bound the usable segments."""
        p = len(elems)
        out = []
        seg_start = 0
        for e in range(p + 1):
            boundary = e == p or elems[e][2] == 0 or (
                e > 0 and (elems[e][2] == elems[e - 1][2] or elems[e - 1][2] == 0)
            )
            if not boundary:
                continue
            seg = range(seg_start, e)
            for a in seg:
                if elems[a][2] != 1:
                    continue
                acc = elems[a][1]
                b = a + 1
                while b < e:
                    acc += elems[b][2] * elems[b][1]
                    if elems[b][2] > 0:
                        out.append((a, b, acc))
                    b += 1
            seg_start = e
        return out

    def _gap_buckets(self, elems):
        """Bucket live nodes by the inter-element gap their span touches.

        left_bucket[a]: nodes usable as the left outer of a slice starting at
        element a (span ends before position a, at or after position a-1).
        right_bucket[b]: mirror image for slices ending at element b.
        """
        positions = [p for p, _w, _s, _r in elems]
        p = len(positions)
        left_bucket = [[] for _ in range(p)]
        right_bucket = [[] for _ in range(p)]
        blocker_pos = {pos for pos, _w, s, _r in elems if s >= 0}
        for nd in self.live:
            a = bisect_right(positions, nd.hi)
            if a < p:
                # a circle ending exactly on a live unit's position may not
                # skip over it
                blocked = (
                    nd.pos is None
                    and a > 0
                    and positions[a - 1] == nd.hi
                    and positions[a - 1] in blocker_pos
                )
                if not blocked:
                    left_bucket[a].append(nd)
            b = bisect_left(positions, nd.lo) - 1
            if b >= 0:
                blocked = (
                    nd.pos is None
                    and b + 1 < p
                    and positions[b + 1] == nd.lo
                    and positions[b + 1] in blocker_pos
                )
                if not blocked:
                    right_bucket[b].append(nd)
        return left_bucket, right_bucket

    def _fast_min_weight(self) -> int:
        live = self.live
        m = len(live)
        blk_after, min_to_blk = self._window_arrays()
        best = None
        scanned = 0
        for i in range(m - 2):
            wi = live[i].weight
            e_i = min(blk_after[i], m - 1)
            for j in range(i + 1, e_i + 1):
                if j + 1 > min(blk_after[j], m - 1):
                    continue
                scanned += 1
                w = wi + live[j].weight + min_to_blk[j + 1]
                if best is None or w < best:
                    best = w
        elems = self._merged_elements()
        slices = self._accordion_slices(elems)
        if slices:
            left_bucket, right_bucket = self._gap_buckets(elems)
            lmin = [min((nd.weight for nd in bucket), default=None) for bucket in left_bucket]
            rmin = [min((nd.weight for nd in bucket), default=None) for bucket in right_bucket]
            for a, b, acc in slices:
                scanned += 1
                if lmin[a] is None or rmin[b] is None:
                    continue
                w = lmin[a] + acc + rmin[b]
                if best is None or w < best:
                    best = w
        self.stats["candidates"] += scanned
        if best is None:
            raise EngineError("no compatible triple available")
        return best

    def _candidates_at(self, target: Optional[int]) -> List[Candidate]:
        """All candidates, restricted to total weight == target when given.

        With a target (always the global minimum), a window can only match
        through its minimum-weight third member, so whole windows are skipped
        in O(1); the unrestricted form is quadratic-ish and meant for small
        states."""
        live = self.live
        m = len(live)
        blk_after, min_to_blk = self._window_arrays()
        out = []
        for i in range(m - 2):
            wi = live[i].weight
            e_i = min(blk_after[i], m - 1)
            for j in range(i + 1, e_i + 1):
                wj = live[j].weight
                e_j = min(blk_after[j], m - 1)
                if j + 1 > e_j:
                    continue
                if target is not None and wi + wj + min_to_blk[j + 1] != target:
                    continue
                need = None if target is None else min_to_blk[j + 1]
                for k in range(j + 1, e_j + 1):
                    if need is not None and live[k].weight != need:
                        continue
                    w = wi + wj + live[k].weight
                    out.append(self._plain_candidate(live[i], live[j], live[k], w))
        elems = self._merged_elements()
        slices = self._accordion_slices(elems)
        if slices:
            left_bucket, right_bucket = self._gap_buckets(elems)
            lmin = [min((nd.weight for nd in b), default=None) for b in left_bucket]
            rmin = [min((nd.weight for nd in b), default=None) for b in right_bucket]
            for a, b, acc in slices:
                if lmin[a] is None or rmin[b] is None:
                    continue
                if target is not None and lmin[a] + acc + rmin[b] != target:
                    continue
                for left in left_bucket[a]:
                    if target is not None and left.weight != lmin[a]:
                        continue
                    for right in right_bucket[b]:
                        w = left.weight + acc + right.weight
                        if target is None or w == target:
                            out.append(
                                self._accordion_candidate(left, right, elems[a : b + 1], w)
                            )
        return out

    def _plain_candidate(self, a: _Live, b: _Live, c: _Live, w: int) -> Candidate:
        return Candidate(
            weight=w,
            key=(w, a.lo, 1, c.hi, b.lo),
            participants=(
                Participant(a.ref, 1, ROLE_PLAIN),
                Participant(b.ref, 1, ROLE_PLAIN),
                Participant(c.ref, 1, ROLE_PLAIN),
            ),
            consumed_refs=(a.ref, b.ref, c.ref),
            consumed_units=tuple(nd.pos for nd in (a, b, c) if nd.pos is not None),
            negatives=(),
            span=(a.lo, c.hi),
            accordion_span=None,
            accordion_size=0,
        )

    def _accordion_candidate(self, left: _Live, right: _Live, elems, w: int) -> Candidate:
        parts = [Participant(left.ref, 1, ROLE_OUTER)]
        consumed_units = [left.pos] if left.pos is not None else []
        consumed_refs = [left.ref]
        negatives = []
        for pos, _ew, sign, ref in elems:
            parts.append(Participant(ref, sign, ROLE_ACCORDION))
            if sign > 0:
                consumed_units.append(pos)
                consumed_refs.append(ref)
            else:
                negatives.append(pos)
        parts.append(Participant(right.ref, 1, ROLE_OUTER))
        consumed_refs.append(right.ref)
        if right.pos is not None:
            consumed_units.append(right.pos)
        first, last = elems[0][0], elems[-1][0]
        return Candidate(
            weight=w,
            key=(w, left.lo, len(elems), right.hi, first),
            participants=tuple(parts),
            consumed_refs=tuple(consumed_refs),
            consumed_units=tuple(consumed_units),
            negatives=tuple(negatives),
            span=(left.lo, right.hi),
            accordion_span=(self.units[first].leaf_lo, self.units[last].leaf_hi),
            accordion_size=len(elems),
        )

    # -- applying a step -----------------------------------------------------

    def _apply(self, cand: Candidate) -> None:
        circle = self._alloc()
        self.steps.append(
            CombinationStep(
                circle=circle,
                weight=cand.weight,
                participants=cand.participants,
                accordion_span=cand.accordion_span,
            )
        )
        occ = []
        ref_to_target = {self.units[i].ref: i for i in range(len(self.units))}
        for p in cand.participants:
            target = ref_to_target.get(p.ref, p.ref)
            occ.append((target, p.sign))
        self._occ.append((circle, tuple(occ)))
        for pos in cand.negatives:
            owner = self.last_consumer.get(pos)
            if owner is None or (pos, owner) in self.spent:
                raise EngineError(f"negative use of unit {pos} without a fresh pairing")
            self.spent.add((pos, owner))
        for pos in cand.consumed_units:
            self.last_consumer[pos] = circle
        consumed = set(cand.consumed_refs)
        kept = [nd for nd in self.live if nd.ref not in consumed]
        kept.append(
            _Live(circle, cand.weight, cand.span[0], cand.span[1], False, None)
        )
        for pos in cand.negatives:
            unit = self.units[pos]
            kept.append(_Live(unit.ref, unit.weight, pos, pos, True, pos))
        kept.sort(key=lambda nd: (nd.lo, nd.hi))
        self.live = kept


def available_negatives(state: EngineState):
    """Units currently usable with negative weight: original leaves sitting
    as the centre child of a top-level triple of the realised forest, whose
    (leaf, owning circle) pairing has not been spent."""
    if not state.steps:
        return []
    forest = state.forest()
    live_squares = state.live_square_positions()
    out = []
    for r in forest.roots:
        nd = forest.nodes[r]
        if len(nd.children) != 3:
            continue
        mid = forest.nodes[nd.children[1]]
        if not mid.is_leaf:
            continue
        pos = mid.leaf_index
        if not state.units[pos].is_square or pos in live_squares:
            continue
        owner = state.last_consumer.get(pos)
        if owner is None or (pos, owner) in state.spent:
            continue
        out.append((pos, state.units[pos].weight, owner))
    out.sort()
    return out


def enumerate_candidates(state: EngineState) -> List[Candidate]:
    """Every legal combination available right now, best first."""
    if state.done:
        return []
    if not any(nd.pos is not None for nd in state.live):
        return [state._queue_candidate()]
    return sorted(state._candidates_at(None), key=lambda c: c.key)


# ---------------------------------------------------------------------------
# Entry points over raw leaves


def pure_ternary_phase1(weights: Sequence[int]) -> CombinationTrace:
    """Greedy exact-ternary combination over a sequence of leaves (odd count).

    Each step merges the minimum-weight candidate (ties: leftmost span start,
    then smallest accordion); once only circles remain they are combined
    three at a time in creation order.
    """
    ws = validate_weights(weights)
    state = EngineState([Unit(w, i, True, i, i) for i, w in enumerate(ws)])
    state.run()
    return CombinationTrace(len(ws), state.trace_steps())


def solve_pure_ternary(weights: Sequence[int]) -> SolveReport:
    ws = validate_weights(weights)
    trace = pure_ternary_phase1(ws)
    levels = signed_levels(trace)
    tree = reconstruct_from_levels(levels, ws, MODE_PURE)
    cost = tree_cost(tree, ws)
    if cost != trace.total():
        raise EngineError(
            f"tree cost {cost} disagrees with combination increments {trace.total()}"
        )
    return SolveReport(
        algorithm="pure-ternary",
        weights=ws,
        cost=cost,
        levels=levels,
        tree=tree,
        trace=trace,
    )


# ---------------------------------------------------------------------------
# Parity planning


@dataclass(frozen=True)
class UnitSpec:
    kind: str  # "square" | "pcn"
    weight: int
    pos: Optional[int] = None  # leaf index, squares only
    pcn: Optional[PcnNode] = None


@dataclass(frozen=True)
class Plan:
    kind: str  # "all-ternary" | "split-pcn" | "binary-pair"
    pcn_index: Optional[int] = None
    split_at: Optional[int] = None  # leaf index ending the left part
    pair_index: Optional[int] = None  # element index of the left square


def parity_plan(units: Sequence[UnitSpec]) -> tuple:
    """Deficit-fixing actions for a unit sequence.

    An odd count needs none.  An even count needs exactly one of: resolve
    one permanent run as a two-root forest (every split point is a distinct
    action), or combine one adjacent square pair first.  Every adjacent
    square pair is a separate action; the one binary node of an optimal tree
    is usually, but not always, a minimum-weight adjacent pair, so the
    cheaper completion decides.
    """
    units = tuple(units)
    if len(units) % 2 == 1:
        return (Plan("all-ternary"),)
    plans = []
    for idx, u in enumerate(units):
        if u.kind == "pcn":
            for split in range(u.pcn.lo, u.pcn.hi):
                plans.append(Plan("split-pcn", pcn_index=idx, split_at=split))
    plans.extend(
        Plan("binary-pair", pair_index=i)
        for i in range(len(units) - 1)
        if units[i].kind == "square" and units[i + 1].kind == "square"
    )
    if not plans:
        raise EngineError("even unit count with no feasible parity action")
    return tuple(plans)


# ---------------------------------------------------------------------------
# General solver


@dataclass(frozen=True)
class _Sol:
    cost: int  # internal cost of the subtree
    weight: int  # total leaf weight
    steps: tuple  # CombinationStep records, creation order
    shape: object  # nested tuple of leaf indexes
    ref: int  # node id of the subtree root


class _GeneralSolver:
    def __init__(self, weights):
        self.w = weights
        self._next = itertools.count(len(weights))
        self._memo: Dict[tuple, _Sol] = {}

    def _alloc(self) -> int:
        return next(self._next)

    def solve_tree(self, lo: int, hi: int) -> _Sol:
        key = (lo, hi)
        if key in self._memo:
            return self._memo[key]
        if lo == hi:
            sol = _Sol(0, self.w[lo], (), lo, lo)
        else:
            sol = self._solve_span(lo, hi)
        self._memo[key] = sol
        return sol

    def _elements(self, lo: int, hi: int):
        pcns = detect_pcns(self.w[lo : hi + 1])
        elements = []
        i = lo
        by_start = {p.lo + lo: p for p in pcns}
        while i <= hi:
            if i in by_start:
                p = by_start[i]
                shifted = _shift_pcn(p, lo)
                elements.append(UnitSpec("pcn", shifted.weight, pcn=shifted))
                i = shifted.hi + 1
            else:
                elements.append(UnitSpec("square", self.w[i], pos=i))
                i += 1
        return elements

    # Above this many single-vs-two-root choice vectors, fall back to the
    # one-action enumeration (all single-root, or exactly one fix).
    VECTOR_CAP = 512

    def _solve_span(self, lo: int, hi: int) -> _Sol:
        elements = self._elements(lo, hi)
        best = None
        for expanded, pair_index in self._plans(elements):
            sol = self._run_plan(expanded, pair_index)
            if best is None or sol.cost < best.cost:
                best = sol
        return best

    def _plans(self, elements):
        """Unit sequences to try: every combination of single-root vs split
        for the permanent runs (parity never forces one choice: either can
        win on cost), plus one adjacent-square pair when the count is even.
        Ordered by split count then position, so ties resolve leftmost."""
        pcn_idxs = [i for i, el in enumerate(elements) if el.kind == "pcn"]
        option_lists = []
        for i in pcn_idxs:
            pcn = elements[i].pcn
            option_lists.append([None] + list(range(pcn.lo, pcn.hi)))
        total = 1
        for opts in option_lists:
            total *= len(opts)
            if total > self.VECTOR_CAP:
                break
        if total > self.VECTOR_CAP:
            vectors = [dict()]
            vectors.extend(
                {pcn_idxs[k]: s}
                for k, opts in enumerate(option_lists)
                for s in opts[1:]
            )
        else:
            vectors = []
            for combo in itertools.product(*option_lists):
                vectors.append(
                    {pcn_idxs[k]: s for k, s in enumerate(combo) if s is not None}
                )
            vectors.sort(key=lambda v: (len(v), sorted(v.items())))
        plans = []
        for vec in vectors:
            expanded = []
            for i, el in enumerate(elements):
                if el.kind == "square":
                    expanded.append(("sq", el.pos, el.pos))
                elif i in vec:
                    expanded.append(("sub", el.pcn.lo, vec[i]))
                    expanded.append(("sub", vec[i] + 1, el.pcn.hi))
                else:
                    expanded.append(("sub", el.pcn.lo, el.pcn.hi))
            if len(expanded) % 2 == 1:
                plans.append((expanded, None))
            else:
                for j in range(len(expanded) - 1):
                    if expanded[j][0] == "sq" and expanded[j + 1][0] == "sq":
                        plans.append((expanded, j))
        if not plans:
            raise EngineError("no feasible unit sequence for this span")
        return plans

    def _plan_units(self, expanded, pair_index):
        """Materialise a unit sequence: (units-with-shapes, extra steps,
        extra internal cost).  ``expanded`` entries are ("sq", pos, pos) or
        ("sub", lo, hi); ``pair_index`` names the left square of the one
        binary combination, done first."""
        units = []
        own_steps = []
        own_cost = 0
        idx = 0
        while idx < len(expanded):
            kind, lo, hi = expanded[idx]
            if pair_index is not None and idx == pair_index:
                a, b = lo, expanded[idx + 1][1]
                circle = self._alloc()
                w = self.w[a] + self.w[b]
                own_steps.append(
                    CombinationStep(
                        circle=circle,
                        weight=w,
                        participants=(
                            Participant(a, 1, ROLE_PLAIN),
                            Participant(b, 1, ROLE_PLAIN),
                        ),
                    )
                )
                own_cost += w
                units.append((Unit(w, circle, False, a, b), (a, b)))
                idx += 2
                continue
            if kind == "sq":
                units.append((Unit(self.w[lo], lo, True, lo, lo), lo))
            else:
                sub = self.solve_tree(lo, hi)
                own_steps.extend(sub.steps)
                own_cost += sub.cost
                is_sq = isinstance(sub.shape, int)
                units.append((Unit(sub.weight, sub.ref, is_sq, lo, hi), sub.shape))
            idx += 1
        return units, own_steps, own_cost

    def _run_plan(self, expanded, pair_index) -> _Sol:
        units, own_steps, own_cost = self._plan_units(expanded, pair_index)
        unit_objs = [u for u, _shape in units]
        shapes = {i: shape for i, (_u, shape) in enumerate(units)}
        if len(unit_objs) == 1:
            unit = unit_objs[0]
            return _Sol(own_cost, unit.weight, tuple(own_steps), shapes[0], unit.ref)
        state = EngineState(unit_objs, allocator=self._alloc)
        state.run()
        levels = state.unit_levels()
        unit_tree = reconstruct_from_levels(
            levels, [u.weight for u in unit_objs], MODE_PURE
        )

        def expand(nid):
            nd = unit_tree.nodes[nid]
            if nd.is_leaf:
                return shapes[nd.leaf_index]
            return tuple(expand(c) for c in nd.children)

        shape = expand(unit_tree.root)
        steps = tuple(own_steps) + state.trace_steps()
        cost = own_cost + sum(s.weight for s in state.trace_steps())
        root_ref = state.live[0].ref
        weight = sum(u.weight for u in unit_objs)
        return _Sol(cost, weight, steps, shape, root_ref)

    def solve(self) -> tuple:
        n = len(self.w)
        sol = self.solve_tree(0, n - 1)
        remap = {}
        steps = []
        for k, s in enumerate(sol.steps):
            remap[s.circle] = n + k
            steps.append(
                CombinationStep(
                    circle=n + k,
                    weight=s.weight,
                    participants=tuple(
                        Participant(remap.get(p.ref, p.ref), p.sign, p.role)
                        for p in s.participants
                    ),
                    accordion_span=s.accordion_span,
                )
            )
        trace = CombinationTrace(n, tuple(steps))
        tree = _tree_from_shape(sol.shape, self.w)
        return sol, trace, tree


def _shift_pcn(node: PcnNode, off: int) -> PcnNode:
    return PcnNode(
        node.lo + off,
        node.hi + off,
        node.weight,
        tuple(_shift_pcn(c, off) for c in node.children),
    )


def _tree_from_shape(shape, weights):
    builder = TreeBuilder(weights)

    def rec(node):
        if isinstance(node, int):
            return node
        return builder.internal([rec(c) for c in node])

    return builder.finish([rec(shape)])


def general_solve(weights: Sequence[int], with_oracle: bool = False) -> SolveReport:
    """Optimal-tree search for arbitrary inputs: resolve permanent runs as
    one- or two-root subproblems, fix parity with a single binary pair when
    needed, then run the greedy ternary combination over the units; the
    cheapest completion wins.  ``with_oracle`` additionally runs the interval
    DP and records its cost in the report."""
    ws = validate_weights(weights)
    solver = _GeneralSolver(ws)
    sol, trace, tree = solver.solve()
    trace.validate(ws)
    cost = tree_cost(tree, ws)
    levels = leaf_levels(tree)
    if cost != sol.cost or cost != trace.total():
        raise EngineError(
            f"cost mismatch: tree {cost}, plan {sol.cost}, increments {trace.total()}"
        )
    if signed_levels(trace) != levels:
        raise EngineError("trace levels disagree with the assembled tree")
    oracle_cost = None
    if with_oracle:
        from .oracle import dp_optimal

        oracle_cost, _ = dp_optimal(ws, (2, 3))
    return SolveReport(
        algorithm="ternary",
        weights=ws,
        cost=cost,
        levels=levels,
        tree=tree,
        trace=trace,
        oracle_cost=oracle_cost,
    )
