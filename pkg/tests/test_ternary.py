import random

import pytest
from hypothesis import given, settings, strategies as st

from alphatree.core import Infeasible, is_alphabetic, leaf_levels, tree_cost
from alphatree.levels import signed_levels
from alphatree.oracle import dp_optimal
from alphatree.ternary import (
    EngineState,
    Unit,
    UnitSpec,
    available_negatives,
    detect_pcns,
    enumerate_candidates,
    general_solve,
    is_pair_pcn_free,
    parity_plan,
    pure_ternary_phase1,
    solve_pure_ternary,
)
from tests.conftest import FIFTEEN_WEIGHTS, SEVEN_WEIGHTS


def engine_for(weights, steps=0):
    state = EngineState([Unit(w, i, True, i, i) for i, w in enumerate(weights)])
    for _ in range(steps):
        state.advance()
    return state


def brute_force_pcn_spans(ws):
    """Check every subspan directly against the two-sided inequality."""
    n = len(ws)
    spans = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) == (0, n - 1):
                continue
            total = sum(ws[i : j + 1])
            left_ok = i == 0 or ws[i - 1] > total
            right_ok = j == n - 1 or ws[j + 1] > total
            if left_ok and right_ok:
                spans.append((i, j))
    return sorted(spans)


def flatten_pcns(forest):
    out = []
    for node in forest:
        out.append((node.lo, node.hi))
        out.extend(flatten_pcns(node.children))
    return sorted(out)


class TestDetectPcns:
    def test_light_boundary_pairs(self):
        assert [(p.lo, p.hi) for p in detect_pcns((1, 1, 100, 1, 1))] == [(0, 1), (3, 4)]

    def test_seven_node_has_none(self):
        ws = SEVEN_WEIGHTS
        assert detect_pcns(ws) == ()
        assert brute_force_pcn_spans(ws) == []

    def test_two_heavy_centre(self):
        assert [(p.lo, p.hi) for p in detect_pcns((1, 1, 100, 100, 1, 1))] == [
            (0, 1),
            (4, 5),
        ]

    def test_nested_spans(self):
        forest = detect_pcns((20, 5, 1, 1, 5, 20))
        assert [(p.lo, p.hi) for p in forest] == [(1, 4)]
        assert [(c.lo, c.hi) for c in forest[0].children] == [(2, 3)]

    def test_matches_brute_force_on_random_inputs(self):
        rng = random.Random(3)
        for _ in range(300):
            ws = tuple(rng.randint(0, 12) for _ in range(rng.randint(1, 12)))
            assert flatten_pcns(detect_pcns(ws)) == brute_force_pcn_spans(ws)

    def test_invariant_weight_below_neighbours(self):
        for p in detect_pcns((9, 2, 3, 8, 1, 1, 9)):
            ws = (9, 2, 3, 8, 1, 1, 9)
            assert p.weight == sum(ws[p.lo : p.hi + 1])
            if p.lo > 0:
                assert ws[p.lo - 1] > p.weight
            if p.hi < len(ws) - 1:
                assert ws[p.hi + 1] > p.weight


class TestPcnFreeFilter:
    def test_boundary_pairs_never_block(self):
        assert is_pair_pcn_free((1, 1, 100))
        assert is_pair_pcn_free(SEVEN_WEIGHTS)

    def test_interior_light_pair_blocks(self):
        assert not is_pair_pcn_free((100, 1, 1, 100))


class TestAvailableNegatives:
    def test_seven_node_after_first_combination(self):
        state = engine_for(SEVEN_WEIGHTS, steps=1)
        assert available_negatives(state) == [(3, 10, 7)]

    def test_fifteen_node_after_two(self):
        state = engine_for(FIFTEEN_WEIGHTS, steps=2)
        assert available_negatives(state) == [(5, 10, 15), (9, 10, 16)]

    def test_fifteen_node_after_three(self):
        state = engine_for(FIFTEEN_WEIGHTS, steps=3)
        assert available_negatives(state) == [(3, 6, 17), (7, 11, 17), (11, 6, 17)]

    def test_spent_pairing_not_reissued(self):
        state = engine_for(SEVEN_WEIGHTS, steps=2)
        # the (centre leaf, first circle) pairing was used by step two
        assert (3, 7) in state.spent
        assert all(pos != 3 for pos, _w, _o in available_negatives(state))


class TestEnumerateCandidates:
    def test_seven_node_best_is_accordion(self):
        state = engine_for(SEVEN_WEIGHTS, steps=1)
        best = enumerate_candidates(state)[0]
        assert best.weight == 14
        assert best.accordion_size == 3
        signed = [(p.ref, p.sign) for p in best.participants]
        assert signed == [(0, 1), (1, 1), (3, -1), (5, 1), (6, 1)]

    def test_fifteen_node_best_weights(self):
        state = engine_for(FIFTEEN_WEIGHTS, steps=2)
        best = enumerate_candidates(state)[0]
        assert best.weight == 15
        acc_sum = sum(
            p.sign * FIFTEEN_WEIGHTS[p.ref]
            for p in best.participants
            if p.role == "accordion-element"
        )
        assert acc_sum == 3
        state.advance()
        best = enumerate_candidates(state)[0]
        assert best.weight == 17
        acc_sum = sum(
            p.sign * FIFTEEN_WEIGHTS[p.ref]
            for p in best.participants
            if p.role == "accordion-element"
        )
        assert acc_sum == 7

    def test_chosen_step_is_first_candidate(self):
        rng = random.Random(23)
        for _ in range(60):
            n = rng.choice([3, 5, 7, 9])
            ws = tuple(rng.randint(0, 20) for _ in range(n))
            state = engine_for(ws)
            while not state.done:
                expected = enumerate_candidates(state)[0]
                chosen = state.advance()
                assert chosen.key == expected.key


class TestPureTernaryPhase1:
    def test_seven_node_increments(self, seven_trace):
        trace = pure_ternary_phase1(SEVEN_WEIGHTS)
        assert trace.increments() == (12, 14, 36)
        assert trace == seven_trace

    def test_single_triple(self):
        assert pure_ternary_phase1((1, 2, 3)).increments() == (6,)

    def test_fifteen_node_matches_reference(self, fifteen_trace):
        trace = pure_ternary_phase1(FIFTEEN_WEIGHTS)
        assert trace.increments() == (12, 12, 15, 17, 23, 39, 79)
        assert trace == fifteen_trace

    def test_queue_endgame_structure(self, fifteen_trace):
        # once only circles remain they combine in creation order:
        # (12, 12, 15) then (17, 23, 39)
        queue_steps = fifteen_trace.steps[5:]
        assert {p.ref for p in queue_steps[0].participants} == {15, 16, 17}
        assert {p.ref for p in queue_steps[1].participants} == {18, 19, 20}
        assert [s.weight for s in queue_steps] == [39, 79]

    def test_even_count_rejected(self):
        with pytest.raises(Infeasible):
            pure_ternary_phase1((1, 2))

    def test_single_leaf(self):
        assert pure_ternary_phase1((5,)).increments() == ()

    def test_solve_report_consistency(self):
        report = solve_pure_ternary(SEVEN_WEIGHTS)
        assert report.cost == 62
        assert report.levels == (2, 2, 2, 1, 2, 2, 2)
        assert report.cost == dp_optimal(SEVEN_WEIGHTS, (3,))[0]


class TestParityPlan:
    def _units(self, ws):
        els = []
        pcns = {(p.lo): p for p in detect_pcns(ws)}
        i = 0
        while i < len(ws):
            if i in pcns:
                p = pcns[i]
                els.append(UnitSpec("pcn", p.weight, pcn=p))
                i = p.hi + 1
            else:
                els.append(UnitSpec("square", ws[i], pos=i))
                i += 1
        return els

    def test_odd_count_needs_nothing(self):
        plans = parity_plan(self._units((1, 1, 100, 1, 1)))
        assert [p.kind for p in plans] == ["all-ternary"]

    def test_even_count_splits_pcns_or_pairs(self):
        plans = parity_plan(self._units((1, 1, 100, 100, 1, 1)))
        kinds = [p.kind for p in plans]
        assert kinds[0] == "split-pcn" and plans[0].pcn_index == 0
        assert "binary-pair" in kinds

    def test_plain_even_squares_offer_pairs(self):
        # (2,3,4,5) has no permanent runs, so pairs are the only fixes
        plans = parity_plan(self._units((2, 3, 4, 5)))
        assert [(p.kind, p.pair_index) for p in plans] == [
            ("binary-pair", 0),
            ("binary-pair", 1),
            ("binary-pair", 2),
        ]


class TestGeneralSolve:
    def test_heavy_centre_example(self):
        report = general_solve((1, 1, 100, 1, 1))
        assert report.cost == 108
        assert report.tree.to_nested() == [[1, 1], 100, [1, 1]]
        assert report.cost == dp_optimal((1, 1, 100, 1, 1), (2, 3))[0]

    def test_two_heavy_centre(self):
        report = general_solve((1, 1, 100, 100, 1, 1))
        assert report.cost == 308
        assert report.tree.to_nested() == [[1, 1, 100], 100, [1, 1]]
        assert report.cost == dp_optimal((1, 1, 100, 100, 1, 1), (2, 3))[0]

    def test_triple_light_prefix(self):
        report = general_solve((1, 1, 1, 100, 1, 1))
        assert report.tree.to_nested() == [[1, 1, 1], 100, [1, 1]]
        assert report.cost == dp_optimal((1, 1, 1, 100, 1, 1), (2, 3))[0]

    def test_seven_node(self):
        report = general_solve(SEVEN_WEIGHTS)
        assert report.cost == 62
        assert report.levels == (2, 2, 2, 1, 2, 2, 2)

    def test_monotone_quadruple(self):
        report = general_solve((1, 2, 3, 4))
        assert report.tree.to_nested() == [[1, 2], 3, 4]
        assert report.cost == 13

    def test_trivial_sizes(self):
        assert general_solve((5,)).cost == 0
        assert general_solve((3, 4)).cost == 7
        assert general_solve((3, 4)).tree.to_nested() == [3, 4]

    def test_oracle_comparison_field(self):
        report = general_solve((1, 1, 100, 1, 1), with_oracle=True)
        assert report.oracle_cost == 108
        assert report.oracle_gap == 0

    def test_single_binary_node_for_monotone_even_lengths(self):
        rng = random.Random(31)
        for _ in range(40):
            n = rng.choice([4, 6, 8])
            ws = tuple(sorted(rng.sample(range(1, 500), n)))
            report = general_solve(ws)
            pairs = [nd for nd in report.tree.nodes if len(nd.children) == 2]
            assert len(pairs) == 1
            # the one pair combines the two lightest leaves
            kids = [report.tree.nodes[c].leaf_index for c in pairs[0].children]
            assert kids == [0, 1]

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=40), min_size=1, max_size=9))
    def test_valid_and_never_better_than_oracle(self, ws):
        ws = tuple(ws)
        report = general_solve(ws)
        assert is_alphabetic(report.tree)
        assert tree_cost(report.tree, ws) == report.cost == report.trace.total()
        assert leaf_levels(report.tree) == report.levels == signed_levels(report.trace)
        assert report.cost >= dp_optimal(ws, (2, 3))[0]

    def test_binary_parity_invariant(self):
        rng = random.Random(41)
        for _ in range(80):
            n = rng.randint(1, 12)
            ws = tuple(rng.randint(0, 40) for _ in range(n))
            report = general_solve(ws)
            binary = sum(1 for a in report.tree.arities() if a == 2)
            assert binary % 2 == (n - 1) % 2


class TestStepwiseForest:
    def test_forest_cost_tracks_increment_sum(self):
        # after every combination the realised forest costs exactly the
        # running sum of increments
        rng = random.Random(59)
        for _ in range(40):
            n = rng.choice([3, 5, 7, 9, 11])
            ws = tuple(rng.randint(0, 25) for _ in range(n))
            state = engine_for(ws)
            running = 0
            while not state.done:
                running += state.advance().weight
                forest = state.forest()
                assert sum(nd.weight for nd in forest.nodes if not nd.is_leaf) == running
