import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratiter.core import (P0, P1, GameError, Node, NodeValuation, Order,
                            ParityGame, best_response, compare_node_sets,
                            compare_valuations, evaluate_all, evaluate_play,
                            improvement_arena, improving_switches,
                            is_vacuous_switch, reward, valuation_key)
from stratiter.families import gen_locally, random_games
from stratiter.oracle import brute_force_response, brute_force_switches
from stratiter.policies import optimal_strategy

from gamekit import make_game, random_strategy, seeded_rng


# Games used by several tests.

def lasso():
    """r -> x with x a priority 1 self-loop."""
    return make_game([(P0, 16, [1]), (P1, 1, [1])])


def three_node():
    """x self-loop, w (P0) -> x, v (P1) -> {x, w}; ids x=0, w=1, v=2."""
    return make_game([(P1, 1, [0]), (P0, 4, [0]), (P1, 2, [0, 1])])


# Data model validation.

def test_game_rejects_empty():
    with pytest.raises(GameError):
        ParityGame([])


def test_game_rejects_dead_end():
    with pytest.raises(GameError):
        make_game([(P0, 1, [])])


def test_game_rejects_unknown_successor():
    with pytest.raises(GameError):
        make_game([(P0, 1, [3])])


def test_game_rejects_duplicate_priority():
    with pytest.raises(GameError):
        make_game([(P0, 2, [1]), (P1, 2, [0])])


def test_game_allows_duplicates_when_asked():
    g = make_game([(P0, 2, [1]), (P1, 2, [0])], check_injective=False)
    assert len(g) == 2


def test_game_rejects_sparse_ids():
    with pytest.raises(GameError):
        ParityGame([Node(0, P0, 1, (1,)), Node(2, P1, 2, (0,))])


def test_game_is_immutable():
    g = lasso()
    with pytest.raises(AttributeError):
        g.owner = (1, 1)


def test_game_counts():
    g = three_node()
    assert g.edge_count == 4
    assert g.max_priority == 4
    assert g.nodes_of(P0) == [1]
    assert g.nodes_of(P1) == [0, 2]


# Rewards and orderings.

@pytest.mark.parametrize("prio, expected", [(0, 0), (3, -3), (16, 16)])
def test_reward(prio, expected):
    g = make_game([(P0, prio, [0])])
    assert reward(g, 0) == expected


def test_reward_unknown_node():
    with pytest.raises(GameError):
        reward(lasso(), 5)


def test_node_sets_empty_equal():
    g = make_game([(P0, 1, [0])])
    assert compare_node_sets(g, [], []) == Order.EQUAL


def test_node_sets_odd_top_in_left_is_less():
    # v has priority 3 (odd) and sits in M only.
    g = make_game([(P0, 3, [0]), (P0, 2, [1])])
    assert compare_node_sets(g, {0}, {1}) == Order.LESS


def test_node_sets_even_top_in_left_is_greater():
    g = make_game([(P0, 4, [0]), (P0, 3, [1]), (P0, 2, [2])])
    assert compare_node_sets(g, {0}, {1, 2}) == Order.GREATER


def test_valuations_identical_equal():
    g = make_game([(P0, 3, [0])])
    a = NodeValuation(0, frozenset(), 2)
    assert compare_valuations(g, a, a) == Order.EQUAL


def test_valuations_odd_cycle_prefers_shorter_path_less():
    g = make_game([(P0, 3, [0])])
    assert compare_valuations(g, NodeValuation(0, frozenset(), 2), NodeValuation(0, frozenset(), 3)) == Order.LESS


def test_valuations_even_cycle_prefers_shorter_path():
    g = make_game([(P0, 4, [0])])
    assert compare_valuations(g, NodeValuation(0, frozenset(), 2), NodeValuation(0, frozenset(), 3)) == Order.GREATER


# Plays and valuations.

def test_self_loop_valuation():
    g = make_game([(P1, 1, [0])])
    assert evaluate_play(g, {}, {0: 0}, 0) == NodeValuation(0, frozenset(), 0)


def test_lasso_valuation():
    g = lasso()
    assert evaluate_play(g, {0: 1}, {1: 1}, 0) == NodeValuation(1, frozenset({0}), 1)


def test_path_set_skips_less_relevant_nodes():
    # 0 (prio 2) -> 1 (prio 5, self-loop): node 0 is below the cycle node.
    g = make_game([(P0, 2, [1]), (P1, 5, [1])])
    assert evaluate_play(g, {0: 1}, {1: 1}, 0) == NodeValuation(1, frozenset(), 1)


def test_best_response_without_choices():
    g = lasso()
    tau, xi = best_response(g, {0: 1})
    assert tau == {1: 1}
    assert xi.values == evaluate_all(g, {0: 1}, tau).values


def test_best_response_avoids_even_detour():
    g = three_node()
    tau, xi = best_response(g, {1: 0})
    assert tau[2] == 0
    assert xi[2] == NodeValuation(0, frozenset({2}), 1)
    detour = evaluate_play(g, {1: 0}, {0: 0, 2: 1}, 2)
    assert detour == NodeValuation(0, frozenset({2, 1}), 2)
    assert compare_valuations(g, xi[2], detour) == Order.LESS


def test_best_response_matches_exhaustive_minimum():
    for g, _ in random_games(11, 150, 7, 3):
        rng = seeded_rng(len(g))
        sigma = random_strategy(g, rng)
        _, xi = best_response(g, sigma)
        expected = brute_force_response(g, sigma)
        assert all(compare_valuations(g, a, b) == Order.EQUAL for a, b in zip(xi.values, expected))


def test_best_response_beats_random_counterstrategies():
    rng = seeded_rng(4)
    for g, _ in itertools.islice(random_games(12, 40, 8, 3), 20):
        sigma = random_strategy(g, rng)
        _, xi = best_response(g, sigma)
        for _ in range(200):
            other = evaluate_all(g, sigma, random_strategy(g, rng, P1))
            assert xi.leq_pointwise(other)


# Improvement arena and improving switches.

def test_arena_keeps_current_choice():
    for g, iota in random_games(13, 100, 7, 3):
        _, xi = best_response(g, iota)
        allowed = improvement_arena(g, iota, xi).allowed
        assert all(iota[v] in allowed[v] for v in g.nodes_of(P0))


def test_arena_without_improvement_is_current_plus_ties():
    g = make_game([(P0, 2, [1, 2]), (P1, 1, [1]), (P1, 3, [2])])
    sigma = {0: 1}
    opt = optimal_strategy(g, sigma)
    assert opt == {0: 1}
    _, xi = best_response(g, opt)
    assert improvement_arena(g, opt, xi).allowed == {0: (1,)}


def test_arena_on_family_game_includes_gate_edge():
    g, iota, roles = gen_locally(3)
    _, xi = best_response(g, iota)
    allowed = improvement_arena(g, iota, xi).allowed
    assert roles[("e", 1)] in allowed[roles[("d", 1)]]


def test_optimal_strategy_has_no_switches():
    for g, iota in random_games(14, 100, 7, 3):
        sigma = optimal_strategy(g, iota)
        _, xi = best_response(g, sigma)
        assert improving_switches(g, sigma, xi) == set()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_initial_family_strategy_is_improvable(n):
    g, iota, _ = gen_locally(n)
    _, xi = best_response(g, iota)
    assert improving_switches(g, iota, xi)


def test_switches_match_single_switch_semantics():
    rng = seeded_rng(15)
    for g, _ in random_games(15, 300, 6, 3):
        sigma = random_strategy(g, rng)
        _, xi = best_response(g, sigma)
        assert improving_switches(g, sigma, xi) == brute_force_switches(g, sigma)


def test_vacuous_switch_is_not_improving():
    # Node 0 dominates its cycle 0 -> 0.  Moving to 4 only makes the loop
    # 0 -> 4 -> 1 -> 3 -> 0 through lower priorities, so nothing improves.
    g = make_game([(P0, 5, [0, 1, 4]), (P1, 3, [1, 3]), (P0, 4, [0]),
                   (P1, 2, [0, 3]), (P1, 1, [1, 4])])
    sigma = {0: 0, 2: 0}
    _, xi = best_response(g, sigma)
    assert xi[0].cycle == 0
    assert is_vacuous_switch(xi, 0, 1) and is_vacuous_switch(xi, 0, 4)
    assert xi.less(0, 4)
    assert improving_switches(g, sigma, xi) == set()
    assert brute_force_switches(g, sigma) == set()


# Properties of the orderings.

def priority_games(size):
    return st.permutations(list(range(1, size + 1))).map(
        lambda prios: make_game([(P0, p, [v]) for v, p in enumerate(prios)]))


@st.composite
def game_and_sets(draw):
    size = draw(st.integers(1, 7))
    g = draw(priority_games(size))
    subset = st.frozensets(st.integers(0, size - 1))
    return g, draw(subset), draw(subset), draw(subset)


@st.composite
def game_and_valuations(draw):
    size = draw(st.integers(1, 7))
    g = draw(priority_games(size))
    node = st.integers(0, size - 1)
    val = st.builds(NodeValuation, node, st.frozensets(node), st.integers(0, 8))
    return g, draw(val), draw(val), draw(val)


@given(game_and_sets())
def test_node_set_order_is_total(data):
    g, a, b, c = data
    assert compare_node_sets(g, a, b) == -compare_node_sets(g, b, a)
    assert (compare_node_sets(g, a, b) == Order.EQUAL) == (a == b)
    if compare_node_sets(g, a, b) <= 0 and compare_node_sets(g, b, c) <= 0:
        assert compare_node_sets(g, a, c) <= 0


@given(game_and_valuations())
def test_valuation_order_is_total(data):
    g, a, b, c = data
    assert compare_valuations(g, a, b) == -compare_valuations(g, b, a)
    if compare_valuations(g, a, b) <= 0 and compare_valuations(g, b, c) <= 0:
        assert compare_valuations(g, a, c) <= 0


@given(game_and_valuations())
@settings(max_examples=300)
def test_valuation_key_agrees_with_order(data):
    g, a, b, _ = data
    ka, kb = valuation_key(g, a), valuation_key(g, b)
    expected = Order.LESS if ka < kb else Order.GREATER if ka > kb else Order.EQUAL
    assert compare_valuations(g, a, b) == expected


def test_incremental_keys_match_direct_keys():
    rng = seeded_rng(16)
    for g, _ in random_games(16, 200, 8, 3):
        sigma = random_strategy(g, rng)
        tau = random_strategy(g, rng, P1)
        xi = evaluate_all(g, sigma, tau)
        for v in range(len(g)):
            assert xi[v] == evaluate_play(g, sigma, tau, v)
            assert xi.keys[v] == valuation_key(g, xi[v])
