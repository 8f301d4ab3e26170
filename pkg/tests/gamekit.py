"""Small builders shared by the test modules."""

import random

from stratiter.core import P0, Node, ParityGame


def make_game(rows, check_injective=True):
    """Build a game from ``(owner, priority, successors)`` rows; ids are row positions."""
    return ParityGame([Node(v, o, p, tuple(s)) for v, (o, p, s) in enumerate(rows)],
                      check_injective=check_injective)


def smallest_strategy(g):
    return {v: min(g.successors[v]) for v in g.nodes_of(P0)}


def random_strategy(g, rng, player=P0):
    return {v: rng.choice(g.successors[v]) for v in g.nodes_of(player)}


def seeded_rng(seed):
    return random.Random(seed)


def p0_strategy_count(g):
    total = 1
    for v in g.nodes_of(P0):
        total *= len(g.successors[v])
    return total
