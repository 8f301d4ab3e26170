"""Exhaustive ground truth for tiny games.

Everything here enumerates strategies and compares valuations with the
definition-level orderings; it shares no code path with the solver beyond
the data model.
"""

from __future__ import annotations

import functools
import itertools
from typing import Mapping, Sequence

from .core import (P0, P1, GameValuation, NodeValuation, Order, ParityGame,
                   compare_valuations, improvement_arena)

PARITY_CAP = 10**6
GLOBAL_CAP = 10**5


class SearchSpaceTooLarge(RuntimeError):
    pass


def _strategies(g: ParityGame, player: int, choices: Mapping[int, Sequence[int]] | None = None):
    nodes = g.nodes_of(player)
    options = [sorted(choices[v]) if choices is not None else list(g.successors[v]) for v in nodes]
    for combo in itertools.product(*options):
        yield dict(zip(nodes, combo))


def _count(g: ParityGame, player: int) -> int:
    total = 1
    for v in g.nodes_of(player):
        total *= len(g.successors[v])
    return total


def play_valuation(g: ParityGame, succ: Sequence[int], v: int) -> NodeValuation:
    order = []
    pos = {}
    u = v
    while u not in pos:
        pos[u] = len(order)
        order.append(u)
        u = succ[u]
    cycle = order[pos[u]:]
    w = max(cycle, key=lambda x: g.priority[x])
    k = order.index(w)
    return NodeValuation(w, frozenset(x for x in order[:k] if g.priority[x] > g.priority[w]), k)


def _all_valuations(g, sigma, tau):
    succ = [sigma[v] if g.owner[v] == P0 else tau[v] for v in range(len(g))]
    return [play_valuation(g, succ, v) for v in range(len(g))]


def _sort_key(g):
    return functools.cmp_to_key(lambda a, b: int(compare_valuations(g, a, b)))


def brute_force_response(g: ParityGame, sigma: Mapping[int, int]) -> list[NodeValuation]:
    """Nodewise minimal valuation over all player 1 strategies.

    Checks that a single player 1 strategy attains the minimum everywhere.
    """
    key = _sort_key(g)
    best = None
    rows = []
    for tau in _strategies(g, P1):
        vals = _all_valuations(g, sigma, tau)
        rows.append(vals)
        best = vals if best is None else [min(a, b, key=key) for a, b in zip(best, vals)]
    if not any(all(compare_valuations(g, a, b) == Order.EQUAL for a, b in zip(row, best)) for row in rows):
        raise AssertionError("no single counterstrategy attains the nodewise minimum")
    return best


def _exhaustive_winner(g: ParityGame) -> frozenset:
    """Player 0 winning set by enumerating both players' positional strategies."""
    p0 = list(_strategies(g, P0))
    p1 = list(_strategies(g, P1))
    won = set()
    for v in range(len(g)):
        for sigma in p0:
            ok = True
            for tau in p1:
                succ = [sigma[u] if g.owner[u] == P0 else tau[u] for u in range(len(g))]
                if g.priority[play_valuation(g, succ, v).cycle] % 2:
                    ok = False
                    break
            if ok:
                won.add(v)
                break
    return frozenset(won)


def brute_force_parity(g: ParityGame) -> tuple[list[NodeValuation], frozenset, frozenset]:
    """⊴-optimal game valuation and winning sets, by full enumeration."""
    if _count(g, P0) * _count(g, P1) > PARITY_CAP:
        raise SearchSpaceTooLarge("strategy space exceeds the oracle cap")
    key = _sort_key(g)
    responses = [brute_force_response(g, sigma) for sigma in _strategies(g, P0)]
    best = responses[0]
    for vals in responses[1:]:
        best = [max(a, b, key=key) for a, b in zip(best, vals)]
    if not any(all(compare_valuations(g, a, b) == Order.EQUAL for a, b in zip(row, best)) for row in responses):
        raise AssertionError("no single strategy attains the nodewise maximum")
    w0 = _exhaustive_winner(g)
    return best, w0, frozenset(range(len(g))) - w0


def brute_force_global(g: ParityGame, sigma: Mapping[int, int], xi: GameValuation) -> dict[int, int]:
    """Arena strategy with the ⊴-greatest valuation; smallest choices among ties."""
    allowed = improvement_arena(g, sigma, xi).allowed
    total = 1
    for succs in allowed.values():
        total *= len(succs)
    if total > GLOBAL_CAP:
        raise SearchSpaceTooLarge("arena strategy space exceeds the oracle cap")
    key = _sort_key(g)
    candidates = [(cand, brute_force_response(g, cand)) for cand in _strategies(g, P0, allowed)]
    best_vals = candidates[0][1]
    for _, vals in candidates[1:]:
        best_vals = [max(a, b, key=key) for a, b in zip(best_vals, vals)]
    for cand, vals in candidates:
        if all(compare_valuations(g, a, b) == Order.EQUAL for a, b in zip(vals, best_vals)):
            return cand
    raise AssertionError("no arena strategy dominates all others")


def valuations_equal(g: ParityGame, a: Sequence[NodeValuation], b: Sequence[NodeValuation]) -> bool:
    return all(compare_valuations(g, x, y) == Order.EQUAL for x, y in zip(a, b))


def brute_force_switches(g: ParityGame, sigma: Mapping[int, int]) -> set[tuple[int, int]]:
    """Edges whose single switch yields a valuation that is pointwise at least as good and different."""
    base = brute_force_response(g, sigma)
    out = set()
    for v in g.nodes_of(P0):
        for u in g.successors[v]:
            if u == sigma[v]:
                continue
            moved = dict(sigma)
            moved[v] = u
            new = brute_force_response(g, moved)
            if all(compare_valuations(g, a, b) != Order.GREATER for a, b in zip(base, new)) \
                    and not valuations_equal(g, base, new):
                out.add((v, u))
    return out
