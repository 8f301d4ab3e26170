"""Parity game data model, valuation orderings and optimal counterstrategies.

A node valuation summarises the unique play from a node under two fixed
positional strategies as ``(cycle, path, length)``: the most relevant node on
the cycle the play ends in, the nodes on the way there that are more relevant
than that cycle node, and the number of steps before the cycle node is first
reached.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

P0 = 0
P1 = 1


class GameError(ValueError):
    """Raised for malformed games or strategies."""


class Order(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _order(a, b) -> Order:
    if a < b:
        return Order.LESS
    if a > b:
        return Order.GREATER
    return Order.EQUAL


@dataclass(frozen=True)
class Node:
    id: int
    owner: int
    priority: int
    successors: tuple[int, ...]
    label: str | None = None


class ParityGame:
    """Finite arena with an owner partition and an injective priority map.

    Node ids are dense and zero based.  Instances are immutable once built.
    """

    __slots__ = ("nodes", "owner", "priority", "successors", "labels",
                 "rank", "_by_priority")

    def __init__(self, nodes: Iterable[Node], *, check_injective: bool = True):
        nodes = tuple(nodes)
        if not nodes:
            raise GameError("game has no nodes")
        for i, nd in enumerate(nodes):
            if nd.id != i:
                raise GameError(f"node ids must be dense 0..{len(nodes) - 1}; got {nd.id} at {i}")
            if nd.owner not in (P0, P1):
                raise GameError(f"node {i}: owner must be 0 or 1")
            if nd.priority < 0:
                raise GameError(f"node {i}: negative priority")
            if not nd.successors:
                raise GameError(f"node {i} has no successors")
            for u in nd.successors:
                if not 0 <= u < len(nodes):
                    raise GameError(f"node {i}: unknown successor {u}")
            if len(set(nd.successors)) != len(nd.successors):
                raise GameError(f"node {i}: duplicate successor")
        prios = [nd.priority for nd in nodes]
        if check_injective and len(set(prios)) != len(prios):
            raise GameError("priority function is not injective")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "owner", tuple(nd.owner for nd in nodes))
        object.__setattr__(self, "priority", tuple(prios))
        object.__setattr__(self, "successors", tuple(nd.successors for nd in nodes))
        object.__setattr__(self, "labels", tuple(nd.label for nd in nodes))
        by_prio = sorted(range(len(nodes)), key=lambda v: prios[v])
        rank = [0] * len(nodes)
        for r, v in enumerate(by_prio):
            rank[v] = r
        object.__setattr__(self, "rank", tuple(rank))
        object.__setattr__(self, "_by_priority", tuple(by_prio))

    def __setattr__(self, name, value):
        raise AttributeError("ParityGame is immutable")

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParityGame) and self.nodes == other.nodes

    def __hash__(self) -> int:
        return hash(self.nodes)

    def __repr__(self) -> str:
        return f"ParityGame(|V|={len(self)}, |E|={self.edge_count})"

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.successors)

    @property
    def max_priority(self) -> int:
        return max(self.priority)

    def nodes_of(self, player: int) -> list[int]:
        return [v for v, o in enumerate(self.owner) if o == player]

    def restrict(self, allowed: Mapping[int, Sequence[int]]) -> "ParityGame":
        """Copy of the game with the successor lists of some nodes replaced."""
        return ParityGame(
            Node(nd.id, nd.owner, nd.priority,
                 tuple(allowed[nd.id]) if nd.id in allowed else nd.successors, nd.label)
            for nd in self.nodes
        )


def reward(g: ParityGame, v: int) -> int:
    if not 0 <= v < len(g):
        raise GameError(f"unknown node {v}")
    p = g.priority[v]
    return p if p % 2 == 0 else -p


def is_even(g: ParityGame, v: int) -> bool:
    return g.priority[v] % 2 == 0


def compare_node_sets(g: ParityGame, m: Iterable[int], n: Iterable[int]) -> Order:
    """Order two node sets by the most relevant node of their symmetric difference."""
    diff = set(m) ^ set(n)
    if not diff:
        return Order.EQUAL
    top = max(diff, key=lambda v: g.priority[v])
    in_n = top not in set(m)
    if in_n == is_even(g, top):
        return Order.LESS
    return Order.GREATER


@dataclass(frozen=True)
class NodeValuation:
    cycle: int
    path: frozenset
    length: int

    def as_json(self) -> list:
        return [self.cycle, sorted(self.path), self.length]


def compare_valuations(g: ParityGame, a: NodeValuation, b: NodeValuation) -> Order:
    if a.cycle != b.cycle:
        return _order(reward(g, a.cycle), reward(g, b.cycle))
    sets = compare_node_sets(g, a.path, b.path)
    if sets != Order.EQUAL:
        return sets
    if is_even(g, a.cycle):
        return _order(b.length, a.length)
    return _order(a.length, b.length)


def valuation_key(g: ParityGame, val: NodeValuation) -> tuple[int, int, int]:
    """Integer triple whose tuple order coincides with ``compare_valuations``.

    The path set is encoded as a signed sum of ``2**rank``: even nodes count
    positively, odd nodes negatively, so the most relevant differing node
    decides the comparison.
    """
    setkey = 0
    for u in val.path:
        bit = 1 << g.rank[u]
        setkey += bit if is_even(g, u) else -bit
    lenkey = -val.length if is_even(g, val.cycle) else val.length
    return (reward(g, val.cycle), setkey, lenkey)


class GameValuation:
    """Per-node valuations together with their comparison keys."""

    __slots__ = ("game", "values", "keys")

    def __init__(self, game: ParityGame, values: Sequence[NodeValuation],
                 keys: Sequence[tuple[int, int, int]] | None = None):
        self.game = game
        self.values = tuple(values)
        if keys is None:
            keys = [valuation_key(game, val) for val in self.values]
        self.keys = tuple(keys)

    def __getitem__(self, v: int) -> NodeValuation:
        return self.values[v]

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, GameValuation) and self.keys == other.keys

    def __hash__(self) -> int:
        return hash(self.keys)

    def less(self, v: int, u: int) -> bool:
        """``v`` is valued strictly below ``u``."""
        return self.keys[v] < self.keys[u]

    def leq_pointwise(self, other: "GameValuation") -> bool:
        return all(a <= b for a, b in zip(self.keys, other.keys))

    def strictly_below(self, other: "GameValuation") -> bool:
        """Pointwise at most ``other`` and different somewhere."""
        return self.leq_pointwise(other) and self.keys != other.keys

    def cycle_nodes(self) -> set[int]:
        return {val.cycle for val in self.values}

    def digest(self) -> str:
        h = hashlib.sha256(repr(self.keys).encode()).hexdigest()
        return h[:16]

    def as_json(self) -> list:
        return [val.as_json() for val in self.values]


def check_strategy(g: ParityGame, strategy: Mapping[int, int], player: int) -> None:
    owned = set(g.nodes_of(player))
    if set(strategy) != owned:
        missing = sorted(owned - set(strategy))
        extra = sorted(set(strategy) - owned)
        raise GameError(f"player {player} strategy domain mismatch: missing {missing}, extra {extra}")
    for v, u in strategy.items():
        if u not in g.successors[v]:
            raise GameError(f"strategy moves {v} -> {u}, which is not an edge")


def _moves(g: ParityGame, sigma: Mapping[int, int], tau: Mapping[int, int]) -> list[int]:
    return [sigma[v] if o == P0 else tau[v] for v, o in enumerate(g.owner)]


def evaluate_successor_map(g: ParityGame, succ: Sequence[int]) -> GameValuation:
    """Valuate every node of the functional graph ``v -> succ[v]``.

    Each node is walked at most once; nodes on a freshly found cycle are
    valued backwards from the cycle's most relevant node, tails backwards
    from the first already-valued node.
    """
    size = len(g)
    prio = g.priority
    rank = g.rank
    vals: list = [None] * size
    keys: list = [None] * size
    state = [0] * size  # 0 new, 1 on current walk, 2 valued

    def extend(u: int) -> None:
        s = succ[u]
        base = vals[s]
        c = base.cycle
        path = base.path
        k0, k1, k2 = keys[s]
        if prio[u] > prio[c]:
            path = path | {u}
            bit = 1 << rank[u]
            k1 = k1 + bit if prio[u] % 2 == 0 else k1 - bit
        vals[u] = NodeValuation(c, path, base.length + 1)
        keys[u] = (k0, k1, k2 - 1 if prio[c] % 2 == 0 else k2 + 1)
        state[u] = 2

    for start in range(size):
        if state[start]:
            continue
        walk = []
        v = start
        while state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = succ[v]
        if state[v] == 1:
            c = walk.index(v)
            cycle = walk[c:]
            wi = max(range(len(cycle)), key=lambda i: prio[cycle[i]])
            w = cycle[wi]
            vals[w] = NodeValuation(w, frozenset(), 0)
            keys[w] = (prio[w] if prio[w] % 2 == 0 else -prio[w], 0, 0)
            state[w] = 2
            for u in reversed(cycle[:wi]):
                extend(u)
            for u in reversed(cycle[wi + 1:]):
                extend(u)
            tail = walk[:c]
        else:
            tail = walk
        for u in reversed(tail):
            extend(u)
    return GameValuation(g, vals, keys)


def evaluate_all(g: ParityGame, sigma: Mapping[int, int], tau: Mapping[int, int]) -> GameValuation:
    return evaluate_successor_map(g, _moves(g, sigma, tau))


def evaluate_play(g: ParityGame, sigma: Mapping[int, int], tau: Mapping[int, int], v: int) -> NodeValuation:
    """Valuation of the play from ``v`` conforming to ``sigma`` and ``tau``."""
    succ = _moves(g, sigma, tau)
    seen: dict[int, int] = {}
    walk = []
    u = v
    while u not in seen:
        seen[u] = len(walk)
        walk.append(u)
        u = succ[u]
    cycle = walk[seen[u]:]
    w = max(cycle, key=lambda x: g.priority[x])
    tail = walk[:walk.index(w)]
    path = frozenset(x for x in tail if g.priority[x] > g.priority[w])
    return NodeValuation(w, path, len(tail))


def best_response(g: ParityGame, sigma: Mapping[int, int]) -> tuple[dict[int, int], GameValuation]:
    """Optimal player 1 counterstrategy against ``sigma`` and the induced valuation.

    Single-player strategy iteration: start from the smallest successor of
    every player 1 node and, round by round, move every player 1 node whose
    current target is not valued minimal to the smallest-id minimal target.
    """
    p1 = g.nodes_of(P1)
    tau = {v: min(g.successors[v]) for v in p1}
    succ = _moves(g, sigma, tau)
    while True:
        xi = evaluate_successor_map(g, succ)
        keys = xi.keys
        changed = False
        for v in p1:
            cur = succ[v]
            options = [u for u in g.successors[v] if u == cur or not is_vacuous_switch(xi, v, u)]
            best = min(options, key=lambda u: (keys[u], u))
            if keys[best] < keys[cur]:
                succ[v] = best
                changed = True
        if not changed:
            return {v: succ[v] for v in p1}, xi


def game_valuation(g: ParityGame, sigma: Mapping[int, int]) -> GameValuation:
    return best_response(g, sigma)[1]


@dataclass(frozen=True)
class ImprovementArena:
    game: ParityGame
    allowed: dict

    def as_game(self) -> ParityGame:
        return self.game.restrict(self.allowed)

    def strategy_count(self) -> int:
        total = 1
        for succs in self.allowed.values():
            total *= len(succs)
        return total


def improvement_arena(g: ParityGame, sigma: Mapping[int, int], xi: GameValuation) -> ImprovementArena:
    keys = xi.keys
    allowed = {}
    for v in g.nodes_of(P0):
        cur = keys[sigma[v]]
        allowed[v] = tuple(u for u in g.successors[v] if cur <= keys[u])
    return ImprovementArena(g, allowed)


def is_vacuous_switch(xi: GameValuation, v: int, u: int) -> bool:
    """Moving ``v`` to ``u`` cannot change any valuation.

    This happens when ``v`` is the most relevant node of its own cycle and
    the play from ``u`` returns to ``v`` without meeting a more relevant
    node: the new cycle is still dominated by ``v``, so only its length
    changes, and that length is never part of any valuation.  Comparing
    ``u`` against the current successor would nevertheless report a strict
    difference in the length component.
    """
    return xi[v].cycle == v and xi[u].cycle == v and not xi[u].path


def improving_switches(g: ParityGame, sigma: Mapping[int, int], xi: GameValuation) -> set[tuple[int, int]]:
    """Edges ``(v, u)`` with ``u`` valued strictly above ``sigma[v]``, minus vacuous ones."""
    keys = xi.keys
    out = set()
    for v in g.nodes_of(P0):
        cur = keys[sigma[v]]
        for u in g.successors[v]:
            if u != sigma[v] and cur < keys[u] and not is_vacuous_switch(xi, v, u):
                out.add((v, u))
    return out


def winning_sets(g: ParityGame, xi: GameValuation) -> tuple[frozenset, frozenset]:
    w0 = frozenset(v for v in range(len(g)) if is_even(g, xi[v].cycle))
    return w0, frozenset(range(len(g))) - w0
