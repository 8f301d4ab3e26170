"""Generators for the lower-bound game families and for random test games.

``gen_locally`` builds the binary-counter games that defeat the locally
optimizing policy, ``gen_globally`` the variant with stubborn cycles that
defeats the globally optimizing policy.  Node ids follow a fixed order
(x, s, r, c, lane nodes, then gate nodes per bit) so that generated files
and traces are stable.
"""

from __future__ import annotations

import random
from typing import Iterator

from .core import P0, P1, GameError, Node, ParityGame

LOCAL_FAMILY = "loc"
GLOBAL_FAMILY = "glo"


class RoleMap:
    """Bijection between gadget roles ``(kind, index)`` and node ids.

    Singleton nodes (x, s, r, c) use index 0.
    """

    def __init__(self, family: str, n: int, roles: list[tuple[str, int]]):
        self.family = family
        self.n = n
        self.roles = tuple(roles)
        self.ids = {role: v for v, role in enumerate(self.roles)}
        if len(self.ids) != len(self.roles):
            raise GameError("duplicate role in role map")

    def __getitem__(self, role: tuple[str, int]) -> int:
        return self.ids[role]

    def __contains__(self, role) -> bool:
        return role in self.ids

    def __len__(self) -> int:
        return len(self.roles)

    def role(self, v: int) -> tuple[str, int]:
        return self.roles[v]

    def label(self, v: int) -> str:
        kind, i = self.roles[v]
        return kind if i == 0 else f"{kind}{i}" if len(kind) == 1 else f"{kind}_{i}"

    @property
    def lane_length(self) -> int:
        return 2 * self.n if self.family == LOCAL_FAMILY else 6 * self.n - 2

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n,
                "roles": [[kind, i] for kind, i in self.roles]}

    @classmethod
    def from_json(cls, data: dict) -> "RoleMap":
        return cls(data["family"], data["n"], [(k, i) for k, i in data["roles"]])


class _Builder:
    def __init__(self, roles: list[tuple[str, int]]):
        self.roles = roles
        self.ids = {role: v for v, role in enumerate(roles)}
        self.rows: dict[int, tuple[int, int, list]] = {}

    def add(self, kind: str, i: int, owner: int, priority: int, succs: list) -> None:
        v = self.ids[(kind, i)]
        self.rows[v] = (owner, priority, [self.ids[r] for r in succs])

    def build(self, rolemap: RoleMap) -> ParityGame:
        nodes = []
        for v in range(len(self.roles)):
            owner, prio, succs = self.rows[v]
            nodes.append(Node(v, owner, prio, tuple(succs), rolemap.label(v)))
        return ParityGame(nodes)


def _singletons_and_lane(m: int) -> list[tuple[str, int]]:
    roles = [("x", 0), ("s", 0), ("r", 0), ("c", 0)]
    roles += [("t", i) for i in range(1, m + 1)]
    roles += [("a", i) for i in range(1, m + 1)]
    return roles


def gen_locally(n: int, drop_top_edge: bool = False) -> tuple[ParityGame, dict[int, int], RoleMap]:
    """Lower-bound game G_n for the locally optimizing policy and its initial strategy.

    With ``drop_top_edge`` the edge e_n -> h_n is left out, which lets
    player 0 win the top simple cycle once the counter reaches it.
    """
    if n < 1:
        raise GameError("family index n must be >= 1")
    m = 2 * n
    roles = _singletons_and_lane(m)
    for i in range(1, n + 1):
        roles += [(k, i) for k in ("d", "e", "g", "k", "f", "h")]
    rolemap = RoleMap(LOCAL_FAMILY, n, roles)
    b = _Builder(roles)

    b.add("t", 1, P0, 4 * n + 3, [("s", 0), ("r", 0), ("c", 0)])
    for i in range(2, m + 1):
        b.add("t", i, P0, 4 * n + 2 * i + 1, [("s", 0), ("r", 0), ("t", i - 1)])
    for i in range(1, m + 1):
        b.add("a", i, P1, 4 * n + 2 * i + 2, [("t", i)])
    b.add("c", 0, P0, 8 * n + 4, [("s", 0), ("r", 0)])
    for i in range(1, n + 1):
        b.add("d", i, P0, 4 * i - 1,
              [("s", 0), ("e", i), ("r", 0)] + [("a", j) for j in range(1, 2 * i + 1)])
        e_succ = [("d", i)] if drop_top_edge and i == n else [("d", i), ("h", i)]
        b.add("e", i, P1, 4 * i, e_succ)
        b.add("g", i, P0, 4 * i + 2, [("f", i), ("k", i)])
        b.add("k", i, P0, 8 * n + 4 * i + 5, [("x", 0)] + [("g", j) for j in range(i + 1, n + 1)])
        b.add("f", i, P1, 8 * n + 4 * i + 7, [("e", i)])
        b.add("h", i, P1, 8 * n + 4 * i + 8, [("k", i)])
    b.add("s", 0, P0, 8 * n + 6, [("f", j) for j in range(1, n + 1)] + [("x", 0)])
    b.add("r", 0, P0, 8 * n + 8, [("g", j) for j in range(1, n + 1)] + [("x", 0)])
    b.add("x", 0, P1, 1, [("x", 0)])
    game = b.build(rolemap)

    ids = rolemap.ids
    iota = {ids[("t", 1)]: ids[("c", 0)]}
    for i in range(2, m + 1):
        iota[ids[("t", i)]] = ids[("r", 0)]
    iota[ids[("c", 0)]] = ids[("r", 0)]
    for i in range(1, n + 1):
        iota[ids[("d", i)]] = ids[("r", 0)]
        iota[ids[("g", i)]] = ids[("k", i)]
        iota[ids[("k", i)]] = ids[("x", 0)]
    iota[ids[("s", 0)]] = ids[("x", 0)]
    iota[ids[("r", 0)]] = ids[("x", 0)]
    return game, iota, rolemap


def gen_globally(n: int) -> tuple[ParityGame, dict[int, int], RoleMap]:
    """Lower-bound game H_n for the globally optimizing policy and its initial strategy."""
    if n < 1:
        raise GameError("family index n must be >= 1")
    m = 6 * n - 2
    roles = _singletons_and_lane(m)
    for i in range(1, n + 1):
        roles += [(k, i) for k in ("d1", "d2", "d3", "e", "y", "g", "k", "f", "h")]
    rolemap = RoleMap(GLOBAL_FAMILY, n, roles)
    b = _Builder(roles)

    b.add("t", 1, P0, 8 * n + 3, [("s", 0), ("r", 0), ("c", 0)])
    for i in range(2, m + 1):
        b.add("t", i, P0, 8 * n + 2 * i + 1, [("s", 0), ("r", 0), ("t", i - 1)])
    for i in range(1, m + 1):
        b.add("a", i, P1, 8 * n + 2 * i + 2, [("t", i)])
    b.add("c", 0, P1, 20 * n, [("r", 0)])
    for i in range(1, n + 1):
        b.add("d1", i, P0, 8 * i - 5,
              [("s", 0), ("c", 0), ("d2", i)] + [("a", 3 * j + 3) for j in range(0, 2 * i - 1)])
        b.add("d2", i, P0, 8 * i - 3, [("d3", i)] + [("a", 3 * j + 2) for j in range(0, 2 * i - 1)])
        b.add("d3", i, P0, 8 * i - 1, [("e", i)] + [("a", 3 * j + 1) for j in range(0, 2 * i)])
        b.add("e", i, P1, 8 * i, [("d1", i), ("h", i)])
        b.add("y", i, P0, 8 * i + 1, [("f", i), ("k", i)])
        b.add("g", i, P0, 8 * i + 2, [("y", i), ("k", i)])
        b.add("k", i, P0, 20 * n + 4 * i + 3, [("x", 0)] + [("g", j) for j in range(i + 1, n + 1)])
        b.add("f", i, P1, 20 * n + 4 * i + 5, [("e", i)])
        b.add("h", i, P1, 20 * n + 4 * i + 6, [("k", i)])
    b.add("s", 0, P0, 20 * n + 2, [("f", j) for j in range(1, n + 1)] + [("x", 0)])
    b.add("r", 0, P0, 20 * n + 4, [("g", j) for j in range(1, n + 1)] + [("x", 0)])
    b.add("x", 0, P1, 1, [("x", 0)])
    game = b.build(rolemap)

    ids = rolemap.ids
    iota = {ids[("t", 1)]: ids[("c", 0)]}
    for i in range(2, m + 1):
        iota[ids[("t", i)]] = ids[("t", i - 1)] if i <= 3 else ids[("r", 0)]
    for i in range(1, n + 1):
        iota[ids[("d1", i)]] = ids[("d2", i)]
        iota[ids[("d2", i)]] = ids[("a", 2)]
        iota[ids[("d3", i)]] = ids[("a", 1)]
        iota[ids[("g", i)]] = ids[("k", i)]
        iota[ids[("y", i)]] = ids[("k", i)]
        iota[ids[("k", i)]] = ids[("x", 0)]
    iota[ids[("s", 0)]] = ids[("x", 0)]
    iota[ids[("r", 0)]] = ids[("x", 0)]
    return game, iota, rolemap


def locally_sizes(n: int) -> tuple[int, int, int]:
    """(nodes, edges, max priority) of G_n by closed formula."""
    return 10 * n + 4, (3 * n * n + 41 * n + 10) // 2, 12 * n + 8


def globally_sizes(n: int) -> tuple[int, int, int]:
    """(nodes, edges, max priority) of H_n by closed formula."""
    return 21 * n, (7 * n * n + 81 * n - 8) // 2, 24 * n + 6


def gen_random(seed: int, node_count: int, max_outdegree: int = 3) -> tuple[ParityGame, dict[int, int]]:
    """Seeded random game with priorities a permutation of 1..node_count."""
    if not 1 <= node_count <= 16:
        raise GameError("node_count must be in 1..16")
    if max_outdegree < 1:
        raise GameError("max_outdegree must be >= 1")
    rng = random.Random(seed)
    prios = list(range(1, node_count + 1))
    rng.shuffle(prios)
    nodes = []
    for v in range(node_count):
        deg = rng.randint(1, min(max_outdegree, node_count))
        succs = tuple(sorted(rng.sample(range(node_count), deg)))
        nodes.append(Node(v, rng.randint(0, 1), prios[v], succs))
    game = ParityGame(nodes)
    iota = {v: min(game.successors[v]) for v in game.nodes_of(P0)}
    return game, iota


def random_games(seed: int, count: int, max_nodes: int = 7, max_outdegree: int = 3) -> Iterator[tuple[ParityGame, dict[int, int]]]:
    rng = random.Random(seed)
    for _ in range(count):
        yield gen_random(rng.randrange(2**32), rng.randint(1, max_nodes), max_outdegree)


def _same_arena(a: ParityGame, b: ParityGame) -> bool:
    return a.owner == b.owner and a.priority == b.priority and a.successors == b.successors


def identify_family(g: ParityGame) -> tuple[RoleMap, bool] | None:
    """Recognise a generated family game; returns its role map and the dropped-edge flag.

    Labels are ignored, so files written by other tools still match.
    """
    size = len(g)
    if size >= 14 and (size - 4) % 10 == 0:
        n = (size - 4) // 10
        for drop in (False, True):
            game, _, roles = gen_locally(n, drop)
            if _same_arena(g, game):
                return roles, drop
    if size >= 21 and size % 21 == 0:
        game, _, roles = gen_globally(size // 21)
        if _same_arena(g, game):
            return roles, False
    return None
