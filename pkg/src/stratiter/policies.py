"""Improvement policies: locally optimizing, globally optimizing and linear.

A policy maps the current player 0 strategy (with its valuation) to a new
strategy that only uses edges of the improvement arena and strictly improves
at some node whenever the current strategy is improvable.  All tie breaking
is deterministic: keep the current choice when it is among the best,
otherwise take the best successor with the smallest id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .core import (P0, GameError, GameValuation, ParityGame, best_response,
                   check_strategy, improvement_arena, improving_switches,
                   is_vacuous_switch)


@dataclass(frozen=True)
class PolicyKind:
    name: str
    target: Mapping[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.name not in ("local", "global", "linear"):
            raise ValueError(f"unknown policy {self.name!r}")
        if self.target is not None and self.name != "linear":
            raise ValueError("only the linear policy carries a target strategy")

    @classmethod
    def linear(cls, target: Mapping[int, int] | None = None) -> "PolicyKind":
        return cls("linear", target)


LOCAL = PolicyKind("local")
GLOBAL = PolicyKind("global")


@dataclass(frozen=True)
class LinearContext:
    target: dict
    agreement: frozenset

    @classmethod
    def for_strategy(cls, g: ParityGame, target: Mapping[int, int], sigma: Mapping[int, int]) -> "LinearContext":
        try:
            check_strategy(g, target, P0)
        except GameError as exc:
            raise GameError(f"linear policy target is not a strategy of the game: {exc}") from None
        return cls(dict(target), agreement(target, sigma))


def agreement(target: Mapping[int, int], sigma: Mapping[int, int]) -> frozenset:
    return frozenset(v for v, u in sigma.items() if target[v] == u)


def local_policy(g: ParityGame, sigma: Mapping[int, int], xi: GameValuation) -> dict[int, int]:
    keys = xi.keys
    out = {}
    for v, cur in sigma.items():
        options = [u for u in g.successors[v] if u == cur or not is_vacuous_switch(xi, v, u)]
        best = max(options, key=lambda u: (keys[u], -u))
        out[v] = cur if keys[cur] == keys[best] else best
    return out


def iterate_local(g: ParityGame, sigma: Mapping[int, int]) -> tuple[dict[int, int], GameValuation, int]:
    """Run locally optimizing strategy iteration to its fixpoint."""
    sigma = dict(sigma)
    _, xi = best_response(g, sigma)
    steps = 0
    while improving_switches(g, sigma, xi):
        sigma = local_policy(g, sigma, xi)
        _, xi = best_response(g, sigma)
        steps += 1
    return sigma, xi, steps


def global_policy(g: ParityGame, sigma: Mapping[int, int], xi: GameValuation) -> dict[int, int]:
    """Strategy of the improvement arena whose valuation dominates every other.

    The arena is itself a parity game; strategy iteration run inside it from
    ``sigma`` reaches a strategy that is optimal there.  Player 1 edges are
    untouched by the arena, so valuations in the arena and in ``g`` agree.
    """
    arena = improvement_arena(g, sigma, xi).as_game()
    best, _, _ = iterate_local(arena, sigma)
    return best


def linear_policy(g: ParityGame, ctx: LinearContext, sigma: Mapping[int, int], xi: GameValuation) -> dict[int, int]:
    allowed = improvement_arena(g, sigma, xi).allowed
    target = ctx.target
    if set(target) != set(sigma):
        raise GameError("linear policy target is not a strategy of the game")
    return {v: target[v] if target[v] in allowed[v] else cur for v, cur in sigma.items()}


def optimal_strategy(g: ParityGame, iota: Mapping[int, int]) -> dict[int, int]:
    """A ⊴-optimal player 0 strategy, found by local strategy iteration."""
    return iterate_local(g, iota)[0]


def apply_policy(kind: PolicyKind, g: ParityGame, sigma: Mapping[int, int], xi: GameValuation) -> dict[int, int]:
    if kind.name == "local":
        return local_policy(g, sigma, xi)
    if kind.name == "global":
        return global_policy(g, sigma, xi)
    if kind.target is None:
        raise ValueError("linear policy needs a target strategy")
    return linear_policy(g, LinearContext(dict(kind.target), agreement(kind.target, sigma)), sigma, xi)
