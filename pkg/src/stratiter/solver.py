"""Strategy iteration driver, winning sets, 1-sink certificates and traces."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .core import (P0, P1, GameValuation, ParityGame, best_response,
                   check_strategy, improvement_arena, improving_switches,
                   winning_sets)
from .policies import LOCAL, PolicyKind, agreement, apply_policy, optimal_strategy

DEFAULT_ITERATION_CAP = 2**24


class PolicyContractError(AssertionError):
    """A policy produced a strategy violating the improvement-policy conditions."""


class IterationCapExceeded(RuntimeError):
    pass


@dataclass
class TraceStep:
    iteration: int
    sigma: dict
    digest: str
    improving_switches: list
    chosen_switches: list
    valuation: list | None = None

    def to_json(self) -> dict:
        out = {
            "iteration": self.iteration,
            "sigma": {str(v): u for v, u in sorted(self.sigma.items())},
            "valuation_digest": self.digest,
            "improving_switches": [list(e) for e in self.improving_switches],
            "chosen_switches": [list(e) for e in self.chosen_switches],
        }
        if self.valuation is not None:
            out["valuation"] = self.valuation
        return out


@dataclass
class SolveReport:
    fixpoint_sigma: dict
    fixpoint_tau: dict
    valuation: GameValuation
    w0: frozenset
    w1: frozenset
    iterations: int
    policy: str
    trace: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "policy": self.policy,
            "iterations": self.iterations,
            "W0": sorted(self.w0),
            "W1": sorted(self.w1),
            "sigma": {str(v): u for v, u in sorted(self.fixpoint_sigma.items())},
        }


def _check_contract(g, sigma, xi, new, switches):
    allowed = improvement_arena(g, sigma, xi).allowed
    for v, u in new.items():
        if u not in allowed[v]:
            raise PolicyContractError(f"policy chose {v}->{u}, which is not an arena edge")
    if switches and not any((v, u) in switches for v, u in new.items()):
        raise PolicyContractError("policy did not improve an improvable strategy")


def solve(g: ParityGame, iota: Mapping[int, int], policy: PolicyKind = LOCAL, *,
          max_iterations: int = DEFAULT_ITERATION_CAP, full_trace: bool = False,
          on_step: Callable[[dict, dict, GameValuation], None] | None = None) -> SolveReport:
    """Iterate ``policy`` from ``iota`` until no improving switch is left.

    Every step is checked against the policy conditions and for strict
    growth of the game valuation.  ``on_step`` is called with
    ``(sigma, tau, valuation)`` for every strategy visited, including the
    final one.
    """
    check_strategy(g, iota, P0)
    if policy.name == "linear" and policy.target is None:
        policy = PolicyKind.linear(optimal_strategy(g, iota))
    sigma = dict(iota)
    tau, xi = best_response(g, sigma)
    trace = []
    iterations = 0
    while True:
        if on_step is not None:
            on_step(sigma, tau, xi)
        switches = improving_switches(g, sigma, xi)
        if not switches:
            trace.append(TraceStep(iterations, sigma, xi.digest(), [], [],
                                   xi.as_json() if full_trace else None))
            break
        new = apply_policy(policy, g, sigma, xi)
        _check_contract(g, sigma, xi, new, switches)
        if policy.name == "linear" and not agreement(policy.target, sigma) < agreement(policy.target, new):
            raise PolicyContractError("linear policy did not grow the agreement set")
        chosen = sorted((v, u) for v, u in new.items() if sigma[v] != u)
        trace.append(TraceStep(iterations, sigma, xi.digest(), sorted(switches), chosen,
                               xi.as_json() if full_trace else None))
        new_tau, new_xi = best_response(g, new)
        if not xi.strictly_below(new_xi):
            raise PolicyContractError(f"valuation did not strictly increase at iteration {iterations}")
        iterations += 1
        if iterations > max_iterations:
            raise IterationCapExceeded(f"no fixpoint within {max_iterations} iterations")
        sigma, tau, xi = new, new_tau, new_xi
    w0, w1 = winning_sets(g, xi)
    return SolveReport(sigma, tau, xi, w0, w1, iterations, policy.name, trace)


@dataclass
class OneSinkCertificate:
    sink: int | None
    sink_existence: bool
    all_won_by_p1: bool
    initial_cycle_components_ok: bool
    sink_seeking_ok: bool = True
    iterations: int = 0

    @property
    def valid(self) -> bool:
        return self.sink_existence and self.all_won_by_p1 and self.initial_cycle_components_ok

    def to_json(self) -> dict:
        return {
            "sink": self.sink,
            "valid": self.valid,
            "checks": {
                "sink_existence": self.sink_existence,
                "all_won_by_p1": self.all_won_by_p1,
                "initial_cycle_components_ok": self.initial_cycle_components_ok,
                "sink_seeking_ok": self.sink_seeking_ok,
            },
            "iterations": self.iterations,
        }


def find_sink(g: ParityGame) -> int | None:
    """The unique self-loop node of priority 1 reachable from everywhere, if any."""
    low = [v for v in range(len(g)) if g.priority[v] <= 1]
    if len(low) != 1:
        return None
    v = low[0]
    if g.priority[v] != 1 or v not in g.successors[v]:
        return None
    preds = [[] for _ in range(len(g))]
    for u, succs in enumerate(g.successors):
        for w in succs:
            preds[w].append(u)
    seen = {v}
    todo = deque([v])
    while todo:
        w = todo.popleft()
        for u in preds[w]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return v if len(seen) == len(g) else None


def validate_one_sink(g: ParityGame, iota: Mapping[int, int], policy: PolicyKind = LOCAL) -> OneSinkCertificate:
    """Check the 1-sink conditions; also records sink seeking along a full solve."""
    sink = find_sink(g)
    _, xi = best_response(g, iota)
    initial_ok = sink is not None and all(val.cycle == sink for val in xi.values)
    seeking = [True]

    def watch(sigma, tau, val):
        if sink is None or any(nv.cycle != sink for nv in val.values):
            seeking[0] = False

    report = solve(g, iota, policy, on_step=watch)
    return OneSinkCertificate(
        sink=sink,
        sink_existence=sink is not None,
        all_won_by_p1=len(report.w1) == len(g),
        initial_cycle_components_ok=initial_ok,
        sink_seeking_ok=seeking[0] and sink is not None,
        iterations=report.iterations,
    )
