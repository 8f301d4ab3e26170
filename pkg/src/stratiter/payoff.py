"""Mean payoff, discounted payoff and simple stochastic games derived from parity games.

All values are exact ``Fraction`` objects.  Fixed-strategy values are
obtained in closed form (discounted games) or by an exact sparse linear
solve (stochastic games); best responses and the outer iterations are
policy iterations that only switch on strict improvements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import P0, P1, GameError, ParityGame, best_response, evaluate_all

PAYOFF_ITERATION_CAP = 2**20

MAX, MIN, AVG, SINK0, SINK1 = "max", "min", "avg", "sink0", "sink1"


class SingularSystem(ArithmeticError):
    """A fixed-strategy stochastic game that does not halt almost surely."""


class PayoffIterationCap(RuntimeError):
    pass


def fmt_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not sep:
        raise ValueError(f"rational {text!r} is not of the form num/den")
    return Fraction(int(num), int(den))


def _check_arena(owner, successors) -> None:
    if len(owner) != len(successors) or not owner:
        raise GameError("arena needs one owner and one successor list per node")
    for v, succs in enumerate(successors):
        if owner[v] not in (P0, P1):
            raise GameError(f"node {v}: owner must be 0 or 1")
        if not succs:
            raise GameError(f"node {v} has no successors")
        for u in succs:
            if not 0 <= u < len(owner):
                raise GameError(f"node {v}: unknown successor {u}")


@dataclass(frozen=True)
class MeanPayoffGame:
    owner: tuple
    successors: tuple
    reward: tuple

    def __post_init__(self):
        _check_arena(self.owner, self.successors)
        if len(self.reward) != len(self.owner):
            raise GameError("one reward per node expected")

    def __len__(self) -> int:
        return len(self.owner)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.successors)

    def nodes_of(self, player: int) -> list[int]:
        return [v for v, o in enumerate(self.owner) if o == player]


@dataclass(frozen=True)
class DiscountedPayoffGame:
    game: MeanPayoffGame
    beta: Fraction

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise GameError("discount factor must lie strictly between 0 and 1")

    def __len__(self) -> int:
        return len(self.game)

    @property
    def owner(self):
        return self.game.owner

    @property
    def successors(self):
        return self.game.successors

    @property
    def reward(self):
        return self.game.reward

    def nodes_of(self, player: int) -> list[int]:
        return self.game.nodes_of(player)


@dataclass(frozen=True)
class ValueAssignment:
    values: tuple

    def __getitem__(self, v: int) -> Fraction:
        return self.values[v]

    def __len__(self) -> int:
        return len(self.values)

    def as_json(self) -> list[str]:
        return [fmt_rational(q) for q in self.values]


def to_mpg(g: ParityGame) -> MeanPayoffGame:
    base = -len(g)
    return MeanPayoffGame(tuple(g.owner), tuple(g.successors),
                          tuple(base ** p for p in g.priority))


def discount_factor(m: MeanPayoffGame) -> Fraction:
    top = max(abs(r) for r in m.reward)
    if top == 0:
        top = 1
    return 1 - Fraction(1, 4 * len(m) ** 3 * top)


def to_dpg(m: MeanPayoffGame) -> DiscountedPayoffGame:
    return DiscountedPayoffGame(m, discount_factor(m))


def _moves(owner, sigma, tau) -> list[int]:
    return [sigma[v] if o == P0 else tau[v] for v, o in enumerate(owner)]


def _functional_values(reward: Sequence[int], beta: Fraction, succ: Sequence[int]) -> list[Fraction]:
    """Discounted values of every node of the functional graph ``succ``.

    The first node found on each cycle gets the closed form
    ``sum(beta**k * r(w_k)) / (1 - beta**L)``; all other nodes follow from
    ``phi(v) = r(v) + beta * phi(succ(v))``.
    """
    size = len(succ)
    vals: list = [None] * size
    state = [0] * size
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
            total = Fraction(0)
            power = Fraction(1)
            for w in cycle:
                total += power * reward[w]
                power *= beta
            vals[cycle[0]] = total / (1 - power)
            state[cycle[0]] = 2
            tail = list(reversed(cycle[1:])) + list(reversed(walk[:c]))
        else:
            tail = list(reversed(walk))
        for u in tail:
            vals[u] = reward[u] + beta * vals[succ[u]]
            state[u] = 2
    return vals


def dpg_evaluate(d: DiscountedPayoffGame, sigma: Mapping[int, int], tau: Mapping[int, int]) -> ValueAssignment:
    return ValueAssignment(tuple(_functional_values(d.reward, d.beta, _moves(d.owner, sigma, tau))))


def dpg_best_response(d: DiscountedPayoffGame, sigma: Mapping[int, int]) -> tuple[dict[int, int], ValueAssignment]:
    """Player 1 policy iteration: move to a strictly smaller successor value, smallest id first."""
    p1 = d.nodes_of(P1)
    tau = {v: min(d.successors[v]) for v in p1}
    succ = _moves(d.owner, sigma, tau)
    while True:
        vals = _functional_values(d.reward, d.beta, succ)
        changed = False
        for v in p1:
            best = min(d.successors[v], key=lambda u: (vals[u], u))
            if vals[best] < vals[succ[v]]:
                succ[v] = best
                changed = True
        if not changed:
            return {v: succ[v] for v in p1}, ValueAssignment(tuple(vals))


def dpg_improving_switches(d: DiscountedPayoffGame, sigma: Mapping[int, int], values: ValueAssignment) -> set[tuple[int, int]]:
    out = set()
    for v in d.nodes_of(P0):
        cur = values[sigma[v]]
        for u in d.successors[v]:
            if u != sigma[v] and cur < values[u]:
                out.add((v, u))
    return out


@dataclass
class PayoffReport:
    sigma: dict
    tau: dict
    values: ValueAssignment
    iterations: int
    trace: list = field(default_factory=list)


def _local_step(nodes, successors, sigma, vals) -> dict[int, int]:
    out = {}
    for v in nodes:
        cur = sigma[v]
        best = max(successors[v], key=lambda u: (vals[u], -u))
        out[v] = cur if vals[best] == vals[cur] else best
    return out


def puri_solve(d: DiscountedPayoffGame, iota: Mapping[int, int], *,
               max_iterations: int = PAYOFF_ITERATION_CAP) -> PayoffReport:
    """Locally optimizing strategy iteration on a discounted payoff game.

    Ties keep the current successor, otherwise the best successor with the
    smallest id is chosen, exactly as for parity games.
    """
    sigma = dict(iota)
    p0 = d.nodes_of(P0)
    trace = []
    iterations = 0
    while True:
        tau, vals = dpg_best_response(d, sigma)
        switches = dpg_improving_switches(d, sigma, vals)
        if not switches:
            trace.append({"iteration": iterations, "sigma": dict(sigma),
                          "improving_switches": [], "chosen_switches": []})
            return PayoffReport(sigma, tau, vals, iterations, trace)
        new = _local_step(p0, d.successors, sigma, vals)
        trace.append({"iteration": iterations, "sigma": dict(sigma),
                      "improving_switches": sorted(switches),
                      "chosen_switches": sorted((v, u) for v, u in new.items() if sigma[v] != u)})
        iterations += 1
        if iterations > max_iterations:
            raise PayoffIterationCap(f"no fixpoint within {max_iterations} iterations")
        sigma = new


def mpg_values_from_optimal(m: MeanPayoffGame, sigma: Mapping[int, int], rho: Mapping[int, int]) -> ValueAssignment:
    """Average reward of the cycle each node's play ends in."""
    succ = _moves(m.owner, sigma, rho)
    out = []
    for v in range(len(m)):
        seen = {}
        u = v
        while u not in seen:
            seen[u] = len(seen)
            u = succ[u]
        cycle = [u]
        w = succ[u]
        while w != u:
            cycle.append(w)
            w = succ[w]
        out.append(Fraction(sum(m.reward[w] for w in cycle), len(cycle)))
    return ValueAssignment(tuple(out))


def winning_sets_via_payoff(g: ParityGame, iota: Mapping[int, int] | None = None) -> tuple[frozenset, frozenset, ValueAssignment]:
    """Winning sets from the sign of mean payoff values under the optimal discounted pair."""
    m = to_mpg(g)
    d = to_dpg(m)
    if iota is None:
        iota = {v: min(g.successors[v]) for v in g.nodes_of(P0)}
    rep = puri_solve(d, iota)
    vals = mpg_values_from_optimal(m, rep.sigma, rep.tau)
    w0 = frozenset(v for v in range(len(g)) if vals[v] >= 0)
    return w0, frozenset(range(len(g))) - w0, vals


# Simple stochastic games

@dataclass(frozen=True)
class SimpleStochasticGame:
    """Max/min/average nodes plus the two sinks.

    ``prob[v]`` lists the probabilities of the successors of an average node
    ``v`` in the order of ``successors[v]``.
    """

    kind: tuple
    successors: tuple
    prob: dict
    edge_nodes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.kind) != len(self.successors):
            raise GameError("one kind and one successor list per node expected")
        if self.kind.count(SINK0) != 1 or self.kind.count(SINK1) != 1:
            raise GameError("exactly one 0-sink and one 1-sink expected")
        for v, (k, succs) in enumerate(zip(self.kind, self.successors)):
            if k in (SINK0, SINK1):
                if succs:
                    raise GameError(f"sink {v} has successors")
                continue
            if k not in (MAX, MIN, AVG):
                raise GameError(f"node {v}: unknown kind {k!r}")
            if not succs:
                raise GameError(f"node {v} has no successors")
            for u in succs:
                if not 0 <= u < len(self.kind):
                    raise GameError(f"node {v}: unknown successor {u}")
            if k == AVG:
                ps = self.prob.get(v)
                if ps is None or len(ps) != len(succs):
                    raise GameError(f"average node {v} needs one probability per successor")
                if any(p < 0 for p in ps) or sum(ps) != 1:
                    raise GameError(f"average node {v}: probabilities must be non-negative and sum to 1")

    def __len__(self) -> int:
        return len(self.kind)

    def nodes_of(self, kind: str) -> list[int]:
        return [v for v, k in enumerate(self.kind) if k == kind]

    @property
    def sink0(self) -> int:
        return self.kind.index(SINK0)

    @property
    def sink1(self) -> int:
        return self.kind.index(SINK1)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.successors)


@dataclass(frozen=True)
class ReductionConstants:
    low: int
    high: int
    spread: int


def reduction_constants(d: DiscountedPayoffGame) -> ReductionConstants:
    low, high = min(d.reward), max(d.reward)
    return ReductionConstants(low, high, max(1, high - low))


def to_ssg(d: DiscountedPayoffGame) -> SimpleStochasticGame:
    """Stochastic game with one average node per edge.

    Original nodes keep their ids, average nodes follow in edge order, and
    the 0-sink and 1-sink come last.
    """
    consts = reduction_constants(d)
    size = len(d)
    edges = [(v, u) for v in range(size) for u in d.successors[v]]
    edge_nodes = {e: size + i for i, e in enumerate(edges)}
    sink0, sink1 = size + len(edges), size + len(edges) + 1
    kind = [MAX if o == P0 else MIN for o in d.owner]
    succs = [tuple(edge_nodes[(v, u)] for u in d.successors[v]) for v in range(size)]
    prob = {}
    beta = d.beta
    for (v, u), a in edge_nodes.items():
        win = (1 - beta) * Fraction(d.reward[v] - consts.low, consts.spread)
        kind.append(AVG)
        succs.append((u, sink0, sink1))
        prob[a] = (beta, 1 - beta - win, win)
    kind += [SINK0, SINK1]
    succs += [(), ()]
    return SimpleStochasticGame(tuple(kind), tuple(succs), prob, edge_nodes)


def lift_strategy(s: SimpleStochasticGame, strategy: Mapping[int, int]) -> dict[int, int]:
    """Map a strategy of the discounted game onto the edge nodes of its stochastic game."""
    return {v: s.edge_nodes[(v, u)] for v, u in strategy.items()}


def solve_linear(rows: Sequence[tuple[dict, Fraction]], size: int) -> list[Fraction]:
    """Exact Gauss-Jordan elimination on sparse rows ``({col: coeff}, rhs)``.

    Columns are eliminated in index order; the pivot for a column is the
    lowest-numbered remaining row with a nonzero entry there.
    """
    work = [(dict(coeffs), Fraction(rhs)) for coeffs, rhs in rows]
    if len(work) != size:
        raise ValueError("square system expected")
    by_col: dict[int, set] = {}
    for i, (coeffs, _) in enumerate(work):
        for c in coeffs:
            by_col.setdefault(c, set()).add(i)
    used = set()
    pivots = {}
    for col in range(size):
        candidates = sorted(i for i in by_col.get(col, ()) if i not in used and work[i][0].get(col))
        if not candidates:
            raise SingularSystem(f"no pivot for column {col}")
        p = candidates[0]
        used.add(p)
        pivots[col] = p
        pc, pr = work[p]
        inv = 1 / pc[col]
        pc = {c: a * inv for c, a in pc.items() if a}
        pr *= inv
        work[p] = (pc, pr)
        for i in sorted(by_col.get(col, set()) - {p}):
            coeffs, rhs = work[i]
            f = coeffs.pop(col, 0)
            by_col[col].discard(i)
            if not f:
                continue
            for c, a in pc.items():
                if c == col:
                    continue
                new = coeffs.get(c, 0) - f * a
                if new:
                    coeffs[c] = new
                    by_col.setdefault(c, set()).add(i)
                else:
                    coeffs.pop(c, None)
                    by_col.get(c, set()).discard(i)
            work[i] = (coeffs, rhs - f * pr)
        by_col[col] = {p}
    return [work[pivots[col]][1] for col in range(size)]


def ssg_evaluate(s: SimpleStochasticGame, sigma: Mapping[int, int], rho: Mapping[int, int]) -> ValueAssignment:
    """Probability of reaching the 1-sink from every node under fixed strategies."""
    rows = []
    for v, k in enumerate(s.kind):
        if k == SINK0:
            rows.append(({v: Fraction(1)}, Fraction(0)))
        elif k == SINK1:
            rows.append(({v: Fraction(1)}, Fraction(1)))
        elif k in (MAX, MIN):
            u = sigma[v] if k == MAX else rho[v]
            if u not in s.successors[v]:
                raise GameError(f"strategy moves {v} -> {u}, which is not an edge")
            coeffs = {v: Fraction(1)}
            coeffs[u] = coeffs.get(u, 0) - 1
            rows.append((coeffs, Fraction(0)))
        else:
            coeffs = {v: Fraction(1)}
            for u, p in zip(s.successors[v], s.prob[v]):
                coeffs[u] = coeffs.get(u, 0) - p
            rows.append((coeffs, Fraction(0)))
    return ValueAssignment(tuple(solve_linear(rows, len(s))))


def ssg_best_response(s: SimpleStochasticGame, sigma: Mapping[int, int]) -> tuple[dict[int, int], ValueAssignment]:
    mins = s.nodes_of(MIN)
    rho = {v: min(s.successors[v]) for v in mins}
    while True:
        vals = ssg_evaluate(s, sigma, rho)
        changed = False
        for v in mins:
            best = min(s.successors[v], key=lambda u: (vals[u], u))
            if vals[best] < vals[rho[v]]:
                rho[v] = best
                changed = True
        if not changed:
            return dict(rho), vals


def ssg_solve(s: SimpleStochasticGame, iota: Mapping[int, int], *,
              max_iterations: int = PAYOFF_ITERATION_CAP) -> PayoffReport:
    """Locally optimizing strategy iteration for player Max."""
    sigma = dict(iota)
    maxes = s.nodes_of(MAX)
    trace = []
    iterations = 0
    while True:
        rho, vals = ssg_best_response(s, sigma)
        switches = {(v, u) for v in maxes for u in s.successors[v]
                    if u != sigma[v] and vals[sigma[v]] < vals[u]}
        trace.append({"iteration": iterations, "sigma": dict(sigma),
                      "improving_switches": sorted(switches)})
        if not switches:
            return PayoffReport(sigma, rho, vals, iterations, trace)
        sigma = _local_step(maxes, s.successors, sigma, vals)
        iterations += 1
        if iterations > max_iterations:
            raise PayoffIterationCap(f"no fixpoint within {max_iterations} iterations")


def affine_identity_holds(d: DiscountedPayoffGame, dpg_values: ValueAssignment, ssg_values: ValueAssignment) -> bool:
    """``(1 - beta) * R_dpg(v) == spread * R_ssg(v) + low`` at every original node."""
    c = reduction_constants(d)
    return all((1 - d.beta) * dpg_values[v] == c.spread * ssg_values[v] + c.low for v in range(len(d)))


def check_switch_correspondence(g: ParityGame, trace: Sequence, sink: int) -> dict:
    """Compare parity valuations with induced discounted values along a trace.

    For every traced strategy: the discounted best response equals the
    parity best response, every play ends in the sink's self-loop, and for
    all pairs of nodes the strict valuation order agrees with the strict
    order of discounted values.
    """
    d = to_dpg(to_mpg(g))
    violations = []
    for step in trace:
        sigma = step.sigma if hasattr(step, "sigma") else {int(k): v for k, v in step["sigma"].items()}
        tau, xi = best_response(g, sigma)
        rho, vals = dpg_best_response(d, sigma)
        it = step.iteration if hasattr(step, "iteration") else step["iteration"]
        if rho != tau:
            violations.append({"iteration": it, "error": "discounted best response differs from parity best response"})
            tau_vals = evaluate_all(g, sigma, rho)
        else:
            tau_vals = xi
        if any(val.cycle != sink for val in tau_vals.values):
            violations.append({"iteration": it, "error": "a play does not end in the sink"})
        keys = xi.keys
        order = sorted(range(len(g)), key=lambda v: keys[v])
        for a, b in zip(order, order[1:]):
            if keys[a] == keys[b] and vals[a] != vals[b]:
                violations.append({"iteration": it, "error": f"nodes {a} and {b} valued equal but discounted values differ"})
            if keys[a] < keys[b] and not vals[a] < vals[b]:
                violations.append({"iteration": it, "error": f"node {a} below {b} but discounted values disagree"})
    return {"ok": not violations, "steps": len(trace), "violations": violations}
