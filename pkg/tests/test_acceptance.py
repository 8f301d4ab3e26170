"""Acceptance suite: one test per criterion, with a pass/fail line for each.

Run with pytest (the lines appear in the terminal summary) or directly as
``python3 tests/test_acceptance.py``.
"""

import itertools
import sys

from stratiter.core import P0, P1, best_response
from stratiter.counterlab import check_counter_trace
from stratiter.families import (gen_globally, gen_locally, globally_sizes,
                                locally_sizes, random_games)
from stratiter.oracle import (brute_force_global, brute_force_parity,
                              brute_force_response, valuations_equal)
from stratiter.payoff import (affine_identity_holds,
                              check_switch_correspondence, dpg_evaluate,
                              lift_strategy, puri_solve, ssg_evaluate,
                              ssg_solve, to_dpg, to_mpg, to_ssg,
                              winning_sets_via_payoff)
from stratiter.policies import (GLOBAL, LOCAL, PolicyKind, agreement,
                                global_policy, optimal_strategy)
from stratiter.solver import solve, validate_one_sink

from gamekit import random_strategy, seeded_rng

RESULTS = {}


def record(number, check):
    """Run ``check`` and remember whether it passed; re-raise on failure."""
    try:
        check()
    except Exception:
        RESULTS[number] = False
        raise
    RESULTS[number] = True


def summary_lines():
    return [f"criterion {n}: {'PASS' if RESULTS[n] else 'FAIL'}" for n in sorted(RESULTS)]


def check_generator_sizes():
    for n in range(1, 13):
        g, _, _ = gen_locally(n)
        assert (len(g), 2 * g.edge_count, g.max_priority) == (10 * n + 4, 3 * n * n + 41 * n + 10, 12 * n + 8)
        assert (len(g), g.edge_count, g.max_priority) == locally_sizes(n)
        h, _, _ = gen_globally(n)
        assert (len(h), 2 * h.edge_count, h.max_priority) == (21 * n, 7 * n * n + 81 * n - 8, 24 * n + 6)
        assert (len(h), h.edge_count, h.max_priority) == globally_sizes(n)


def check_sink_certificates():
    for n in range(1, 7):
        for gen, policy in ((gen_locally, LOCAL), (gen_globally, GLOBAL)):
            g, iota, roles = gen(n)
            cert = validate_one_sink(g, iota, policy)
            assert cert.valid and cert.sink_seeking_ok, (gen.__name__, n, cert)
            assert cert.sink == roles[("x", 0)]


def check_local_lower_bound():
    for n in range(2, 9):
        g, iota, _ = gen_locally(n)
        seen = []
        report = solve(g, iota, LOCAL, on_step=lambda sigma, tau, xi: seen.append(xi))
        assert report.iterations >= 2**n, (n, report.iterations)
        assert report.w1 == frozenset(range(len(g)))
        assert all(a.strictly_below(b) for a, b in zip(seen, seen[1:]))


def check_global_lower_bound():
    for n in range(2, 6):
        g, iota, _ = gen_globally(n)
        report = solve(g, iota, GLOBAL)
        assert report.iterations >= 2**n, (n, report.iterations)


def linear_run_ok(g, iota):
    target = optimal_strategy(g, iota)
    report = solve(g, iota, PolicyKind.linear(target))
    sets = [agreement(target, step.sigma) for step in report.trace]
    assert all(a < b for a, b in zip(sets, sets[1:]))
    assert report.iterations <= len(g.nodes_of(P0))


def check_linear_policy():
    for n in range(1, 5):
        g, iota, _ = gen_locally(n)
        linear_run_ok(g, iota)
    for g, iota in random_games(3, 200, 7, 3):
        linear_run_ok(g, iota)


def check_oracle_equivalence():
    for g, iota in random_games(1, 500, 7, 3):
        best, w0, w1 = brute_force_parity(g)
        report = solve(g, iota, LOCAL)
        assert valuations_equal(g, report.valuation.values, best)
        assert (report.w0, report.w1) == (w0, w1)
    checked = 0
    for g, iota in random_games(2, 2000, 7, 3):
        if len(g.nodes_of(P0)) > 5:
            continue
        _, xi = best_response(g, iota)
        got = brute_force_response(g, global_policy(g, iota, xi))
        want = brute_force_response(g, brute_force_global(g, iota, xi))
        assert valuations_equal(g, got, want)
        checked += 1
        if checked == 200:
            break
    assert checked == 200


def check_counter_behaviour():
    for n in range(3, 7):
        g, iota, roles = gen_locally(n)
        trace = solve(g, iota, LOCAL).trace
        report = check_counter_trace([s.to_json() for s in trace], g, roles)
        assert report.ok, (n, report.violations[:3])
        assert len(report.values) >= 2 ** (n - 2)


def check_discounted_transfer():
    g, iota, roles = gen_locally(2)
    parity = solve(g, iota, LOCAL)
    puri = puri_solve(to_dpg(to_mpg(g)), iota)
    assert puri.iterations == parity.iterations
    assert [s["improving_switches"] for s in puri.trace] == [s.improving_switches for s in parity.trace]
    result = check_switch_correspondence(g, parity.trace, roles[("x", 0)])
    assert result["ok"], result["violations"][:3]


def check_mean_payoff_transfer():
    g, _, _ = gen_locally(1)
    w0, w1, _ = winning_sets_via_payoff(g)
    assert w0 == frozenset() and w1 == frozenset(range(len(g)))
    for g, iota in itertools.islice(random_games(4, 50, 6, 3), 50):
        w0, w1, _ = winning_sets_via_payoff(g, iota)
        _, b0, b1 = brute_force_parity(g)
        assert (w0, w1) == (b0, b1)


def check_stochastic_transfer():
    g, iota, _ = gen_locally(1)
    d = to_dpg(to_mpg(g))
    s = to_ssg(d)
    rng = seeded_rng(10)
    for _ in range(20):
        sigma, tau = random_strategy(g, rng), random_strategy(g, rng, P1)
        ssg_vals = ssg_evaluate(s, lift_strategy(s, sigma), lift_strategy(s, tau))
        assert affine_identity_holds(d, dpg_evaluate(d, sigma, tau), ssg_vals)
    rep = ssg_solve(s, lift_strategy(s, iota))
    edge = {a: e for e, a in s.edge_nodes.items()}
    sigma = {v: edge[a][1] for v, a in rep.sigma.items()}
    tau = {v: edge[a][1] for v, a in rep.tau.items()}
    assert affine_identity_holds(d, dpg_evaluate(d, sigma, tau), rep.values)


def check_dropped_edge():
    for n in range(3, 7):
        g, iota, roles = gen_locally(n, drop_top_edge=True)
        report = solve(g, iota, LOCAL)
        assert {roles[("d", n)], roles[("e", n)]} <= report.w0
        assert report.iterations >= 2 ** (n - 1)


CRITERIA = {
    1: check_generator_sizes,
    2: check_sink_certificates,
    3: check_local_lower_bound,
    4: check_global_lower_bound,
    5: check_linear_policy,
    6: check_oracle_equivalence,
    7: check_counter_behaviour,
    8: check_discounted_transfer,
    9: check_mean_payoff_transfer,
    10: check_stochastic_transfer,
    11: check_dropped_edge,
}


def test_criterion_1_generator_sizes():
    record(1, check_generator_sizes)


def test_criterion_2_sink_certificates():
    record(2, check_sink_certificates)


def test_criterion_3_local_lower_bound():
    record(3, check_local_lower_bound)


def test_criterion_4_global_lower_bound():
    record(4, check_global_lower_bound)


def test_criterion_5_linear_policy():
    record(5, check_linear_policy)


def test_criterion_6_oracle_equivalence():
    record(6, check_oracle_equivalence)


def test_criterion_7_counter_behaviour():
    record(7, check_counter_behaviour)


def test_criterion_8_discounted_transfer():
    record(8, check_discounted_transfer)


def test_criterion_9_mean_payoff_transfer():
    record(9, check_mean_payoff_transfer)


def test_criterion_10_stochastic_transfer():
    record(10, check_stochastic_transfer)


def test_criterion_11_dropped_edge():
    record(11, check_dropped_edge)


if __name__ == "__main__":
    for number, check in CRITERIA.items():
        try:
            record(number, check)
        except Exception as exc:
            print(f"criterion {number}: FAIL ({type(exc).__name__}: {exc})")
        else:
            print(f"criterion {number}: PASS")
    sys.exit(0 if all(RESULTS.values()) else 1)
