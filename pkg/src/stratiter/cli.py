"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 malformed input, 3 a check failed,
4 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from .core import P0, GameError, ParityGame, check_strategy
from .counterlab import bit_state, check_counter_trace, classify_phase
from .families import (GLOBAL_FAMILY, LOCAL_FAMILY, gen_globally, gen_locally,
                       identify_family)
from .fileio import (FormatError, dump_strategy, parse_pgsolver, parse_strategy,
                     write_dpg, write_mpg, write_pgsolver, write_ssg)
from .oracle import SearchSpaceTooLarge
from .payoff import PayoffIterationCap, to_dpg, to_mpg, to_ssg
from .policies import GLOBAL, LOCAL, PolicyKind
from .solver import (DEFAULT_ITERATION_CAP, IterationCapExceeded,
                     PolicyContractError, solve, validate_one_sink)

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_CHECK, EXIT_CAP = 0, 1, 2, 3, 4

CSV_COLUMNS = ["family", "policy", "n", "nodes", "edges", "iterations", "wall_ms"]
TIE_RULE = "keep current successor when it is among the best, else smallest id"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=1) + "\n")


def _policy(name: str) -> PolicyKind:
    return {"local": LOCAL, "global": GLOBAL, "linear": PolicyKind.linear()}[name]


def _generate(family: str, n: int, drop: bool = False):
    if family == LOCAL_FAMILY:
        return gen_locally(n, drop)
    return gen_globally(n)


def _load_game_and_init(args) -> tuple[ParityGame, dict]:
    g = parse_pgsolver(_read(args.game))
    if getattr(args, "init", None):
        iota = parse_strategy(_read(args.init))
    else:
        iota = {v: min(g.successors[v]) for v in g.nodes_of(P0)}
    try:
        check_strategy(g, iota, P0)
    except GameError as exc:
        raise FormatError(f"initial strategy: {exc}") from None
    return g, iota


def cmd_generate(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if args.drop_top_edge and args.family != LOCAL_FAMILY:
        raise UsageError("--drop-top-edge only applies to --family loc")
    g, iota, _ = _generate(args.family, args.n, args.drop_top_edge)
    _write(args.out, write_pgsolver(g))
    if args.init_out:
        _write(args.init_out, dump_strategy(iota))
    return EXIT_OK


def _trace_json(g, steps, known):
    out = []
    for step in steps:
        item = step.to_json()
        if known is not None:
            roles, _ = known
            item["b_bits"] = list(bit_state(g, roles, step.sigma).bits)
            if roles.family == LOCAL_FAMILY:
                rep = classify_phase(g, roles, step.sigma)
                item["phase"] = rep.phase or "unclassified"
        out.append(item)
    return out


def cmd_solve(args) -> int:
    g, iota = _load_game_and_init(args)
    report = solve(g, iota, _policy(args.policy), max_iterations=args.max_iterations,
                   full_trace=args.full_trace)
    summary = report.summary()
    summary.update(nodes=len(g), edges=g.edge_count, p0_nodes=len(g.nodes_of(P0)), tie_rule=TIE_RULE)
    if args.trace_out:
        _write(args.trace_out, json.dumps(_trace_json(g, report.trace, identify_family(g))) + "\n")
    _emit(summary)
    return EXIT_OK


def cmd_validate(args) -> int:
    g, iota = _load_game_and_init(args)
    cert = validate_one_sink(g, iota, _policy(args.policy))
    _emit(cert.to_json())
    return EXIT_OK if cert.valid and cert.sink_seeking_ok else EXIT_CHECK


def cmd_trace_check(args) -> int:
    g = parse_pgsolver(_read(args.game))
    try:
        trace = json.loads(_read(args.trace))
    except json.JSONDecodeError as exc:
        raise FormatError(f"trace file is not JSON: {exc}") from None
    if not isinstance(trace, list) or not all(isinstance(s, dict) and "sigma" in s for s in trace):
        raise FormatError("trace must be a JSON array of steps with a sigma entry")
    known = identify_family(g)
    if known is None:
        raise UsageError("trace-check needs a game generated by this tool (loc or glo family)")
    roles, _ = known
    report = check_counter_trace(trace, g, roles)
    _emit(report.to_json())
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_bench(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min:
        raise UsageError("need 1 <= --n-min <= --n-max")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        g, iota, _ = _generate(args.family, n)
        start = time.perf_counter()
        report = solve(g, iota, _policy(args.policy), max_iterations=args.max_iterations)
        wall = (time.perf_counter() - start) * 1000
        rows.append({"family": args.family, "policy": args.policy, "n": n, "nodes": len(g),
                     "edges": g.edge_count, "iterations": report.iterations,
                     "wall_ms": f"{wall:.1f}"})
    fresh = args.csv == "-" or not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
    fh = sys.stdout if args.csv == "-" else open(args.csv, "a", newline="", encoding="utf-8")
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if fresh:
            writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_reduce(args) -> int:
    g = parse_pgsolver(_read(args.game))
    m = to_mpg(g)
    if args.to == "mpg":
        text = write_mpg(m)
    elif args.to == "dpg":
        text = write_dpg(to_dpg(m))
    else:
        text = write_ssg(to_ssg(to_dpg(m)))
    _write(args.out, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stratiter", description="Strategy iteration for parity games and payoff games.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a lower-bound family game and its initial strategy")
    gen.add_argument("--family", choices=[LOCAL_FAMILY, GLOBAL_FAMILY], required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--drop-top-edge", action="store_true", help="leave out e_n -> h_n (loc only)")
    gen.add_argument("--out", default="-")
    gen.add_argument("--init-out")
    gen.set_defaults(func=cmd_generate)

    def game_args(sp):
        sp.add_argument("--game", required=True)
        sp.add_argument("--init", help="JSON strategy; defaults to the smallest successor everywhere")

    sol = sub.add_parser("solve", help="run strategy iteration")
    game_args(sol)
    sol.add_argument("--policy", choices=["local", "global", "linear"], default="local")
    sol.add_argument("--trace-out")
    sol.add_argument("--full-trace", action="store_true")
    sol.add_argument("--max-iterations", type=int, default=DEFAULT_ITERATION_CAP)
    sol.set_defaults(func=cmd_solve)

    val = sub.add_parser("validate", help="check the 1-sink conditions")
    game_args(val)
    val.add_argument("--policy", choices=["local", "global", "linear"], default="local")
    val.set_defaults(func=cmd_validate)

    tc = sub.add_parser("trace-check", help="check a solve trace against the binary counter")
    tc.add_argument("--game", required=True)
    tc.add_argument("--trace", required=True)
    tc.set_defaults(func=cmd_trace_check)

    bench = sub.add_parser("bench", help="iteration counts per family size as CSV")
    bench.add_argument("--family", choices=[LOCAL_FAMILY, GLOBAL_FAMILY], required=True)
    bench.add_argument("--policy", choices=["local", "global", "linear"], default="local")
    bench.add_argument("--n-min", type=int, default=1)
    bench.add_argument("--n-max", type=int, required=True)
    bench.add_argument("--csv", default="-")
    bench.add_argument("--max-iterations", type=int, default=DEFAULT_ITERATION_CAP)
    bench.set_defaults(func=cmd_bench)

    red = sub.add_parser("reduce", help="write the induced payoff game")
    red.add_argument("--game", required=True)
    red.add_argument("--to", choices=["mpg", "dpg", "ssg"], required=True)
    red.add_argument("--out", default="-")
    red.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stratiter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"stratiter: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (IterationCapExceeded, PayoffIterationCap, SearchSpaceTooLarge) as exc:
        print(f"stratiter: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PolicyContractError as exc:
        print(f"stratiter: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except OSError as exc:
        print(f"stratiter: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
