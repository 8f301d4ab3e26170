"""Text formats: PGSolver parity games, JSON strategies, payoff game listings."""

from __future__ import annotations

import json
import re
from typing import Mapping

from .core import GameError, Node, ParityGame
from .payoff import (AVG, DiscountedPayoffGame, MeanPayoffGame,
                     SimpleStochasticGame, fmt_rational)


class FormatError(GameError):
    pass


_HEADER = re.compile(r"^parity\s+(\d+)\s*;$")
_START = re.compile(r"^start\s+\d+\s*;$")
_NODE = re.compile(r'^(\d+)\s+(\d+)\s+(\d+)\s+(\d+(?:\s*,\s*\d+)*)(?:\s+"([^"]*)")?\s*;$')


def parse_pgsolver(text: str) -> ParityGame:
    """Parse a PGSolver game; the header line and node labels are optional."""
    max_id = None
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            if max_id is not None or rows:
                raise FormatError(f"line {lineno}: header must come first")
            max_id = int(m.group(1))
            continue
        if _START.match(line):
            continue
        m = _NODE.match(line)
        if not m:
            raise FormatError(f"line {lineno}: cannot parse {line!r}")
        v = int(m.group(1))
        if v in rows:
            raise FormatError(f"line {lineno}: node {v} defined twice")
        succs = tuple(int(s) for s in m.group(4).split(","))
        label = m.group(5) or None
        rows[v] = Node(v, int(m.group(3)), int(m.group(2)), succs, label)
    if not rows:
        raise FormatError("no nodes in game file")
    if max_id is not None and max_id != max(rows):
        raise FormatError(f"header announces max id {max_id}, file has {max(rows)}")
    if sorted(rows) != list(range(len(rows))):
        raise FormatError("node ids must be dense 0..n-1")
    try:
        return ParityGame(rows[v] for v in range(len(rows)))
    except GameError as exc:
        raise FormatError(str(exc)) from None


def write_pgsolver(g: ParityGame) -> str:
    lines = [f"parity {len(g) - 1};"]
    for nd in g.nodes:
        succs = ",".join(str(u) for u in nd.successors)
        lines.append(f'{nd.id} {nd.priority} {nd.owner} {succs} "{nd.label or ""}";')
    return "\n".join(lines) + "\n"


def dump_strategy(strategy: Mapping[int, int]) -> str:
    return json.dumps({str(v): u for v, u in sorted(strategy.items())}, indent=1) + "\n"


def parse_strategy(text: str) -> dict[int, int]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"strategy file is not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError("strategy file must hold a JSON object")
    out = {}
    for k, u in data.items():
        if not (isinstance(k, str) and k.isdigit()) or not isinstance(u, int) or isinstance(u, bool):
            raise FormatError(f"bad strategy entry {k!r}: {u!r}")
        out[int(k)] = u
    return out


def _payoff_lines(m: MeanPayoffGame) -> list[str]:
    return [f"{v} {m.owner[v]} {fmt_rational(m.reward[v])} {','.join(map(str, m.successors[v]))};"
            for v in range(len(m))]


def write_mpg(m: MeanPayoffGame) -> str:
    return "\n".join([f"mpg {len(m) - 1};"] + _payoff_lines(m)) + "\n"


def write_dpg(d: DiscountedPayoffGame) -> str:
    return "\n".join([f"dpg {len(d) - 1} {fmt_rational(d.beta)};"] + _payoff_lines(d.game)) + "\n"


def write_ssg(s: SimpleStochasticGame) -> str:
    lines = [f"ssg {len(s) - 1};"]
    for v, kind in enumerate(s.kind):
        succs = s.successors[v]
        if kind == AVG:
            body = ",".join(f"{u}:{fmt_rational(p)}" for u, p in zip(succs, s.prob[v]))
            lines.append(f"{v} {kind} {body};")
        elif succs:
            lines.append(f"{v} {kind} {','.join(map(str, succs))};")
        else:
            lines.append(f"{v} {kind};")
    return "\n".join(lines) + "\n"
