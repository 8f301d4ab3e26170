"""Decoding the binary counter hidden in strategies on the lower-bound families.

Bits are stored least significant first: ``bits[0]`` is bit 1 of the
counter.  Indices reported for root and selector decisions use the
convention ``i`` for "gate i" and ``n + 1`` for the sink ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import GameError, ParityGame
from .families import GLOBAL_FAMILY, LOCAL_FAMILY, RoleMap

UNCLASSIFIED = 0


@dataclass(frozen=True)
class BitState:
    """Cycle states ``bits`` and access states ``access``, least significant first.

    On G_n both vectors are 0/1.  On H_n ``bits`` counts the inward-pointing
    cycle nodes of each stubborn cycle (0..3) and ``access`` is 0, 1 or 2.
    """

    bits: tuple
    access: tuple
    stubborn: bool = False

    @property
    def n(self) -> int:
        return len(self.bits)

    def closed(self) -> tuple:
        """Closed-cycle vector as 0/1 (a stubborn cycle is closed at 3)."""
        full = 3 if self.stubborn else 1
        return tuple(int(b == full) for b in self.bits)

    def value(self, width: int | None = None) -> int:
        bits = self.closed()
        if width is not None:
            bits = bits[:width]
        return sum(b << i for i, b in enumerate(bits))


def bits_of(value: int, n: int) -> tuple:
    return tuple((value >> i) & 1 for i in range(n))


def mu(bits: Sequence[int]) -> int:
    """Least unset bit (1-based), ``n + 1`` if there is none."""
    return next((i + 1 for i, b in enumerate(bits) if not b), len(bits) + 1)


def nu(bits: Sequence[int]) -> int:
    """Least set bit (1-based), ``n + 1`` if there is none."""
    return next((i + 1 for i, b in enumerate(bits) if b), len(bits) + 1)


def _check_roles(g: ParityGame, roles: RoleMap) -> None:
    if not isinstance(roles, RoleMap) or roles.family not in (LOCAL_FAMILY, GLOBAL_FAMILY):
        raise GameError("role map does not describe a lower-bound family game")
    if len(roles) != len(g):
        raise GameError("role map and game differ in size")


def bit_state(g: ParityGame, roles: RoleMap, sigma: Mapping[int, int]) -> BitState:
    _check_roles(g, roles)
    ids = roles.ids
    bits, access = [], []
    for i in range(1, roles.n + 1):
        if roles.family == LOCAL_FAMILY:
            bits.append(int(sigma[ids[("d", i)]] == ids[("e", i)]))
            access.append(int(sigma[ids[("g", i)]] == ids[("f", i)]))
        else:
            inward = (sigma[ids[("d1", i)]] == ids[("d2", i)],
                      sigma[ids[("d2", i)]] == ids[("d3", i)],
                      sigma[ids[("d3", i)]] == ids[("e", i)])
            bits.append(sum(inward))
            if sigma[ids[("g", i)]] == ids[("y", i)]:
                access.append(2)
            elif sigma[ids[("y", i)]] == ids[("k", i)]:
                access.append(0)
            else:
                access.append(1)
    return BitState(tuple(bits), tuple(access), roles.family == GLOBAL_FAMILY)


@dataclass(frozen=True)
class DecelerationState:
    root: str
    index: int


def deceleration_state(g: ParityGame, roles: RoleMap, sigma: Mapping[int, int]) -> DecelerationState | None:
    """The lane state ``(root, index)``, or ``None`` when not well-behaved.

    On H_n the node c belongs to player 1 and always leads to r, so the root
    is read off the lane alone.
    """
    _check_roles(g, roles)
    ids = roles.ids
    m = roles.lane_length
    t = [None] + [sigma[ids[("t", i)]] for i in range(1, m + 1)]
    c = ids[("c", 0)]
    names = {ids[("s", 0)]: "s", ids[("r", 0)]: "r"}
    found = []
    for root_id, root in names.items():
        if roles.family == LOCAL_FAMILY and sigma[c] != root_id:
            continue
        for j in range(1, m + 2):
            if j > 1 and t[1] != c:
                break
            if j > 2 and t[j - 1] != ids[("t", j - 2)]:
                break
            if all(t[i] == root_id for i in range(j, m + 1)):
                found.append(DecelerationState(root, j))
    return found[0] if len(found) == 1 else None


def _gate_index(roles: RoleMap, target: int, kind: str) -> int:
    """Decode a decision to ``kind_i`` as ``i`` and a move to x as ``n + 1``."""
    kind_, i = roles.role(target)
    if kind_ == "x":
        return roles.n + 1
    if kind_ == kind:
        return i
    return -1


def _lane_index(roles: RoleMap, target: int):
    kind, i = roles.role(target)
    return i if kind == "a" else kind


@dataclass
class PhaseReport:
    phase: int
    b: tuple | None
    state: BitState
    deceleration: DecelerationState | None
    root_targets: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)

    @property
    def classified(self) -> bool:
        return self.phase != UNCLASSIFIED

    def to_json(self) -> dict:
        return {
            "phase": self.phase or "unclassified",
            "b": list(self.b) if self.b is not None else None,
            "bits": list(self.state.bits),
            "access": list(self.state.access),
            "deceleration": [self.deceleration.root, self.deceleration.index] if self.deceleration else None,
            "roots": self.root_targets,
        }


def _selectors_ok(bits, ks) -> bool:
    n = len(bits)
    for i in range(1, n + 1):
        want = min([j for j in range(i + 1, n + 1) if bits[j - 1]] + [n + 1])
        if ks[i] != want:
            return False
    return True


def _phase_conditions(phase: int, b: tuple, st: BitState, dec, s_idx, r_idx, ks, d_dec) -> list[str]:
    """Names of the violated conditions of the given phase for counter value ``b``."""
    n = len(b)
    bad = []
    mb, nb = mu(b), nu(b)
    set_mu = tuple(1 if i + 1 == mb else x for i, x in enumerate(b))
    if phase == 1:
        if not (b == st.bits == st.access):
            bad.append("bits")
        if dec.root != "r":
            bad.append("root")
        if not s_idx == r_idx == nb:
            bad.append("roots")
        if not _selectors_ok(b, ks):
            bad.append("selectors")
        if dec.index > 2 * mb + 2:
            bad.append("index")
        if any(not b[j - 1] and d_dec[j] == dec.index - 1 for j in range(1, n + 1)):
            bad.append("open")
    elif phase == 2:
        if not (set_mu == st.bits and b == st.access):
            bad.append("bits")
        if dec.root != "r":
            bad.append("root")
        if not s_idx == r_idx == nb:
            bad.append("roots")
        if not _selectors_ok(b, ks):
            bad.append("selectors")
        if dec.index > 2 * mb + 3:
            bad.append("index")
        if any(j > mb and not b[j - 1] and d_dec[j] == dec.index - 1 for j in range(1, n + 1)):
            bad.append("open")
    elif phase == 3:
        if not (set_mu == st.bits == st.access):
            bad.append("bits")
        if dec.root != "r":
            bad.append("root")
        if not (s_idx == mb and r_idx == nb):
            bad.append("roots")
        if not _selectors_ok(b, ks):
            bad.append("selectors")
        if any(j > mb and not b[j - 1] and d_dec[j] == "s" for j in range(1, n + 1)):
            bad.append("open")
    elif phase == 4:
        value = sum(x << i for i, x in enumerate(b))
        inc = bits_of(value + 1, n)
        if not (inc == st.bits and set_mu == st.access):
            bad.append("bits")
        # A freshly reset lane sits at its first index.
        if dec.root != "s" or dec.index != 1:
            bad.append("root")
        if not s_idx == r_idx == mb:
            bad.append("roots")
        if not _selectors_ok(inc, ks):
            bad.append("selectors")
        if any(not inc[j - 1] and d_dec[j] != "s" for j in range(1, n + 1)):
            bad.append("open")
    return bad


def _candidate(phase: int, st: BitState, s_idx: int) -> tuple | None:
    """The counter value a strategy of the given phase would encode."""
    n = st.n
    if phase == 1:
        return st.bits
    if phase == 2:
        return st.access
    if phase in (3, 4):
        base = st.bits if phase == 3 else st.access
        if not 1 <= s_idx <= n or not base[s_idx - 1]:
            return None
        return tuple(0 if i + 1 == s_idx else x for i, x in enumerate(base))
    return None


def classify_phase(g: ParityGame, roles: RoleMap, sigma: Mapping[int, int]) -> PhaseReport:
    """Match ``sigma`` against the four phase definitions of the G_n counter."""
    _check_roles(g, roles)
    if roles.family != LOCAL_FAMILY:
        raise GameError("phases are only defined for the locally optimizing family")
    ids = roles.ids
    n = roles.n
    st = bit_state(g, roles, sigma)
    dec = deceleration_state(g, roles, sigma)
    s_idx = _gate_index(roles, sigma[ids[("s", 0)]], "f")
    r_idx = _gate_index(roles, sigma[ids[("r", 0)]], "g")
    ks = {i: _gate_index(roles, sigma[ids[("k", i)]], "g") for i in range(1, n + 1)}
    d_dec = {i: _lane_index(roles, sigma[ids[("d", i)]]) for i in range(1, n + 1)}
    targets = {"s": s_idx, "r": r_idx, "k": [ks[i] for i in range(1, n + 1)]}
    report = PhaseReport(UNCLASSIFIED, None, st, dec, targets)
    if dec is None:
        report.failed["lane"] = ["not well-behaved"]
        return report
    matches = []
    for phase in (1, 2, 3, 4):
        b = _candidate(phase, st, s_idx)
        if b is None or any(x not in (0, 1) for x in b):
            report.failed[phase] = ["candidate"]
            continue
        if all(b):
            report.failed[phase] = ["saturated"]
            continue
        bad = _phase_conditions(phase, b, st, dec, s_idx, r_idx, ks, d_dec)
        if bad:
            report.failed[phase] = bad
        else:
            matches.append((phase, b))
    if len(matches) == 1:
        report.phase, report.b = matches[0]
    elif matches:
        report.failed["ambiguous"] = [p for p, _ in matches]
    return report


ALLOWED_TRANSITIONS = frozenset({(1, 1), (1, 2), (2, 3), (3, 4), (4, 1)})


@dataclass
class CounterReport:
    family: str
    n: int
    iterations: int
    phases: list
    values: list
    violations: list
    left_window: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def increments(self) -> int:
        """Completed increments, counting the one that carried into the high bits."""
        return max(0, len(self.values) - 1) + int(self.left_window)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "ok": self.ok,
            "iterations": self.iterations,
            "counter_values": self.values,
            "distinct_values": len(self.values),
            "increments": self.increments,
            "left_low_bits": self.left_window,
            "phases": self.phases,
            "violations": self.violations,
        }


def _sigma_of(step) -> dict:
    sigma = step.sigma if hasattr(step, "sigma") else step["sigma"]
    return {int(v): u for v, u in sigma.items()}


def check_counter_trace(trace: Sequence, g: ParityGame, roles: RoleMap, family: str | None = None) -> CounterReport:
    """Check a solve trace against the binary-counter behaviour of its family.

    On G_n every strategy must classify into a phase for as long as the two
    highest counter bits are zero.  Phase changes must follow the cycle
    1 -> (1 | 2) -> 3 -> 4 -> 1, and the counter values seen in phase 1 must
    grow by exactly one and cover all ``2**(n-2)`` values of the low bits.
    Once a high bit is set the checker stops, since the counter then runs
    outside the range the construction is analysed for.

    On H_n only the counter is checked: at strategies where every gate is
    in a resting state (open and skipped, or closed and fully accessed) the
    closed-cycle vector is read as a number, and consecutive distinct
    values must grow by one.
    """
    _check_roles(g, roles)
    family = family or roles.family
    if family != roles.family:
        raise GameError(f"trace family {family!r} does not match the role map")
    n = roles.n
    low = max(n - 2, 0)
    sigmas = [_sigma_of(step) for step in trace]
    phases, values, violations = [], [], []
    left_window = False

    def record(value, where):
        if values and value != values[-1]:
            if value != values[-1] + 1:
                violations.append({"iteration": where, "error": f"counter moved from {values[-1]} to {value}"})
        if not values or value != values[-1]:
            values.append(value)

    if family == LOCAL_FAMILY:
        prev = None
        for it, sigma in enumerate(sigmas):
            rep = classify_phase(g, roles, sigma)
            st = rep.state
            if any(st.bits[low:]) or any(st.access[low:]):
                left_window = True
                break
            phases.append(rep.phase or "unclassified")
            if not rep.classified:
                violations.append({"iteration": it, "error": "unclassified strategy",
                                   "failed": {str(k): v for k, v in rep.failed.items()}})
                prev = None
                continue
            if prev is not None and (prev, rep.phase) not in ALLOWED_TRANSITIONS:
                violations.append({"iteration": it, "error": f"phase {prev} followed by phase {rep.phase}"})
            if rep.phase == 1:
                record(sum(x << i for i, x in enumerate(rep.b[:low])), it)
            prev = rep.phase
        if len(values) < 2**low:
            violations.append({"iteration": len(phases),
                               "error": f"only {len(values)} counter values before the high bits moved, need {2**low}"})
    else:
        for it, sigma in enumerate(sigmas):
            st = bit_state(g, roles, sigma)
            resting = all((b, a) in ((1, 0), (3, 2)) for b, a in zip(st.bits, st.access))
            if not resting:
                continue
            record(sum(int(b == 3) << i for i, b in enumerate(st.bits)), it)
        if len(values) < 2**low:
            violations.append({"iteration": len(sigmas),
                               "error": f"only {len(values)} counter values, need {2**low}"})
    return CounterReport(family, n, max(0, len(sigmas) - 1), phases, values, violations, left_window)
