"""Splitting bisimulation via partition refinement on expanded systems.

Both terms are explored into one transition system and expanded per
valuation.  The initial partition separates :data:`~ctacp.sos.TICK`
from everything else and groups the remaining states by signal vector;
refinement then splits blocks by the set of ``((valuation, action),
target block)`` pairs until nothing changes.  A guard only has to be
satisfied (not false) at a valuation, so ``(P \\/ Q) :-> a`` is matched
by ``P :-> a + Q :-> a`` even where one disjunct is true and the other
both.

When the terms are not equivalent the refinement history yields a
distinguishing sequence: at each step the attacker picks a move that the
other side cannot match into the same block of the previous round, the
defender's reply (if any) is recorded, and the game ends with a move
that has no reply at all or with two states whose signals differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernels
from .logic import TruthValue
from .sos import TICK, ExpandedLTS, LTS, expand_valuations, explore
from .terms import ProcTerm, Spec


@dataclass
class Partition:
    """Block index per state, plus the block arrays of every round."""

    blocks: list
    history: list = field(default_factory=list)

    @property
    def n_blocks(self) -> int:
        return len(set(self.blocks))

    def same(self, s: int, t: int) -> bool:
        return self.blocks[s] == self.blocks[t]

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for s, b in enumerate(self.blocks):
            out.setdefault(b, []).append(s)
        return list(out.values())


def initial_blocks(exp: ExpandedLTS) -> list[int]:
    ids: dict = {}
    out = []
    for s, vec in enumerate(exp.signal_vectors):
        k = (s == 0, vec)
        out.append(ids.setdefault(k, len(ids)))
    return out


def refine(exp: ExpandedLTS) -> Partition:
    block = initial_blocks(exp)
    history = [block]
    n = len(set(block))
    while True:
        nxt = kernels.refine_once(exp.n_states, block, exp.offsets, exp.labels, exp.targets)
        m = max(nxt) + 1 if nxt else 0
        if m == n:
            return Partition(block, history)
        block, n = list(nxt), m
        history.append(block)


@dataclass
class WitnessStep:
    side: str  # "left" or "right": who makes the move
    valuation: int
    action: str
    left: int | None  # state reached on the left (None: no reply)
    right: int | None

    def as_dict(self, exp: ExpandedLTS) -> dict:
        val = exp.lts.spec.signature.valuation(self.valuation)
        return {
            "side": self.side,
            "valuation": {k: str(TruthValue(v)) for k, v in val.items()},
            "action": self.action,
            "left": self.left,
            "right": self.right,
        }


@dataclass
class BisimReport:
    equivalent: bool
    witness: list = field(default_factory=list)
    reason: str = ""
    expanded: ExpandedLTS | None = None
    left: int = 0
    right: int = 0

    def __bool__(self):
        return self.equivalent

    def render(self) -> str:
        lines = [f"bisimilar: {'yes' if self.equivalent else 'no'}"]
        if not self.equivalent and self.expanded is not None:
            spec = self.expanded.lts.spec
            for i, step in enumerate(self.witness, 1):
                val = spec.signature.valuation(step.valuation)
                shown = ", ".join(f"{k}={TruthValue(v)}" for k, v in val.items()) or "-"
                lines.append(
                    f"  {i}. {step.side} does {step.action} at [{shown}] -> "
                    f"left {_state_text(self.expanded, step.left)}, right {_state_text(self.expanded, step.right)}"
                )
            lines.append(f"  end: {self.reason}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "reason": self.reason,
            "witness": [s.as_dict(self.expanded) for s in self.witness] if self.expanded else [],
        }


def _state_text(exp: ExpandedLTS, s) -> str:
    if s is None:
        return "(no reply)"
    t = exp.lts.terms[s]
    return "TICK" if t is TICK else f"s{s}"


def _moves(exp: ExpandedLTS, s: int) -> dict:
    out: dict[int, list[int]] = {}
    lo, hi = exp.offsets[s], exp.offsets[s + 1]
    for c, t in zip(exp.labels[lo:hi], exp.targets[lo:hi]):
        out.setdefault(c, []).append(t)
    return out


def _end_reason(exp: ExpandedLTS, s: int, t: int) -> str:
    if (s == 0) != (t == 0):
        return "one side has terminated and the other has not"
    return "signals differ"


def distinguishing_sequence(exp: ExpandedLTS, part: Partition, s: int, t: int):
    """Witness that states ``s`` and ``t`` are not bisimilar."""
    hist = part.history
    steps: list[WitnessStep] = []
    while True:
        r = next(i for i, b in enumerate(hist) if b[s] != b[t])
        if r == 0:
            return steps, _end_reason(exp, s, t)
        prev = hist[r - 1]
        ms, mt = _moves(exp, s), _moves(exp, t)
        found = None
        for side, mine, other in (("left", ms, mt), ("right", mt, ms)):
            for code in sorted(mine):
                replies = other.get(code, [])
                for dest in mine[code]:
                    if all(prev[dest] != prev[u] for u in replies):
                        found = (side, code, dest, replies)
                        break
                if found:
                    break
            if found:
                break
        side, code, dest, replies = found
        v, a = exp.label(code)
        reply = replies[0] if replies else None
        l, rr = (dest, reply) if side == "left" else (reply, dest)
        steps.append(WitnessStep(side, v, a, l, rr))
        if reply is None:
            return steps, f"the {'right' if side == 'left' else 'left'} side cannot do {a} at this valuation"
        s, t = l, rr


def replay_witness(report: BisimReport) -> bool:
    """Check a negative report's witness against the expanded system."""
    exp = report.expanded
    s, t = report.left, report.right
    for step in report.witness:
        code_ok = False
        for side_state, reached in ((s, step.left), (t, step.right)):
            if reached is None:
                continue
            if reached not in exp.successors(side_state, step.valuation, step.action):
                return False
            code_ok = True
        if not code_ok:
            return False
        if step.left is None or step.right is None:
            lonely = s if step.left is None else t
            return not exp.successors(lonely, step.valuation, step.action)
        s, t = step.left, step.right
    return (s == 0) != (t == 0) or exp.signal_vectors[s] != exp.signal_vectors[t]


def bisimilar(
    p: ProcTerm,
    q: ProcTerm,
    spec: Spec,
    budget: int | None = None,
    key: str = "syntactic",
    cap: int | None = None,
) -> BisimReport:
    """Decide ``p ≈ q``; states are identified syntactically by default."""
    lts = explore([p, q], spec, budget=budget, key=key)
    exp = expand_valuations(lts, cap)
    part = refine(exp)
    s, t = lts.roots
    if part.same(s, t):
        return BisimReport(True, expanded=exp, left=s, right=t)
    steps, reason = distinguishing_sequence(exp, part, s, t)
    return BisimReport(False, steps, reason, exp, s, t)


def bisim_classes(
    terms: list[ProcTerm],
    spec: Spec,
    budget: int | None = None,
    key: str = "syntactic",
    cap: int | None = None,
) -> list[int]:
    """Bisimulation class id for each term (one shared exploration)."""
    lts: LTS = explore(terms, spec, budget=budget, key=key)
    part = refine(expand_valuations(lts, cap))
    return [part.blocks[r] for r in lts.roots]
