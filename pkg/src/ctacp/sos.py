"""Symbolic transitions, reachable transition systems and their expansion.

A transition is ``(guard, action, target)`` where ``target`` is a term or
:data:`TICK` (successful termination).  Rules are applied directly to
process terms; side conditions "φ ∉ [⊥]" are decided on truth vectors.

:func:`build_lts` explores the reachable states breadth first.  States
are identified either by the canonical key of their reduced basic form
(``key="canonical"``, the default) or by syntactic term equality
(``key="syntactic"``).  :func:`expand_valuations` replaces every
symbolic edge by one edge per valuation that satisfies both the guard
and the source state's signal.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

from . import kernels
from .errors import BudgetError, CapacityError, CtacpError
from .logic import Prop, format_formula
from .normalize import canonical_key, signal_prop
from .terms import (
    DELTA,
    Act,
    Alt,
    CommMerge,
    Delta,
    Emit,
    Encap,
    Guard,
    LeftMerge,
    Nex,
    Par,
    ProcTerm,
    RecConst,
    Seq,
    Spec,
    State,
    Var,
)

DEFAULT_STATE_BUDGET = 1000
DEFAULT_EXPANSION_CAP = 5_000_000


def state_budget() -> int:
    return int(os.environ.get("CTACP_STATE_BUDGET", DEFAULT_STATE_BUDGET))


def expansion_cap() -> int:
    return int(os.environ.get("CTACP_EXPANSION_CAP", DEFAULT_EXPANSION_CAP))


class _Tick:
    __slots__ = ()

    def __repr__(self):
        return "TICK"


TICK = _Tick()

Target = Union[ProcTerm, _Tick]


class Transition(NamedTuple):
    guard: Prop
    action: str
    target: Target


# ---------------------------------------------------------------- rules


def step_transitions(p: ProcTerm, spec: Spec) -> tuple[Transition, ...]:
    """All transitions of ``p`` derivable by the transition rules."""
    memo = spec.memo("transitions")
    r = memo.get(p)
    if r is None:
        r = memo[p] = tuple(_derive(p, spec))
    return r


def _sig_ok(t: ProcTerm, spec: Spec) -> bool:
    return not signal_prop(t, spec).is_false


def _derive(p: ProcTerm, spec: Spec) -> list[Transition]:
    if isinstance(p, (Delta, Nex)):
        return []
    if isinstance(p, Act):
        return [Transition(spec.top, p.name, TICK)]
    if isinstance(p, Alt):
        if not _sig_ok(p, spec):
            return []
        return list(step_transitions(p.left, spec)) + list(step_transitions(p.right, spec))
    if isinstance(p, Seq):
        out = []
        right_ok = None
        for g, a, t in step_transitions(p.left, spec):
            if t is TICK:
                if right_ok is None:
                    right_ok = _sig_ok(p.right, spec)
                if right_ok:
                    out.append(Transition(g, a, p.right))
            else:
                out.append(Transition(g, a, Seq(t, p.right)))
        return out
    if isinstance(p, Guard):
        psi = spec.prop(p.cond)
        out = []
        for g, a, t in step_transitions(p.body, spec):
            h = g & psi
            if not h.is_false:
                out.append(Transition(h, a, t))
        return out
    if isinstance(p, Emit):
        if not _sig_ok(p, spec):
            return []
        return list(step_transitions(p.body, spec))
    if isinstance(p, (Par, LeftMerge, CommMerge)):
        return _derive_merge(p, spec)
    if isinstance(p, Encap):
        out = []
        for g, a, t in step_transitions(p.body, spec):
            if a not in p.blocked:
                out.append(Transition(g, a, t if t is TICK else Encap(p.blocked, t)))
        return out
    if isinstance(p, State):
        if not _sig_ok(p, spec):
            return []
        table = spec.state_table(p.state)
        out = []
        for g, a, t in step_transitions(p.body, spec):
            b = table.act(a, p.state)
            if b == DELTA:
                continue
            if t is TICK:
                out.append(Transition(g, b, TICK))
            else:
                t2 = State(table.eff(a, p.state), t)
                if _sig_ok(t2, spec):
                    out.append(Transition(g, b, t2))
        return out
    if isinstance(p, RecConst):
        return list(step_transitions(spec.unfold(p), spec))
    if isinstance(p, Var):
        raise CtacpError(f"open term: free variable {p.name!r}")
    raise TypeError(f"not a process term: {p!r}")


def _par_target(t: Target, u: Target, spec: Spec):
    """Target of a move in a merge, or None when its signal is false."""
    if t is TICK and u is TICK:
        return TICK
    if t is TICK:
        return u if _sig_ok(u, spec) else None
    if u is TICK:
        return t if _sig_ok(t, spec) else None
    target = Par(t, u)
    return target if _sig_ok(target, spec) else None


def _derive_merge(p, spec: Spec) -> list[Transition]:
    if not _sig_ok(p, spec):
        return []
    x, y = p.left, p.right
    tx = step_transitions(x, spec)
    ty = step_transitions(y, spec)
    out = []
    if not isinstance(p, CommMerge):
        for g, a, t in tx:
            target = _par_target(t, y, spec)
            if target is not None:
                out.append(Transition(g, a, target))
    if isinstance(p, Par):
        for g, a, u in ty:
            target = _par_target(x, u, spec)
            if target is not None:
                out.append(Transition(g, a, target))
    if not isinstance(p, LeftMerge):
        gamma = spec.comm
        for g, a, t in tx:
            for h, b, u in ty:
                c = gamma(a, b)
                if c == DELTA:
                    continue
                gh = g & h
                if gh.is_false:
                    continue
                target = _par_target(t, u, spec)
                if target is not None:
                    out.append(Transition(gh, c, target))
    return out


# ------------------------------------------------------------------ LTS


@dataclass
class LTS:
    """Reachable symbolic transition system.

    State 0 is :data:`TICK` (signal ⊤, no outgoing transitions); the
    other states are numbered in breadth-first discovery order.
    ``terms[i]`` is the representative term of state ``i``.
    """

    spec: Spec
    terms: list
    signals: list
    transitions: list  # (source, guard, action, target)
    roots: list
    keys: list = field(default_factory=list)

    @property
    def initial(self) -> int:
        return self.roots[0]

    @property
    def n_states(self) -> int:
        return len(self.terms)

    def outgoing(self, s: int):
        return [t for t in self.transitions if t[0] == s]


def state_key(t: ProcTerm, spec: Spec, key: str):
    if key == "canonical":
        return canonical_key(t, spec)
    if key == "syntactic":
        return t
    raise ValueError(f"unknown state identity {key!r}")


def explore(
    roots: Iterable[ProcTerm], spec: Spec, budget: int | None = None, key: str = "canonical"
) -> LTS:
    """Build one transition system containing every term in ``roots``."""
    budget = state_budget() if budget is None else budget
    terms: list = [TICK]
    signals: list = [spec.top]
    keys: list = [("tick",)]
    index: dict = {}
    transitions: list = []
    queue: deque[int] = deque()

    def add(t: ProcTerm) -> int:
        k = state_key(t, spec, key)
        i = index.get(k)
        if i is None:
            if len(terms) - 1 >= budget:
                raise BudgetError(f"state budget of {budget} exhausted; unexplored term: {t}", frontier=t)
            i = index[k] = len(terms)
            terms.append(t)
            signals.append(signal_prop(t, spec))
            keys.append(k)
            queue.append(i)
        return i

    root_ids = [add(t) for t in roots]
    while queue:
        s = queue.popleft()
        seen = set()
        for g, a, t in step_transitions(terms[s], spec):
            d = 0 if t is TICK else add(t)
            edge = (g.vec, a, d)
            if edge in seen:
                continue
            seen.add(edge)
            transitions.append((s, g, a, d))
    return LTS(spec, terms, signals, transitions, root_ids, keys)


def build_lts(p: ProcTerm, spec: Spec, budget: int | None = None, key: str = "canonical") -> LTS:
    return explore([p], spec, budget=budget, key=key)


# ------------------------------------------------------------ expansion


@dataclass
class ExpandedLTS:
    """Per-valuation expansion in compressed adjacency form.

    Edge labels are ``valuation * len(actions) + action_index``; the edges
    of state ``s`` are ``labels[offsets[s]:offsets[s+1]]`` with matching
    ``targets``.  ``signal_vectors[s]`` labels state ``s``.
    """

    lts: LTS
    actions: list
    n_valuations: int
    signal_vectors: list
    offsets: list
    labels: list
    targets: list

    @property
    def n_states(self) -> int:
        return len(self.signal_vectors)

    def label(self, code: int) -> tuple[int, str]:
        v, a = divmod(code, len(self.actions))
        return v, self.actions[a]

    def edges(self, s: int):
        lo, hi = self.offsets[s], self.offsets[s + 1]
        return [(self.label(c), t) for c, t in zip(self.labels[lo:hi], self.targets[lo:hi])]

    def successors(self, s: int, valuation: int, action: str) -> list[int]:
        return [t for (v, a), t in self.edges(s) if v == valuation and a == action]


def expand_valuations(lts: LTS, cap: int | None = None) -> ExpandedLTS:
    spec = lts.spec
    cap = expansion_cap() if cap is None else cap
    size = spec.signature.size
    if lts.n_states * size > cap:
        raise CapacityError(
            f"expansion of {lts.n_states} states over {size} valuations exceeds the limit of {cap}"
        )
    actions = sorted({a for _, _, a, _ in lts.transitions})
    aidx = {a: i for i, a in enumerate(actions)}
    n_act = max(len(actions), 1)
    per_state: list[list] = [[] for _ in range(lts.n_states)]
    for s, g, a, d in lts.transitions:
        base = aidx[a]
        for v in kernels.sat_indices(g.vec, lts.signals[s].vec):
            per_state[s].append((v * n_act + base, d))
    offsets, labels, targets = [0], [], []
    for edges in per_state:
        edges = sorted(set(edges))
        labels.extend(c for c, _ in edges)
        targets.extend(d for _, d in edges)
        offsets.append(len(labels))
    return ExpandedLTS(
        lts,
        actions if actions else [],
        size,
        [sig.vec for sig in lts.signals],
        offsets,
        labels,
        targets,
    )


# -------------------------------------------------------------- export


def _term_text(t) -> str:
    if t is TICK:
        return "TICK"
    from .syntax import pretty

    return pretty(t)


def lts_to_json(lts: LTS) -> str:
    """JSON export: states with term and signal, transitions with guards."""
    doc = {
        "states": [
            {
                "id": i,
                "term": _term_text(t),
                "signal": format_formula(sig.formula),
                "signal_vector": "".join("ftb"[x] for x in sig.vec),
            }
            for i, (t, sig) in enumerate(zip(lts.terms, lts.signals))
        ],
        "transitions": [
            {"from": s, "guard": format_formula(g.formula), "action": a, "to": d}
            for s, g, a, d in lts.transitions
        ],
        "initial": lts.initial,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


LTS_JSON_SCHEMA = {
    "type": "object",
    "required": ["states", "transitions", "initial"],
    "properties": {
        "states": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "term", "signal", "signal_vector"],
                "properties": {
                    "id": {"type": "integer"},
                    "term": {"type": "string"},
                    "signal": {"type": "string"},
                    "signal_vector": {"type": "string", "pattern": "^[ftb]+$"},
                },
            },
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "guard", "action", "to"],
                "properties": {
                    "from": {"type": "integer"},
                    "guard": {"type": "string"},
                    "action": {"type": "string"},
                    "to": {"type": "integer"},
                },
            },
        },
        "initial": {"type": "integer"},
    },
}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def lts_to_dot(lts: LTS) -> str:
    lines = ["digraph lts {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
    for i, (t, sig) in enumerate(zip(lts.terms, lts.signals)):
        if t is TICK:
            lines.append(f'  s{i} [label="✓", shape=doublecircle];')
        else:
            label = _dot_escape(_term_text(t)) + "\\n" + _dot_escape(f"[{format_formula(sig.formula)}]")
            extra = ", penwidth=2" if i in lts.roots else ""
            lines.append(f'  s{i} [label="{label}"{extra}];')
    for s, g, a, d in lts.transitions:
        label = f"{format_formula(g.formula)} ▸ {a}"
        lines.append(f'  s{s} -> s{d} [label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
