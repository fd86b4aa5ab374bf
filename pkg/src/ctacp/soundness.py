"""Randomized soundness check of the equational axioms.

Every axiom is a pair of term builders over an instance: process
variables ``x, y, z`` (random closed terms), formula variables ``phi``
and ``psi``, action constants ``a, b, c`` (declared actions or δ where
the axiom allows it), an encapsulation set ``H`` and a state ``s``.
Each instance is checked with :func:`ctacp.bisim.bisimilar`; the report
also records whether :func:`ctacp.normalize.decide_equal` proves it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .bisim import bisimilar
from .gen import TermGen, action_term, random_formula, random_linear_spec
from .logic import FALSITY, TRUTH, And, Formula, Implies, Not, Or, lequiv
from .normalize import decide_equal
from .recspec import check_guarded
from .syntax import parse_spec, pretty
from .terms import (
    DELTA,
    DELTA_TERM,
    NEX_TERM,
    Alt,
    CommMerge,
    Emit,
    Encap,
    Guard,
    LeftMerge,
    Par,
    ProcTerm,
    RecConst,
    Seq,
    Spec,
    State,
)

DEFAULT_SUITE_SPEC = """\
props P, Q;
actions a, b, c;
comm a | b = c;
statespace M {
  states s0, s1;
  sig(s0) = P;
  sig(s1) = ~Q;
  act(a, s0) = b;
  act(b, s1) = delta;
  eff(a, s0) = s1;
  eff(b, s0) = s1;
  eff(c, s1) = s0;
}
"""


def default_suite_spec() -> Spec:
    """Two atoms, three actions with γ(a, b) = c, one two-state state space."""
    return parse_spec(DEFAULT_SUITE_SPEC)


@dataclass
class Instance:
    x: ProcTerm
    y: ProcTerm
    z: ProcTerm
    phi: Formula
    psi: Formula
    a: str
    b: str
    c: str
    H: frozenset
    s: str
    spec: Spec
    variant: int = 0

    def act(self, name: str) -> ProcTerm:
        return action_term(getattr(self, name))

    @property
    def all_actions(self) -> frozenset:
        return frozenset(self.spec.actions)


@dataclass
class Axiom:
    name: str
    lhs: Callable[[Instance], ProcTerm]
    rhs: Callable[[Instance], ProcTerm]
    delta_ok: bool = True  # may a, b, c be δ
    condition: Callable[[Instance], bool] | None = None  # side condition on the instance


def _gamma(i: Instance, left: str, right: str) -> ProcTerm:
    return CommMerge(i.act(left), i.act(right))


def _equivalent_formula(i: Instance) -> Formula:
    """A formula logically equivalent to ``phi`` but usually not equal to it."""
    phi = i.phi
    forms = [Not(Not(phi)), And(phi, phi), Or(phi, FALSITY), And(TRUTH, phi), Or(phi, And(phi, i.psi))]
    return forms[i.variant % len(forms)]


def _sig(i: Instance) -> Formula:
    return i.spec.state_table(i.s).sig(i.s)


def axioms() -> list[Axiom]:
    X = lambda i: i.x  # noqa: E731
    Y = lambda i: i.y  # noqa: E731
    Z = lambda i: i.z  # noqa: E731
    A = lambda i: Encap(i.all_actions, i.y)  # noqa: E731  ∂_A(y)
    return [
        # alternative and sequential composition
        Axiom("A1", lambda i: Alt(X(i), Y(i)), lambda i: Alt(Y(i), X(i))),
        Axiom("A2", lambda i: Alt(Alt(X(i), Y(i)), Z(i)), lambda i: Alt(X(i), Alt(Y(i), Z(i)))),
        Axiom("A3", lambda i: Alt(X(i), X(i)), X),
        Axiom("A4", lambda i: Seq(Alt(X(i), Y(i)), Z(i)), lambda i: Alt(Seq(X(i), Z(i)), Seq(Y(i), Z(i)))),
        Axiom("A5", lambda i: Seq(Seq(X(i), Y(i)), Z(i)), lambda i: Seq(X(i), Seq(Y(i), Z(i)))),
        Axiom("A6", lambda i: Alt(X(i), DELTA_TERM), X),
        Axiom("A7", lambda i: Seq(DELTA_TERM, X(i)), lambda i: DELTA_TERM),
        # inaccessible process
        Axiom("NE1", lambda i: Alt(X(i), NEX_TERM), lambda i: NEX_TERM),
        Axiom("NE2", lambda i: Seq(NEX_TERM, X(i)), lambda i: NEX_TERM),
        Axiom("NE3", lambda i: Seq(i.act("a"), NEX_TERM), lambda i: DELTA_TERM),
        # guarded commands
        Axiom("GC1", lambda i: Guard(TRUTH, X(i)), X),
        Axiom("GC2", lambda i: Guard(FALSITY, X(i)), lambda i: DELTA_TERM),
        Axiom("GC3", lambda i: Guard(i.phi, DELTA_TERM), lambda i: DELTA_TERM),
        Axiom("GC4", lambda i: Guard(i.phi, Alt(X(i), Y(i))), lambda i: Alt(Guard(i.phi, X(i)), Guard(i.phi, Y(i)))),
        Axiom("GC5", lambda i: Guard(i.phi, Seq(X(i), Y(i))), lambda i: Seq(Guard(i.phi, X(i)), Y(i))),
        Axiom("GC6", lambda i: Guard(i.phi, Guard(i.psi, X(i))), lambda i: Guard(And(i.phi, i.psi), X(i))),
        Axiom("GC7", lambda i: Guard(Or(i.phi, i.psi), X(i)), lambda i: Alt(Guard(i.phi, X(i)), Guard(i.psi, X(i)))),
        # logical equivalence of propositions
        Axiom(
            "IMP",
            lambda i: Alt(Guard(i.phi, X(i)), Emit(i.phi, Y(i))),
            lambda i: Alt(Guard(_equivalent_formula(i), X(i)), Emit(_equivalent_formula(i), Y(i))),
        ),
        # signal emission
        Axiom("SE1", lambda i: Emit(TRUTH, X(i)), X),
        Axiom("SE2", lambda i: Emit(FALSITY, X(i)), lambda i: NEX_TERM),
        Axiom("SE3", lambda i: Emit(i.phi, NEX_TERM), lambda i: NEX_TERM),
        Axiom("SE4", lambda i: Alt(Emit(i.phi, X(i)), Y(i)), lambda i: Emit(i.phi, Alt(X(i), Y(i)))),
        Axiom("SE5", lambda i: Seq(Emit(i.phi, X(i)), Y(i)), lambda i: Emit(i.phi, Seq(X(i), Y(i)))),
        Axiom("SE6", lambda i: Emit(i.phi, Emit(i.psi, X(i))), lambda i: Emit(And(i.phi, i.psi), X(i))),
        Axiom("SE7", lambda i: Emit(i.phi, Guard(i.phi, X(i))), lambda i: Emit(i.phi, X(i))),
        Axiom(
            "SE8",
            lambda i: Guard(i.phi, Emit(i.psi, X(i))),
            lambda i: Emit(Implies(i.phi, i.psi), Guard(i.phi, X(i))),
        ),
        # merge
        Axiom(
            "CM1",
            lambda i: Par(X(i), Y(i)),
            lambda i: Alt(Alt(LeftMerge(X(i), Y(i)), LeftMerge(Y(i), X(i))), CommMerge(X(i), Y(i))),
        ),
        Axiom("CM2S", lambda i: LeftMerge(i.act("a"), Y(i)), lambda i: Alt(Seq(i.act("a"), Y(i)), A(i))),
        Axiom(
            "CM3S",
            lambda i: LeftMerge(Seq(i.act("a"), X(i)), Y(i)),
            lambda i: Alt(Seq(i.act("a"), Par(X(i), Y(i))), A(i)),
        ),
        Axiom(
            "CM4",
            lambda i: LeftMerge(Alt(X(i), Y(i)), Z(i)),
            lambda i: Alt(LeftMerge(X(i), Z(i)), LeftMerge(Y(i), Z(i))),
        ),
        Axiom("CM5", lambda i: CommMerge(Seq(i.act("a"), X(i)), i.act("b")), lambda i: Seq(_gamma(i, "a", "b"), X(i))),
        Axiom("CM6", lambda i: CommMerge(i.act("a"), Seq(i.act("b"), X(i))), lambda i: Seq(_gamma(i, "a", "b"), X(i))),
        Axiom(
            "CM7",
            lambda i: CommMerge(Seq(i.act("a"), X(i)), Seq(i.act("b"), Y(i))),
            lambda i: Seq(_gamma(i, "a", "b"), Par(X(i), Y(i))),
        ),
        Axiom(
            "CM8",
            lambda i: CommMerge(Alt(X(i), Y(i)), Z(i)),
            lambda i: Alt(CommMerge(X(i), Z(i)), CommMerge(Y(i), Z(i))),
        ),
        Axiom(
            "CM9",
            lambda i: CommMerge(X(i), Alt(Y(i), Z(i))),
            lambda i: Alt(CommMerge(X(i), Y(i)), CommMerge(X(i), Z(i))),
        ),
        Axiom(
            "GC8S",
            lambda i: LeftMerge(Guard(i.phi, X(i)), Y(i)),
            lambda i: Alt(Guard(i.phi, LeftMerge(X(i), Y(i))), A(i)),
        ),
        Axiom(
            "GC9S",
            lambda i: CommMerge(Guard(i.phi, X(i)), Y(i)),
            lambda i: Alt(Guard(i.phi, CommMerge(X(i), Y(i))), A(i)),
        ),
        Axiom(
            "GC10S",
            lambda i: CommMerge(X(i), Guard(i.phi, Y(i))),
            lambda i: Alt(Guard(i.phi, CommMerge(X(i), Y(i))), Encap(i.all_actions, X(i))),
        ),
        Axiom("GC11", lambda i: Encap(i.H, Guard(i.phi, X(i))), lambda i: Guard(i.phi, Encap(i.H, X(i)))),
        # communication function
        Axiom("C1", lambda i: _gamma(i, "a", "b"), lambda i: _gamma(i, "b", "a")),
        Axiom(
            "C2",
            lambda i: CommMerge(_gamma(i, "a", "b"), i.act("c")),
            lambda i: CommMerge(i.act("a"), _gamma(i, "b", "c")),
        ),
        Axiom("C3", lambda i: CommMerge(DELTA_TERM, i.act("a")), lambda i: DELTA_TERM),
        # encapsulation
        Axiom("D1", lambda i: Encap(i.H, i.act("a")), lambda i: i.act("a"), condition=lambda i: i.a not in i.H),
        Axiom("D2", lambda i: Encap(i.H, i.act("a")), lambda i: DELTA_TERM, condition=lambda i: i.a in i.H),
        Axiom("D3", lambda i: Encap(i.H, Alt(X(i), Y(i))), lambda i: Alt(Encap(i.H, X(i)), Encap(i.H, Y(i)))),
        Axiom("D4", lambda i: Encap(i.H, Seq(X(i), Y(i))), lambda i: Seq(Encap(i.H, X(i)), Encap(i.H, Y(i)))),
        # emission and the merges
        Axiom("SE9", lambda i: LeftMerge(Emit(i.phi, X(i)), Y(i)), lambda i: Emit(i.phi, LeftMerge(X(i), Y(i)))),
        Axiom("SE10", lambda i: CommMerge(Emit(i.phi, X(i)), Y(i)), lambda i: Emit(i.phi, CommMerge(X(i), Y(i)))),
        Axiom("SE11", lambda i: CommMerge(X(i), Emit(i.phi, Y(i))), lambda i: Emit(i.phi, CommMerge(X(i), Y(i)))),
        Axiom("SE12", lambda i: Encap(i.H, Emit(i.phi, X(i))), lambda i: Emit(i.phi, Encap(i.H, X(i)))),
        # state operators
        Axiom(
            "SO1",
            lambda i: State(i.s, i.act("a")),
            lambda i: Emit(_sig(i), action_term(i.spec.state_table(i.s).act(i.a, i.s))),
        ),
        Axiom(
            "SO2",
            lambda i: State(i.s, Seq(i.act("a"), X(i))),
            lambda i: Emit(
                _sig(i),
                Seq(
                    action_term(i.spec.state_table(i.s).act(i.a, i.s)),
                    State(i.spec.state_table(i.s).eff(i.a, i.s), X(i)),
                ),
            ),
        ),
        Axiom("SO3", lambda i: State(i.s, Alt(X(i), Y(i))), lambda i: Alt(State(i.s, X(i)), State(i.s, Y(i)))),
        Axiom(
            "SO4",
            lambda i: State(i.s, Guard(i.phi, X(i))),
            lambda i: Emit(_sig(i), Guard(i.phi, State(i.s, X(i)))),
        ),
        Axiom("SO5", lambda i: State(i.s, Emit(i.phi, X(i))), lambda i: Emit(i.phi, State(i.s, X(i)))),
    ]


AXIOM_NAMES = [ax.name for ax in axioms()]


@dataclass
class AxiomResult:
    name: str
    instances: int = 0
    equivalent: int = 0
    decided: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.equivalent == self.instances

    def to_json(self) -> dict:
        return {
            "axiom": self.name,
            "instances": self.instances,
            "bisimilar": self.equivalent,
            "decided": self.decided,
            "counterexamples": self.counterexamples,
        }


@dataclass
class SuiteReport:
    results: list
    seed: int
    samples: int
    size: int

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.ok]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "size": self.size,
            "ok": self.ok,
            "axioms": [r.to_json() for r in self.results],
        }

    def render(self) -> str:
        lines = []
        for r in self.results:
            status = "ok" if r.ok else "FAIL"
            lines.append(f"{r.name:6} {r.equivalent}/{r.instances} bisimilar, {r.decided} decided  {status}")
            for cx in r.counterexamples[:3]:
                lines.append(f"    {cx['lhs']}  vs  {cx['rhs']}")
        total = sum(r.instances for r in self.results)
        bad = sum(r.instances - r.equivalent for r in self.results)
        lines.append(f"axioms: {len(self.results)}, instances: {total}, counterexamples: {bad}")
        return "\n".join(lines)


def _instance(rng: random.Random, spec: Spec, gen: TermGen, size: int, delta_ok: bool) -> Instance:
    acts = list(spec.actions) + ([DELTA] if delta_ok else [])
    states = [s for t in spec.statespaces.values() for s in t.states] or [""]
    return Instance(
        x=gen.sized(rng, size),
        y=gen.sized(rng, size),
        z=gen.sized(rng, size),
        phi=random_formula(rng, spec.atoms, 2),
        psi=random_formula(rng, spec.atoms, 2),
        a=rng.choice(acts),
        b=rng.choice(acts),
        c=rng.choice(acts),
        H=frozenset(a for a in spec.actions if rng.random() < 0.5),
        s=rng.choice(states),
        spec=spec,
        variant=rng.randrange(1 << 16),
    )


def _check(result: AxiomResult, lhs: ProcTerm, rhs: ProcTerm, spec: Spec, budget=None):
    result.instances += 1
    report = bisimilar(lhs, rhs, spec, budget=budget)
    if report.equivalent:
        result.equivalent += 1
    else:
        result.counterexamples.append(
            {"lhs": pretty(lhs), "rhs": pretty(rhs), "witness": report.render().splitlines()[1:]}
        )
    if decide_equal(lhs, rhs, spec):
        result.decided += 1


def axiom_soundness_suite(
    spec: Spec | None = None,
    samples: int = 50,
    size: int = 8,
    seed: int = 0,
    names: list[str] | None = None,
    rdp: bool = True,
) -> SuiteReport:
    """Check ``samples`` random closed instances of every axiom."""
    spec = spec or default_suite_spec()
    gen = TermGen(spec)
    results = []
    for ax in axioms():
        if names is not None and ax.name not in names:
            continue
        if ax.name.startswith("SO") and not spec.statespaces:
            continue
        rng = random.Random(f"{seed}:{ax.name}")
        result = AxiomResult(ax.name)
        attempts = 0
        while result.instances < samples and attempts < samples * 50:
            attempts += 1
            inst = _instance(rng, spec, gen, size, ax.delta_ok)
            if ax.condition is not None and not ax.condition(inst):
                continue
            _check(result, ax.lhs(inst), ax.rhs(inst), spec)
        results.append(result)
    if rdp and (names is None or "RDP" in names):
        results.append(rdp_check(spec, samples, seed))
    return SuiteReport(results, seed, samples, size)


def rdp_check(spec: Spec, samples: int, seed: int, n_vars: int = 3) -> AxiomResult:
    """``<X|E> ≈ <t_X|E>`` for random linear specifications ``E``."""
    rng = random.Random(f"{seed}:RDP")
    result = AxiomResult("RDP")
    for k in range(samples):
        e = random_linear_spec(
            rng, f"R{k}", rng.randint(1, n_vars), spec.actions, lambda r: random_formula(r, spec.atoms, 2)
        )
        check_guarded(e)
        local = spec.extended([e])
        x = rng.choice(list(e.equations))
        _check(result, RecConst(x, e.name), e.unfold(x), local)
    return result


def equivalent_formula_is_equivalent(i: Instance) -> bool:
    return lequiv(i.phi, _equivalent_formula(i), i.spec.signature)
