"""Acceptance suite: ten criteria, each with its time limit.

Every criterion prints one line ``criterion N: PASS|FAIL (seconds) detail``
(also collected into the terminal summary).  Run directly with
``python tests/test_acceptance.py`` for the lines alone.
"""

import random
import time
from collections import defaultdict

import pytest

from ctacp.bisim import bisim_classes, bisimilar
from ctacp.errors import GuardednessError
from ctacp.gen import TermGen, enumerate_formulas, enumerate_terms, random_formula
from ctacp.logic import (
    FALSITY,
    LAWS,
    And,
    Atom,
    Cons,
    Iff,
    Implies,
    Not,
    Or,
    PropSignature,
    classical_taut,
    entails,
    is_consistent,
    is_tautology,
    lequiv,
)
from ctacp.normalize import canonical_key, decide_equal, embed, is_well_formed, to_basic
from ctacp.recspec import check_guarded
from ctacp.sos import build_lts
from ctacp.soundness import axiom_soundness_suite, default_suite_spec, rdp_check
from ctacp.syntax import parse_formula, parse_proc, parse_spec, pretty
from ctacp.terms import DELTA_TERM, NEX_TERM, Act, Alt, RecSpec, Var

RESULTS: list[str] = []
UNDECIDED_LOG: list[str] = []

WORKED = """\
props P;
actions a, b, c, d;
comm b | c = d;
proc M1 = a . (P ^ b + ~P ^ c);
proc M2 = a . ((P /\\ ~P) ^ (b + c));
proc M3 = a . (Cons(P) ^ (P ^ b + ~P ^ c));
proc M4 = a . (P ^ b || ~P ^ c);
proc M4_derived = a . ((P /\\ ~P) ^ delta + b . (~P ^ c) + c . (P ^ b) + d);
proc M4_collapsed = a . ((P /\\ ~P) ^ (b . c + c . b + d));
"""


def record(number: int, ok: bool, seconds: float, limit: float, detail: str) -> bool:
    within = seconds < limit
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {number}: {status} ({seconds:.2f}s, limit {limit:g}s) {detail}"
    if not within:
        line += " [time limit exceeded]"
    RESULTS.append(line)
    print(line)
    return ok and within


def timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


# ------------------------------------------------------------- criteria


def logic_laws():
    sig = PropSignature(["P", "Q", "R"])
    rng = random.Random("laws")
    checked = failed = 0
    for _ in range(500):
        a, b, c = (random_formula(rng, sig.atoms, 5) for _ in range(3))
        for _, lhs, rhs in LAWS:
            checked += 1
            failed += not lequiv(lhs(a, b, c), rhs(a, b, c), sig)
    return failed == 0, f"{checked - failed}/{checked} law instances hold ({len(LAWS)} laws x 500 triples)"


def paraconsistency():
    P, Q = Atom("P"), Atom("Q")
    explosion = entails([P, Not(P)], Q)
    taut = is_tautology(Implies(Not(P), Implies(P, Q)))
    return (not explosion and not taut), f"entails({{P,~P}}, Q) = {explosion}; taut(~P => (P => Q)) = {taut}"


def classical_agreement():
    sig = PropSignature(["P", "Q"])
    forms = enumerate_formulas(["P", "Q"], 7)
    bad = [f for f in forms if is_tautology(f, sig) != classical_taut(f, sig)]
    taut = sum(is_tautology(f, sig) for f in forms)
    return not bad, f"{len(forms) - len(bad)}/{len(forms)} implication-free formulas agree ({taut} tautologies)"


def internalizations():
    sig = PropSignature(["P", "Q", "R"])
    rng = random.Random("internal")
    cons_bad = eq_bad = 0
    for _ in range(500):
        f = random_formula(rng, sig.atoms, 4)
        cons_bad += is_consistent(f, sig) != is_tautology(Cons(f), sig)
    agreeing = 0
    for _ in range(500):
        a, b = random_formula(rng, sig.atoms, 3), random_formula(rng, sig.atoms, 3)
        if rng.random() < 0.5:
            # half the pairs are equivalent by construction, so both verdicts occur
            b = rng.choice([Not(Not(a)), And(a, a), Or(a, FALSITY), And(a, Or(a, b))])
        eq = lequiv(a, b, sig)
        agreeing += eq
        eq_bad += eq != is_tautology(Iff(a, b), sig)
    ok = cons_bad == 0 and eq_bad == 0
    return ok, f"Cons mismatches {cons_bad}/500, Iff mismatches {eq_bad}/500 ({agreeing} equivalent pairs)"


SUITE_CACHE = {}


def soundness():
    report = axiom_soundness_suite(samples=50, size=8, seed=0)
    SUITE_CACHE["report"] = report
    axioms = [r for r in report.results if r.name != "RDP"]
    total = sum(r.instances for r in axioms)
    bad = sum(r.instances - r.equivalent for r in axioms)
    short = [r.name for r in axioms if r.instances < 50]
    ok = bad == 0 and not short
    detail = f"{len(axioms)} axioms x 50 instances = {total}, counterexamples {bad}"
    if short:
        detail += f", under-sampled: {short}"
    return ok, detail


def elimination():
    spec = default_suite_spec()
    gen = TermGen(spec)
    rng = random.Random("elimination")
    bad = 0
    for _ in range(500):
        p = gen.sized(rng, 12)
        b = to_basic(p, spec)
        if not (is_well_formed(b) and bisimilar(p, embed(b), spec).equivalent):
            bad += 1
    return bad == 0, f"{500 - bad}/500 terms eliminate to well-formed bisimilar basic terms"


def _population(pool_texts):
    spec = parse_spec("props P, Q; actions a, b; comm a | a = b;")
    pool = [parse_formula(f, spec) for f in pool_texts]
    terms = enumerate_terms(6, [DELTA_TERM, NEX_TERM, Act("a"), Act("b")], pool)
    keys = [canonical_key(t, spec) for t in terms]
    classes = bisim_classes(terms, spec, budget=10**6)
    by_key, by_class = defaultdict(set), defaultdict(set)
    example = {}
    for t, k, c in zip(terms, keys, classes):
        by_key[k].add(c)
        by_class[c].add(k)
        example.setdefault((c, k), t)
    unsound = sum(len(cs) > 1 for cs in by_key.values())
    undecided = []
    for c, ks in by_class.items():
        if len(ks) > 1:
            reps = [example[c, k] for k in sorted(ks)]
            undecided.append((pretty(reps[0]), pretty(reps[1])))
    return spec, len(terms), unsound, undecided


def decision_agreement():
    consistent = ["tt", "P => ff", "~P => ff", "Cons(P)"]
    spec = parse_spec("props P, Q; actions a;")
    assert all(is_consistent(parse_formula(f, spec), spec.signature) for f in consistent)
    n1, unsound1, undecided1 = _population(consistent)[1:]
    n2, unsound2, undecided2 = _population(["tt", "P", "~P", "P /\\ Q", "P => ff"])[1:]
    # the same scale with an excluded-middle guard, to exhibit undecided pairs
    n3, unsound3, undecided3 = _population(["tt", "P", "~P", "P => ff", "P \\/ ~P"])[1:]
    UNDECIDED_LOG[:] = [f"{x}  ~  {y}" for x, y in undecided2 + undecided3]
    ok = unsound1 == 0 and not undecided1 and unsound2 == 0 and unsound3 == 0
    detail = (
        f"consistent pool: {n1} terms, unsound {unsound1}, incomplete {len(undecided1)}; "
        f"unrestricted pool: {n2} terms, unsound {unsound2}, bisimilar-but-undecided classes {len(undecided2)}; "
        f"with P \\/ ~P guard: {n3} terms, unsound {unsound3}, bisimilar-but-undecided classes {len(undecided3)}"
    )
    if undecided3:
        detail += f" (e.g. {undecided3[0][0]} ~ {undecided3[0][1]})"
    return ok, detail


def worked_examples():
    spec = parse_spec(WORKED)
    d = spec.defs
    checks = {
        "M1 ~ M2": bisimilar(d["M1"], d["M2"], spec).equivalent,
        "M3 ~ delta": bisimilar(d["M3"], DELTA_TERM, spec).equivalent,
        "M4 !~ delta": not bisimilar(d["M4"], DELTA_TERM, spec).equivalent,
        "P :-> nex = (P => ff) ^ delta": decide_equal(
            parse_proc("P :-> nex", spec), parse_proc("(P => ff) ^ delta", spec), spec
        ),
        "M4 = derived form": decide_equal(d["M4"], d["M4_derived"], spec),
        "M4 ~ derived form": bisimilar(d["M4"], d["M4_derived"], spec).equivalent,
    }
    checks["after a: b.c + c.b + d"] = _expansion_shape(d["M4"], spec)
    collapsed = bisimilar(d["M4"], d["M4_collapsed"], spec).equivalent
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks"
    if failed:
        detail += f", failed: {failed}"
    detail += f"; collapsed form (P /\\ ~P) ^ (b.c + c.b + d) bisimilar: {collapsed}"
    return ok, detail


def _expansion_shape(term, spec) -> bool:
    """After ``a`` the state has signal P /\\ ~P and offers exactly b.c, c.b and d."""
    lts = build_lts(term, spec)
    moves = defaultdict(set)
    for s, g, a, t in lts.transitions:
        moves[s].add((a, t))
    (first,) = moves[lts.initial]
    if first[0] != "a":
        return False
    mid = first[1]
    contradiction = spec.prop(parse_formula("P /\\ ~P", spec))
    if lts.signals[mid] != contradiction:
        return False
    after = {a: t for a, t in moves[mid]}
    if set(after) != {"b", "c", "d"} or after["d"] != 0 or len(moves[mid]) != 3:
        return False

    def single(state, action):
        out = moves[state]
        return len(out) == 1 and next(iter(out))[0] == action and next(iter(out))[1] == 0

    return single(after["b"], "c") and single(after["c"], "b")


def recursion():
    spec = parse_spec("actions a; recspec E { X = a . X; } recspec F { Y = a . a . Y; }")
    loops = bisimilar(parse_proc("<X | E>", spec), parse_proc("<Y | F>", spec), spec).equivalent
    rdp = rdp_check(default_suite_spec(), samples=20, seed=0)
    try:
        check_guarded(RecSpec("G", {"X": Alt(Var("X"), Act("a"))}))
        rejected = False
    except GuardednessError:
        rejected = True
    ok = loops and rdp.ok and rdp.instances == 20 and rejected
    return ok, f"loops equivalent: {loops}; RDP {rdp.equivalent}/{rdp.instances}; X = X + a rejected: {rejected}"


def state_operators():
    spec = parse_spec(
        "props P, Q; actions a, b;\n"
        "statespace M { states s0, s1; sig(s0) = P; sig(s1) = Q; act(a, s0) = b; eff(a, s0) = s1; }"
    )
    lhs = parse_proc("state[s0](a . a)", spec)
    rhs = parse_proc("P ^ (b . (Q ^ a))", spec)
    matches = decide_equal(lhs, rhs, spec) and bisimilar(lhs, rhs, spec).equivalent
    report = SUITE_CACHE.get("report") or axiom_soundness_suite(samples=50, size=8, seed=0)
    so = {r.name: r for r in report.results if r.name.startswith("SO")}
    swept = sorted(so) == ["SO1", "SO2", "SO3", "SO4", "SO5"] and all(r.ok and r.instances == 50 for r in so.values())
    return matches and swept, f"state[s0](a . a) = P ^ b . (Q ^ a): {matches}; SO1-SO5 in sweep: {swept}"


CRITERIA = [
    (1, logic_laws, 5),
    (2, paraconsistency, 1),
    (3, classical_agreement, 30),
    (4, internalizations, 10),
    (5, soundness, 60),
    (6, elimination, 60),
    (7, decision_agreement, 120),
    (8, worked_examples, 5),
    (9, recursion, 10),
    (10, state_operators, 5),
]


@pytest.mark.parametrize("number,fn,limit", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, fn, limit):
    ok, detail, seconds = timed(fn)
    assert record(number, ok, seconds, limit, detail), RESULTS[-1]


def test_undecided_pairs_are_logged():
    # runs after criterion 7; the log is informational
    for line in UNDECIDED_LOG[:20]:
        print("undecided:", line)
    assert isinstance(UNDECIDED_LOG, list)


if __name__ == "__main__":
    for number, fn, limit in CRITERIA:
        ok, detail, seconds = timed(fn)
        record(number, ok, seconds, limit, detail)
