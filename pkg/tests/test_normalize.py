import random

import pytest

import oracle
from ctacp.bisim import bisimilar
from ctacp.gen import TermGen
from ctacp.logic import FALSITY, And, Atom, Implies
from ctacp.normalize import (
    NEX,
    Node,
    basic_pretty,
    canonical_key,
    decide_equal,
    embed,
    is_well_formed,
    make_node,
    reduce_basic,
    root_signal,
    signal_prop,
    to_basic,
)
from ctacp.soundness import default_suite_spec
from ctacp.syntax import parse_proc, parse_spec

P, Q = Atom("P"), Atom("Q")


@pytest.fixture
def spec():
    return parse_spec("props P, Q; actions a, b, c; comm a | b = c;")


def basic(text, spec):
    return to_basic(parse_proc(text, spec), spec)


def test_root_signal_examples(spec):
    assert spec.is_false(root_signal(parse_proc("nex", spec), spec))
    assert spec.vector(root_signal(parse_proc("P ^ a", spec), spec)) == spec.vector(P)
    got = root_signal(parse_proc("P :-> nex", spec), spec)
    assert spec.vector(got) == spec.vector(Implies(P, FALSITY))


def test_to_basic_absorbs_delta(spec):
    b = basic("a + delta", spec)
    assert b.root.is_true and b.steps == () and [(g.is_true, x) for g, x in b.terms] == [(True, "a")]


def test_false_emission_is_nex(spec):
    assert basic("ff ^ a", spec) == NEX


def test_nested_guards_conjoin(spec):
    b = basic("P :-> (Q :-> a)", spec)
    (g, x), = b.terms
    assert x == "a" and g == spec.prop(And(P, Q))


def test_merge_expansion(spec):
    b = basic("a || b", spec)
    assert [(g.is_true, x) for g, x in b.terms] == [(True, "c")]
    steps = [(g.is_true, x, basic_pretty(k)) for g, x, k in b.steps]
    assert steps == [(True, "a", "b"), (True, "b", "a")]


def test_state_operator_example(states_spec):
    t = parse_proc("state[s0](a . a)", states_spec)
    expected = parse_proc("P ^ (b . (Q ^ a))", states_spec)
    assert decide_equal(t, expected, states_spec)
    assert basic_pretty(to_basic(t, states_spec)) == "P ^ delta + P :-> b . (Q ^ delta + Q :-> a)"


def test_reduce_joins_guards_of_equal_summands(spec):
    pa, qa = spec.prop(P), spec.prop(Q)
    k = make_node(spec.top, (), [(spec.top, "b")])
    raw = Node(spec.top, [(pa, "a", k), (qa, "a", k)], [(spec.top, "a"), (spec.top, "a")])
    red = reduce_basic(raw)
    assert [(g, x) for g, x, _ in red.steps] == [(spec.prop(P) | spec.prop(Q), "a")]
    assert len(red.terms) == 1


def test_reduce_keeps_normal_nodes(spec):
    b = basic("a + b", spec)
    assert reduce_basic(b) == b


def test_decide_equal_examples(spec):
    eq = lambda x, y: decide_equal(parse_proc(x, spec), parse_proc(y, spec), spec)  # noqa: E731
    assert eq("P ^ a + Q ^ b", "(P /\\ Q) ^ (a + b)")
    assert eq("P :-> nex", "(P => ff) ^ delta")
    assert not eq("a . (P ^ b + ~P ^ c)", "delta")


def test_demo_examples(demo):
    d = demo.defs
    assert decide_equal(d["M1"], d["M2"], demo)
    assert decide_equal(d["M3"], d["Del"], demo)
    assert not decide_equal(d["M4"], d["Del"], demo)


def test_normal_form_of_parallel_contradiction(demo):
    # the remaining component keeps its own signal after the first move
    assert basic_pretty(to_basic(demo.defs["M4"], demo)) == (
        "a . ((P /\\ ~P) ^ delta + (P /\\ ~P) :-> b . ((~P) ^ delta + (~P) :-> c)"
        " + (P /\\ ~P) :-> c . (P ^ delta + P :-> b) + (P /\\ ~P) :-> d)"
    )


def sample_terms(n, size, seed):
    spec = default_suite_spec()
    gen = TermGen(spec)
    rng = random.Random(seed)
    return spec, [gen.sized(rng, size) for _ in range(n)]


def test_elimination_sampled():
    spec, terms = sample_terms(150, 12, 1)
    for t in terms:
        b = to_basic(t, spec)
        assert is_well_formed(b)
        assert bisimilar(t, embed(b), spec).equivalent


def test_elimination_matches_naive_bisimulation():
    spec, terms = sample_terms(40, 8, 2)
    for t in terms:
        assert oracle.bisimilar(t, embed(to_basic(t, spec)), spec)


def test_signal_agreement():
    spec, terms = sample_terms(300, 12, 3)
    for t in terms:
        assert signal_prop(t, spec) == signal_prop(embed(to_basic(t, spec)), spec)


def test_reduce_idempotent_and_order_independent():
    spec, terms = sample_terms(200, 10, 4)
    rng = random.Random(5)
    for t in terms:
        b = reduce_basic(to_basic(t, spec))
        assert reduce_basic(b) == b
        if b == NEX:
            continue
        steps, terms_ = list(b.steps), list(b.terms)
        rng.shuffle(steps)
        rng.shuffle(terms_)
        assert reduce_basic(Node(b.root, steps, terms_)) == b


def test_canonical_key_is_deterministic():
    spec, terms = sample_terms(50, 10, 6)
    fresh = default_suite_spec()
    for t in terms:
        assert canonical_key(t, spec) == canonical_key(t, fresh)


def test_decide_equal_implies_bisimilar_sampled():
    spec, terms = sample_terms(80, 6, 7)
    for x in terms[:40]:
        for y in terms[40:]:
            if decide_equal(x, y, spec):
                assert bisimilar(x, y, spec).equivalent
