import json
import random

import pytest

from ctacp.errors import BudgetError, CapacityError
from ctacp.gen import TermGen
from ctacp.logic import Atom
from ctacp.normalize import canonical_key, embed, root_signal, signal_prop, to_basic
from ctacp.soundness import default_suite_spec
from ctacp.sos import (
    LTS_JSON_SCHEMA,
    TICK,
    build_lts,
    expand_valuations,
    explore,
    lts_to_dot,
    lts_to_json,
    step_transitions,
)
from ctacp.syntax import parse_proc, parse_spec

P = Atom("P")


@pytest.fixture
def spec():
    return parse_spec("props P; actions a, b, c;")


def steps(text, spec):
    return {(g.vec, a, t) for g, a, t in step_transitions(parse_proc(text, spec), spec)}


def test_action_terminates(spec):
    assert steps("a", spec) == {(spec.top.vec, "a", TICK)}


def test_guarded_action(spec):
    assert steps("P :-> a", spec) == {(spec.vector(P), "a", TICK)}


def test_interleaving_without_communication(spec):
    a, b = parse_proc("a", spec), parse_proc("b", spec)
    assert steps("a || b", spec) == {(spec.top.vec, "a", b), (spec.top.vec, "b", a)}


def test_nex_has_no_moves(spec):
    nex = parse_proc("nex", spec)
    assert step_transitions(nex, spec) == ()
    assert spec.is_false(root_signal(nex, spec))


def test_sequence_lts(spec):
    lts = build_lts(parse_proc("a . b", spec), spec)
    assert lts.n_states == 3
    assert [(s, a, d) for s, _, a, d in lts.transitions] == [(1, "a", 2), (2, "b", 0)]


def test_recursive_self_loop(demo):
    lts = build_lts(demo.defs["RX"], demo)
    assert lts.n_states == 2
    assert [(s, a, d) for s, _, a, d in lts.transitions] == [(1, "a", 1)]


def test_budget_is_enforced(demo):
    spec = parse_spec("actions a; recspec G { X = a . (X || X); }")
    with pytest.raises(BudgetError) as info:
        build_lts(parse_proc("<X | G>", spec), spec, budget=20)
    assert info.value.frontier is not None


def test_budget_from_environment(monkeypatch):
    spec = parse_spec("actions a; recspec G { X = a . (X || X); }")
    monkeypatch.setenv("CTACP_STATE_BUDGET", "5")
    with pytest.raises(BudgetError):
        build_lts(parse_proc("<X | G>", spec), spec)


def edge_valuations(text, spec):
    lts = build_lts(parse_proc(text, spec), spec)
    exp = expand_valuations(lts)
    root = lts.initial
    return sorted({v for (v, a) in (lab for lab, _ in exp.edges(root))})


def test_expansion_guard(spec):
    # valuations are F, T, B for the single atom
    assert edge_valuations("P :-> a", spec) == [1, 2]


def test_expansion_nex(spec):
    lts = build_lts(parse_proc("nex", spec), spec)
    exp = expand_valuations(lts)
    assert all(not exp.edges(s) for s in range(lts.n_states))


def test_expansion_signal_restricts_edges(spec):
    assert edge_valuations("P ^ delta + a", spec) == [1, 2]


def test_expansion_cap(spec):
    lts = build_lts(parse_proc("a . b", spec), spec)
    with pytest.raises(CapacityError):
        expand_valuations(lts, cap=5)


def sample(n, size, seed):
    spec = default_suite_spec()
    gen = TermGen(spec)
    rng = random.Random(seed)
    return spec, [gen.sized(rng, size) for _ in range(n)]


def test_side_conditions_audit():
    spec, terms = sample(200, 10, 11)
    for t in terms:
        lts = build_lts(t, spec, key="syntactic")
        for s, g, a, d in lts.transitions:
            assert not g.is_false
            assert not lts.signals[s].is_false
            if d != 0:
                assert not lts.signals[d].is_false
            assert a in spec.actions


def test_signal_coherence():
    spec, terms = sample(100, 10, 12)
    for t in terms:
        lts = build_lts(t, spec)
        for term, sig in zip(lts.terms[1:], lts.signals[1:]):
            assert sig.vec == spec.vector(root_signal(term, spec))


def keyed_edges(lts):
    # symbolic guards may differ by the source signal (a basic form conjoins
    # it into every guard), so compare the per-valuation expansion
    exp = expand_valuations(lts)
    keys = lts.keys
    return {(keys[s], lab, keys[d]) for s in range(lts.n_states) for lab, d in exp.edges(s)}


def test_elimination_preserves_behaviour():
    spec, terms = sample(150, 10, 13)
    for t in terms:
        b = embed(to_basic(t, spec))
        left, right = build_lts(t, spec), build_lts(b, spec)
        assert canonical_key(t, spec) == canonical_key(b, spec)
        assert left.n_states == right.n_states
        assert keyed_edges(left) == keyed_edges(right)


def test_determinism(demo):
    first = lts_to_json(build_lts(demo.defs["M4"], demo))
    fresh = parse_spec(open_demo_text(demo))
    second = lts_to_json(build_lts(fresh.defs["M4"], fresh))
    assert first == second


def open_demo_text(_):
    from conftest import DEMO

    return DEMO


def test_json_export_schema(demo):
    jsonschema = pytest.importorskip("jsonschema")
    doc = json.loads(lts_to_json(build_lts(demo.defs["M4"], demo)))
    jsonschema.validate(doc, LTS_JSON_SCHEMA)
    assert doc["states"][0]["term"] == "TICK"
    assert doc["initial"] == 1


def test_dot_export(demo):
    dot = lts_to_dot(build_lts(demo.defs["M1"], demo))
    assert dot.startswith("digraph lts {")
    assert "▸ a" in dot and "✓" in dot


def test_shared_exploration_numbers_roots(demo):
    lts = explore([demo.defs["M1"], demo.defs["M2"]], demo)
    assert lts.roots == [1, 1]  # provably equal, so one canonical state
    lts = explore([demo.defs["M1"], demo.defs["M2"]], demo, key="syntactic")
    assert lts.roots == [1, 2]
    assert signal_prop(demo.defs["M1"], demo).is_true
