import random

import pytest

from ctacp.bisim import bisimilar
from ctacp.errors import GuardednessError, LinearizationError, SpecError
from ctacp.gen import random_formula, random_linear_spec
from ctacp.recspec import check_guarded, is_guarded, is_linear, to_linear, unfold
from ctacp.soundness import default_suite_spec
from ctacp.sos import build_lts
from ctacp.syntax import parse_proc, parse_spec, pretty
from ctacp.terms import Act, RecConst, RecSpec, Seq, Var, substitute


def rec(text, name="E", header="props P; actions a, b;"):
    spec = parse_spec(f"{header} recspec {name} {{ {text} }}", check_recursion=False)
    return spec, spec.recspecs[name]


def test_guarded_examples():
    check_guarded(rec("X = a . X;")[1])
    check_guarded(rec("X = P :-> a . X;")[1])
    with pytest.raises(GuardednessError) as info:
        check_guarded(rec("X = X + a;")[1])
    assert info.value.variable == "X"


def test_mutual_unguarded_cycle():
    with pytest.raises(GuardednessError, match="X -> Y -> X"):
        check_guarded(rec("X = Y + a; Y = b . Y + X;")[1])


def test_guardedness_through_other_specs():
    spec = parse_spec("actions a; recspec A { X = a . X; } recspec B { Y = <X | A> + Y . a; }", check_recursion=False)
    with pytest.raises(GuardednessError):
        check_guarded(spec.recspecs["B"], spec.recspecs)


def test_unbound_variable():
    with pytest.raises(SpecError):
        parse_spec("actions a; recspec E { X = a . Z; }")


def test_guardedness_stable_under_renaming():
    rng = random.Random(0)
    specs = [
        random_linear_spec(rng, "E", 3, ["a", "b"], lambda r: random_formula(r, ["P"], 1)) for _ in range(20)
    ]
    specs += [rec("X = Y + a; Y = X . b;")[1], rec("X = a . Y; Y = P :-> X;")[1]]
    for e in specs:
        renamed = RecSpec("E", {f"V{x}": substitute(t, lambda y: Var(f"V{y}")) for x, t in e.equations.items()})
        assert is_guarded(e) == is_guarded(renamed)
    assert not is_guarded(specs[-2]) and is_guarded(specs[-1])


def test_linear_examples():
    spec, e = rec("X = a . X + b;")
    assert is_linear(e)
    lin = to_linear(e, spec)
    eq = lin.equations["X"]
    assert [(g.is_true, a, x) for g, a, x in eq.steps] == [(True, "a", "X")]
    assert [(g.is_true, a) for g, a in eq.terms] == [(True, "b")]


def test_fresh_variable_for_continuation():
    spec, e = rec("X = a . (b . X);")
    lin = to_linear(e, spec)
    assert list(lin.equations) == ["X", "E_1"]
    assert pretty(lin.to_recspec().equations["E_1"]) == "b . X"


def test_parallel_continuation_rejected():
    spec, e = rec("X = a . (X || X);")
    with pytest.raises(LinearizationError):
        to_linear(e, spec)


def test_linearization_preserves_behaviour():
    spec, e = rec("X = a . (b . X + P :-> a) + ~P ^ b . Y; Y = a . b . Y;")
    lin = to_linear(e, spec).to_recspec()
    lin = RecSpec("L", lin.equations)
    local = spec.extended([lin])
    assert is_linear(lin)
    for x in e.equations:
        assert bisimilar(RecConst(x, "E"), RecConst(x, "L"), local).equivalent


def test_unfold_examples():
    _, e = rec("X = a . X;")
    assert unfold("X", e) == Seq(Act("a"), RecConst("X", "E"))
    _, e = rec("X = a . Y; Y = b . X;")
    assert unfold("X", e) == Seq(Act("a"), RecConst("Y", "E"))
    with pytest.raises(SpecError):
        unfold("Z", e)


def test_loops_are_bisimilar(demo):
    assert bisimilar(demo.defs["RX"], demo.defs["RY"], demo).equivalent


def test_rdp_sampled():
    spec = default_suite_spec()
    rng = random.Random(3)
    for k in range(20):
        e = random_linear_spec(rng, f"R{k}", rng.randint(1, 3), spec.actions, lambda r: random_formula(r, spec.atoms, 2))
        local = spec.extended([e])
        for x in e.equations:
            assert bisimilar(RecConst(x, e.name), e.unfold(x), local).equivalent


def test_linear_state_bound():
    spec = default_suite_spec()
    rng = random.Random(4)
    for k in range(30):
        e = random_linear_spec(rng, f"R{k}", rng.randint(1, 4), spec.actions, lambda r: random_formula(r, spec.atoms, 2))
        local = spec.extended([e])
        for x in e.equations:
            lts = build_lts(RecConst(x, e.name), local)
            assert lts.n_states - 1 <= len(e.equations) + 1


def test_parse_proc_with_constants(demo):
    assert parse_proc("<X | E> + a", demo) is not None
