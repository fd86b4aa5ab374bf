"""Elimination to basic terms, root signals and the equality decision.

A basic term is ``nex`` or a node

    χ ^ δ  +  Σ φᵢ :-> aᵢ · pᵢ  +  Σ ψⱼ :-> bⱼ

stored as ``Node(root, steps, terms)``.  Guards and the root signal are
``Prop`` values, so formula equality is truth-vector equality.

The canonical form built by :func:`make_node` additionally

* conjoins every guard with the root signal (``χ ^ (φ :-> x)`` and
  ``χ ^ ((χ ∧ φ) :-> x)`` are provably equal, and the conjunction is what
  the operational semantics can observe),
* drops summands whose guard is false-equivalent and steps whose
  continuation is ``nex``,
* joins summands with the same action and continuation by disjunction,
* sorts summands by (action, guard vector, continuation key).

Continuations that still contain recursion after head unfolding are kept
as opaque process terms; their key is their printed form.  Everything
else is structural, so two terms get the same key exactly when their
canonical basic forms coincide.
"""

from __future__ import annotations

from typing import Union

from .errors import CtacpError, GuardednessError
from .logic import Formula, Prop
from .terms import (
    DELTA,
    DELTA_TERM,
    NEX_TERM,
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
    alt_all,
    has_recursion,
)


class BasicTerm:
    __slots__ = ()


class NexTerm(BasicTerm):
    __slots__ = ()

    key = ("nex",)
    pure = True

    def __eq__(self, other):
        return isinstance(other, NexTerm)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "NEX"


NEX = NexTerm()

Cont = Union[BasicTerm, ProcTerm]  # a ProcTerm continuation is opaque


def cont_key(c: Cont) -> tuple:
    if isinstance(c, BasicTerm):
        return c.key
    from .syntax import pretty

    return ("opaque", pretty(c))


class Node(BasicTerm):
    """Basic-term node; equality and hashing go through :attr:`key`."""

    __slots__ = ("root", "steps", "terms", "_key", "_hash", "_pure")

    def __init__(self, root: Prop, steps=(), terms=()):
        self.root = root
        self.steps = tuple(steps)
        self.terms = tuple(terms)
        self._key = None
        self._hash = None
        self._pure = None

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                "node",
                self.root.vec,
                tuple((a, g.vec, cont_key(c)) for g, a, c in self.steps),
                tuple((a, g.vec) for g, a in self.terms),
            )
        return self._key

    @property
    def pure(self) -> bool:
        """True if no continuation (at any depth) is an opaque term."""
        if self._pure is None:
            self._pure = all(isinstance(c, BasicTerm) and c.pure for _, _, c in self.steps)
        return self._pure

    def __eq__(self, other):
        return isinstance(other, Node) and self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __repr__(self):
        return f"Node({basic_pretty(self)})"


def make_node(root: Prop, steps=(), terms=()) -> BasicTerm:
    """Canonical node (see module docstring); ``nex`` if ``root`` is false."""
    if root.is_false:
        return NEX
    joined_steps: dict[tuple, list] = {}
    for g, a, c in steps:
        if c == NEX:
            continue
        g = root & g
        if g.is_false:
            continue
        k = (a, cont_key(c))
        if k in joined_steps:
            joined_steps[k][0] = joined_steps[k][0] | g
        else:
            joined_steps[k] = [g, a, c]
    joined_terms: dict[str, Prop] = {}
    for g, a in terms:
        g = root & g
        if g.is_false:
            continue
        joined_terms[a] = joined_terms[a] | g if a in joined_terms else g
    s = sorted((tuple(v) for v in joined_steps.values()), key=lambda t: (t[1], t[0].vec, cont_key(t[2])))
    t = sorted(((g, a) for a, g in joined_terms.items()), key=lambda t: (t[1], t[0].vec))
    return Node(root, s, t)


def reduce_basic(b: BasicTerm) -> BasicTerm:
    """Remove duplicate summands and join summands that differ only in guard.

    Continuations are reduced first, so the join on equal continuations
    sees reduced forms.  The result does not depend on summand order.
    """
    if not isinstance(b, Node):
        return b
    steps = [(g, a, reduce_basic(c) if isinstance(c, BasicTerm) else c) for g, a, c in b.steps]
    return make_node(b.root, steps, b.terms)


def is_well_formed(b: BasicTerm) -> bool:
    """No root signal or guard is false-equivalent, at any depth."""
    if b == NEX:
        return True
    if b.root.is_false:
        return False
    for g, _, c in b.steps:
        if g.is_false or c == NEX:
            return False
        if isinstance(c, BasicTerm) and not is_well_formed(c):
            return False
    return all(not g.is_false for g, _ in b.terms)


# ------------------------------------------------------------- signals


class _Unfolding:
    """Tracks recursion constants being unfolded at head position."""

    def __init__(self, spec: Spec, purpose: str):
        # signals and basic forms unfold independently, so each has its own set
        self.active = spec.memo("unfolding-active").setdefault(purpose, set())

    def enter(self, c: RecConst):
        if c in self.active:
            raise GuardednessError(
                f"unguarded recursion: <{c.var} | {c.spec}> reaches itself without an action prefix",
                variable=c.var,
            )
        self.active.add(c)

    def leave(self, c: RecConst):
        self.active.discard(c)


def signal_prop(p: ProcTerm, spec: Spec) -> Prop:
    """Root signal of a closed term as a ``Prop``."""
    memo = spec.memo("signal")
    r = memo.get(p)
    if r is not None:
        return r
    if isinstance(p, Nex):
        r = spec.bottom
    elif isinstance(p, (Act, Delta)):
        r = spec.top
    elif isinstance(p, (Alt, Par, LeftMerge, CommMerge)):
        r = signal_prop(p.left, spec) & signal_prop(p.right, spec)
    elif isinstance(p, Seq):
        r = signal_prop(p.left, spec)
    elif isinstance(p, Guard):
        r = spec.prop(p.cond).implies(signal_prop(p.body, spec))
    elif isinstance(p, Emit):
        r = spec.prop(p.cond) & signal_prop(p.body, spec)
    elif isinstance(p, Encap):
        r = signal_prop(p.body, spec)
    elif isinstance(p, State):
        table = spec.state_table(p.state)
        r = signal_prop(p.body, spec) & spec.prop(table.sig(p.state))
    elif isinstance(p, RecConst):
        u = _Unfolding(spec, "signal")
        u.enter(p)
        try:
            r = signal_prop(spec.unfold(p), spec)
        finally:
            u.leave(p)
    elif isinstance(p, Var):
        raise CtacpError(f"open term: free variable {p.name!r}")
    else:
        raise TypeError(f"not a process term: {p!r}")
    memo[p] = r
    return r


def root_signal(p: ProcTerm, spec: Spec) -> Formula:
    """The proposition that holds at the start of ``p``."""
    return signal_prop(p, spec).formula


# ---------------------------------------------------- basic operations


def _opaque(t: ProcTerm, spec: Spec) -> Cont:
    """An opaque continuation, or ``NEX`` if its signal is false."""
    return NEX if signal_prop(t, spec).is_false else t


def embed(b: Cont) -> ProcTerm:
    """Process term denoted by a basic term (opaque terms are returned as is)."""
    if isinstance(b, ProcTerm):
        return b
    if b == NEX:
        return NEX_TERM
    parts: list[ProcTerm] = []
    for g, a, c in b.steps:
        parts.append(_guarded(g, Seq(Act(a), embed(c))))
    for g, a in b.terms:
        parts.append(_guarded(g, Act(a)))
    if not b.root.is_true or not parts:
        parts.insert(0, Emit(b.root.formula, DELTA_TERM) if not b.root.is_true else DELTA_TERM)
    return alt_all(parts)


def _guarded(g: Prop, t: ProcTerm) -> ProcTerm:
    return t if g.is_true else Guard(g.formula, t)


def basic_pretty(b: Cont) -> str:
    from .syntax import pretty

    return pretty(embed(b))


def _memo(spec: Spec, name: str, key, fn):
    table = spec.memo(name)
    r = table.get(key)
    if r is None:
        r = fn()
        table[key] = r
    return r


def b_alt(x: BasicTerm, y: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX or y == NEX:
        return NEX
    return make_node(x.root & y.root, x.steps + y.steps, x.terms + y.terms)


def b_seq(x: BasicTerm, q: Cont, spec: Spec) -> BasicTerm:
    """``x · q`` where ``q`` is a continuation already checked for ``nex``."""
    if x == NEX:
        return NEX

    def build():
        steps = [(g, a, c_seq(c, q, spec)) for g, a, c in x.steps]
        steps += [(g, a, q) for g, a in x.terms]
        return make_node(x.root, steps, ())

    return _memo(spec, "seq", (x, cont_key(q)), build)


def c_seq(p: Cont, q: Cont, spec: Spec) -> Cont:
    if p == NEX:
        return NEX
    if isinstance(p, BasicTerm):
        return b_seq(p, q, spec)
    return _opaque(Seq(p, embed(q)), spec)


def b_guard(phi: Prop, x: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX:
        return make_node(phi.implies(spec.bottom))
    return make_node(
        phi.implies(x.root),
        [(phi & g, a, c) for g, a, c in x.steps],
        [(phi & g, a) for g, a in x.terms],
    )


def b_emit(phi: Prop, x: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX:
        return NEX
    return make_node(phi & x.root, x.steps, x.terms)


def b_encap(blocked: frozenset, x: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX:
        return NEX

    def build():
        steps = [(g, a, c_encap(blocked, c, spec)) for g, a, c in x.steps if a not in blocked]
        terms = [(g, a) for g, a in x.terms if a not in blocked]
        return make_node(x.root, steps, terms)

    return _memo(spec, "encap", (blocked, x), build)


def c_encap(blocked, p: Cont, spec: Spec) -> Cont:
    if isinstance(p, BasicTerm):
        return b_encap(blocked, p, spec)
    return _opaque(Encap(blocked, p), spec)


def b_state(s: str, x: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX:
        return NEX

    def build():
        table = spec.state_table(s)
        root = x.root & spec.prop(table.sig(s))
        steps, terms = [], []
        for g, a, c in x.steps:
            b = table.act(a, s)
            if b != DELTA:
                steps.append((g, b, c_state(table.eff(a, s), c, spec)))
        for g, a in x.terms:
            b = table.act(a, s)
            if b != DELTA:
                terms.append((g, b))
        return make_node(root, steps, terms)

    return _memo(spec, "state", (s, x), build)


def c_state(s: str, p: Cont, spec: Spec) -> Cont:
    if isinstance(p, BasicTerm):
        return b_state(s, p, spec)
    return _opaque(State(s, p), spec)


def b_leftmerge(x: BasicTerm, y: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX or y == NEX:
        return NEX

    def build():
        steps = [(g, a, c_par(c, y, spec)) for g, a, c in x.steps]
        steps += [(g, a, y) for g, a in x.terms]
        return make_node(x.root & y.root, steps, ())

    return _memo(spec, "lmerge", (x, y), build)


def b_commmerge(x: BasicTerm, y: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX or y == NEX:
        return NEX

    def build():
        gamma = spec.comm
        steps, terms = [], []
        for g, a, p in x.steps:
            for h, b, q in y.steps:
                c = gamma(a, b)
                if c != DELTA:
                    steps.append((g & h, c, c_par(p, q, spec)))
            for h, b in y.terms:
                c = gamma(a, b)
                if c != DELTA:
                    steps.append((g & h, c, p))
        for g, a in x.terms:
            for h, b, q in y.steps:
                c = gamma(a, b)
                if c != DELTA:
                    steps.append((g & h, c, q))
            for h, b in y.terms:
                c = gamma(a, b)
                if c != DELTA:
                    terms.append((g & h, c))
        return make_node(x.root & y.root, steps, terms)

    return _memo(spec, "cmerge", (x, y), build)


def b_par(x: BasicTerm, y: BasicTerm, spec: Spec) -> BasicTerm:
    if x == NEX or y == NEX:
        return NEX

    def build():
        return b_alt(
            b_alt(b_leftmerge(x, y, spec), b_leftmerge(y, x, spec), spec),
            b_commmerge(x, y, spec),
            spec,
        )

    return _memo(spec, "par", (x, y), build)


def c_par(p: Cont, q: Cont, spec: Spec) -> Cont:
    if p == NEX or q == NEX:
        return NEX
    if isinstance(p, BasicTerm) and isinstance(q, BasicTerm):
        return b_par(p, q, spec)
    return _opaque(Par(embed(p), embed(q)), spec)


# ---------------------------------------------------------- elimination


def _continuation(t: ProcTerm, spec: Spec) -> Cont:
    """Right operand of ``·`` as a continuation."""
    if has_recursion(t):
        return _opaque(t, spec)
    return to_basic(t, spec)


def to_basic(p: ProcTerm, spec: Spec) -> BasicTerm:
    """Basic term provably equal to the closed term ``p``.

    Recursion constants in head position are unfolded; recursion behind
    an action prefix stays as an opaque continuation.
    """
    memo = spec.memo("basic")
    r = memo.get(p)
    if r is not None:
        return r
    if isinstance(p, Delta):
        r = make_node(spec.top)
    elif isinstance(p, Nex):
        r = NEX
    elif isinstance(p, Act):
        r = make_node(spec.top, (), [(spec.top, p.name)])
    elif isinstance(p, Alt):
        r = b_alt(to_basic(p.left, spec), to_basic(p.right, spec), spec)
    elif isinstance(p, Seq):
        x = to_basic(p.left, spec)
        r = NEX if x == NEX else b_seq(x, _continuation(p.right, spec), spec)
    elif isinstance(p, Guard):
        r = b_guard(spec.prop(p.cond), to_basic(p.body, spec), spec)
    elif isinstance(p, Emit):
        r = b_emit(spec.prop(p.cond), to_basic(p.body, spec), spec)
    elif isinstance(p, Par):
        r = b_par(to_basic(p.left, spec), to_basic(p.right, spec), spec)
    elif isinstance(p, LeftMerge):
        r = b_leftmerge(to_basic(p.left, spec), to_basic(p.right, spec), spec)
    elif isinstance(p, CommMerge):
        r = b_commmerge(to_basic(p.left, spec), to_basic(p.right, spec), spec)
    elif isinstance(p, Encap):
        r = b_encap(p.blocked, to_basic(p.body, spec), spec)
    elif isinstance(p, State):
        r = b_state(p.state, to_basic(p.body, spec), spec)
    elif isinstance(p, RecConst):
        u = _Unfolding(spec, "basic")
        u.enter(p)
        try:
            r = to_basic(spec.unfold(p), spec)
        finally:
            u.leave(p)
    elif isinstance(p, Var):
        raise CtacpError(f"open term: free variable {p.name!r}")
    else:
        raise TypeError(f"not a process term: {p!r}")
    memo[p] = r
    return r


def canonical_key(p: ProcTerm, spec: Spec) -> tuple:
    """Key of the reduced basic form; equal keys mean provably equal terms."""
    return reduce_basic(to_basic(p, spec)).key


def decide_equal(p: ProcTerm, q: ProcTerm, spec: Spec) -> bool:
    """Equality of reduced basic forms (implies bisimilarity)."""
    return canonical_key(p, spec) == canonical_key(q, spec)

