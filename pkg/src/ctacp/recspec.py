"""Guarded recursion: guardedness check, linear form, unfolding.

Guardedness is decided conservatively.  Each right-hand side exposes the
variables (and recursion constants) it can reach without first doing an
action: through ``+``, the left operand of ``·``, guards, emissions,
``∂_H``, ``λ_s`` and both operands of the merges.  A specification is
accepted when the "exposes" relation has no cycle, i.e. when repeatedly
replacing exposed variables by their right-hand sides ends in a term
whose every variable sits behind an action prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import GuardednessError, LinearizationError, SpecError
from .logic import Prop
from .terms import (
    Act,
    Alt,
    CommMerge,
    Delta,
    Emit,
    Encap,
    Guard,
    LeftMerge,
    Par,
    ProcTerm,
    RecConst,
    RecSpec,
    Seq,
    Spec,
    State,
    Var,
    alt_all,
    free_vars,
    has_recursion,
)

DEFAULT_FRESH_LIMIT = 64


def exposed(t: ProcTerm) -> list[tuple]:
    """Unguarded occurrences in ``t``: ``("var", X)`` or ``("const", E, X)``."""
    if isinstance(t, Var):
        return [("var", t.name)]
    if isinstance(t, RecConst):
        return [("const", t.spec, t.var)]
    if isinstance(t, Seq):
        return exposed(t.left)
    if isinstance(t, (Alt, Par, LeftMerge, CommMerge)):
        return exposed(t.left) + exposed(t.right)
    if isinstance(t, (Guard, Emit, Encap, State)):
        return exposed(t.body)
    return []


def check_guarded(e: RecSpec, others: Mapping[str, RecSpec] | None = None) -> None:
    """Raise :class:`GuardednessError` unless every recursion in ``e`` is guarded.

    ``others`` maps names to the specifications that constants in ``e``
    may refer to (``e`` itself is always included).
    """
    specs = dict(others or {})
    specs[e.name] = e
    for var, body in e.equations.items():
        unbound = free_vars(body) - set(e.equations)
        if unbound:
            raise SpecError(f"recspec {e.name}: variable {sorted(unbound)[0]!r} in the equation for {var} is not bound")

    def successors(node):
        spec_name, var = node
        rs = specs.get(spec_name)
        if rs is None:
            raise SpecError(f"unknown recursive specification {spec_name!r}")
        if var not in rs.equations:
            raise SpecError(f"variable {var!r} is not bound in recspec {spec_name!r}")
        out = []
        for occ in exposed(rs.equations[var]):
            out.append((spec_name, occ[1]) if occ[0] == "var" else (occ[1], occ[2]))
        return out

    # depth-first search for a cycle through the "exposes" relation
    state: dict[tuple, int] = {}  # 1 = on stack, 2 = done
    for var in e.equations:
        start = (e.name, var)
        if state.get(start) == 2:
            continue
        stack = [(start, iter(successors(start)))]
        path = [start]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                path.pop()
                continue
            mark = state.get(nxt)
            if mark == 1:
                cycle = path[path.index(nxt):] + [nxt]
                shown = " -> ".join(x for _, x in cycle)
                where = cycle[0][1]
                raise GuardednessError(
                    f"recspec {e.name}: unguarded occurrence of {cycle[1][1]} "
                    f"in the equation for {where} (unguarded path {shown})",
                    variable=cycle[1][1],
                    position=where,
                )
            if mark is None:
                state[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(successors(nxt))))


def is_guarded(e: RecSpec, others: Mapping[str, RecSpec] | None = None) -> bool:
    try:
        check_guarded(e, others)
    except GuardednessError:
        return False
    return True


def unfold(var: str, e: RecSpec) -> ProcTerm:
    """``<t_X | E>``: the right-hand side for ``var`` with constants for variables."""
    return e.unfold(var)


# --------------------------------------------------------------- linear


@dataclass
class LinearEquation:
    root: Prop
    steps: list = field(default_factory=list)  # (guard, action, variable)
    terms: list = field(default_factory=list)  # (guard, action)

    def to_term(self) -> ProcTerm:
        parts: list[ProcTerm] = []
        for g, a, x in self.steps:
            parts.append(_guard(g, Seq(Act(a), Var(x))))
        for g, a in self.terms:
            parts.append(_guard(g, Act(a)))
        if not self.root.is_true:
            parts.insert(0, Emit(self.root.formula, Delta()))
        return alt_all(parts or [Delta()])


def _guard(g: Prop, t: ProcTerm) -> ProcTerm:
    return t if g.is_true else Guard(g.formula, t)


@dataclass
class LinearSpec:
    name: str
    equations: dict[str, LinearEquation]

    def to_recspec(self) -> RecSpec:
        return RecSpec(self.name, {x: eq.to_term() for x, eq in self.equations.items()})


def to_linear(e: RecSpec, spec: Spec, fresh_limit: int = DEFAULT_FRESH_LIMIT) -> LinearSpec:
    """Bring a guarded specification into linear form.

    Right-hand sides are expanded at the head with variables treated as
    opaque; continuations that are not a single variable get a fresh
    variable (shared between equal continuations).  Merges, encapsulation
    and state operators over variables are rejected.
    """
    check_guarded(e, spec.recspecs)
    equations: dict[str, LinearEquation] = {}
    names: dict[ProcTerm, str] = {}
    taken = set(e.equations)
    todo: list[tuple[str, ProcTerm]] = list(e.equations.items())
    head_memo: dict[ProcTerm, tuple] = {}
    sig_memo: dict[ProcTerm, Prop] = {}

    def sig(t: ProcTerm) -> Prop:
        """Root signal; only looks at head positions, so it terminates on guarded input."""
        r = sig_memo.get(t)
        if r is not None:
            return r
        if isinstance(t, Var):
            r = sig(e.equations[t.name])
        elif not free_vars(t):
            from .normalize import signal_prop

            r = signal_prop(t, spec)
        elif isinstance(t, Seq):
            r = sig(t.left)
        elif isinstance(t, Guard):
            r = spec.prop(t.cond).implies(sig(t.body))
        elif isinstance(t, Emit):
            r = spec.prop(t.cond) & sig(t.body)
        elif isinstance(t, (Encap, State)):
            r = head(t)[0]
        else:
            r = sig(t.left) & sig(t.right)
        sig_memo[t] = r
        return r

    def head(t: ProcTerm):
        """(root, steps with term continuations, terms) of ``t``."""
        r = head_memo.get(t)
        if r is not None:
            return r
        if isinstance(t, Var):
            r = head(e.equations[t.name])
        elif not free_vars(t):
            if has_recursion(t):
                raise LinearizationError(f"recursion constant inside {e.name} is not supported: {t}", term=t)
            from .normalize import NEX, embed, to_basic

            b = to_basic(t, spec)
            if b == NEX:
                r = (spec.bottom, [], [])
            else:
                r = (b.root, [(g, a, embed(c)) for g, a, c in b.steps], list(b.terms))
        elif isinstance(t, Alt):
            r1, s1, t1 = head(t.left)
            r2, s2, t2 = head(t.right)
            r = (r1 & r2, s1 + s2, t1 + t2)
        elif isinstance(t, Seq):
            r1, s1, t1 = head(t.left)
            right_sig = sig(t.right)
            steps = [(g, a, Seq(c, t.right)) for g, a, c in s1]
            if not right_sig.is_false:
                steps += [(g, a, t.right) for g, a in t1]
            r = (r1, steps, [])
        elif isinstance(t, Guard):
            phi = spec.prop(t.cond)
            r1, s1, t1 = head(t.body)
            r = (phi.implies(r1), [(phi & g, a, c) for g, a, c in s1], [(phi & g, a) for g, a in t1])
        elif isinstance(t, Emit):
            phi = spec.prop(t.cond)
            r1, s1, t1 = head(t.body)
            r = (phi & r1, s1, t1)
        else:
            kind = type(t).__name__
            raise LinearizationError(
                f"recspec {e.name}: {kind} over a recursion variable is not linearizable: {t}", term=t
            )
        head_memo[t] = r
        return r

    def var_for(c: ProcTerm) -> str:
        if isinstance(c, Var):
            return c.name
        name = names.get(c)
        if name is None:
            if len(names) >= fresh_limit:
                raise LinearizationError(
                    f"recspec {e.name}: more than {fresh_limit} fresh variables needed; last continuation {c}",
                    term=c,
                )
            i = len(names) + 1
            while f"{e.name}_{i}" in taken:
                i += 1
            name = f"{e.name}_{i}"
            taken.add(name)
            names[c] = name
            todo.append((name, c))
        return name

    while todo:
        x, t = todo.pop(0)
        if x in equations:
            continue
        root, steps, terms = head(t)
        if root.is_false:
            raise LinearizationError(f"recspec {e.name}: the equation for {x} denotes nex", term=t)
        lin = LinearEquation(root)
        for g, a, c in steps:
            g = root & g
            if not g.is_false and not sig(c).is_false:
                lin.steps.append((g, a, var_for(c)))
        for g, a in terms:
            g = root & g
            if not g.is_false:
                lin.terms.append((g, a))
        equations[x] = lin
    ordered = {x: equations[x] for x in e.equations}
    ordered.update((x, eq) for x, eq in equations.items() if x not in ordered)
    return LinearSpec(e.name, ordered)


def is_linear(e: RecSpec) -> bool:
    """True if every right-hand side already has the linear shape."""

    def summand_ok(t):
        while isinstance(t, (Guard, Emit)):
            t = t.body
        if isinstance(t, (Act, Delta)):
            return True
        return isinstance(t, Seq) and isinstance(t.left, Act) and isinstance(t.right, Var)

    def ok(t):
        if isinstance(t, Alt):
            return ok(t.left) and ok(t.right)
        return summand_ok(t)

    return all(ok(t) for t in e.equations.values())


__all__ = [
    "LinearEquation",
    "LinearSpec",
    "check_guarded",
    "exposed",
    "is_guarded",
    "is_linear",
    "to_linear",
    "unfold",
]
