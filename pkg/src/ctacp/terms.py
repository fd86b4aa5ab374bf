"""Process terms, communication and state tables, and the ``Spec`` container.

A ``Spec`` is the context every process-level operation runs in: it
fixes the atoms, the actions, the communication function, the state
operators and the recursive specifications.  It also carries the
write-once memo tables used by normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import SpecError
from .logic import FALSITY, TRUTH, Formula, Prop, PropSignature, make_prop

DELTA = "delta"  # reserved; never a declared action


class ProcTerm:
    """Base class for process term nodes (hash is computed once)."""

    __slots__ = ("_hash",)

    def _cached_hash(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
            return h

    def __str__(self):
        from .syntax import pretty

        return pretty(self)


@dataclass(frozen=True, slots=True)
class Delta(ProcTerm):
    pass


@dataclass(frozen=True, slots=True)
class Nex(ProcTerm):
    pass


@dataclass(frozen=True, slots=True)
class Act(ProcTerm):
    name: str


@dataclass(frozen=True, slots=True)
class Alt(ProcTerm):
    left: ProcTerm
    right: ProcTerm


@dataclass(frozen=True, slots=True)
class Seq(ProcTerm):
    left: ProcTerm
    right: ProcTerm


@dataclass(frozen=True, slots=True)
class Guard(ProcTerm):
    cond: Formula
    body: ProcTerm


@dataclass(frozen=True, slots=True)
class Emit(ProcTerm):
    cond: Formula
    body: ProcTerm


@dataclass(frozen=True, slots=True)
class Par(ProcTerm):
    left: ProcTerm
    right: ProcTerm


@dataclass(frozen=True, slots=True)
class LeftMerge(ProcTerm):
    left: ProcTerm
    right: ProcTerm


@dataclass(frozen=True, slots=True)
class CommMerge(ProcTerm):
    left: ProcTerm
    right: ProcTerm


@dataclass(frozen=True, slots=True)
class Encap(ProcTerm):
    blocked: frozenset
    body: ProcTerm


@dataclass(frozen=True, slots=True)
class State(ProcTerm):
    state: str
    body: ProcTerm


@dataclass(frozen=True, slots=True)
class RecConst(ProcTerm):
    var: str
    spec: str


@dataclass(frozen=True, slots=True)
class Var(ProcTerm):
    name: str


for _cls in (Delta, Nex, Act, Alt, Seq, Guard, Emit, Par, LeftMerge, CommMerge, Encap, State, RecConst, Var):
    _cls.__hash__ = ProcTerm._cached_hash

DELTA_TERM = Delta()
NEX_TERM = Nex()

BINARY = (Alt, Seq, Par, LeftMerge, CommMerge)
MERGES = (Par, LeftMerge, CommMerge)


def children(t: ProcTerm) -> tuple[ProcTerm, ...]:
    if isinstance(t, BINARY):
        return (t.left, t.right)
    if isinstance(t, (Guard, Emit, Encap, State)):
        return (t.body,)
    return ()


def subterms(t: ProcTerm):
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(children(u))


_REC_MEMO: dict[ProcTerm, bool] = {}


def has_recursion(t: ProcTerm) -> bool:
    """True if ``t`` contains a recursion constant or a variable."""
    r = _REC_MEMO.get(t)
    if r is None:
        if isinstance(t, (RecConst, Var)):
            r = True
        else:
            r = any(has_recursion(c) for c in children(t))
        if len(_REC_MEMO) > 500_000:
            _REC_MEMO.clear()
        _REC_MEMO[t] = r
    return r


def free_vars(t: ProcTerm) -> set[str]:
    return {u.name for u in subterms(t) if isinstance(u, Var)}


def term_size(t: ProcTerm) -> int:
    """AST node count; a guard or emission formula counts as one node."""
    n = 0
    for u in subterms(t):
        n += 2 if isinstance(u, (Guard, Emit)) else 1
    return n


def alt_all(terms: Iterable[ProcTerm]) -> ProcTerm:
    terms = list(terms)
    if not terms:
        return DELTA_TERM
    out = terms[0]
    for t in terms[1:]:
        out = Alt(out, t)
    return out


# ------------------------------------------------------------------ tables


class CommTable:
    """Communication function on actions; missing entries mean δ.

    Built from declared entries via :func:`ctacp.syntax.validate_comm`,
    which completes the table symmetrically and checks associativity.
    """

    def __init__(self, entries: Mapping[tuple[str, str], str] | None = None):
        self.entries: dict[tuple[str, str], str] = dict(entries or {})

    def __call__(self, a: str, b: str) -> str:
        if a == DELTA or b == DELTA:
            return DELTA
        return self.entries.get((a, b), DELTA)

    def __eq__(self, other):
        return isinstance(other, CommTable) and self.entries == other.entries

    def __repr__(self):
        return f"CommTable({self.entries!r})"

    def declared(self) -> list[tuple[str, str, str]]:
        """One entry per unordered pair, sorted."""
        out = []
        for (a, b), c in sorted(self.entries.items()):
            if a <= b and c != DELTA:
                out.append((a, b, c))
        return out


@dataclass
class StateTable:
    """State space for the state operators.

    ``act``, ``eff`` and ``sig`` are partial here; lookups fall back to
    act(a, s) = a, eff(a, s) = s and sig(s) = tt.
    """

    name: str
    states: tuple[str, ...]
    act_map: dict[tuple[str, str], str] = field(default_factory=dict)
    eff_map: dict[tuple[str, str], str] = field(default_factory=dict)
    sig_map: dict[str, Formula] = field(default_factory=dict)

    def act(self, a: str, s: str) -> str:
        if a == DELTA:
            return DELTA
        return self.act_map.get((a, s), a)

    def eff(self, a: str, s: str) -> str:
        return self.eff_map.get((a, s), s)

    def sig(self, s: str) -> Formula:
        return self.sig_map.get(s, TRUTH)


@dataclass
class RecSpec:
    """Named recursive specification ``{X = t_X, ...}``."""

    name: str
    equations: dict[str, ProcTerm]

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.equations)

    def unfold(self, var: str) -> ProcTerm:
        """``<t_X | E>``: the right-hand side with every Y replaced by <Y | E>."""
        if var not in self.equations:
            raise SpecError(f"variable {var!r} is not bound in recspec {self.name!r}")
        return substitute(self.equations[var], lambda y: RecConst(y, self.name))


def substitute(t: ProcTerm, fn) -> ProcTerm:
    """Replace each ``Var(y)`` by ``fn(y)``."""
    if isinstance(t, Var):
        return fn(t.name)
    if isinstance(t, BINARY):
        return type(t)(substitute(t.left, fn), substitute(t.right, fn))
    if isinstance(t, (Guard, Emit)):
        return type(t)(t.cond, substitute(t.body, fn))
    if isinstance(t, Encap):
        return Encap(t.blocked, substitute(t.body, fn))
    if isinstance(t, State):
        return State(t.state, substitute(t.body, fn))
    return t


@dataclass(frozen=True)
class Query:
    kind: str
    args: tuple = ()


# -------------------------------------------------------------------- spec


class Spec:
    """A validated specification, also the evaluation context.

    Treat instances as immutable once built; the ``_memo`` tables are
    caches whose entries are written once and never changed.
    """

    def __init__(
        self,
        atoms: Iterable[str] = (),
        actions: Iterable[str] = (),
        comm: CommTable | None = None,
        statespaces: Iterable[StateTable] = (),
        recspecs: Iterable[RecSpec] = (),
        defs: Mapping[str, ProcTerm] | None = None,
        queries: Iterable[Query] = (),
        atom_cap: int | None = None,
    ):
        self.signature = PropSignature(atoms, cap=atom_cap)
        self.actions = tuple(actions)
        self.comm = comm or CommTable()
        self.statespaces = {t.name: t for t in statespaces}
        self.recspecs = {r.name: r for r in recspecs}
        self.defs = dict(defs or {})
        self.queries = list(queries)
        self._state_owner: dict[str, StateTable] = {}
        for table in self.statespaces.values():
            for s in table.states:
                if s in self._state_owner:
                    raise SpecError(f"state {s!r} declared in two state spaces")
                self._state_owner[s] = table
        self._memo: dict[str, dict] = {}
        self.top = make_prop(TRUTH, self.signature)
        self.bottom = make_prop(FALSITY, self.signature)

    def __eq__(self, other):
        if not isinstance(other, Spec):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.actions == other.actions
            and self.comm == other.comm
            and self.statespaces == other.statespaces
            and {k: v.equations for k, v in self.recspecs.items()}
            == {k: v.equations for k, v in other.recspecs.items()}
            and self.defs == other.defs
            and self.queries == other.queries
        )

    __hash__ = None

    @property
    def atoms(self) -> tuple[str, ...]:
        return self.signature.atoms

    def memo(self, name: str) -> dict:
        table = self._memo.get(name)
        if table is None:
            table = self._memo[name] = {}
        return table

    def prop(self, f: Formula) -> Prop:
        return make_prop(f, self.signature)

    def vector(self, f: Formula) -> bytes:
        return self.signature.vector(f)

    def is_false(self, f: Formula) -> bool:
        return not any(self.signature.vector(f))

    def state_table(self, s: str) -> StateTable:
        try:
            return self._state_owner[s]
        except KeyError:
            raise SpecError(f"unknown state {s!r}") from None

    def recspec(self, name: str) -> RecSpec:
        try:
            return self.recspecs[name]
        except KeyError:
            raise SpecError(f"unknown recursive specification {name!r}") from None

    def unfold(self, c: RecConst) -> ProcTerm:
        return self.recspec(c.spec).unfold(c.var)

    def process(self, name: str) -> ProcTerm:
        try:
            return self.defs[name]
        except KeyError:
            raise SpecError(f"unknown process {name!r}") from None

    def extended(self, recspecs: Iterable[RecSpec] = (), defs: Mapping[str, ProcTerm] | None = None) -> "Spec":
        """A new spec with extra recursive specifications or definitions."""
        return Spec(
            self.atoms,
            self.actions,
            self.comm,
            self.statespaces.values(),
            [*self.recspecs.values(), *recspecs],
            {**self.defs, **(defs or {})},
            self.queries,
            self.signature.cap,
        )
