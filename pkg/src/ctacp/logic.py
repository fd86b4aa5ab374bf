"""Three-valued paraconsistent propositional logic with implication and falsity.

Formulas are immutable ASTs.  Every logical question (consequence,
equivalence, consistency) is decided by enumerating all ``3**n``
valuations of a finite signature; a formula's values over that
enumeration form its *truth vector*, stored as ``bytes``.
"""

from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from . import kernels
from .errors import CapacityError, SignatureError

DEFAULT_ATOM_CAP = 6


def atom_cap() -> int:
    return int(os.environ.get("CTACP_ATOM_CAP", DEFAULT_ATOM_CAP))


class TruthValue(enum.IntEnum):
    """Canonical order FALSE < TRUE < BOTH (also the byte encoding)."""

    FALSE = 0
    TRUE = 1
    BOTH = 2

    @property
    def designated(self) -> bool:
        return self is not TruthValue.FALSE

    def __str__(self):
        return "ftb"[self]


F, T, B = TruthValue.FALSE, TruthValue.TRUE, TruthValue.BOTH


# ---------------------------------------------------------------- formulas


class Formula:
    """Base class for formula nodes."""

    __slots__ = ()

    def atoms(self) -> tuple[str, ...]:
        """Atom names in order of first occurrence."""
        seen: dict[str, None] = {}
        _collect_atoms(self, seen)
        return tuple(seen)

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Falsity(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


FALSITY = Falsity()
TRUTH = Not(FALSITY)


def BiImpl(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def Iff(a: Formula, b: Formula) -> Formula:
    """Internalized logical equivalence: a Iff b is a theorem iff a ≡ b."""
    return And(BiImpl(a, b), BiImpl(Not(a), Not(b)))


def Cons(a: Formula) -> Formula:
    """Internalized consistency: a tautology iff ``a`` is never BOTH."""
    return Or(Implies(a, FALSITY), Implies(Not(a), FALSITY))


# Equivalence laws over three formula variables, as (name, lhs, rhs).
LAWS = [
    ("and_false", lambda a, b, c: And(a, FALSITY), lambda a, b, c: FALSITY),
    ("or_true", lambda a, b, c: Or(a, TRUTH), lambda a, b, c: TRUTH),
    ("and_true", lambda a, b, c: And(a, TRUTH), lambda a, b, c: a),
    ("or_false", lambda a, b, c: Or(a, FALSITY), lambda a, b, c: a),
    ("and_idempotent", lambda a, b, c: And(a, a), lambda a, b, c: a),
    ("or_idempotent", lambda a, b, c: Or(a, a), lambda a, b, c: a),
    ("and_commutative", lambda a, b, c: And(a, b), lambda a, b, c: And(b, a)),
    ("or_commutative", lambda a, b, c: Or(a, b), lambda a, b, c: Or(b, a)),
    ("and_associative", lambda a, b, c: And(And(a, b), c), lambda a, b, c: And(a, And(b, c))),
    ("or_associative", lambda a, b, c: Or(Or(a, b), c), lambda a, b, c: Or(a, Or(b, c))),
    ("and_distributes", lambda a, b, c: And(a, Or(b, c)), lambda a, b, c: Or(And(a, b), And(a, c))),
    ("or_distributes", lambda a, b, c: Or(a, And(b, c)), lambda a, b, c: And(Or(a, b), Or(a, c))),
    (
        "implication_conjoins_consequents",
        lambda a, b, c: And(Implies(a, b), Implies(a, c)),
        lambda a, b, c: Implies(a, And(b, c)),
    ),
    (
        "implication_joins_antecedents",
        lambda a, b, c: And(Implies(a, c), Implies(b, c)),
        lambda a, b, c: Implies(Or(a, b), c),
    ),
    ("excluded_middle_antecedent", lambda a, b, c: Implies(Or(a, Not(a)), b), lambda a, b, c: b),
    ("exportation", lambda a, b, c: Implies(a, Implies(b, c)), lambda a, b, c: Implies(And(a, b), c)),
]


def _collect_atoms(f: Formula, seen: dict) -> None:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            seen.setdefault(g.name, None)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or, Implies)):
            stack.append(g.right)
            stack.append(g.left)


def formula_size(f: Formula) -> int:
    if isinstance(f, (Atom, Falsity)):
        return 1
    if isinstance(f, Not):
        return 1 + formula_size(f.arg)
    return 1 + formula_size(f.left) + formula_size(f.right)


# ------------------------------------------------------------- simplifier


def conj(a: Formula, b: Formula) -> Formula:
    """``a ∧ b`` with the unit, zero and idempotence laws applied."""
    if a == FALSITY or b == FALSITY:
        return FALSITY
    if a == TRUTH:
        return b
    if b == TRUTH or a == b:
        return a
    return And(a, b)


def disj(a: Formula, b: Formula) -> Formula:
    if a == TRUTH or b == TRUTH:
        return TRUTH
    if a == FALSITY:
        return b
    if b == FALSITY or a == b:
        return a
    return Or(a, b)


def simplify(f: Formula) -> Formula:
    """Bottom-up application of A∧⊥=⊥, A∨⊤=⊤, A∧⊤=A, A∨⊥=A, A∧A=A, A∨A=A."""
    if isinstance(f, Not):
        return Not(simplify(f.arg))
    if isinstance(f, And):
        return conj(simplify(f.left), simplify(f.right))
    if isinstance(f, Or):
        return disj(simplify(f.left), simplify(f.right))
    if isinstance(f, Implies):
        return Implies(simplify(f.left), simplify(f.right))
    return f


# -------------------------------------------------------------- printing

_PREC = {Implies: 1, Or: 2, And: 3}


def _cons_arg(f: Formula):
    if (
        isinstance(f, Or)
        and isinstance(f.left, Implies)
        and isinstance(f.right, Implies)
        and f.left.right == FALSITY
        and f.right.right == FALSITY
        and f.right.left == Not(f.left.left)
    ):
        return f.left.left
    return None


def format_formula(f: Formula) -> str:
    """Render in DSL syntax; the output re-parses to the same AST."""
    return _fmt(f, 0)


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if f == FALSITY:
        return "ff"
    if f == TRUTH:
        return "tt"
    inner = _cons_arg(f)
    if inner is not None:
        return f"Cons({_fmt(inner, 0)})"
    if isinstance(f, Not):
        return "~" + _fmt(f.arg, 4)
    prec = _PREC[type(f)]
    if isinstance(f, Implies):
        # right-associative
        text = f"{_fmt(f.left, prec + 1)} => {_fmt(f.right, prec)}"
    else:
        op = " /\\ " if isinstance(f, And) else " \\/ "
        text = f"{_fmt(f.left, prec)}{op}{_fmt(f.right, prec + 1)}"
    return f"({text})" if prec < ctx else text


# ------------------------------------------------------------- semantics


class PropSignature:
    """Ordered, duplicate-free list of atom names.

    Valuation ``i`` is the mixed-radix expansion of ``i`` over the atoms in
    declaration order (first atom most significant, digit order F, T, B).
    """

    def __init__(self, atoms: Iterable[str] = (), cap: int | None = None):
        atoms = tuple(atoms)
        if len(set(atoms)) != len(atoms):
            raise SignatureError(f"duplicate atom in signature {atoms}")
        cap = atom_cap() if cap is None else cap
        if len(atoms) > cap:
            raise CapacityError(f"{len(atoms)} atoms exceed the atom cap of {cap}")
        self.atoms = atoms
        self.cap = cap
        self.index = {a: i for i, a in enumerate(atoms)}
        self.size = 3 ** len(atoms)
        self._cache: dict[Formula, bytes] = {}

    def __eq__(self, other):
        return isinstance(other, PropSignature) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"PropSignature({list(self.atoms)})"

    def __len__(self):
        return len(self.atoms)

    def valuations(self) -> Iterator[dict[str, TruthValue]]:
        for values in itertools.product(TruthValue, repeat=len(self.atoms)):
            yield dict(zip(self.atoms, values))

    def valuation(self, i: int) -> dict[str, TruthValue]:
        digits = []
        for _ in self.atoms:
            i, d = divmod(i, 3)
            digits.append(TruthValue(d))
        return dict(zip(self.atoms, reversed(digits)))

    def check(self, f: Formula) -> None:
        for name in f.atoms():
            if name not in self.index:
                raise SignatureError(f"unknown atom {name!r}")

    def vector(self, f: Formula) -> bytes:
        """Truth vector of ``f``; memoized (a write-once cache)."""
        v = self._cache.get(f)
        if v is None:
            v = self._vector(f)
            self._cache[f] = v
        return v

    def _vector(self, f: Formula) -> bytes:
        if isinstance(f, Atom):
            i = self.index.get(f.name)
            if i is None:
                raise SignatureError(f"unknown atom {f.name!r}")
            return kernels.atom_vector(i, len(self.atoms))
        if isinstance(f, Falsity):
            return bytes(self.size)
        if isinstance(f, Not):
            return kernels.vec_not(self.vector(f.arg))
        left, right = self.vector(f.left), self.vector(f.right)
        if isinstance(f, And):
            return kernels.vec_and(left, right)
        if isinstance(f, Or):
            return kernels.vec_or(left, right)
        if isinstance(f, Implies):
            return kernels.vec_imp(left, right)
        raise TypeError(f"not a formula: {f!r}")

    @property
    def top(self) -> bytes:
        return bytes([1]) * self.size

    @property
    def bottom(self) -> bytes:
        return bytes(self.size)


def eval_formula(f: Formula, v: Mapping[str, TruthValue]) -> TruthValue:
    """Value of ``f`` under valuation ``v`` (direct recursive evaluation)."""
    if isinstance(f, Atom):
        try:
            return TruthValue(v[f.name])
        except KeyError:
            raise SignatureError(f"unknown atom {f.name!r}") from None
    if isinstance(f, Falsity):
        return F
    if isinstance(f, Not):
        x = eval_formula(f.arg, v)
        return {F: T, T: F}.get(x, B)
    x, y = eval_formula(f.left, v), eval_formula(f.right, v)
    if isinstance(f, And):
        if x is T and y is T:
            return T
        return F if F in (x, y) else B
    if isinstance(f, Or):
        if T in (x, y):
            return T
        return F if x is F and y is F else B
    if isinstance(f, Implies):
        return T if x is F else y
    raise TypeError(f"not a formula: {f!r}")


eval = eval_formula  # noqa: A001  (the operation's conventional name)


def _signature_for(formulas: Iterable[Formula], sig: PropSignature | None) -> PropSignature:
    if sig is not None:
        return sig
    seen: dict[str, None] = {}
    for f in formulas:
        _collect_atoms(f, seen)
    return PropSignature(seen)


def truth_vector(f: Formula, sig: PropSignature | None = None) -> tuple[TruthValue, ...]:
    sig = _signature_for([f], sig)
    return tuple(TruthValue(x) for x in sig.vector(f))


def is_tautology(f: Formula, sig: PropSignature | None = None) -> bool:
    sig = _signature_for([f], sig)
    return 0 not in sig.vector(f)


def entails(gamma: Iterable[Formula], f: Formula, sig: PropSignature | None = None) -> bool:
    """Γ ⊨ A: at every valuation some member of Γ is false or A is designated."""
    gamma = list(gamma)
    sig = _signature_for(gamma + [f], sig)
    target = sig.vector(f)
    premises = [sig.vector(g) for g in gamma]
    for i in range(sig.size):
        if target[i] == 0 and all(p[i] != 0 for p in premises):
            return False
    return True


def lequiv(a: Formula, b: Formula, sig: PropSignature | None = None) -> bool:
    sig = _signature_for([a, b], sig)
    return sig.vector(a) == sig.vector(b)


def is_consistent(f: Formula, sig: PropSignature | None = None) -> bool:
    sig = _signature_for([f], sig)
    return 2 not in sig.vector(f)


def is_false_equiv(f: Formula, sig: PropSignature | None = None) -> bool:
    """Membership of ``f`` in the equivalence class of ⊥."""
    sig = _signature_for([f], sig)
    return not any(sig.vector(f))


def classical_taut(f: Formula, sig: PropSignature | None = None) -> bool:
    """Two-valued tautology check with the classical connective tables."""
    atoms = _signature_for([f], sig).atoms
    for values in itertools.product((False, True), repeat=len(atoms)):
        if not _classical(f, dict(zip(atoms, values))):
            return False
    return True


def _classical(f: Formula, v: Mapping[str, bool]) -> bool:
    if isinstance(f, Atom):
        return v[f.name]
    if isinstance(f, Falsity):
        return False
    if isinstance(f, Not):
        return not _classical(f.arg, v)
    x, y = _classical(f.left, v), _classical(f.right, v)
    if isinstance(f, And):
        return x and y
    if isinstance(f, Or):
        return x or y
    return (not x) or y


# ------------------------------------------------------------------ props


@dataclass(frozen=True, slots=True)
class Prop:
    """A formula together with its truth vector over a fixed signature.

    Equality and hashing look at the vector only, so two logically
    equivalent formulas are the same ``Prop``; ``formula`` is kept for
    printing.
    """

    vec: bytes
    formula: Formula = field(compare=False)

    @property
    def is_false(self) -> bool:
        return not any(self.vec)

    @property
    def is_true(self) -> bool:
        return 0 not in self.vec and 2 not in self.vec

    def __and__(self, other: "Prop") -> "Prop":
        v = kernels.vec_and(self.vec, other.vec)
        if v == self.vec:
            return self
        if v == other.vec:
            return other
        return Prop(v, conj(self.formula, other.formula))

    def __or__(self, other: "Prop") -> "Prop":
        v = kernels.vec_or(self.vec, other.vec)
        if v == self.vec:
            return self
        if v == other.vec:
            return other
        return Prop(v, disj(self.formula, other.formula))

    def implies(self, other: "Prop") -> "Prop":
        v = kernels.vec_imp(self.vec, other.vec)
        if v == other.vec:
            return other
        if 0 not in v and 2 not in v:
            return Prop(v, TRUTH)
        return Prop(v, Implies(self.formula, other.formula))

    def __str__(self):
        return format_formula(self.formula)


def make_prop(f: Formula, sig: PropSignature) -> Prop:
    return Prop(sig.vector(f), f)
