"""Random and exhaustive generators for formulas, terms and linear specs.

All random generators take a ``random.Random`` so results are
reproducible from a seed.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Callable, Sequence

from .logic import FALSITY, TRUTH, And, Atom, Formula, Implies, Not, Or
from .terms import (
    DELTA,
    DELTA_TERM,
    NEX_TERM,
    Act,
    Alt,
    CommMerge,
    Emit,
    Encap,
    Guard,
    LeftMerge,
    Par,
    ProcTerm,
    RecSpec,
    Seq,
    Spec,
    State,
    Var,
)

# ------------------------------------------------------------- formulas


def random_formula(rng: random.Random, atoms: Sequence[str], depth: int, implication: bool = True) -> Formula:
    """Random formula of depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        k = rng.randrange(len(atoms) + 2)
        if k < len(atoms):
            return Atom(atoms[k])
        return FALSITY if k == len(atoms) else TRUTH
    ops = ["not", "and", "or"] + (["imp"] if implication else [])
    op = rng.choice(ops)
    if op == "not":
        return Not(random_formula(rng, atoms, depth - 1, implication))
    left = random_formula(rng, atoms, depth - 1, implication)
    right = random_formula(rng, atoms, depth - 1, implication)
    return {"and": And, "or": Or, "imp": Implies}[op](left, right)


def enumerate_formulas(atoms: Sequence[str], max_size: int, implication: bool = False) -> list[Formula]:
    """Every formula over ``atoms`` and ⊥ with at most ``max_size`` nodes."""
    binary = [And, Or] + ([Implies] if implication else [])
    by_size: list[list[Formula]] = [[], [Atom(a) for a in atoms] + [FALSITY]]
    for n in range(2, max_size + 1):
        level = [Not(f) for f in by_size[n - 1]]
        for i in range(1, n - 1):
            for f, g in itertools.product(by_size[i], by_size[n - 1 - i]):
                level.extend(op(f, g) for op in binary)
        by_size.append(level)
    return [f for level in by_size for f in level]


# ---------------------------------------------------------------- terms


def action_term(a: str) -> ProcTerm:
    return DELTA_TERM if a == DELTA else Act(a)


class TermGen:
    """Random closed, recursion-free process terms.

    ``size`` follows :func:`ctacp.terms.term_size` (a guard or emission
    counts its formula as one node).
    """

    BINARY = {"+": Alt, ".": Seq, "||": Par, "||_": LeftMerge, "|": CommMerge}

    def __init__(
        self,
        spec: Spec,
        formula: Callable[[random.Random], Formula] | None = None,
        binary: Sequence[str] = ("+", ".", "||", "||_", "|"),
        unary: Sequence[str] = ("guard", "emit", "encap", "state"),
        leaves: Sequence[str] | None = None,
    ):
        self.spec = spec
        atoms = spec.atoms
        self.formula = formula or (lambda rng: random_formula(rng, atoms, 2))
        self.binary = list(binary)
        self.unary = [u for u in unary if u != "state" or spec.statespaces]
        self.weighted = leaves is None
        self.leaves = list(leaves) if leaves is not None else list(spec.actions) + ["delta", "nex"]
        self.states = [s for t in spec.statespaces.values() for s in t.states]

    def leaf(self, rng: random.Random) -> ProcTerm:
        if self.weighted:
            # nex absorbs most contexts, so keep it rare
            u = rng.random()
            name = "nex" if u < 0.04 else "delta" if u < 0.12 else rng.choice(self.spec.actions)
        else:
            name = rng.choice(self.leaves)
        if name == "delta":
            return DELTA_TERM
        if name == "nex":
            return NEX_TERM
        return Act(name)

    def term(self, rng: random.Random, size: int) -> ProcTerm:
        """Random term of size at most ``size`` (exactly ``size`` when possible)."""
        if size <= 1:
            return self.leaf(rng)
        choices = []
        if size >= 3:
            choices += self.binary
            choices += [u for u in self.unary if u in ("guard", "emit")]
        choices += [u for u in self.unary if u in ("encap", "state")]
        if not choices:
            return self.leaf(rng)
        op = rng.choice(choices)
        if op in self.BINARY:
            left = rng.randint(1, size - 2)
            return self.BINARY[op](self.term(rng, left), self.term(rng, size - 1 - left))
        if op == "guard":
            return Guard(self.formula(rng), self.term(rng, size - 2))
        if op == "emit":
            return Emit(self.formula(rng), self.term(rng, size - 2))
        if op == "encap":
            actions = list(self.spec.actions)
            blocked = frozenset(a for a in actions if rng.random() < 0.5)
            return Encap(blocked, self.term(rng, size - 1))
        return State(rng.choice(self.states), self.term(rng, size - 1))

    def sized(self, rng: random.Random, max_size: int) -> ProcTerm:
        # bias towards the larger sizes, where the interesting interactions are
        return self.term(rng, max(rng.randint(1, max_size), rng.randint(1, max_size)))


def enumerate_terms(
    max_size: int,
    leaves: Sequence[ProcTerm],
    formulas: Sequence[Formula],
    binary: Sequence[str] = ("+", ".", "||", "||_", "|"),
    unary: Sequence[str] = ("guard", "emit"),
) -> list[ProcTerm]:
    """Every term built from ``leaves`` with size at most ``max_size``."""
    ops = [TermGen.BINARY[b] for b in binary]

    @lru_cache(maxsize=None)
    def exact(n: int) -> tuple:
        if n == 1:
            return tuple(leaves)
        out = []
        for i in range(1, n - 1):
            for x, y in itertools.product(exact(i), exact(n - 1 - i)):
                out.extend(op(x, y) for op in ops)
        if n >= 3:
            for f in formulas:
                for x in exact(n - 2):
                    if "guard" in unary:
                        out.append(Guard(f, x))
                    if "emit" in unary:
                        out.append(Emit(f, x))
        return tuple(out)

    return [t for n in range(1, max_size + 1) for t in exact(n)]


# ---------------------------------------------------------- recursion


def random_linear_spec(
    rng: random.Random,
    name: str,
    n_vars: int,
    actions: Sequence[str],
    formula: Callable[[random.Random], Formula],
    max_summands: int = 3,
) -> RecSpec:
    """Random linear specification ``X_i = χ ^ δ + Σ φ :-> a · X_j + Σ ψ :-> b``."""
    names = [f"X{i}" for i in range(n_vars)]
    equations = {}
    for x in names:
        parts: list[ProcTerm] = []
        if rng.random() < 0.3:
            parts.append(Emit(formula(rng), DELTA_TERM))
        for _ in range(rng.randint(1, max_summands)):
            a = Act(rng.choice(actions))
            body = Seq(a, Var(rng.choice(names))) if rng.random() < 0.7 else a
            if rng.random() < 0.5:
                body = Guard(formula(rng), body)
            parts.append(body)
        t = parts[0]
        for u in parts[1:]:
            t = Alt(t, u)
        equations[x] = t
    return RecSpec(name, equations)
