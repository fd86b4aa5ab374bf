"""Independent brute-force oracles used to cross-check the library.

The logic oracle evaluates formulas with the min/max reading of the
connectives over the order F < B < T, which is a different formulation
from the table lookups used by the library.  The bisimulation oracle
computes the greatest bisimulation as a set of state pairs by naive
fixpoint iteration, straight from the transfer conditions.
"""

import itertools

from ctacp.logic import And, Atom, Falsity, Implies, Not, Or
from ctacp.sos import TICK, explore

F, T, B = 0, 1, 2
_RANK = {F: 0, B: 1, T: 2}
_UNRANK = {0: F, 1: B, 2: T}


def value(f, v):
    if isinstance(f, Atom):
        return v[f.name]
    if isinstance(f, Falsity):
        return F
    if isinstance(f, Not):
        x = value(f.arg, v)
        return {F: T, T: F, B: B}[x]
    x, y = value(f.left, v), value(f.right, v)
    if isinstance(f, And):
        return _UNRANK[min(_RANK[x], _RANK[y])]
    if isinstance(f, Or):
        return _UNRANK[max(_RANK[x], _RANK[y])]
    if isinstance(f, Implies):
        return T if x == F else y
    raise TypeError(f)


def valuations(atoms):
    for vals in itertools.product((F, T, B), repeat=len(atoms)):
        yield dict(zip(atoms, vals))


def tautology(f, atoms):
    return all(value(f, v) != F for v in valuations(atoms))


def equivalent(f, g, atoms):
    return all(value(f, v) == value(g, v) for v in valuations(atoms))


def entails(gamma, f, atoms):
    for v in valuations(atoms):
        if all(value(g, v) != F for g in gamma) and value(f, v) == F:
            return False
    return True


def bisimilar(p, q, spec, budget=2000):
    """Greatest bisimulation by pair elimination on the symbolic system."""
    lts = explore([p, q], spec, budget=budget, key="syntactic")
    atoms = spec.atoms
    vals = list(valuations(atoms))
    n = lts.n_states

    def sigval(s, v):
        return value(lts.signals[s].formula, v)

    moves = {}
    for s in range(n):
        for k, v in enumerate(vals):
            out = set()
            if sigval(s, v) != F:
                for src, g, a, d in lts.transitions:
                    if src == s and value(g.formula, v) != F:
                        out.add((a, d))
            moves[s, k] = out

    def same_signal(s, t):
        if (lts.terms[s] is TICK) != (lts.terms[t] is TICK):
            return False
        return all(sigval(s, v) == sigval(t, v) for v in vals)

    rel = {(s, t) for s in range(n) for t in range(n) if same_signal(s, t)}
    changed = True
    while changed:
        changed = False
        for s, t in list(rel):
            ok = True
            for k in range(len(vals)):
                ms, mt = moves[s, k], moves[t, k]
                if any(not any(b == a and (d, e) in rel for b, e in mt) for a, d in ms):
                    ok = False
                elif any(not any(b == a and (d, e) in rel for b, d in ms) for a, e in mt):
                    ok = False
                if not ok:
                    break
            if not ok:
                rel.discard((s, t))
                changed = True
    s, t = lts.roots
    return (s, t) in rel
