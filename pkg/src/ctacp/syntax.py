"""Lexer, parser and pretty-printer for the specification DSL.

Process operators, loosest first::

    +                      alternative composition
    ||  ||_  |             merge, left merge, communication merge
                           (same level; mixing them needs parentheses)
    f :-> p   f ^ p        guarded command, signal emission (prefix)
    .                      sequential composition

Formulas bind tighter than every process operator and use ``~``,
``/\\``, ``\\/``, ``=>`` (right-associative), ``tt``, ``ff``, ``Cons(f)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import CommTableError, GuardednessError, ParseError, SpecError
from .logic import (
    FALSITY,
    TRUTH,
    And,
    Atom,
    Cons,
    Formula,
    Implies,
    Not,
    Or,
    format_formula,
)
from .terms import (
    DELTA,
    DELTA_TERM,
    NEX_TERM,
    Act,
    Alt,
    CommMerge,
    CommTable,
    Delta,
    Emit,
    Encap,
    Guard,
    LeftMerge,
    Nex,
    Par,
    ProcTerm,
    Query,
    RecConst,
    RecSpec,
    Seq,
    Spec,
    State,
    StateTable,
    Var,
)

KEYWORDS = {"delta", "nex", "tt", "ff", "Cons", "encap", "state"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<int>[0-9]+)
  | (?P<op>:->|\|\|_|\|\||/\\|\\/|=>|[~^+.|=;,(){}\[\]<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ------------------------------------------------------------------ parser


class _Backtrack(Exception):
    pass


class Parser:
    """Recursive-descent parser over a token list.

    ``atoms``, ``actions``, ``defs`` and ``variables`` drive name
    resolution; an identifier in process position is a recursion
    variable, an action, or a defined process (substituted), in that
    order.
    """

    def __init__(self, tokens, atoms=(), actions=(), defs=None, recspecs=None, states=()):
        self.toks = tokens
        self.i = 0
        self.atoms = set(atoms)
        self.actions = set(actions)
        self.defs = dict(defs or {})
        self.recspecs = recspecs if recspecs is not None else {}
        self.states = set(states)
        self.variables: set[str] = set()

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what="identifier") -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    def ident_list(self, what="identifier") -> list[str]:
        names = [self.ident(what)]
        while self.accept(","):
            names.append(self.ident(what))
        return names

    # formulas
    def formula(self) -> Formula:
        left = self._disjunction()
        if self.accept("=>"):
            return Implies(left, self.formula())
        return left

    def _disjunction(self) -> Formula:
        f = self._conjunction()
        while self.accept("\\/"):
            f = Or(f, self._conjunction())
        return f

    def _conjunction(self) -> Formula:
        f = self._unary()
        while self.accept("/\\"):
            f = And(f, self._unary())
        return f

    def _unary(self) -> Formula:
        tok = self.tok
        if self.accept("~"):
            return Not(self._unary())
        if self.accept("tt"):
            return TRUTH
        if self.accept("ff"):
            return FALSITY
        if self.accept("Cons"):
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return Cons(f)
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            if tok.text not in self.atoms:
                raise self.error(f"unknown atomic proposition {tok.text!r}")
            self.i += 1
            return Atom(tok.text)
        raise self.error(f"expected a formula, found {tok.text or 'end of input'!r}")

    # processes
    def proc(self) -> ProcTerm:
        t = self._merge()
        while self.accept("+"):
            t = Alt(t, self._merge())
        return t

    _MERGE_OPS = {"||": Par, "||_": LeftMerge, "|": CommMerge}

    def _merge(self) -> ProcTerm:
        t = self._prefix()
        first = None
        while self.tok.kind == "op" and self.tok.text in self._MERGE_OPS:
            op = self.tok
            if first is not None and op.text != first:
                raise self.error(f"mixed merge operators {first!r} and {op.text!r} need parentheses", op)
            first = op.text
            self.i += 1
            t = self._MERGE_OPS[op.text](t, self._prefix())
        return t

    def _starts_formula(self) -> bool:
        tok = self.tok
        if tok.text in ("~", "tt", "ff", "Cons", "("):
            return True
        return tok.kind == "ident" and tok.text in self.atoms

    def _prefix(self) -> ProcTerm:
        if self._starts_formula():
            start = self.i
            try:
                f = self.formula()
                if self.at(":->") or self.at("^"):
                    op = self.tok.text
                    self.i += 1
                    body = self._prefix()
                    return Guard(f, body) if op == ":->" else Emit(f, body)
                raise _Backtrack
            except (ParseError, _Backtrack):
                self.i = start
        return self._seq()

    def _seq(self) -> ProcTerm:
        t = self._atom()
        while self.accept("."):
            t = Seq(t, self._atom())
        return t

    def _atom(self) -> ProcTerm:
        tok = self.tok
        if self.accept("delta"):
            return DELTA_TERM
        if self.accept("nex"):
            return NEX_TERM
        if self.accept("("):
            t = self.proc()
            self.expect(")")
            return t
        if self.accept("encap"):
            self.expect("{")
            blocked = []
            if not self.at("}"):
                blocked = self.ident_list("action")
            self.expect("}")
            for a in blocked:
                if a not in self.actions:
                    raise self.error(f"unknown action {a!r} in encapsulation set", tok)
            self.expect("(")
            body = self.proc()
            self.expect(")")
            return Encap(frozenset(blocked), body)
        if self.accept("state"):
            self.expect("[")
            stok = self.tok
            s = self.ident("state name")
            if s not in self.states:
                raise self.error(f"unknown state {s!r}", stok)
            self.expect("]")
            self.expect("(")
            body = self.proc()
            self.expect(")")
            return State(s, body)
        if self.accept("<"):
            var = self.ident("variable")
            self.expect("|")
            stok = self.tok
            name = self.ident("recspec name")
            self.expect(">")
            if name not in self.recspecs:
                raise self.error(f"unknown recursive specification {name!r}", stok)
            if var not in self.recspecs[name]:
                raise self.error(f"variable {var!r} is not bound in {name!r}", stok)
            return RecConst(var, name)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.i += 1
            name = tok.text
            if name in self.variables:
                return Var(name)
            if name in self.actions:
                return Act(name)
            if name in self.defs:
                return self.defs[name]
            raise self.error(f"unresolved name {name!r}", tok)
        raise self.error(f"expected a process term, found {tok.text or 'end of input'!r}")


# ------------------------------------------------------------ spec parsing

PROC_QUERIES = {"signal": 1, "normalize": 1, "lts": 1, "bisim": 2, "eq": 2}
FORMULA_QUERIES = {"taut": 1, "consistent": 1, "equiv": 2}


def parse_spec(text: str, *, check_recursion: bool = True, atom_cap: int | None = None) -> Spec:
    """Parse and validate a specification.

    Definitions are substituted into later bodies, so every process in
    the result is closed.  With ``check_recursion`` every recspec must
    pass :func:`ctacp.recspec.check_guarded`.
    """
    tokens = tokenize(text)
    p = Parser(tokens)
    _prescan(p)
    comm_entries: list[tuple[str, str, str, Token]] = []
    tables: list[StateTable] = []
    recspecs: list[RecSpec] = []
    queries: list[Query] = []
    names = {}
    while p.tok.kind != "eof":
        tok = p.tok
        kw = p.ident("statement keyword") if tok.kind == "ident" else None
        if kw in ("props", "actions"):
            _skip_to_semicolon(p)
        elif kw == "comm":
            a = _declared_action(p)
            p.expect("|")
            b = _declared_action(p)
            p.expect("=")
            c = DELTA if p.accept("delta") else _declared_action(p)
            p.expect(";")
            comm_entries.append((a, b, c, tok))
        elif kw == "statespace":
            tables.append(_statespace(p))
        elif kw == "recspec":
            recspecs.append(_recspec(p))
        elif kw == "proc":
            name = p.ident("process name")
            if name in p.defs or name in p.actions or name in p.atoms:
                raise p.error(f"name {name!r} is already in use", tok)
            p.expect("=")
            p.defs[name] = p.proc()
            p.expect(";")
        elif kw == "query":
            queries.append(_query(p))
        else:
            raise p.error(f"unknown statement {tok.text!r}", tok)
        names.setdefault(kw, tok)
    try:
        comm = validate_comm([(a, b, c) for a, b, c, _ in comm_entries], p.actions_order)
    except CommTableError as exc:
        raise CommTableError(f"communication table: {exc}", exc.witness) from None
    spec = Spec(
        atoms=p.atoms_order,
        actions=p.actions_order,
        comm=comm,
        statespaces=tables,
        recspecs=recspecs,
        defs=p.defs,
        queries=queries,
        atom_cap=atom_cap,
    )
    if check_recursion:
        from .recspec import check_guarded

        for r in recspecs:
            check_guarded(r, spec.recspecs)
    return spec


def _skip_to_semicolon(p: Parser):
    while not p.at(";"):
        p.i += 1
    p.i += 1


def _prescan(p: Parser):
    """Collect ``props``, ``actions``, state and recspec names up front."""
    toks = p.toks
    atoms, actions = [], []
    i = 0
    depth = 0
    while toks[i].kind != "eof":
        t = toks[i]
        if t.text == "{":
            depth += 1
        elif t.text == "}":
            depth -= 1
        elif depth == 0 and t.kind == "ident" and t.text in ("props", "actions") and (i == 0 or toks[i - 1].text in (";", "}")):
            sub = Parser(toks)
            sub.i = i + 1
            names = sub.ident_list("atom" if t.text == "props" else "action") if not sub.at(";") else []
            sub.expect(";")
            target = atoms if t.text == "props" else actions
            for n in names:
                if n in atoms or n in actions:
                    raise ParseError(f"name {n!r} declared twice", t.line, t.col)
                target.append(n)
            i = sub.i
            continue
        i += 1
    p.atoms_order = tuple(atoms)
    p.actions_order = tuple(actions)
    p.atoms = set(atoms)
    p.actions = set(actions)
    # recspec variable names and state names, for forward references
    i = 0
    while toks[i].kind != "eof":
        t = toks[i]
        if t.kind == "ident" and t.text == "recspec" and toks[i + 1].kind == "ident":
            name = toks[i + 1].text
            variables = set()
            j = i + 3
            d = 1
            expect_var = True
            while toks[j].kind != "eof" and d > 0:
                if toks[j].text in "({[":
                    d += 1 if toks[j].text == "{" else 0
                if toks[j].text == "}":
                    d -= 1
                if d == 1 and expect_var and toks[j].kind == "ident" and toks[j + 1].text == "=":
                    variables.add(toks[j].text)
                    expect_var = False
                if toks[j].text == ";" and d == 1:
                    expect_var = True
                j += 1
            p.recspecs[name] = variables
        if t.kind == "ident" and t.text == "states" and toks[i + 1].kind == "ident":
            j = i + 1
            while toks[j].text != ";" and toks[j].kind != "eof":
                if toks[j].kind == "ident":
                    p.states.add(toks[j].text)
                j += 1
        i += 1


def _declared_action(p: Parser) -> str:
    tok = p.tok
    a = p.ident("action")
    if a not in p.actions:
        raise p.error(f"unresolved action {a!r}", tok)
    return a


def _statespace(p: Parser) -> StateTable:
    name = p.ident("state space name")
    p.expect("{")
    states: list[str] = []
    table = StateTable(name, ())
    while not p.accept("}"):
        tok = p.tok
        kw = p.ident("statespace entry")
        if kw == "states":
            states.extend(p.ident_list("state"))
        elif kw == "sig":
            p.expect("(")
            s = _own_state(p, states)
            p.expect(")")
            p.expect("=")
            table.sig_map[s] = p.formula()
        elif kw == "act":
            p.expect("(")
            a = _declared_action(p)
            p.expect(",")
            s = _own_state(p, states)
            p.expect(")")
            p.expect("=")
            table.act_map[(a, s)] = DELTA if p.accept("delta") else _declared_action(p)
        elif kw == "eff":
            p.expect("(")
            a = _declared_action(p)
            p.expect(",")
            s = _own_state(p, states)
            p.expect(")")
            p.expect("=")
            table.eff_map[(a, s)] = _own_state(p, states)
        else:
            raise p.error(f"unknown statespace entry {kw!r}", tok)
        p.expect(";")
    if not states:
        raise p.error(f"state space {name!r} declares no states")
    table.states = tuple(states)
    return table


def _own_state(p: Parser, states) -> str:
    tok = p.tok
    s = p.ident("state")
    if s not in states:
        raise p.error(f"state {s!r} is not declared in this state space", tok)
    return s


def _recspec(p: Parser) -> RecSpec:
    name = p.ident("recspec name")
    p.expect("{")
    variables = p.recspecs.get(name, set())
    p.variables = set(variables)
    equations: dict[str, ProcTerm] = {}
    try:
        while not p.accept("}"):
            tok = p.tok
            var = p.ident("variable")
            if var in equations:
                raise p.error(f"variable {var!r} defined twice", tok)
            p.expect("=")
            equations[var] = p.proc()
            p.expect(";")
    finally:
        p.variables = set()
    return RecSpec(name, equations)


def _query(p: Parser) -> Query:
    tok = p.tok
    kind = p.ident("query kind")
    args: list = []
    if kind in FORMULA_QUERIES:
        args.append(p.formula())
        while p.accept(","):
            args.append(p.formula())
        if len(args) != FORMULA_QUERIES[kind]:
            raise p.error(f"query {kind} takes {FORMULA_QUERIES[kind]} formula(s)", tok)
    elif kind == "entails":
        conclusion = p.formula()
        premises = []
        if p.accept("from"):
            premises.append(p.formula())
            while p.accept(","):
                premises.append(p.formula())
        args = [conclusion, *premises]
    elif kind in PROC_QUERIES:
        args.append(p.proc())
        while p.accept(","):
            args.append(p.proc())
        if len(args) != PROC_QUERIES[kind]:
            raise p.error(f"query {kind} takes {PROC_QUERIES[kind]} process(es)", tok)
    elif kind == "axioms":
        while p.tok.kind == "int":
            args.append(int(p.tok.text))
            p.i += 1
    elif kind == "lint":
        pass
    else:
        raise p.error(f"unknown query kind {kind!r}", tok)
    p.expect(";")
    return Query(kind, tuple(args))


def _parser_for(spec: Spec) -> Parser:
    p = Parser([Token("eof", "", 1, 1)])
    p.atoms = set(spec.atoms)
    p.actions = set(spec.actions)
    p.defs = dict(spec.defs)
    p.recspecs = {k: set(v.equations) for k, v in spec.recspecs.items()}
    p.states = {s for t in spec.statespaces.values() for s in t.states}
    return p


def _parse_whole(p: Parser, text: str, method):
    p.toks = tokenize(text)
    p.i = 0
    out = method()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after end of term")
    return out


def parse_proc(text: str, spec: Spec, variables: Iterable[str] = ()) -> ProcTerm:
    """Parse one process term in the names of ``spec``."""
    p = _parser_for(spec)
    p.variables = set(variables)
    return _parse_whole(p, text, p.proc)


def parse_formula(text: str, atoms: Iterable[str] | Spec | None = None) -> Formula:
    """Parse a formula.  Without ``atoms`` any identifier is an atom."""
    if isinstance(atoms, Spec):
        atoms = atoms.atoms
    p = Parser([])
    if atoms is None:
        p.atoms = {t.text for t in tokenize(text) if t.kind == "ident" and t.text not in KEYWORDS}
    else:
        p.atoms = set(atoms)
    return _parse_whole(p, text, p.formula)


# ------------------------------------------------------ comm validation


def validate_comm(entries, actions: Iterable[str]) -> CommTable:
    """Complete a communication table and check it.

    ``entries`` is a ``CommTable`` or an iterable of ``(a, b, c)``
    triples; ``c`` may be ``"delta"``.  Returns the symmetric completion.
    Missing entries read as δ.  Raises :class:`CommTableError` on
    conflicting entries or on the first associativity violation found in
    declaration order (its ``witness`` is the triple).
    """
    actions = tuple(actions)
    declared = set(actions)
    if isinstance(entries, CommTable):
        entries = [(a, b, c) for (a, b), c in entries.entries.items()]
    table: dict[tuple[str, str], str] = {}
    for a, b, c in entries:
        for x in (a, b) + ((c,) if c != DELTA else ()):
            if x not in declared:
                raise CommTableError(f"undeclared action {x!r}")
        for key in ((a, b), (b, a)):
            if table.get(key, c) != c:
                raise CommTableError(f"conflicting entries for {key[0]} | {key[1]}: {table[key]} and {c}")
            table[key] = c
    table = {k: v for k, v in table.items() if v != DELTA}
    gamma = CommTable(table)
    for a in actions:
        for b in actions:
            for c in actions:
                left = gamma(gamma(a, b), c)
                right = gamma(a, gamma(b, c))
                if left != right:
                    raise CommTableError(
                        f"not associative at ({a}, {b}, {c}): ({a}|{b})|{c} = {left} but {a}|({b}|{c}) = {right}",
                        witness=(a, b, c),
                    )
    return gamma


# ---------------------------------------------------------------- pretty

_LEVEL = {Alt: 1, Par: 2, LeftMerge: 2, CommMerge: 2, Guard: 3, Emit: 3, Seq: 4}
_MERGE_TEXT = {Par: "||", LeftMerge: "||_", CommMerge: "|"}


def format_cond(f: Formula) -> str:
    text = format_formula(f)
    if isinstance(f, Atom) or f in (TRUTH, FALSITY):
        return text
    return f"({text})"


def pretty(t: ProcTerm) -> str:
    """DSL rendering; ``parse_proc(pretty(t))`` gives back ``t``."""
    return _pp(t, 0)


def _pp(t: ProcTerm, ctx: int) -> str:
    level = _LEVEL.get(type(t))
    if level is None:
        return _pp_atom(t)
    if isinstance(t, Alt):
        text = f"{_pp(t.left, 1)} + {_pp(t.right, 2)}"
    elif isinstance(t, (Par, LeftMerge, CommMerge)):
        left = _pp(t.left, 2)
        if type(t.left) in _MERGE_TEXT and type(t.left) is not type(t):
            left = f"({left})"
        text = f"{left} {_MERGE_TEXT[type(t)]} {_pp(t.right, 3)}"
    elif isinstance(t, (Guard, Emit)):
        op = ":->" if isinstance(t, Guard) else "^"
        text = f"{format_cond(t.cond)} {op} {_pp(t.body, 3)}"
    else:
        text = f"{_pp(t.left, 4)} . {_pp(t.right, 5)}"
    return f"({text})" if level < ctx else text


def _pp_atom(t: ProcTerm) -> str:
    if isinstance(t, Act):
        return t.name
    if isinstance(t, Delta):
        return "delta"
    if isinstance(t, Nex):
        return "nex"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, RecConst):
        return f"<{t.var} | {t.spec}>"
    if isinstance(t, Encap):
        return f"encap{{{', '.join(sorted(t.blocked))}}}({_pp(t.body, 0)})"
    if isinstance(t, State):
        return f"state[{t.state}]({_pp(t.body, 0)})"
    raise TypeError(f"not a process term: {t!r}")


# ------------------------------------------------------------- serialize


def serialize_spec(spec: Spec) -> str:
    """Render a spec as DSL text; parsing the text gives an equal spec."""
    lines = []
    if spec.atoms:
        lines.append(f"props {', '.join(spec.atoms)};")
    if spec.actions:
        lines.append(f"actions {', '.join(spec.actions)};")
    for a, b, c in spec.comm.declared():
        lines.append(f"comm {a} | {b} = {c};")
    for table in spec.statespaces.values():
        lines.append(f"statespace {table.name} {{")
        lines.append(f"  states {', '.join(table.states)};")
        for s, f in table.sig_map.items():
            lines.append(f"  sig({s}) = {format_formula(f)};")
        for (a, s), b in table.act_map.items():
            lines.append(f"  act({a}, {s}) = {b};")
        for (a, s), s2 in table.eff_map.items():
            lines.append(f"  eff({a}, {s}) = {s2};")
        lines.append("}")
    for r in spec.recspecs.values():
        lines.append(f"recspec {r.name} {{")
        for var, body in r.equations.items():
            lines.append(f"  {var} = {pretty(body)};")
        lines.append("}")
    for name, body in spec.defs.items():
        lines.append(f"proc {name} = {pretty(body)};")
    for q in spec.queries:
        lines.append(format_query(q))
    return "\n".join(lines) + "\n"


def format_query(q: Query) -> str:
    if q.kind == "entails":
        text = format_formula(q.args[0])
        if len(q.args) > 1:
            text += " from " + ", ".join(format_formula(f) for f in q.args[1:])
    elif q.kind in FORMULA_QUERIES:
        text = ", ".join(format_formula(f) for f in q.args)
    elif q.kind in PROC_QUERIES:
        text = ", ".join(pretty(t) for t in q.args)
    else:
        text = " ".join(str(a) for a in q.args)
    return f"query {q.kind} {text};".replace("  ", " ").replace(" ;", ";")


__all__ = [
    "GuardednessError",
    "SpecError",
    "Token",
    "format_cond",
    "format_query",
    "parse_formula",
    "parse_proc",
    "parse_spec",
    "pretty",
    "serialize_spec",
    "tokenize",
    "validate_comm",
]
