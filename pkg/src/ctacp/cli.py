"""Command-line entry point: ``ctacp <command> FILE ...``.

Exit status is 0 for an affirmative verdict or success, 1 for a negative
verdict, 2 for usage and specification errors and 3 when a state budget,
expansion limit or atom cap is exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable

from .bisim import bisimilar
from .errors import BudgetError, CapacityError, CtacpError
from .logic import entails, format_formula, is_consistent, is_tautology, lequiv
from .normalize import basic_pretty, decide_equal, signal_prop, to_basic
from .recspec import is_linear, to_linear
from .sos import build_lts, lts_to_dot, lts_to_json
from .soundness import axiom_soundness_suite
from .syntax import format_query, parse_formula, parse_proc, parse_spec, pretty
from .terms import Act, Emit, Guard, Query, Spec, free_vars, subterms

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class Options:
    """Limits taken from flags, falling back to the environment."""

    def __init__(self, args: argparse.Namespace):
        self.atom_cap = _limit(getattr(args, "atom_cap", None), "CTACP_ATOM_CAP")
        self.state_budget = _limit(getattr(args, "state_budget", None), "CTACP_STATE_BUDGET")
        self.expansion_cap = _limit(getattr(args, "expansion_cap", None), "CTACP_EXPANSION_CAP")


def _limit(flag, env: str):
    if flag is not None:
        return flag
    raw = os.environ.get(env)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise CtacpError(f"{env} must be an integer, got {raw!r}") from None


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


# ---------------------------------------------------------------- queries


def _proc(spec: Spec, text: str):
    """A named process of ``spec``, or a term written inline."""
    if text in spec.defs:
        return spec.defs[text]
    t = parse_proc(text, spec)
    if free_vars(t):
        raise CtacpError(f"process {text!r} has free variables")
    return t


def answer(q: Query, spec: Spec, opts: Options) -> tuple[bool, str]:
    """Evaluate one query; returns (affirmative, rendered text)."""
    sig = spec.signature
    kind, args = q.kind, q.args
    if kind == "taut":
        ok = is_tautology(args[0], sig)
        return ok, f"tautology: {_yes(ok)}"
    if kind == "consistent":
        ok = is_consistent(args[0], sig)
        return ok, f"consistent: {_yes(ok)}"
    if kind == "equiv":
        ok = lequiv(args[0], args[1], sig)
        return ok, f"equivalent: {_yes(ok)}"
    if kind == "entails":
        ok = entails(args[1:], args[0], sig)
        return ok, f"entails: {_yes(ok)}"
    if kind == "signal":
        prop = signal_prop(args[0], spec)
        vec = "".join("ftb"[x] for x in prop.vec)
        return True, f"signal: {format_formula(prop.formula)}\nvector: {vec}"
    if kind == "normalize":
        return True, basic_pretty(to_basic(args[0], spec))
    if kind == "lts":
        lts = build_lts(args[0], spec, budget=opts.state_budget)
        return True, f"states: {lts.n_states}, transitions: {len(lts.transitions)}"
    if kind == "bisim":
        report = bisimilar(args[0], args[1], spec, budget=opts.state_budget, cap=opts.expansion_cap)
        return report.equivalent, report.render()
    if kind == "eq":
        ok = decide_equal(args[0], args[1], spec)
        return ok, f"equal: {_yes(ok)}"
    if kind == "axioms":
        samples, size, seed = (list(args) + [50, 8, 0][len(args):])[:3]
        report = axiom_soundness_suite(spec if spec.actions else None, samples, size, seed)
        return report.ok, report.render()
    if kind == "lint":
        warnings = lint(spec)
        return not warnings, "\n".join(warnings) if warnings else "lint: clean"
    raise CtacpError(f"unknown query kind {kind!r}")


def lint(spec: Spec) -> list[str]:
    """Warnings about declarations that are unused or can never act."""
    out = []
    bodies = list(spec.defs.items())
    for r in spec.recspecs.values():
        bodies += [(f"{r.name}.{x}", t) for x, t in r.equations.items()]
    used_atoms: set[str] = set()
    used_actions: set[str] = set()
    for name, body in bodies:
        for t in subterms(body):
            if isinstance(t, Act):
                used_actions.add(t.name)
            if isinstance(t, (Guard, Emit)):
                used_atoms |= set(t.cond.atoms())
                if spec.is_false(t.cond):
                    what = "guard" if isinstance(t, Guard) else "emission"
                    out.append(f"warning: {name}: {what} {format_formula(t.cond)} is never satisfied")
    for table in spec.statespaces.values():
        for f in table.sig_map.values():
            used_atoms |= set(f.atoms())
    for a in spec.actions:
        if a not in used_actions and not any(a in k or a == v for k, v in spec.comm.entries.items()):
            out.append(f"warning: action {a} is never used")
    for p in spec.atoms:
        if p not in used_atoms:
            out.append(f"warning: proposition {p} is never used")
    for name, body in spec.defs.items():
        if signal_prop(body, spec).is_false:
            out.append(f"warning: process {name} denotes nex (its signal is never satisfied)")
    for r in spec.recspecs.values():
        if not is_linear(r):
            out.append(f"note: recspec {r.name} is not in linear form")
    return out


# --------------------------------------------------------------- commands


def _load(args, opts: Options) -> Spec:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CtacpError(f"cannot read {args.file}: {exc.strerror}") from None
    return parse_spec(text, atom_cap=opts.atom_cap)


def _formula(spec: Spec, text: str):
    return parse_formula(text, spec)


def cmd_check(args, spec, opts, out):
    out(
        f"ok: {len(spec.atoms)} propositions, {len(spec.actions)} actions, "
        f"{len(spec.defs)} processes, {len(spec.recspecs)} recursive specifications, "
        f"{len(spec.queries)} queries"
    )
    return EXIT_YES


def _run_query(q: Query, spec, opts, out) -> int:
    ok, text = answer(q, spec, opts)
    out(text)
    return EXIT_YES if ok else EXIT_NO


def cmd_formula(kind: str, count: int):
    def run(args, spec, opts, out):
        forms = [_formula(spec, e) for e in args.expr or []]
        if len(forms) != count:
            raise _Usage(f"{kind} needs exactly {count} -e argument(s)")
        return _run_query(Query(kind, tuple(forms)), spec, opts, out)

    return run


def cmd_entails(args, spec, opts, out):
    goal = _formula(spec, args.expr)
    premises = [_formula(spec, f) for f in args.premise or []]
    return _run_query(Query("entails", (goal, *premises)), spec, opts, out)


def cmd_proc(kind: str):
    def run(args, spec, opts, out):
        procs = [_proc(spec, args.p)]
        if getattr(args, "q", None) is not None:
            procs.append(_proc(spec, args.q))
        return _run_query(Query(kind, tuple(procs)), spec, opts, out)

    return run


def cmd_normalize(args, spec, opts, out):
    if args.recspec:
        lin = to_linear(spec.recspec(args.recspec), spec)
        out(f"recspec {lin.name} {{")
        for x, eq in lin.to_recspec().equations.items():
            out(f"  {x} = {pretty(eq)};")
        out("}")
        return EXIT_YES
    if args.p is None:
        raise _Usage("normalize needs -p NAME or --recspec NAME")
    return cmd_proc("normalize")(args, spec, opts, out)


def cmd_bisim(args, spec, opts, out):
    p, q = _proc(spec, args.p), _proc(spec, args.q)
    report = bisimilar(p, q, spec, budget=opts.state_budget, cap=opts.expansion_cap)
    out(report.render())
    if args.json:
        _write(args.json, json.dumps(report.to_json(), indent=2) + "\n", out)
    return EXIT_YES if report.equivalent else EXIT_NO


def cmd_lts(args, spec, opts, out):
    if not args.json and not args.dot:
        raise _Usage("lts needs --json OUT and/or --dot OUT")
    lts = build_lts(_proc(spec, args.p), spec, budget=opts.state_budget)
    if args.json:
        _write(args.json, lts_to_json(lts), out)
    if args.dot:
        _write(args.dot, lts_to_dot(lts), out)
    if "-" not in (args.json, args.dot):
        out(f"states: {lts.n_states}, transitions: {len(lts.transitions)}")
    return EXIT_YES


def cmd_axioms(args, spec, opts, out):
    report = axiom_soundness_suite(
        spec if spec.actions else None,
        samples=args.samples,
        size=args.size,
        seed=args.seed,
        names=args.only,
    )
    out(report.render())
    if args.json:
        _write(args.json, json.dumps(report.to_json(), indent=2) + "\n", out)
    return EXIT_YES if report.ok else EXIT_NO


def cmd_run(args, spec, opts, out):
    if not spec.queries:
        out("no queries")
        return EXIT_YES
    status = EXIT_YES
    for q in spec.queries:
        ok, text = answer(q, spec, opts)
        out(format_query(q))
        out("  " + text.replace("\n", "\n  "))
        if not ok:
            status = EXIT_NO
    return status


def cmd_lint(args, spec, opts, out):
    return _run_query(Query("lint"), spec, opts, out)


def _write(path: str, text: str, out):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CtacpError(f"cannot write {path}: {exc.strerror}") from None


class _Usage(Exception):
    pass


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="specification file")
    common.add_argument("--atom-cap", type=int, help="maximum number of propositions (env CTACP_ATOM_CAP)")
    common.add_argument("--state-budget", type=int, help="maximum explored states (env CTACP_STATE_BUDGET)")
    common.add_argument(
        "--expansion-cap", type=int, help="maximum states times valuations (env CTACP_EXPANSION_CAP)"
    )

    parser = argparse.ArgumentParser(prog="ctacp", description="Contradiction-tolerant process algebra toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn: Callable, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    add("check", cmd_check, "parse and validate a specification")
    add("run", cmd_run, "answer the queries listed in the file")
    add("lint", cmd_lint, "report unused or vacuous declarations")
    for name, count, text in (
        ("taut", 1, "is the formula a tautology"),
        ("consistent", 1, "can the formula avoid the value both"),
        ("equiv", 2, "do two formulas have the same truth table"),
    ):
        add(name, cmd_formula(name, count), text).add_argument("-e", dest="expr", action="append", metavar="FORMULA")
    sp = add("entails", cmd_entails, "does a set of premises entail a formula")
    sp.add_argument("-e", dest="expr", required=True, metavar="FORMULA")
    sp.add_argument("--from", dest="premise", action="append", metavar="FORMULA")
    for name, text in (("signal", "signal of a process"),):
        add(name, cmd_proc(name), text).add_argument("-p", required=True, metavar="NAME")
    sp = add("normalize", cmd_normalize, "basic form of a process or linear form of a recspec")
    sp.add_argument("-p", metavar="NAME")
    sp.add_argument("--recspec", metavar="NAME")
    sp = add("lts", cmd_lts, "export the transition system of a process")
    sp.add_argument("-p", required=True, metavar="NAME")
    sp.add_argument("--json", metavar="OUT")
    sp.add_argument("--dot", metavar="OUT")
    sp = add("bisim", cmd_bisim, "decide bisimilarity of two processes")
    sp.add_argument("-p", required=True, metavar="NAME")
    sp.add_argument("-q", required=True, metavar="NAME")
    sp.add_argument("--json", metavar="OUT", help="write the report as JSON")
    sp = add("eq", cmd_proc("eq"), "decide equality by normal forms")
    sp.add_argument("-p", required=True, metavar="NAME")
    sp.add_argument("-q", required=True, metavar="NAME")
    sp = add("axioms", cmd_axioms, "random soundness check of the axioms")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--size", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--only", action="append", metavar="AXIOM", help="restrict to the named axioms")
    sp.add_argument("--json", metavar="OUT")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def out(text: str):
        print(text)

    try:
        opts = Options(args)
        spec = _load(args, opts)
        return args.fn(args, spec, opts, out)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"ctacp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetError, CapacityError) as exc:
        print(f"ctacp: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except CtacpError as exc:
        print(f"ctacp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run = main


if __name__ == "__main__":
    sys.exit(main())
