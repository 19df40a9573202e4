"""Command-line front end.

Exit codes: 0 success or satisfiable, 1 unsatisfiable or inconsistent,
2 unknown, 3 input or validation error.  Machine output goes to stdout,
diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automaton import build_automaton, to_dot
from .closure import augment, close, derive_signature
from .emptiness import SearchConfig, Status, check_satisfiable
from .errors import StalError
from .normal_forms import dnf1, dnf2, dnf_as_lists
from .spatial.algebra import load_algebra
from .spatial.csp import QCSP, csp_solve
from .syntax import Signature, TBox, parse_concept_ex, parse_instance, show, tokenize
from .tbox import analyze, is_weakly_cyclic

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stal", description="Satisfiability of spatio-temporal description logic concepts.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, concept=True, formats=("json", "text")):
        sp.add_argument("--tbox", type=Path, help="TBox file")
        if concept:
            sp.add_argument("--concept", help="concept text (wins over --concept-file)")
            sp.add_argument("--concept-file", type=Path, help="file holding the concept")
        sp.add_argument("--algebra", help="spatial algebra (default: the TBox's, else rcc8)")
        sp.add_argument("--format", choices=formats, default="json")

    common(sub.add_parser("validate", help="check weak cyclicity of a TBox"), concept=False)
    sp = sub.add_parser("dnf", help="first or second disjunctive normal form")
    common(sp)
    sp.add_argument("--second", action="store_true", help="print the second normal form")
    common(sub.add_parser("closure", help="closure of the TBox augmented with the concept"))
    common(sub.add_parser("automaton", help="weak alternating automaton"),
           formats=("json", "dot", "text"))
    sp = sub.add_parser("csp", help="qualitative constraint networks")
    csub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    solve = csub.add_parser("solve", help="decide a network given as 'x y {DC,EC};' lines")
    solve.add_argument("network", type=Path)
    solve.add_argument("--algebra", default=None)
    solve.add_argument("--format", choices=("json", "text"), default="json")
    sp = sub.add_parser("check", help="decide satisfiability of the concept")
    common(sp)
    sp.add_argument("--depth", type=_positive, default=32, help="search depth bound")
    sp.add_argument("--seed", type=int, default=0, help="seed for alternative strategies")
    sp.add_argument("--witness", action="store_true", help="include the witness in the output")
    return p


def _emit(obj, fmt: str, text: str | None = None) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text if text is not None else json.dumps(obj, sort_keys=True) + "\n")


def _load(args, need_concept: bool):
    if args.tbox is not None:
        inst = parse_instance(args.tbox.read_text(encoding="utf-8"))
        tbox, query = inst.tbox, inst.query
    else:
        tbox, query = TBox((), Signature()), None
    sig = tbox.signature
    if args.algebra:
        load_algebra(args.algebra)
        sig = sig.extend(algebra_name=args.algebra.lower())
    concept = None
    text = getattr(args, "concept", None)
    if text is None and getattr(args, "concept_file", None) is not None:
        text = args.concept_file.read_text(encoding="utf-8")
    if text is not None:
        concept, sig = parse_concept_ex(text.strip(), sig, tbox.defined, implicit=True)
    elif query is not None:
        concept = query
    if need_concept and concept is None:
        raise StalError("no concept given (use --concept, --concept-file or a query statement)")
    return TBox(tbox.axioms, sig), concept


def cmd_validate(args) -> int:
    tbox, _ = _load(args, need_concept=False)
    report = is_weakly_cyclic(tbox)
    if not report.accepted:
        print(f"error: {report.diagnostics[-1]}", file=sys.stderr)
    text = ("accepted\n" if report.accepted else f"rejected: {report.diagnostics[-1]}\n")
    _emit(report.as_dict(), args.format, text)
    return EXIT_OK if report.accepted else EXIT_ERROR


def cmd_dnf(args) -> int:
    tbox, c = _load(args, need_concept=True)
    a = analyze(tbox)
    d = dnf2(c, a) if args.second else dnf1(c, a)
    clauses = dnf_as_lists(d)
    text = "".join("{" + ", ".join(s) + "}\n" for s in clauses) or "(no clauses)\n"
    _emit({"concept": show(c), "form": "second" if args.second else "first", "clauses": clauses},
          args.format, text)
    return EXIT_OK


def cmd_closure(args) -> int:
    tbox, c = _load(args, need_concept=True)
    ct = close(augment(tbox, c))
    out = ct.as_dict()
    out["signature"] = derive_signature(ct).as_dict()
    lines = []
    for n, clauses in out["axioms"].items():
        body = " | ".join("{" + ", ".join(s) + "}" for s in clauses) or "{}"
        lines.append(f"{n} = {body}\n")
    _emit(out, args.format, "".join(lines))
    return EXIT_OK


def cmd_automaton(args) -> int:
    tbox, c = _load(args, need_concept=True)
    ct = close(augment(tbox, c), universals=True)
    a = build_automaton(ct, derive_signature(ct))
    if args.format == "dot":
        sys.stdout.write(to_dot(a))
        return EXIT_OK
    d = a.as_dict()
    text = "".join(f"{q}{'*' if q in a.accepting else ''} -> "
                   + (" | ".join("{" + ", ".join(s) + "}" for s in d["delta"][q]) or "false")
                   + "\n" for q in a.states)
    _emit(d, args.format, text)
    return EXIT_OK


def parse_network(text: str, algebra) -> QCSP:
    """Read ``x y {A,B};`` lines (``#`` comments allowed) into a network."""
    net = QCSP(algebra)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = [t for t in tokenize(line) if t.kind != "eof"]
        try:
            x, y = toks[0], toks[1]
            if x.kind != "name" or y.kind != "name" or toks[2].kind != "{" or toks[-1].kind != ";" \
                    or toks[-2].kind != "}":
                raise IndexError
            atoms = [t.text for t in toks[3:-2] if t.kind != ","]
        except IndexError:
            raise StalError(f"line {lineno}: expected 'x y {{ATOM,...}};'") from None
        for a in atoms:
            if a not in algebra.atoms:
                raise StalError(f"line {lineno}: {a!r} is not an atom of {algebra.name}")
        net.add(x.text, y.text, algebra.mask(atoms))
    return net


def cmd_csp(args) -> int:
    alg = load_algebra(args.algebra or "rcc8")
    net = parse_network(args.network.read_text(encoding="utf-8"), alg)
    scenario = csp_solve(net) if net.constraints else {}
    consistent = scenario is not None
    out = {"algebra": alg.name, "consistent": consistent,
           "scenario": None if scenario is None else
           [[x, y, a] for (x, y), a in sorted(scenario.items())]}
    text = ("consistent\n" + "".join(f"{x} {y} {a}\n" for x, y, a in out["scenario"])
            if consistent else "inconsistent\n")
    _emit(out, args.format, text)
    return EXIT_OK if consistent else EXIT_NO


def cmd_check(args) -> int:
    tbox, c = _load(args, need_concept=True)
    cfg = SearchConfig(depth_bound=args.depth, deterministic_seed=args.seed)
    v = check_satisfiable(c, tbox, cfg)
    out = v.as_dict()
    if not args.witness:
        out.pop("witness")
    out["concept"] = show(c)
    _emit(out, args.format, f"{v.status.value}: {v.reason}\n")
    return {Status.SAT: EXIT_OK, Status.UNSAT: EXIT_NO, Status.UNKNOWN: EXIT_UNKNOWN}[v.status]


COMMANDS = {"validate": cmd_validate, "dnf": cmd_dnf, "closure": cmd_closure,
            "automaton": cmd_automaton, "csp": cmd_csp, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (StalError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
