"""Concept syntax: AST, S-expression parser, printer and structural helpers.

Grammar::

    concept := top | bot | NAME | (not c) | (and c c) | (or c c)
             | (some NAME c) | (all NAME c) | (pred chain+ atomset)
    chain   := ( NAME (. NAME)* )
    atomset := { NAME (, NAME)* }

A TBox file is a sequence of ``;``-terminated statements: declarations
(``primitive A;``, ``role R;``, ``feature f;``, ``cfeature g;``,
``algebra rcc8;``), axioms ``B := concept;`` and an optional
``query concept;``.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ArityError, DualMissingError, ParseError, TBoxError, UndeclaredNameError
from .spatial.algebra import QualitativeAlgebra, Relation, complement, load_algebra

KEYWORDS = frozenset({"top", "bot", "not", "and", "or", "some", "all", "pred"})
STATEMENT_KEYWORDS = frozenset({"primitive", "role", "feature", "cfeature", "algebra", "query"})
RESERVED = KEYWORDS | STATEMENT_KEYWORDS


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureChain:
    """Abstract features ``prefix`` followed by the concrete feature ``terminal``."""

    prefix: tuple[str, ...]
    terminal: str

    def __str__(self):
        return "(" + ".".join(self.prefix + (self.terminal,)) + ")"


class Concept:
    """Base class of concept nodes."""

    __slots__ = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True, repr=False)
class Top(Concept):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bot(Concept):
    def __repr__(self):
        return "Bot()"


TOP = Top()
BOT = Bot()


@dataclass(frozen=True)
class Name(Concept):
    name: str


@dataclass(frozen=True)
class Not(Concept):
    arg: Concept


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Some(Concept):
    role: str
    body: Concept


@dataclass(frozen=True)
class All(Concept):
    role: str
    body: Concept


@dataclass(frozen=True)
class Pred(Concept):
    chains: tuple[FeatureChain, ...]
    relation: Relation


def conj(items: Iterable[Concept]) -> Concept:
    """Right-nested conjunction; ``top`` for no items."""
    items = list(items)
    if not items:
        return TOP
    out = items[-1]
    for c in reversed(items[:-1]):
        out = And(c, out)
    return out


def disj(items: Iterable[Concept]) -> Concept:
    items = list(items)
    if not items:
        return BOT
    out = items[-1]
    for c in reversed(items[:-1]):
        out = Or(c, out)
    return out


def conjuncts(c: Concept) -> list[Concept]:
    """Flatten nested ``And`` nodes into a list."""
    if isinstance(c, And):
        return conjuncts(c.left) + conjuncts(c.right)
    return [c]


def is_literal(c: Concept) -> bool:
    return isinstance(c, Name) or (isinstance(c, Not) and isinstance(c.arg, Name))


def show(c: Concept) -> str:
    """Print a concept in the input grammar."""
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bot):
        return "bot"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Not):
        return f"(not {show(c.arg)})"
    if isinstance(c, And):
        return f"(and {show(c.left)} {show(c.right)})"
    if isinstance(c, Or):
        return f"(or {show(c.left)} {show(c.right)})"
    if isinstance(c, Some):
        return f"(some {c.role} {show(c.body)})"
    if isinstance(c, All):
        return f"(all {c.role} {show(c.body)})"
    if isinstance(c, Pred):
        chains = " ".join(str(u) for u in c.chains)
        return f"(pred {chains} {c.relation})"
    raise TypeError(f"not a concept: {c!r}")


def concept_size(c: Concept) -> int:
    """Number of connectives (not, and, or, some, all, pred)."""
    if isinstance(c, (Top, Bot, Name)):
        return 0
    if isinstance(c, Pred):
        return 1
    if isinstance(c, Not):
        return 1 + concept_size(c.arg)
    if isinstance(c, (And, Or)):
        return 1 + concept_size(c.left) + concept_size(c.right)
    return 1 + concept_size(c.body)


def names_in(c: Concept) -> set[str]:
    if isinstance(c, Name):
        return {c.name}
    if isinstance(c, Not):
        return names_in(c.arg)
    if isinstance(c, (And, Or)):
        return names_in(c.left) | names_in(c.right)
    if isinstance(c, (Some, All)):
        return names_in(c.body)
    return set()


def roles_in(c: Concept) -> set[str]:
    if isinstance(c, Not):
        return roles_in(c.arg)
    if isinstance(c, (And, Or)):
        return roles_in(c.left) | roles_in(c.right)
    if isinstance(c, (Some, All)):
        return {c.role} | roles_in(c.body)
    return set()


def features_in(c: Concept) -> tuple[set[str], set[str]]:
    """Abstract and concrete features mentioned by predicate chains."""
    abstract, concrete = set(), set()

    def walk(d):
        if isinstance(d, Pred):
            for u in d.chains:
                abstract.update(u.prefix)
                concrete.add(u.terminal)
        elif isinstance(d, Not):
            walk(d.arg)
        elif isinstance(d, (And, Or)):
            walk(d.left)
            walk(d.right)
        elif isinstance(d, (Some, All)):
            walk(d.body)

    walk(c)
    return abstract, concrete


# -- subconcepts and negation -------------------------------------------------

def subconcepts(c: Concept) -> set[Concept]:
    """Inductive set of subconcepts; negations are read through De Morgan."""
    if isinstance(c, (Top, Bot, Name, Pred)):
        return {c}
    if isinstance(c, (And, Or)):
        return {c} | subconcepts(c.left) | subconcepts(c.right)
    if isinstance(c, (Some, All)):
        return {c} | subconcepts(c.body)
    assert isinstance(c, Not)
    a = c.arg
    if isinstance(a, Name):
        return {c}
    if isinstance(a, Top):
        return {BOT}
    if isinstance(a, Bot):
        return {TOP}
    if isinstance(a, Not):
        return subconcepts(a.arg)
    if isinstance(a, (And, Or)):
        return {c} | subconcepts(Not(a.left)) | subconcepts(Not(a.right))
    if isinstance(a, Some):
        return subconcepts(All(a.role, Not(a.body)))
    if isinstance(a, All):
        return subconcepts(Some(a.role, Not(a.body)))
    assert isinstance(a, Pred)
    return {Pred(a.chains, complement(a.relation))}


def push_negation(c: Concept, duals: Mapping[str, str] | None = None,
                  cyclic: Iterable[str] | None = None) -> Concept:
    """Negation normal form.

    ``duals`` maps each necessity/eventuality name to its dual; ``cyclic``
    lists the names whose negation must be replaced by the dual (default:
    the keys of ``duals``).  Negated acyclic defined names are kept as
    ``(not B)`` since their definition is not at hand here.
    """
    duals = dict(duals or {})
    cyclic = set(duals) if cyclic is None else set(cyclic)

    def pos(d):
        if isinstance(d, Not):
            return neg(d.arg)
        if isinstance(d, And):
            return And(pos(d.left), pos(d.right))
        if isinstance(d, Or):
            return Or(pos(d.left), pos(d.right))
        if isinstance(d, Some):
            return Some(d.role, pos(d.body))
        if isinstance(d, All):
            return All(d.role, pos(d.body))
        return d

    def neg(d):
        if isinstance(d, Top):
            return BOT
        if isinstance(d, Bot):
            return TOP
        if isinstance(d, Name):
            if d.name in cyclic:
                if d.name not in duals:
                    raise DualMissingError(d.name)
                return Name(duals[d.name])
            return Not(d)
        if isinstance(d, Not):
            return pos(d.arg)
        if isinstance(d, And):
            return Or(neg(d.left), neg(d.right))
        if isinstance(d, Or):
            return And(neg(d.left), neg(d.right))
        if isinstance(d, Some):
            return All(d.role, neg(d.body))
        if isinstance(d, All):
            return Some(d.role, neg(d.body))
        if isinstance(d, Pred):
            return Pred(d.chains, complement(d.relation))
        raise TypeError(f"not a concept: {d!r}")

    return pos(c)


# -- signature and TBox -------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Declared vocabulary.  ``roles`` are the general roles; abstract
    features are roles too but live in ``features``."""

    primitives: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    features: frozenset[str] = frozenset()
    cfeatures: frozenset[str] = frozenset()
    algebra_name: str = "rcc8"

    def __post_init__(self):
        for attr in ("primitives", "roles", "features", "cfeatures"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        groups = [("primitive", self.primitives), ("role", self.roles),
                  ("feature", self.features), ("cfeature", self.cfeatures)]
        seen: dict[str, str] = {}
        for kind, names in groups:
            for n in names:
                if not n or not _NAME_RE.fullmatch(n) or n in RESERVED:
                    raise ParseError(f"invalid {kind} name {n!r}")
                if n in seen:
                    raise ParseError(f"{n!r} declared both as {seen[n]} and as {kind}")
                seen[n] = kind

    @property
    def algebra(self) -> QualitativeAlgebra:
        return load_algebra(self.algebra_name)

    def is_role(self, name: str) -> bool:
        return name in self.roles or name in self.features

    def kind_of(self, name: str) -> str | None:
        for kind, names in (("primitive", self.primitives), ("role", self.roles),
                            ("feature", self.features), ("cfeature", self.cfeatures)):
            if name in names:
                return kind
        return None

    def extend(self, **extra) -> "Signature":
        fields = dict(primitives=self.primitives, roles=self.roles, features=self.features,
                      cfeatures=self.cfeatures, algebra_name=self.algebra_name)
        for key, value in extra.items():
            fields[key] = value if key == "algebra_name" else fields[key] | frozenset(value)
        return Signature(**fields)


@dataclass(frozen=True)
class Axiom:
    lhs: str
    rhs: Concept

    def __str__(self):
        return f"{self.lhs} := {show(self.rhs)} ;"


@dataclass(frozen=True)
class TBox:
    axioms: tuple[Axiom, ...] = ()
    signature: Signature = field(default_factory=Signature)

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        seen = set()
        for ax in self.axioms:
            if ax.lhs in seen:
                raise TBoxError(f"{ax.lhs} is defined more than once", (ax.lhs,))
            seen.add(ax.lhs)
        object.__setattr__(self, "_defs", {ax.lhs: ax.rhs for ax in self.axioms})

    @property
    def defined(self) -> tuple[str, ...]:
        return tuple(ax.lhs for ax in self.axioms)

    def is_defined(self, name: str) -> bool:
        return name in self._defs

    def definition(self, name: str) -> Concept:
        return self._defs[name]

    def __contains__(self, name):
        return name in self._defs

    def __len__(self):
        return len(self.axioms)

    def __iter__(self) -> Iterator[Axiom]:
        return iter(self.axioms)

    def with_axiom(self, ax: Axiom) -> "TBox":
        return TBox(self.axioms + (ax,), self.signature)

    def to_text(self, query: Concept | None = None) -> str:
        sig = self.signature
        lines = [f"algebra {sig.algebra_name};"]
        for kw, names in (("primitive", sig.primitives), ("role", sig.roles),
                          ("feature", sig.features), ("cfeature", sig.cfeatures)):
            lines.extend(f"{kw} {n};" for n in sorted(names))
        lines.extend(str(ax) for ax in self.axioms)
        if query is not None:
            lines.append(f"query {show(query)};")
        return "\n".join(lines) + "\n"


# -- lexer --------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<assign>:=) | (?P<punct>[(){},.;])
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("assign", "punct", "name"):
            tokens.append(Token(kind if kind != "punct" else m.group(), m.group(), line,
                                pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser -------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens, signature: Signature, defined: Iterable[str],
                 implicit: bool = False):
        self.toks = tokens
        self.i = 0
        self.sig = signature
        self.defined = set(defined)
        self.implicit = implicit
        self.new_primitives: set[str] = set()
        self.new_roles: set[str] = set()
        self.new_features: set[str] = set()
        self.new_cfeatures: set[str] = set()
        self._algebra = None

    @property
    def algebra(self):
        if self._algebra is None:
            self._algebra = self.sig.algebra
        return self._algebra

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.peek()
        return cls(msg, tok.line, tok.column)

    def expect(self, kind, what=None) -> Token:
        t = self.peek()
        if t.kind != kind:
            found = t.text or "end of input"
            raise self.error(f"expected {what or kind!r}, found {found!r}")
        return self.next()

    def name(self, what="name") -> Token:
        t = self.expect("name", what)
        if t.text in KEYWORDS:
            raise self.error(f"keyword {t.text!r} cannot be used as a {what}", t)
        return t

    def concept(self) -> Concept:
        t = self.peek()
        if t.kind == "name":
            self.next()
            if t.text == "top":
                return TOP
            if t.text == "bot":
                return BOT
            if t.text in KEYWORDS:
                raise self.error(f"{t.text!r} must follow '('", t)
            return self.concept_name(t)
        if t.kind != "(":
            raise self.error(f"expected a concept, found {t.text or 'end of input'!r}")
        self.next()
        head = self.expect("name", "connective")
        op = head.text
        if op == "not":
            out = Not(self.concept())
        elif op in ("and", "or"):
            left = self.concept()
            right = self.concept()
            out = And(left, right) if op == "and" else Or(left, right)
        elif op in ("some", "all"):
            role = self.role()
            body = self.concept()
            out = Some(role, body) if op == "some" else All(role, body)
        elif op == "pred":
            out = self.pred(head)
        else:
            raise self.error(f"unknown connective {op!r}", head)
        self.expect(")", ")")
        return out

    def concept_name(self, t: Token) -> Concept:
        n = t.text
        if n in self.defined or n in self.sig.primitives or n in self.new_primitives:
            return Name(n)
        kind = self.sig.kind_of(n)
        if kind is not None:
            raise self.error(f"{n!r} is a {kind}, not a concept name", t)
        if self.implicit and self._fresh(n):
            self.new_primitives.add(n)
            return Name(n)
        raise self.error(f"undeclared concept name {n!r}", t, UndeclaredNameError)

    def role(self) -> str:
        t = self.name("role")
        n = t.text
        if self.sig.is_role(n) or n in self.new_roles or n in self.new_features:
            return n
        if self.implicit and self._fresh(n):
            self.new_roles.add(n)
            return n
        raise self.error(f"undeclared role {n!r}", t, UndeclaredNameError)

    def pred(self, head: Token) -> Concept:
        chains = []
        while self.peek().kind == "(":
            chains.append(self.chain())
        if not chains:
            raise self.error("pred needs at least one feature chain")
        rel = self.atomset()
        alg = self.algebra
        if len(chains) != alg.arity:
            raise self.error(f"{alg.name} predicates take {alg.arity} chains, got {len(chains)}",
                             head, ArityError)
        return Pred(tuple(chains), rel)

    def chain(self) -> FeatureChain:
        self.expect("(")
        parts = [self.name("feature")]
        while self.peek().kind == ".":
            self.next()
            parts.append(self.name("feature"))
        self.expect(")", ")")
        for t in parts[:-1]:
            if t.text in self.sig.features or t.text in self.new_features:
                continue
            if self.implicit and t.text in self.new_roles:
                # an implicit role read through a chain is functional
                self.new_roles.discard(t.text)
                self.new_features.add(t.text)
                continue
            if self.implicit and self._fresh(t.text):
                self.new_features.add(t.text)
                continue
            raise self.error(f"{t.text!r} is not a declared abstract feature", t,
                             UndeclaredNameError)
        last = parts[-1]
        if last.text not in self.sig.cfeatures and last.text not in self.new_cfeatures:
            if not (self.implicit and self._fresh(last.text)):
                raise self.error(f"{last.text!r} is not a declared concrete feature", last,
                                 UndeclaredNameError)
            self.new_cfeatures.add(last.text)
        return FeatureChain(tuple(t.text for t in parts[:-1]), last.text)

    def _fresh(self, n: str) -> bool:
        used = self.new_primitives | self.new_roles | self.new_features | self.new_cfeatures
        return self.sig.kind_of(n) is None and n not in self.defined and n not in used

    def atomset(self) -> Relation:
        self.expect("{", "{")
        atoms = []
        if self.peek().kind != "}":
            atoms.append(self.expect("name", "atom"))
            while self.peek().kind == ",":
                self.next()
                atoms.append(self.expect("name", "atom"))
        self.expect("}", "}")
        alg = self.algebra
        for t in atoms:
            if t.text not in alg.atoms:
                raise self.error(f"{t.text!r} is not an atom of {alg.name}", t)
        return alg.relation([t.text for t in atoms])


def parse_concept(text: str, signature: Signature | None = None,
                  defined: Iterable[str] = (), implicit: bool = False) -> Concept:
    """Parse one concept.

    With ``implicit=True`` undeclared concept names are taken as primitives
    and undeclared role names as general roles; otherwise they are errors.
    """
    c, _ = parse_concept_ex(text, signature, defined, implicit)
    return c


def parse_concept_ex(text, signature=None, defined=(), implicit=False):
    """Like ``parse_concept`` but also return the signature extended with
    implicitly declared names."""
    sig = signature or Signature()
    p = _Parser(tokenize(text), sig, defined, implicit)
    c = p.concept()
    p.expect("eof", "end of input")
    if p.new_primitives or p.new_roles or p.new_features or p.new_cfeatures:
        sig = sig.extend(primitives=p.new_primitives, roles=p.new_roles,
                         features=p.new_features, cfeatures=p.new_cfeatures)
    return c, sig


@dataclass(frozen=True)
class Instance:
    """A parsed TBox file together with its optional query concept."""

    tbox: TBox
    query: Concept | None = None


def _split_statements(tokens: list[Token]) -> list[list[Token]]:
    stmts, cur = [], []
    for t in tokens:
        if t.kind == "eof":
            if cur:
                raise ParseError("missing ';' at end of statement", t.line, t.column)
            break
        if t.kind == ";":
            if not cur:
                raise ParseError("empty statement", t.line, t.column)
            stmts.append(cur)
            cur = []
        else:
            cur.append(t)
    return stmts


def parse_instance(text: str) -> Instance:
    """Parse a TBox file, including an optional ``query`` statement."""
    tokens = tokenize(text)
    eof = tokens[-1]
    stmts = _split_statements(tokens)
    decls: dict[str, set[str]] = {k: set() for k in ("primitive", "role", "feature", "cfeature")}
    algebra_name = None
    axioms_src: list[tuple[Token, list[Token]]] = []
    query_src = None
    declared_at: dict[str, Token] = {}
    for st in stmts:
        head = st[0]
        if head.kind == "name" and head.text in decls:
            names = st[1:]
            if not names:
                raise ParseError(f"{head.text} declaration without names", head.line, head.column)
            for k, t in enumerate(names):
                if k % 2 == 1:
                    if t.kind != ",":
                        raise ParseError(f"expected ',' or ';', found {t.text!r}", t.line, t.column)
                    continue
                if t.kind != "name" or t.text in RESERVED:
                    raise ParseError(f"invalid name {t.text!r}", t.line, t.column)
                if t.text in declared_at:
                    raise ParseError(f"{t.text!r} declared twice", t.line, t.column)
                declared_at[t.text] = t
                decls[head.text].add(t.text)
            if names[-1].kind == ",":
                t = names[-1]
                raise ParseError("trailing ','", t.line, t.column)
        elif head.kind == "name" and head.text == "algebra":
            if len(st) != 2 or st[1].kind != "name":
                raise ParseError("expected 'algebra NAME;'", head.line, head.column)
            if algebra_name is not None:
                raise ParseError("algebra declared twice", head.line, head.column)
            algebra_name = st[1].text.lower()
        elif head.kind == "name" and head.text == "query":
            if query_src is not None:
                raise ParseError("more than one query", head.line, head.column)
            query_src = st[1:]
            if not query_src:
                raise ParseError("empty query", head.line, head.column)
        elif head.kind == "name" and len(st) >= 2 and st[1].kind == "assign":
            if head.text in RESERVED:
                raise ParseError(f"keyword {head.text!r} cannot be defined", head.line, head.column)
            if any(a.text == head.text for a, _ in axioms_src):
                raise ParseError(f"{head.text!r} is defined more than once", head.line, head.column)
            if head.text in declared_at:
                raise ParseError(f"{head.text!r} is both declared and defined", head.line, head.column)
            if len(st) == 2:
                raise ParseError("axiom without right-hand side", st[1].line, st[1].column)
            axioms_src.append((head, st[2:]))
        else:
            raise ParseError(f"unexpected {head.text!r} at start of statement", head.line, head.column)
    if algebra_name is not None:
        load_algebra(algebra_name)
    sig = Signature(decls["primitive"], decls["role"], decls["feature"], decls["cfeature"],
                    algebra_name or "rcc8")
    defined = [a.text for a, _ in axioms_src]
    axioms = []
    for lhs, body in axioms_src:
        p = _Parser(body + [eof], sig, defined)
        rhs = p.concept()
        p.expect("eof", "';'")
        axioms.append(Axiom(lhs.text, rhs))
    query = None
    if query_src is not None:
        p = _Parser(query_src + [eof], sig, defined)
        query = p.concept()
        p.expect("eof", "';'")
    return Instance(TBox(tuple(axioms), sig), query)


def parse_tbox(text: str) -> TBox:
    return parse_instance(text).tbox


def parse(text: str, signature: Signature | None = None):
    """Parse ``text`` as a TBox file when it contains statements, else as a concept."""
    toks = tokenize(text)
    if any(t.kind in (";", "assign") for t in toks):
        return parse_tbox(text)
    return parse_concept(text, signature)


__all__ = [
    "All", "And", "Axiom", "BOT", "Bot", "Concept", "FeatureChain", "Instance", "Name", "Not",
    "Or", "Pred", "Signature", "Some", "TBox", "TOP", "Top", "concept_size", "conj", "conjuncts",
    "disj", "features_in", "is_literal", "names_in", "parse", "parse_concept", "parse_instance",
    "parse_tbox", "push_negation", "roles_in", "show", "subconcepts", "tokenize",
]
