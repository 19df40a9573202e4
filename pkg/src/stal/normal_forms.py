"""First and second disjunctive normal forms of a concept with respect to a TBox.

A ``Dnf`` is a frozenset of clauses, each clause a frozenset of concepts.
The empty Dnf is propositionally unsatisfiable; ``{frozenset()}`` is ``top``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ExpansionError
from .syntax import (
    All, And, Bot, Concept, FeatureChain, Name, Not, Or, Pred, Some, TBox, Top, TOP, conj,
    is_literal, show,
)
from .spatial.algebra import complement
from .tbox import AxiomClass, Kind, TBoxAnalysis, analyze

Clause = frozenset
Dnf = frozenset

TRUE_DNF: Dnf = frozenset({frozenset()})
FALSE_DNF: Dnf = frozenset()


def sort_key(c: Concept) -> str:
    return show(c)


def exists_chain(u: FeatureChain) -> frozenset[Concept]:
    """``{(some f1 (some f2 ... top))}`` for the abstract prefix of ``u``; empty when bare."""
    if not u.prefix:
        return frozenset()
    body: Concept = TOP
    for f in reversed(u.prefix):
        body = Some(f, body)
    return frozenset({body})


def _clashes(clause: frozenset) -> bool:
    for c in clause:
        if isinstance(c, Not) and isinstance(c.arg, Name) and c.arg in clause:
            return True
    return False


def pi_product(d1: Iterable[frozenset], d2: Iterable[frozenset]) -> Dnf:
    """Pairwise clause unions, dropping those with a complementary literal pair."""
    d2 = list(d2)
    out = set()
    for s in d1:
        for t in d2:
            u = s | t
            if not _clashes(u):
                out.add(u)
    return frozenset(out)


class DnfContext:
    """Definitions and axiom classes that ``dnf1`` expands against.

    Built from an analysed TBox; the closure adds fresh acyclic definitions
    with ``define``.
    """

    def __init__(self, definitions: Mapping[str, Concept], classes: Mapping[str, AxiomClass],
                 features: Iterable[str] = (), max_clauses: int = 200_000):
        self.definitions = dict(definitions)
        self.classes = dict(classes)
        self.features = frozenset(features)
        self.max_clauses = max_clauses
        self._cache: dict[tuple[Concept, bool], Dnf] = {}

    @classmethod
    def of(cls, t: "TBox | TBoxAnalysis | DnfContext") -> "DnfContext":
        if isinstance(t, DnfContext):
            return t
        if isinstance(t, TBox):
            t = analyze(t)
        return cls({ax.lhs: ax.rhs for ax in t.tbox.axioms}, t.classes,
                   t.tbox.signature.features)

    def define(self, name: str, rhs: Concept) -> None:
        self.definitions[name] = rhs
        self.classes[name] = AxiomClass(Kind.ACYCLIC)

    def is_defined(self, name: str) -> bool:
        return name in self.definitions


def dnf1(c: Concept, t) -> Dnf:
    """First DNF of ``c`` with respect to ``t`` (a TBox, analysis or context)."""
    ctx = DnfContext.of(t)
    return _dnf1(c, False, ctx, ())


def _dnf1(c: Concept, neg: bool, ctx: DnfContext, stack: tuple) -> Dnf:
    key = (c, neg)
    hit = ctx._cache.get(key)
    if hit is not None:
        return hit
    out = _dnf1_raw(c, neg, ctx, stack)
    if len(out) > ctx.max_clauses:
        raise ExpansionError(f"normal form exceeds {ctx.max_clauses} clauses")
    ctx._cache[key] = out
    return out


def _pred_clause(p: Pred) -> Dnf:
    clause = {p}
    for u in p.chains:
        clause |= exists_chain(u)
    return frozenset({frozenset(clause)})


def _dnf1_raw(c, neg, ctx, stack) -> Dnf:
    if isinstance(c, Not):
        return _dnf1(c.arg, not neg, ctx, stack)
    if isinstance(c, Top):
        return FALSE_DNF if neg else TRUE_DNF
    if isinstance(c, Bot):
        return TRUE_DNF if neg else FALSE_DNF
    if isinstance(c, Name):
        return _dnf1_name(c, neg, ctx, stack)
    if isinstance(c, And):
        left = _dnf1(c.left, neg, ctx, stack)
        right = _dnf1(c.right, neg, ctx, stack)
        return left | right if neg else pi_product(left, right)
    if isinstance(c, Or):
        left = _dnf1(c.left, neg, ctx, stack)
        right = _dnf1(c.right, neg, ctx, stack)
        return pi_product(left, right) if neg else left | right
    if isinstance(c, Some):
        item = All(c.role, Not(c.body)) if neg else c
        return frozenset({frozenset({item})})
    if isinstance(c, All):
        item = Some(c.role, Not(c.body)) if neg else c
        return frozenset({frozenset({item})})
    if isinstance(c, Pred):
        return _pred_clause(Pred(c.chains, complement(c.relation)) if neg else c)
    raise TypeError(f"not a concept: {c!r}")


def _dnf1_name(c: Name, neg: bool, ctx: DnfContext, stack) -> Dnf:
    name = c.name
    if not ctx.is_defined(name):
        lit = Not(c) if neg else c
        return frozenset({frozenset({lit})})
    cl = ctx.classes[name]
    if cl.kind is Kind.ACYCLIC:
        if name in stack:
            raise ExpansionError(f"expansion of {name} re-enters itself via {' -> '.join(stack)}")
        return _dnf1(ctx.definitions[name], neg, ctx, stack + (name,))
    if neg:
        return _dnf1(Name(cl.dual_of), False, ctx, stack)
    role = cl.role_used
    if cl.kind is Kind.EVENTUALITY_A:
        (body,) = cl.parts
        return _dnf1(body, False, ctx, stack) | {frozenset({Some(role, c)})}
    if cl.kind is Kind.EVENTUALITY_B:
        c1, c2 = cl.parts
        step = frozenset({frozenset({Some(role, c)})})
        return _dnf1(c1, False, ctx, stack) | pi_product(_dnf1(c2, False, ctx, stack), step)
    if cl.kind is Kind.NECESSITY_A:
        (body,) = cl.parts
        return pi_product(_dnf1(body, False, ctx, stack), {frozenset({All(role, c)})})
    c1, c2 = cl.parts
    return pi_product(_dnf1(c1, False, ctx, stack),
                      _dnf1(c2, False, ctx, stack) | {frozenset({All(role, c)})})


@dataclass(frozen=True)
class PceaPartition:
    s_prop: frozenset
    s_csp: frozenset
    s_exists: frozenset

    def union(self) -> frozenset:
        return self.s_prop | self.s_csp | self.s_exists


def _body_conj(bodies: list[Concept]) -> Concept:
    return conj(list(dict.fromkeys(bodies)))


def pcea_partition(s: Iterable[Concept], features: Iterable[str] | None = None) -> PceaPartition:
    """Split a dnf1 clause into literals, predicates and merged existentials.

    ``features`` names the abstract features; every other role is general.
    """
    s = frozenset(s)
    features = set(features or ())
    prop = frozenset(x for x in s if is_literal(x))
    csp = frozenset(x for x in s if isinstance(x, Pred))
    univ: dict[str, list[Concept]] = {}
    exist: dict[str, list[Concept]] = {}
    for x in s:
        if isinstance(x, All):
            univ.setdefault(x.role, []).append(x.body)
        elif isinstance(x, Some):
            exist.setdefault(x.role, []).append(x.body)
    for bodies in list(univ.values()) + list(exist.values()):
        bodies.sort(key=sort_key)
    out = set()
    for role, bodies in exist.items():
        alls = univ.get(role, [])
        if role in features:
            out.add(Some(role, _body_conj(bodies + alls)))
        else:
            for b in bodies:
                out.add(Some(role, _body_conj([b] + alls)))
    return PceaPartition(prop, csp, frozenset(out))


def dnf2(c: Concept, t, features: Iterable[str] | None = None) -> Dnf:
    """Second DNF: every dnf1 clause replaced by the union of its partition."""
    if features is None:
        features = _features_of(t)
    feats = set(features)
    return frozenset(pcea_partition(s, feats).union() for s in dnf1(c, t))


def _features_of(t) -> set[str]:
    if isinstance(t, TBoxAnalysis):
        return set(t.tbox.signature.features)
    if isinstance(t, TBox):
        return set(t.signature.features)
    return set(getattr(t, "features", ()))


def dnf_as_lists(d: Dnf) -> list[list[str]]:
    """Deterministic printable form: sorted clauses of sorted concept texts."""
    return sorted(sorted(show(x) for x in clause) for clause in d)


def clause_shape_ok(x: Concept, second: bool = False) -> bool:
    """Whether ``x`` is an allowed clause element (``second`` for dnf2 clauses)."""
    if is_literal(x) or isinstance(x, Pred):
        return True
    if isinstance(x, Some):
        return True
    return isinstance(x, All) and not second


__all__ = [
    "Dnf", "DnfContext", "FALSE_DNF", "PceaPartition", "TRUE_DNF", "clause_shape_ok", "dnf1",
    "dnf2", "dnf_as_lists", "exists_chain", "pcea_partition", "pi_product", "sort_key",
]
