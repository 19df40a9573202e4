"""Weak cyclicity, axiom classification and dual pairing."""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .errors import DualMissingError, TBoxError
from .syntax import (
    BOT, TOP, All, And, Concept, Name, Not, Or, Some, TBox, conj, disj,
    push_negation,
)


class Kind(Enum):
    ACYCLIC = "acyclic"
    NECESSITY_A = "necessity-a"
    NECESSITY_B = "necessity-b"
    EVENTUALITY_A = "eventuality-a"
    EVENTUALITY_B = "eventuality-b"

    @property
    def is_necessity(self):
        return self in (Kind.NECESSITY_A, Kind.NECESSITY_B)

    @property
    def is_eventuality(self):
        return self in (Kind.EVENTUALITY_A, Kind.EVENTUALITY_B)

    @property
    def form(self):
        return self.value[-1] if self is not Kind.ACYCLIC else None


@dataclass(frozen=True)
class AxiomClass:
    """Classification of one axiom.

    ``parts`` holds ``(C,)`` for form a and ``(C1, C2)`` for form b, the
    concepts around the recursive ``(all R B)`` / ``(some R B)``.
    """

    kind: Kind
    role_used: str | None = None
    dual_of: str | None = None
    parts: tuple[Concept, ...] = ()

    def as_dict(self):
        return {"kind": self.kind.value, "role": self.role_used, "dual": self.dual_of}


def depths(b: str, c: Concept) -> frozenset[int]:
    """Quantifier depths at which the name ``b`` occurs in ``c``."""
    if isinstance(c, Name):
        return frozenset({0}) if c.name == b else frozenset()
    if isinstance(c, Not):
        return depths(b, c.arg)
    if isinstance(c, (And, Or)):
        return depths(b, c.left) | depths(b, c.right)
    if isinstance(c, (Some, All)):
        return frozenset(d + 1 for d in depths(b, c.body))
    return frozenset()


def _defined_names_in(c: Concept, defined) -> set[str]:
    if isinstance(c, Name):
        return {c.name} if c.name in defined else set()
    if isinstance(c, Not):
        return _defined_names_in(c.arg, defined)
    if isinstance(c, (And, Or)):
        return _defined_names_in(c.left, defined) | _defined_names_in(c.right, defined)
    if isinstance(c, (Some, All)):
        return _defined_names_in(c.body, defined)
    return set()


def uses_relation(t: TBox) -> dict[str, set[str]]:
    """Direct-use edges: ``A -> B`` iff ``B`` occurs in the definition of ``A``."""
    defined = set(t.defined)
    return {ax.lhs: _defined_names_in(ax.rhs, defined) for ax in t.axioms}


def uses_closure(t: TBox) -> dict[str, set[str]]:
    """Transitive closure of ``uses_relation``."""
    direct = uses_relation(t)
    out = {}
    for a in direct:
        seen, stack = set(), list(direct[a])
        while stack:
            b = stack.pop()
            if b not in seen:
                seen.add(b)
                stack.extend(direct[b])
        out[a] = seen
    return out


def _flatten(c: Concept, cls) -> list[Concept]:
    if isinstance(c, cls):
        return _flatten(c.left, cls) + _flatten(c.right, cls)
    return [c]


def _match_shape(b: str, rhs: Concept):
    """Return ``(kind, role, parts)`` when ``rhs`` has one of the four cyclic shapes.

    Conjunctions and disjunctions are matched up to associativity and
    commutativity; a missing ``C`` in form a counts as ``top``.
    """
    def free(c):
        return not depths(b, c)

    for outer, inner, quant, kind_a, kind_b in (
            (And, Or, All, Kind.NECESSITY_A, Kind.NECESSITY_B),
            (Or, And, Some, Kind.EVENTUALITY_A, Kind.EVENTUALITY_B)):
        items = _flatten(rhs, outer)
        unit = conj if outer is And else disj
        inner_unit = disj if inner is Or else conj
        for i, item in enumerate(items):
            rest = items[:i] + items[i + 1:]
            if not all(free(c) for c in rest):
                continue
            if isinstance(item, quant) and item.body == Name(b):
                c = unit(rest) if rest else (TOP if outer is And else BOT)
                return kind_a, item.role, (c,)
            if isinstance(item, inner) and rest:
                sub = _flatten(item, inner)
                for j, s in enumerate(sub):
                    others = sub[:j] + sub[j + 1:]
                    if (isinstance(s, quant) and s.body == Name(b) and others
                            and all(free(c) for c in others)):
                        return kind_b, s.role, (unit(rest), inner_unit(others))
    return None


def _canon(c: Concept):
    """Structural key equal for concepts that differ only in and/or grouping or order."""
    if isinstance(c, (And, Or)):
        cls = type(c)
        return (cls.__name__, frozenset(_canon(x) for x in _flatten(c, cls)))
    if isinstance(c, Not):
        return ("Not", _canon(c.arg))
    if isinstance(c, (Some, All)):
        return (type(c).__name__, c.role, _canon(c.body))
    return c


@dataclass
class WeakCyclicityReport:
    accepted: bool
    classes: dict[str, AxiomClass] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)
    violation: str | None = None
    offending: tuple[str, ...] = ()

    def as_dict(self):
        return {
            "accepted": self.accepted,
            "violation": self.violation,
            "offending": list(self.offending),
            "diagnostics": list(self.diagnostics),
            "classes": {k: v.as_dict() for k, v in sorted(self.classes.items())},
        }


def _reject(report, violation, message, names):
    report.accepted = False
    report.violation = violation
    report.offending = tuple(names)
    report.diagnostics.append(message)
    return report


def is_weakly_cyclic(t: TBox) -> WeakCyclicityReport:
    """Check weak cyclicity plus the shape and dual restrictions, in that order.

    On rejection the report names the first violated condition and the
    axioms involved.
    """
    report = WeakCyclicityReport(accepted=True)
    direct = uses_relation(t)
    graph = {a: {b for b in bs if b != a} for a, bs in direct.items()}
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        cycle = list(dict.fromkeys(exc.args[1]))
        names = sorted(cycle)
        return _reject(report, "mutual-cycle",
                       f"axioms {' and '.join(names)} use each other", names)
    cyclic = []
    for ax in t.axioms:
        ds = depths(ax.lhs, ax.rhs)
        if ds and ds != frozenset({1}):
            return _reject(report, "depth",
                           f"axiom {ax.lhs}: {ax.lhs} occurs at depths {sorted(ds)}, expected none or exactly {{1}}",
                           [ax.lhs])
        if ds:
            cyclic.append(ax)
        else:
            report.classes[ax.lhs] = AxiomClass(Kind.ACYCLIC)
    for ax in cyclic:
        shape = _match_shape(ax.lhs, ax.rhs)
        if shape is None:
            return _reject(report, "shape",
                           f"axiom {ax.lhs} is cyclic but neither a necessity nor an eventuality axiom",
                           [ax.lhs])
        kind, role, parts = shape
        report.classes[ax.lhs] = AxiomClass(kind, role, None, parts)
    duals = _pair_duals(report.classes)
    for name in sorted(n for n, cl in report.classes.items() if cl.kind is not Kind.ACYCLIC):
        if name not in duals:
            return _reject(report, "dual-missing", f"axiom {name} has no dual in the TBox", [name])
    for name, other in duals.items():
        cl = report.classes[name]
        report.classes[name] = AxiomClass(cl.kind, cl.role_used, other, cl.parts)
    return report


def _pair_duals(classes: dict[str, AxiomClass]) -> dict[str, str]:
    necs = sorted(n for n, c in classes.items() if c.kind.is_necessity)
    evs = sorted(n for n, c in classes.items() if c.kind.is_eventuality)
    duals: dict[str, str] = {}
    changed = True
    while changed:
        changed = False
        for n in necs:
            if n in duals:
                continue
            cn = classes[n]
            for e in evs:
                if e in duals:
                    continue
                ce = classes[e]
                if ce.role_used != cn.role_used or ce.kind.form != cn.kind.form:
                    continue
                trial = dict(duals)
                trial[n], trial[e] = e, n
                if all(_dual_parts(p, q, trial) for p, q in zip(cn.parts, ce.parts)):
                    duals[n], duals[e] = e, n
                    changed = True
                    break
    return duals


def _dual_parts(p: Concept, q: Concept, duals: dict[str, str]) -> bool:
    """Whether ``q`` is the negation of ``p`` modulo the duals known so far."""
    left = push_negation(Not(p), duals)
    right = push_negation(q, duals)
    return _canon(left) == _canon(right)


class TBoxAnalysis:
    """Accepted TBox together with its classification."""

    def __init__(self, tbox: TBox, report: WeakCyclicityReport):
        self.tbox = tbox
        self.report = report
        self.classes = report.classes
        self.duals = {n: c.dual_of for n, c in report.classes.items() if c.dual_of}

    def kind(self, name: str) -> Kind:
        return self.classes[name].kind

    def is_cyclic(self, name: str) -> bool:
        cl = self.classes.get(name)
        return cl is not None and cl.kind is not Kind.ACYCLIC

    def dual(self, name: str) -> str:
        if name not in self.duals:
            raise DualMissingError(name)
        return self.duals[name]

    @property
    def cyclic_names(self) -> frozenset[str]:
        return frozenset(n for n in self.classes if self.is_cyclic(n))

    @property
    def eventualities(self) -> frozenset[str]:
        return frozenset(n for n, c in self.classes.items() if c.kind.is_eventuality)

    def push_negation(self, c: Concept) -> Concept:
        return push_negation(c, self.duals, self.cyclic_names)


@lru_cache(maxsize=256)
def analyze(t: TBox) -> TBoxAnalysis:
    """Classify ``t`` or raise ``TBoxError`` naming the first violation."""
    report = is_weakly_cyclic(t)
    if not report.accepted:
        raise TBoxError(report.diagnostics[-1], report.offending)
    return TBoxAnalysis(t, report)


__all__ = [
    "AxiomClass", "Kind", "TBoxAnalysis", "WeakCyclicityReport", "analyze", "depths",
    "is_weakly_cyclic", "uses_closure", "uses_relation",
]
