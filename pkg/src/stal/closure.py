"""Closure of a TBox augmented with a query concept.

``close`` turns every axiom into set-of-sets form: each clause holds
literals, predicate concepts and existentials ``(some R (and B1 ... Bk))``
over defined names, introducing fresh names for bodies that are not yet
defined.  It also records, per name, the names its clauses point to; the
reflexive-transitive closure of those edges is the state order of the
automaton.
"""
from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .errors import NameCollisionError
from .normal_forms import DnfContext, dnf1, sort_key
from .syntax import (
    All, Axiom, Concept, Name, Not, Pred, Signature, Some, TBox, conj, conjuncts, is_literal,
    show,
)
from .tbox import Kind, analyze

B_INIT = "B_init"


def augment(t: TBox, c: Concept, name: str = B_INIT) -> TBox:
    """``t`` plus the axiom ``name := c``."""
    if name in t or t.signature.kind_of(name) is not None:
        raise NameCollisionError(f"{name} already occurs in the TBox")
    return TBox(t.axioms + (Axiom(name, c),), t.signature)


def fresh_name(body: Concept, taken) -> str:
    """Deterministic name derived from a hash of the body's printed form."""
    digest = hashlib.sha1(show(body).encode("utf-8")).hexdigest()
    for width in range(10, len(digest) + 1):
        name = "B_" + digest[:width]
        if name not in taken:
            return name
    raise NameCollisionError(f"no fresh name available for {show(body)}")


def exists_names(x: Concept) -> tuple[str, ...]:
    """Defined names inside a closed existential ``(some R (and B1 ... Bk))``."""
    return tuple(c.name for c in conjuncts(x.body))


@dataclass(frozen=True)
class ClosedTBox:
    axioms: Mapping[str, frozenset]
    initial: str
    order: Mapping[str, frozenset]
    definitions: Mapping[str, Concept]
    fresh: tuple[str, ...]
    signature: Signature
    kinds: Mapping[str, Kind]
    universals: bool = False

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self.axioms))

    @property
    def eventualities(self) -> frozenset[str]:
        return frozenset(n for n, k in self.kinds.items() if k.is_eventuality)

    def below(self, name: str) -> frozenset[str]:
        """Names reachable from ``name`` through order edges, ``name`` included."""
        seen = {name}
        stack = [name]
        while stack:
            for m in self.order.get(stack.pop(), ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return frozenset(seen)

    def geq(self, q: str, r: str) -> bool:
        return r in self.below(q)

    def order_is_acyclic(self) -> bool:
        """No cycle through two distinct names (self-loops allowed)."""
        import graphlib
        graph = {n: {m for m in self.order.get(n, ()) if m != n} for n in self.axioms}
        try:
            tuple(graphlib.TopologicalSorter(graph).static_order())
        except graphlib.CycleError:
            return False
        return True

    def as_dict(self) -> dict:
        return {
            "initial": self.initial,
            "axioms": {n: sorted(sorted(show(x) for x in s) for s in self.axioms[n])
                       for n in sorted(self.axioms)},
            "definitions": {n: show(self.definitions[n]) for n in sorted(self.definitions)},
            "order": {n: sorted(self.order.get(n, ())) for n in sorted(self.axioms)},
            "fresh": sorted(self.fresh),
            "eventualities": sorted(self.eventualities),
        }


def close(tc: TBox, initial: str = B_INIT, universals: bool = False) -> ClosedTBox:
    """Run the closure worklist on an augmented TBox.

    With ``universals=True`` each clause additionally keeps ``(all R B)``
    for every universal body (named like the existential bodies), so
    universal restrictions reach successors created by other clauses.  The
    satisfiability check needs this; the default reproduces the plain
    procedure.
    """
    analysis = analyze(tc)
    if initial not in tc:
        raise NameCollisionError(f"{initial} is not defined in the augmented TBox")
    features = tc.signature.features
    ctx = DnfContext.of(analysis)
    ctx = DnfContext(ctx.definitions, ctx.classes, features)
    definitions: dict[str, Concept] = {ax.lhs: ax.rhs for ax in tc.axioms}
    by_body: dict[Concept, str] = {}
    for ax in tc.axioms:
        by_body.setdefault(ax.rhs, ax.lhs)
    taken = set(definitions) | set(tc.signature.primitives) | set(tc.signature.roles) \
        | set(features) | set(tc.signature.cfeatures)
    fresh: list[str] = []
    queue = deque(ax.lhs for ax in tc.axioms)
    closed: dict[str, frozenset] = {}
    order: dict[str, set] = {}

    def name_for(d: Concept) -> str:
        if isinstance(d, Name) and d.name in definitions:
            return d.name
        if d in by_body:
            return by_body[d]
        b2 = fresh_name(d, taken)
        taken.add(b2)
        definitions[b2] = d
        by_body[d] = b2
        ctx.define(b2, d)
        fresh.append(b2)
        queue.append(b2)
        return b2

    while queue:
        b1 = queue.popleft()
        if b1 in closed:
            continue
        order[b1] = set()
        u1 = set()
        for s in sorted(dnf1(definitions[b1], ctx), key=_clause_key):
            u2 = {x for x in s if is_literal(x) or isinstance(x, Pred)}
            univ: dict[str, list[Concept]] = {}
            exist: dict[str, list[Concept]] = {}
            for x in sorted(s, key=sort_key):
                if isinstance(x, All):
                    univ.setdefault(x.role, []).append(x.body)
                elif isinstance(x, Some):
                    exist.setdefault(x.role, []).append(x.body)
            u3 = set()
            for role, bodies in sorted(exist.items()):
                if role in features:
                    continue
                for d in bodies:
                    u4 = {name_for(d)}
                    for e in univ.get(role, ()):
                        u4.add(name_for(e))
                    u3.add(Some(role, conj(Name(n) for n in sorted(u4))))
                    order[b1] |= u4
            for role, bodies in sorted(exist.items()):
                if role not in features:
                    continue
                u4 = {name_for(e) for e in bodies + univ.get(role, [])}
                u3.add(Some(role, conj(Name(n) for n in sorted(u4))))
                order[b1] |= u4
            if universals:
                for role, bodies in sorted(univ.items()):
                    for e in bodies:
                        n = name_for(e)
                        u3.add(All(role, Name(n)))
                        order[b1].add(n)
            u1.add(frozenset(u2 | u3))
        closed[b1] = frozenset(u1)
    kinds = {n: (analysis.classes[n].kind if n in analysis.classes else Kind.ACYCLIC)
             for n in closed}
    return ClosedTBox(
        axioms=closed,
        initial=initial,
        order={n: frozenset(v) for n, v in order.items()},
        definitions=definitions,
        fresh=tuple(fresh),
        signature=tc.signature,
        kinds=kinds,
        universals=universals,
    )


def _clause_key(s) -> list[str]:
    return sorted(show(x) for x in s)


@dataclass(frozen=True)
class AutomatonSignature:
    n_p: tuple[str, ...]
    n_cf: tuple[str, ...]
    q: tuple[str, ...]
    rec: tuple[Concept, ...]
    af: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.rec) + len(self.af)

    def as_dict(self) -> dict:
        return {"n_p": list(self.n_p), "n_cf": list(self.n_cf), "q": list(self.q),
                "rec": [show(x) for x in self.rec], "af": list(self.af), "k": self.k}


def derive_signature(ct: ClosedTBox) -> AutomatonSignature:
    """Primitives, concrete features, states and the branching tuple of ``ct``."""
    features = ct.signature.features
    n_p, n_cf, rec, af = set(), set(), set(), set()
    for clauses in ct.axioms.values():
        for s in clauses:
            for x in s:
                if is_literal(x):
                    n_p.add(x.arg.name if isinstance(x, Not) else x.name)
                elif isinstance(x, Pred):
                    n_cf.update(u.terminal for u in x.chains)
                elif isinstance(x, Some):
                    if x.role in features:
                        af.add(x.role)
                    else:
                        rec.add(x)
    return AutomatonSignature(
        n_p=tuple(sorted(n_p)),
        n_cf=tuple(sorted(n_cf)),
        q=tuple(sorted(ct.axioms)),
        rec=tuple(sorted(rec, key=sort_key)),
        af=tuple(sorted(af)),
    )


def closed_as_tbox(ct: ClosedTBox) -> TBox:
    """Re-encode a closed TBox as ordinary axioms (clauses as disjunctions of conjunctions)."""
    from .syntax import disj
    axioms = []
    for n in sorted(ct.axioms, key=lambda m: (m != ct.initial, m)):
        clauses = sorted(ct.axioms[n], key=_clause_key)
        rhs = disj(conj(sorted(s, key=sort_key)) for s in clauses)
        axioms.append(Axiom(n, rhs))
    return TBox(tuple(axioms), ct.signature)


__all__ = [
    "AutomatonSignature", "B_INIT", "ClosedTBox", "augment", "close", "closed_as_tbox",
    "derive_signature", "exists_names", "fresh_name",
]
