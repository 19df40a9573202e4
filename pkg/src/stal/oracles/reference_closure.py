"""Independent re-implementation of the closure worklist, for cross-checking.

Differences from the production module on purpose: the first DNF is
computed by a top-level negation normal form followed by distribution
(rather than a polarity-carrying recursion), the worklist is a stack, fresh
names are counters, and cyclic names are negated through a caller-supplied
dual map instead of the axiom classifier.  Results are compared after
renaming every fresh name to the printed form of its body.
"""
from __future__ import annotations

import itertools

from ..spatial.algebra import complement
from ..syntax import (
    All, And, Bot, Concept, Name, Not, Or, Pred, Some, TBox, Top, conj, show,
)


def _top_nnf(c: Concept, neg: bool, t: TBox, duals: dict, stack=()):
    """Push negation through the propositional layer, unfolding defined names."""
    if isinstance(c, Not):
        return _top_nnf(c.arg, not neg, t, duals, stack)
    if isinstance(c, Top):
        return ("or", ()) if neg else ("and", ())
    if isinstance(c, Bot):
        return ("and", ()) if neg else ("or", ())
    if isinstance(c, Name):
        if c.name in t:
            if neg and c.name in duals:
                return _top_nnf(Name(duals[c.name]), False, t, duals, stack)
            if c.name in stack and not neg:
                raise ValueError(f"{c.name} unfolds into itself")
            return _top_nnf(t.definition(c.name), neg, t, duals, stack + (c.name,))
        return ("lit", Not(c) if neg else c)
    if isinstance(c, (And, Or)):
        is_and = isinstance(c, And) != neg
        parts = (_top_nnf(c.left, neg, t, duals, stack), _top_nnf(c.right, neg, t, duals, stack))
        return ("and" if is_and else "or", parts)
    if isinstance(c, Some):
        return ("lit", All(c.role, Not(c.body)) if neg else c)
    if isinstance(c, All):
        return ("lit", Some(c.role, Not(c.body)) if neg else c)
    if isinstance(c, Pred):
        p = Pred(c.chains, complement(c.relation)) if neg else c
        items = [p]
        for u in p.chains:
            if u.prefix:
                body: Concept = Top()
                for f in reversed(u.prefix):
                    body = Some(f, body)
                items.append(body)
        return ("and", tuple(("lit", x) for x in items))
    raise TypeError(f"not a concept: {c!r}")


def _distribute(tree) -> set[frozenset]:
    op, arg = tree
    if op == "lit":
        return {frozenset({arg})}
    parts = [_distribute(x) for x in arg]
    if op == "or":
        return set().union(*parts) if parts else set()
    out = {frozenset()}
    for p in parts:
        out = {a | b for a in out for b in p}
    return {s for s in out if not _clash(s)}


def _clash(s) -> bool:
    return any(isinstance(x, Not) and isinstance(x.arg, Name) and x.arg in s for x in s)


def first_dnf(c: Concept, t: TBox, duals: dict) -> set[frozenset]:
    return _distribute(_top_nnf(c, False, t, duals))


def reference_closure(tc: TBox, duals: dict, initial: str = "B_init"):
    """Return ``(clauses, order, bodies)`` keyed by name; fresh names are ``N1, N2, ...``."""
    features = tc.signature.features
    defs = {ax.lhs: ax.rhs for ax in tc.axioms}
    rhs_owner = {}
    for ax in tc.axioms:
        rhs_owner.setdefault(ax.rhs, ax.lhs)
    counter = itertools.count(1)
    fresh_bodies: dict[str, Concept] = {}
    work = [ax.lhs for ax in reversed(tc.axioms)]
    result: dict[str, set] = {}
    order: dict[str, set] = {}

    def lookup(d):
        if isinstance(d, Name) and d.name in defs:
            return d.name
        if d in rhs_owner:
            return rhs_owner[d]
        n = f"N{next(counter)}"
        defs[n] = d
        rhs_owner[d] = n
        fresh_bodies[n] = d
        work.append(n)
        return n

    view = _View(defs, tc.signature)
    while work:
        b = work.pop()
        if b in result:
            continue
        clauses = set()
        order[b] = set()
        for s in sorted(first_dnf(defs[b], view, duals), key=lambda s: sorted(map(show, s))):
            keep = {x for x in s if not isinstance(x, (Some, All))}
            alls: dict[str, list] = {}
            exs: dict[str, list] = {}
            for x in sorted(s, key=show):
                if isinstance(x, All):
                    alls.setdefault(x.role, []).append(x.body)
                elif isinstance(x, Some):
                    exs.setdefault(x.role, []).append(x.body)
            for role in sorted(exs):
                if role in features:
                    group = [{lookup(d) for d in exs[role] + alls.get(role, [])}]
                else:
                    group = [{lookup(d)} | {lookup(e) for e in alls.get(role, [])}
                             for d in exs[role]]
                for names in group:
                    keep.add(Some(role, conj(Name(n) for n in sorted(names))))
                    order[b] |= names
            clauses.add(frozenset(keep))
        result[b] = clauses
    return result, order, fresh_bodies


class _View:
    """Minimal TBox look-alike over a mutable definition map."""

    def __init__(self, defs, signature):
        self._defs = defs
        self.signature = signature

    def __contains__(self, name):
        return name in self._defs

    def definition(self, name):
        return self._defs[name]


def canonical(clauses: dict, order: dict, bodies: dict) -> tuple[dict, dict]:
    """Rename fresh names to ``<printed body>`` and flatten existential bodies to name sets."""
    ren = {n: f"<{show(b)}>" for n, b in bodies.items()}

    def r(n):
        return ren.get(n, n)

    def item(x):
        if isinstance(x, Some):
            names = []
            stack = [x.body]
            while stack:
                d = stack.pop()
                if isinstance(d, And):
                    stack.extend((d.left, d.right))
                elif isinstance(d, Name):
                    names.append(r(d.name))
                else:
                    names.append(show(d))
            return ("some", x.role, tuple(sorted(names)))
        if isinstance(x, All):
            return ("all", x.role, r(x.body.name) if isinstance(x.body, Name) else show(x.body))
        return ("lit", show(x))

    out = {r(n): frozenset(frozenset(item(x) for x in s) for s in cs) for n, cs in clauses.items()}
    edges = {r(n): frozenset(r(m) for m in ms) for n, ms in order.items()}
    return out, edges


__all__ = ["canonical", "reference_closure", "first_dnf"]
