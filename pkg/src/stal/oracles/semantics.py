"""Direct-semantics model enumerator over finite labeled trees.

Trees are built bottom up.  A node is summarised by its *profile*: the
truth values of the formulas its parent can ask about, plus the values of
the concrete feature chains the parent may read.  For a general role only
the union and intersection of the children's profiles matter (``some``
needs one child, ``all`` needs every child), so the set of achievable
children summaries is finite and small.

On a finite tree the defining equation of a cyclic name has exactly one
solution, so names are evaluated by unfolding their definition one level
and reading the children's profiles; negation is plain complement.  An
eventuality that is not resolved inside the tree is therefore false,
which is what makes the enumerator sound for satisfiable answers at any
depth and for unsatisfiable answers only when the depth suffices (see
``oracle_depth_sufficient``).

This module does not use the analysis, normal-form or automaton modules.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import InstanceTooLargeError, TBoxError
from ..syntax import (
    All, And, Bot, Concept, Name, Not, Or, Pred, Some, TBox, Top, push_negation,
)

MAX_COMBINATIONS = 2_000_000


def _nnf(c: Concept) -> Concept:
    # negation pushed down to names only; (not pred) becomes the complement predicate
    return push_negation(c, {}, ())


def _subformulas(c: Concept, out: set) -> None:
    if c in out:
        return
    out.add(c)
    if isinstance(c, Not):
        _subformulas(c.arg, out)
    elif isinstance(c, (And, Or)):
        _subformulas(c.left, out)
        _subformulas(c.right, out)
    elif isinstance(c, (Some, All)):
        _subformulas(c.body, out)


@dataclass(frozen=True)
class _Profile:
    true: frozenset            # formulas (from the parent-visible set) true here
    values: tuple              # ((chain key, value or None), ...)


class _Model:
    def __init__(self, c: Concept, t: TBox, domain):
        sig = t.signature
        self.defs = {ax.lhs: _nnf(ax.rhs) for ax in t.axioms}
        self.query = _nnf(c)
        forms: set = set()
        _subformulas(self.query, forms)
        for rhs in self.defs.values():
            _subformulas(rhs, forms)
        self.prims = sorted(p for p in sig.primitives if p not in self.defs)
        roles = set()
        for f in forms:
            if isinstance(f, (Some, All)):
                roles.add(f.role)
        self.features = sorted(r for r in roles if r in sig.features)
        self.roles = sorted(r for r in roles if r not in sig.features)
        if len(self.roles) + len(self.features) > 2:
            raise InstanceTooLargeError("the model enumerator supports at most two roles")
        self.visible = {r: frozenset(f.body for f in forms if isinstance(f, (Some, All))
                                     and f.role == r) for r in roles}
        preds = [f for f in forms if isinstance(f, Pred)]
        self.cfeatures = sorted({u.terminal for p in preds for u in p.chains})
        self.chain_keys = sorted({(u.prefix[i:], u.terminal) for p in preds for u in p.chains
                                  for i in range(len(u.prefix) + 1)})
        self.domain = domain
        if preds and domain is None:
            raise InstanceTooLargeError("concrete features need a region catalog")
        self.values = list(domain.values) if domain is not None else []

    def labels(self):
        for bits in itertools.product((False, True), repeat=len(self.prims)):
            lits = frozenset(p for p, b in zip(self.prims, bits) if b)
            for theta in itertools.product(range(len(self.values)), repeat=len(self.cfeatures)):
                yield lits, dict(zip(self.cfeatures, theta))

    def evaluate(self, lits, theta, summaries, fchildren):
        memo: dict = {}
        visiting: set = set()

        def chain_value(prefix, g):
            if not prefix:
                return theta.get(g)
            child = fchildren.get(prefix[0])
            if child is None:
                return None
            return dict(child.values).get((prefix[1:], g))

        def ev(f) -> bool:
            hit = memo.get(f)
            if hit is not None:
                return hit
            if f in visiting:
                raise TBoxError(f"definition of {f} depends on itself at the same node")
            visiting.add(f)
            if isinstance(f, Top):
                r = True
            elif isinstance(f, Bot):
                r = False
            elif isinstance(f, Name):
                r = ev(self.defs[f.name]) if f.name in self.defs else f.name in lits
            elif isinstance(f, Not):
                r = not ev(f.arg)
            elif isinstance(f, And):
                r = ev(f.left) and ev(f.right)
            elif isinstance(f, Or):
                r = ev(f.left) or ev(f.right)
            elif isinstance(f, Some):
                if f.role in fchildren or f.role in self.features:
                    child = fchildren.get(f.role)
                    r = child is not None and f.body in child.true
                else:
                    s = summaries.get(f.role)
                    r = s is not None and f.body in s[0]
            elif isinstance(f, All):
                if f.role in self.features:
                    child = fchildren.get(f.role)
                    r = child is None or f.body in child.true
                else:
                    s = summaries.get(f.role)
                    r = s is None or f.body in s[1]
            elif isinstance(f, Pred):
                vals = [chain_value(u.prefix, u.terminal) for u in f.chains]
                if any(v is None for v in vals):
                    r = False
                else:
                    atom = self.domain.relation(*(self.values[v] for v in vals))
                    r = atom in f.relation.atoms
            else:
                raise TypeError(f"not a concept: {f!r}")
            visiting.discard(f)
            memo[f] = r
            return r

        wanted = set(self.query_set)
        true = frozenset(f for f in wanted if ev(f))
        values = tuple((k, chain_value(*k)) for k in self.chain_keys)
        return _Profile(true, values)

    @property
    def query_set(self):
        out = {self.query}
        for bodies in self.visible.values():
            out |= bodies
        return out


def _role_summaries(profiles, visible):
    """All (union, intersection) pairs over sets of children; ``None`` = no child."""
    projected = sorted({p.true & visible for p in profiles}, key=lambda s: sorted(map(repr, s)))
    pairs = {None}
    frontier = []
    for p in projected:
        pair = (p, p)
        if pair not in pairs:
            pairs.add(pair)
            frontier.append(pair)
    while frontier:
        u, i = frontier.pop()
        for p in projected:
            nxt = (u | p, i & p)
            if nxt not in pairs:
                pairs.add(nxt)
                frontier.append(nxt)
    return sorted(pairs, key=lambda x: (x is not None, repr(x)))


def brute_force_models(c: Concept, t: TBox, depth: int = 3, domain=None) -> bool:
    """Whether some labeled tree of depth at most ``depth`` satisfies ``c`` wrt ``t``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    m = _Model(c, t, domain)
    profiles: set = set()
    labels = list(m.labels())
    for _ in range(depth + 1):
        role_opts = [_role_summaries(profiles, m.visible[r]) for r in m.roles]
        feat_opts = [[None] + sorted(set(profiles), key=repr) for _ in m.features]
        total = len(labels)
        for opts in role_opts + feat_opts:
            total *= len(opts)
        if total > MAX_COMBINATIONS:
            raise InstanceTooLargeError(f"{total} node configurations at this depth")
        new = set(profiles)
        for lits, theta in labels:
            for combo in itertools.product(*role_opts, *feat_opts):
                summaries = dict(zip(m.roles, combo[:len(m.roles)]))
                fchildren = {f: p for f, p in zip(m.features, combo[len(m.roles):])
                             if p is not None}
                new.add(m.evaluate(lits, theta, summaries, fchildren))
        if any(m.query in p.true for p in new):
            return True
        if new == profiles:
            return False
        profiles = new
    return False


def modal_depth(c: Concept, t: TBox, cyclic: set) -> int:
    """Quantifier depth with acyclic names unfolded and cyclic names counted as 0."""
    if isinstance(c, Name):
        if c.name in cyclic or c.name not in t:
            return 0
        return modal_depth(t.definition(c.name), t, cyclic)
    if isinstance(c, Not):
        return modal_depth(c.arg, t, cyclic)
    if isinstance(c, (And, Or)):
        return max(modal_depth(c.left, t, cyclic), modal_depth(c.right, t, cyclic))
    if isinstance(c, (Some, All)):
        return 1 + modal_depth(c.body, t, cyclic)
    return 0


def _self_referential(t: TBox) -> set[str]:
    out = set()
    for ax in t.axioms:
        stack, seen = [ax.rhs], set()
        while stack:
            d = stack.pop()
            if isinstance(d, Name):
                if d.name == ax.lhs:
                    out.add(ax.lhs)
                    break
                if d.name in t and d.name not in seen:
                    seen.add(d.name)
                    stack.append(t.definition(d.name))
            elif isinstance(d, Not):
                stack.append(d.arg)
            elif isinstance(d, (And, Or)):
                stack.extend((d.left, d.right))
            elif isinstance(d, (Some, All)):
                stack.append(d.body)
    return out


def _has_pred(c: Concept) -> bool:
    s: set = set()
    _subformulas(c, s)
    return any(isinstance(x, Pred) for x in s)


def oracle_depth_sufficient(c: Concept, t: TBox, depth: int = 3) -> bool:
    """Whether an UNSAT answer of ``brute_force_models`` at ``depth`` is conclusive.

    Holds for concrete-domain-free instances with at most two
    self-referential definitions, each of which stays propositional apart
    from its own recursive occurrence, and a query whose depth (cyclic
    names counted as 0) is below ``depth``.  Past the query depth a node
    only carries cyclic obligations, and each of those is either
    dischargeable on the spot or never.
    """
    if _has_pred(c) or any(_has_pred(ax.rhs) for ax in t.axioms):
        return False
    cyclic = _self_referential(t)
    if len(cyclic) > 2:
        return False
    for b in cyclic:
        rhs = t.definition(b)
        if not _propositional_apart_from(rhs, b, t, cyclic):
            return False
    return modal_depth(c, t, cyclic) + 1 <= depth


def _propositional_apart_from(rhs: Concept, b: str, t: TBox, cyclic: set) -> bool:
    """``rhs`` has quantifiers only of the form ``(some R b)`` / ``(all R b)``, and no other cyclic name."""
    if isinstance(rhs, (Some, All)):
        return rhs.body == Name(b)
    if isinstance(rhs, Name):
        if rhs.name in cyclic:
            return False
        if rhs.name in t:
            return modal_depth(t.definition(rhs.name), t, cyclic) == 0 and \
                not (_names_deep(t.definition(rhs.name), t) & cyclic)
        return True
    if isinstance(rhs, Not):
        return _propositional_apart_from(rhs.arg, b, t, cyclic) and not isinstance(rhs.arg, (Some, All))
    if isinstance(rhs, (And, Or)):
        return (_propositional_apart_from(rhs.left, b, t, cyclic)
                and _propositional_apart_from(rhs.right, b, t, cyclic))
    return True


def _names_deep(c: Concept, t: TBox) -> set[str]:
    out, stack = set(), [c]
    while stack:
        d = stack.pop()
        if isinstance(d, Name):
            if d.name not in out:
                out.add(d.name)
                if d.name in t:
                    stack.append(t.definition(d.name))
        elif isinstance(d, Not):
            stack.append(d.arg)
        elif isinstance(d, (And, Or)):
            stack.extend((d.left, d.right))
        elif isinstance(d, (Some, All)):
            stack.append(d.body)
    return out


__all__ = ["brute_force_models", "modal_depth", "oracle_depth_sufficient"]
