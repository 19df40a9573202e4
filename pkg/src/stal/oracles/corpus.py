"""Deterministic generator of (concept, TBox) instances for fuzz and oracle tests."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..syntax import (
    BOT, TOP, All, And, Axiom, Concept, FeatureChain, Name, Not, Or, Pred, Signature, Some,
    TBox, push_negation,
)
from ..spatial.algebra import load_algebra

PRIMITIVES = ("A", "B", "C")


@dataclass(frozen=True)
class CorpusItem:
    concept: Concept
    tbox: TBox
    duals: dict = field(default_factory=dict, hash=False, compare=False)

    def __iter__(self):
        yield self.concept
        yield self.tbox

    def to_text(self) -> str:
        return self.tbox.to_text(self.concept)


@dataclass(frozen=True)
class CorpusParams:
    max_connectives: int = 6
    max_depth: int = 2
    roles: int = 2                 # general roles plus abstract features, at most 2
    features: bool = True          # allow one of the roles to be an abstract feature
    concrete: bool = False         # allow predicate concepts over a concrete feature
    cyclic_probability: float = 0.6
    acyclic_definitions: int = 2


def connectives(c: Concept) -> int:
    if isinstance(c, Not):
        return 1 + connectives(c.arg)
    if isinstance(c, (And, Or)):
        return 1 + connectives(c.left) + connectives(c.right)
    if isinstance(c, (Some, All)):
        return 1 + connectives(c.body)
    return 0


class _Gen:
    def __init__(self, rng: random.Random, p: CorpusParams, names, roles, chains):
        self.rng = rng
        self.p = p
        self.names = list(names)
        self.roles = list(roles)
        self.chains = chains
        self.rel_atoms = load_algebra("rcc8").atoms

    def atom(self) -> Concept:
        r = self.rng.random()
        if self.chains and r < 0.12:
            return self.pred()
        if r < 0.16:
            return TOP if self.rng.random() < 0.5 else BOT
        return Name(self.rng.choice(self.names))

    def pred(self) -> Concept:
        u, v = self.rng.choice(self.chains), self.rng.choice(self.chains)
        atoms = self.rng.sample(self.rel_atoms, self.rng.randint(1, 3))
        alg = load_algebra("rcc8")
        return Pred((u, v), alg.relation(atoms))

    def concept(self, budget: int, depth: int) -> Concept:
        if budget <= 0:
            return self.atom()
        ops = ["not", "and", "or"]
        if depth > 0 and self.roles:
            ops += ["some", "all"]
        op = self.rng.choice(ops)
        if op == "not":
            return Not(self.concept(budget - 1, depth))
        if op in ("some", "all"):
            role = self.rng.choice(self.roles)
            body = self.concept(budget - 1, depth - 1)
            return Some(role, body) if op == "some" else All(role, body)
        left_budget = self.rng.randint(0, budget - 1)
        left = self.concept(left_budget, depth)
        right = self.concept(budget - 1 - left_budget, depth)
        return And(left, right) if op == "and" else Or(left, right)


def _nnf(c: Concept) -> Concept:
    return push_negation(Not(c), {}, ())


def _cyclic_pair(rng: random.Random, gen: _Gen, role: str):
    """A necessity axiom ``Inv`` and its dual eventuality ``Ev``."""
    form = rng.choice("ab")
    inv, ev = Name("Inv"), Name("Ev")
    if form == "a":
        c = gen.concept(rng.randint(0, 2), 0)
        nec = And(c, All(role, inv))
        evt = Or(_nnf(c), Some(role, ev))
    else:
        c1 = gen.concept(rng.randint(0, 1), 0)
        c2 = gen.concept(rng.randint(0, 1), 0)
        nec = And(c1, Or(c2, All(role, inv)))
        evt = Or(_nnf(c1), And(_nnf(c2), Some(role, ev)))
    if rng.random() < 0.5:
        return [Axiom("Inv", nec), Axiom("Ev", evt)]
    return [Axiom("Ev", evt), Axiom("Inv", nec)]


def generate_instance(rng: random.Random, p: CorpusParams | None = None) -> CorpusItem:
    p = p or CorpusParams()
    nroles = rng.randint(1, max(1, min(2, p.roles)))
    roles = ["R", "S"][:nroles]
    features = []
    if p.features and rng.random() < 0.3:
        roles.pop()
        features = ["f"]
    cfeatures = ["g"] if p.concrete and features and rng.random() < 0.5 else []
    chains = []
    if cfeatures:
        chains = [FeatureChain((), "g"), FeatureChain(("f",), "g")]
    sig = Signature(PRIMITIVES, roles, features, cfeatures)
    all_roles = roles + features
    axioms: list[Axiom] = []
    gen = _Gen(rng, p, PRIMITIVES, all_roles, chains)
    for i in range(rng.randint(0, p.acyclic_definitions)):
        rhs = gen.concept(rng.randint(0, 3), 1)
        axioms.append(Axiom(f"D{i}", rhs))
        gen.names.append(f"D{i}")
    duals = {}
    if rng.random() < p.cyclic_probability:
        prop = _Gen(rng, p, [n for n in gen.names if n in PRIMITIVES or _propositional(n, axioms)],
                    [], [])
        pair = _cyclic_pair(rng, prop, rng.choice(all_roles))
        axioms.extend(pair)
        duals = {"Inv": "Ev", "Ev": "Inv"}
        gen.names += ["Inv", "Ev"]
    budget = rng.randint(1, p.max_connectives)
    query = gen.concept(budget, p.max_depth)
    return CorpusItem(query, TBox(tuple(axioms), sig), duals)


def _propositional(name: str, axioms) -> bool:
    for ax in axioms:
        if ax.lhs == name:
            return _quantifier_free(ax.rhs)
    return False


def _quantifier_free(c: Concept) -> bool:
    if isinstance(c, (Some, All, Pred)):
        return False
    if isinstance(c, Not):
        return _quantifier_free(c.arg)
    if isinstance(c, (And, Or)):
        return _quantifier_free(c.left) and _quantifier_free(c.right)
    return True


def generate_corpus(seed: int, size: int, params: CorpusParams | None = None) -> list[CorpusItem]:
    """``size`` instances, identical for identical ``seed`` and ``params``."""
    rng = random.Random(seed)
    return [generate_instance(rng, params) for _ in range(size)]


__all__ = ["CorpusItem", "CorpusParams", "connectives", "generate_corpus", "generate_instance"]
