"""Weak alternating automata with spatial constraints.

Transitions live in the free distributive lattice over three kinds of
generators: literals, ground constraints over direction-prefixed concrete
features, and moves ``(d, q)``.  ``UniversalMove(R, q)`` is an extra
generator used when the closure keeps universal restrictions: it sends
``q`` to every successor whose direction belongs to role ``R``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .closure import AutomatonSignature, ClosedTBox, exists_names
from .errors import WeaknessError
from .normal_forms import sort_key
from .spatial.algebra import QualitativeAlgebra, Relation
from .spatial.csp import QCSP
from .syntax import All, Concept, Name, Not, Pred, Some, is_literal, show


# -- generators ---------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Move:
    direction: int
    state: str

    def __str__(self):
        return f"({self.direction},{self.state})"


@dataclass(frozen=True, order=True)
class UniversalMove:
    role: str
    state: str

    def __str__(self):
        return f"(all:{self.role},{self.state})"


@dataclass(frozen=True)
class GroundConstraint:
    """``relation(w1 g1, ..., wp gp)`` where each ``wi`` is a tuple of directions."""

    relation: Relation
    args: tuple[tuple[tuple[int, ...], str], ...]

    def __str__(self):
        parts = []
        for word, g in self.args:
            parts.append("".join(f"d{d}." for d in word) + g)
        return f"{self.relation}({', '.join(parts)})"


def gen_key(g) -> tuple:
    """Total order on generators for deterministic output."""
    if isinstance(g, Concept):
        return (0, show(g))
    if isinstance(g, GroundConstraint):
        return (1, str(g))
    if isinstance(g, Move):
        return (2, g.direction, g.state)
    if isinstance(g, UniversalMove):
        return (3, g.role, g.state)
    if isinstance(g, HistoryGen):
        return (4, g.history)
    if isinstance(g, HistoryUniversal):
        return (5, g.history, g.role, g.state)
    return (9, repr(g))


def gen_str(g) -> str:
    return show(g) if isinstance(g, Concept) else str(g)


# -- lattice expressions ------------------------------------------------------

class LatticeExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Gen(LatticeExpr):
    value: object


@dataclass(frozen=True)
class Conj(LatticeExpr):
    items: tuple[LatticeExpr, ...]


@dataclass(frozen=True)
class Disj(LatticeExpr):
    items: tuple[LatticeExpr, ...]


TRUE = Conj(())
FALSE = Disj(())


def conj_expr(items: Iterable[LatticeExpr]) -> LatticeExpr:
    items = tuple(items)
    return items[0] if len(items) == 1 else Conj(items)


def disj_expr(items: Iterable[LatticeExpr]) -> LatticeExpr:
    items = tuple(items)
    return items[0] if len(items) == 1 else Disj(items)


def _minimize(clauses: Iterable[frozenset]) -> frozenset:
    """Drop every clause that strictly contains another one."""
    cs = sorted(set(clauses), key=len)
    kept: list[frozenset] = []
    for c in cs:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def lattice_dnf(e: LatticeExpr) -> frozenset:
    """Irredundant DNF as a set of generator sets."""
    if isinstance(e, Gen):
        return frozenset({frozenset({e.value})})
    if isinstance(e, Disj):
        out = set()
        for x in e.items:
            out |= lattice_dnf(x)
        return _minimize(out)
    acc = frozenset({frozenset()})
    for x in e.items:
        part = lattice_dnf(x)
        acc = _minimize(a | b for a in acc for b in part)
        if not acc:
            break
    return acc


def dual(e: LatticeExpr) -> LatticeExpr:
    """Interchange conjunction and disjunction."""
    if isinstance(e, Gen):
        return e
    if isinstance(e, Conj):
        return Disj(tuple(dual(x) for x in e.items))
    return Conj(tuple(dual(x) for x in e.items))


def evaluate(e: LatticeExpr, true: Callable[[object], bool] | Iterable) -> bool:
    """Truth value when exactly the generators accepted by ``true`` hold."""
    if not callable(true):
        true = frozenset(true).__contains__
    if isinstance(e, Gen):
        return bool(true(e.value))
    if isinstance(e, Conj):
        return all(evaluate(x, true) for x in e.items)
    return any(evaluate(x, true) for x in e.items)


def generators(e: LatticeExpr) -> set:
    if isinstance(e, Gen):
        return {e.value}
    out = set()
    for x in e.items:
        out |= generators(x)
    return out


def show_expr(e: LatticeExpr) -> str:
    if isinstance(e, Gen):
        return gen_str(e.value)
    if not e.items:
        return "true" if isinstance(e, Conj) else "false"
    op = " & " if isinstance(e, Conj) else " | "
    return "(" + op.join(show_expr(x) for x in e.items) + ")"


# -- automaton ----------------------------------------------------------------

@dataclass(frozen=True)
class Direction:
    index: int
    kind: str            # "role" or "feature"
    role: str
    label: str
    targets: tuple[str, ...] = ()


@dataclass(frozen=True)
class WAA:
    states: tuple[str, ...]
    initial: str
    directions: tuple[Direction, ...]
    delta: Mapping[str, LatticeExpr]
    accepting: frozenset
    order: Mapping[str, frozenset]
    n_p: tuple[str, ...]
    n_cf: tuple[str, ...]
    algebra: QualitativeAlgebra
    clauses: Mapping[str, tuple] = field(default_factory=dict)

    def below(self, q: str) -> frozenset:
        seen, stack = {q}, [q]
        while stack:
            for r in self.order.get(stack.pop(), ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return frozenset(seen)

    def geq(self, q: str, r: str) -> bool:
        return r in self.below(q)

    def weakness_violations(self) -> list[tuple[str, str]]:
        bad = []
        for q in self.states:
            below = self.below(q)
            for g in generators(self.delta[q]):
                if isinstance(g, (Move, UniversalMove)) and g.state not in below:
                    bad.append((q, g.state))
        return bad

    def directions_of_role(self, role: str) -> tuple[int, ...]:
        return tuple(d.index for d in self.directions if d.role == role)

    def as_dict(self) -> dict:
        return {
            "states": list(self.states),
            "initial": self.initial,
            "accepting": sorted(self.accepting),
            "directions": [{"index": d.index, "kind": d.kind, "role": d.role, "label": d.label}
                           for d in self.directions],
            "n_p": list(self.n_p),
            "n_cf": list(self.n_cf),
            "delta": {q: [[gen_str(g) for g in sorted(c, key=gen_key)]
                          for c in sorted(lattice_dnf(self.delta[q]), key=_clause_sort)]
                      for q in self.states},
            "order": {q: sorted(self.order.get(q, ())) for q in self.states},
        }


def _clause_sort(c) -> list:
    return sorted(gen_key(g) for g in c)


def build_automaton(ct: ClosedTBox, sig: AutomatonSignature | None = None,
                    algebra: QualitativeAlgebra | None = None) -> WAA:
    """Translate a closed TBox into its weak alternating automaton."""
    from .closure import derive_signature
    sig = sig or derive_signature(ct)
    algebra = algebra or ct.signature.algebra
    directions = []
    rec_index = {}
    for i, x in enumerate(sig.rec):
        rec_index[x] = i
        directions.append(Direction(i, "role", x.role, show(x), exists_names(x)))
    feat_index = {}
    for j, f in enumerate(sig.af):
        i = len(sig.rec) + j
        feat_index[f] = i
        directions.append(Direction(i, "feature", f, f))
    delta, clauses = {}, {}
    for q in sig.q:
        disjuncts, cl_list = [], []
        for s in sorted(ct.axioms[q], key=lambda s: sorted(sort_key(x) for x in s)):
            gens = _mu(s, ct.signature.features, rec_index, feat_index)
            cl_list.append(frozenset(gens))
            disjuncts.append(conj_expr(Gen(g) for g in sorted(gens, key=gen_key)))
        delta[q] = Disj(tuple(disjuncts)) if len(disjuncts) != 1 else disjuncts[0]
        clauses[q] = tuple(cl_list)
    accepting = frozenset(q for q in sig.q if q not in ct.eventualities)
    a = WAA(
        states=tuple(sig.q),
        initial=ct.initial,
        directions=tuple(directions),
        delta=delta,
        accepting=accepting,
        order=dict(ct.order),
        n_p=sig.n_p,
        n_cf=sig.n_cf,
        algebra=algebra,
        clauses=clauses,
    )
    bad = a.weakness_violations()
    if bad:
        q, r = bad[0]
        raise WeaknessError(f"state {q} moves to {r} but {q} is not above {r}")
    return a


def _mu(s, features, rec_index, feat_index) -> set:
    out = set()
    for x in s:
        if is_literal(x):
            out.add(x)
        elif isinstance(x, Pred):
            args = tuple((tuple(feat_index[f] for f in u.prefix), u.terminal) for u in x.chains)
            out.add(GroundConstraint(x.relation, args))
        elif isinstance(x, Some):
            d = feat_index[x.role] if x.role in features else rec_index[x]
            out.update(Move(d, n) for n in exists_names(x))
        elif isinstance(x, All):
            out.add(UniversalMove(x.role, x.body.name))
        else:
            raise TypeError(f"unexpected clause element {show(x)}")
    return out


def to_dot(a: WAA) -> str:
    """Graphviz rendering: accepting states doubly circled, edges labelled by direction."""
    lines = ["digraph waa {", "  rankdir=LR;", '  init [shape=point];']
    for q in a.states:
        shape = "doublecircle" if q in a.accepting else "circle"
        body = " | ".join(
            " & ".join(gen_str(g) for g in sorted(c, key=gen_key)) or "true"
            for c in sorted(lattice_dnf(a.delta[q]), key=_clause_sort)) or "false"
        label = f"{q}\\n{body}".replace('"', '\\"')
        lines.append(f'  "{q}" [shape={shape}, label="{label}"];')
    lines.append(f'  init -> "{a.initial}";')
    edges = set()
    for q in a.states:
        for g in generators(a.delta[q]):
            if isinstance(g, Move):
                edges.add((q, g.state, f"d{g.direction}"))
            elif isinstance(g, UniversalMove):
                edges.add((q, g.state, f"all {g.role}"))
    for q, r, lab in sorted(edges):
        lines.append(f'  "{q}" -> "{r}" [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- runs ---------------------------------------------------------------------

History = tuple  # (q0, d1, q1, ..., dn, qn)


def last(h: History) -> str:
    return h[-1]


def kproj(h: History) -> tuple:
    return tuple(h[1::2])


def qproj(h: History) -> tuple:
    return tuple(h[0::2])


@dataclass(frozen=True)
class HistoryGen:
    """A history ``h d q`` produced by distributing ``h`` over ``(d, q)``."""

    history: History


@dataclass(frozen=True)
class HistoryUniversal:
    history: History
    role: str
    state: str


def distribute(h: History, e: LatticeExpr) -> LatticeExpr:
    """Prefix ``h`` onto every move generator of ``e``."""
    if isinstance(e, Gen):
        g = e.value
        if isinstance(g, Move):
            return Gen(HistoryGen(h + (g.direction, g.state)))
        if isinstance(g, UniversalMove):
            return Gen(HistoryUniversal(h, g.role, g.state))
        return e
    items = tuple(distribute(h, x) for x in e.items)
    return Conj(items) if isinstance(e, Conj) else Disj(items)


@dataclass(frozen=True)
class Labeling:
    """One way to extend a run at a node."""

    literals: frozenset
    constraints: frozenset
    children: Mapping[int, frozenset]

    def key(self):
        return (sorted(show(x) for x in self.literals), sorted(str(x) for x in self.constraints),
                sorted((d, sorted(v)) for d, v in self.children.items()))


def _clash(lits) -> bool:
    return any(isinstance(x, Not) and x.arg in lits for x in lits)


def expand_run(a: WAA, y: Iterable[History], label: Iterable[str] | None = None) -> list[Labeling]:
    """All successor labelings of a node whose history set is ``y``.

    ``label`` optionally gives the primitive concepts true at the input
    node; disjuncts whose literals disagree with it are dropped.  Universal
    moves reach every created successor of their role.
    """
    y = sorted(set(y))
    e = conj_expr(distribute(h, a.delta[last(h)]) for h in y) if y else TRUE
    label = None if label is None else frozenset(label)
    out = {}
    for clause in lattice_dnf(e):
        lits = frozenset(g for g in clause if isinstance(g, Concept))
        if _clash(lits):
            continue
        if label is not None:
            if any(isinstance(x, Name) and x.name not in label for x in lits):
                continue
            if any(isinstance(x, Not) and x.arg.name in label for x in lits):
                continue
        cons = frozenset(g for g in clause if isinstance(g, GroundConstraint))
        children: dict[int, set] = {}
        for g in clause:
            if isinstance(g, HistoryGen):
                children.setdefault(g.history[-2], set()).add(g.history)
        for g in clause:
            if isinstance(g, HistoryUniversal):
                for d in a.directions_of_role(g.role):
                    if d in children:
                        children[d].add(g.history + (d, g.state))
        lab = Labeling(lits, cons, {d: frozenset(v) for d, v in children.items()})
        out[repr(lab.key())] = lab
    return [out[k] for k in sorted(out)]


@dataclass
class Run:
    """A finite run prefix: node word -> (histories, literals, constraints)."""

    nodes: dict = field(default_factory=dict)

    def add(self, word: tuple, y, literals=frozenset(), constraints=frozenset()):
        self.nodes[tuple(word)] = (frozenset(y), frozenset(literals), frozenset(constraints))


def run_csp(run: Run | Mapping, algebra: QualitativeAlgebra) -> QCSP:
    """Union over nodes ``v`` of the constraints ``P(<v w1, g1>, ...)``."""
    nodes = run.nodes if isinstance(run, Run) else run
    csp = QCSP(algebra)
    for v in sorted(nodes):
        label = nodes[v]
        constraints = label[2] if isinstance(label, tuple) else label
        for c in sorted(constraints, key=str):
            if len(c.args) != 2:
                raise ValueError("only binary constraints are supported")
            (w1, g1), (w2, g2) = c.args
            csp.add((tuple(v) + tuple(w1), g1), (tuple(v) + tuple(w2), g2), c.relation)
    return csp


def history_accepting(stem: Iterable[str], cycle: Iterable[str], accepting) -> bool:
    """Acceptance of the infinite history ``stem cycle cycle ...`` (state sequences).

    A finite history (empty cycle) carries no obligation.
    """
    cycle = list(cycle)
    if not cycle:
        return True
    return any(q in accepting for q in cycle)


__all__ = [
    "Conj", "Direction", "Disj", "FALSE", "Gen", "GroundConstraint", "HistoryGen",
    "HistoryUniversal", "Labeling", "LatticeExpr", "Move", "Run", "TRUE", "UniversalMove",
    "WAA", "build_automaton", "distribute", "dual", "evaluate", "expand_run", "gen_key",
    "gen_str", "generators", "history_accepting", "kproj", "last", "lattice_dnf", "qproj",
    "run_csp", "show_expr", "to_dot",
]
