"""Bounded emptiness check for the automaton of a concept.

The search works on macro states ``(S, O)``: ``S`` is the set of automaton
states that some history sits in at a run node and ``O`` the subset that
still owes a visit to an accepting state since the last breakpoint
(``O`` empty).  A run is accepting when every branch meets breakpoints
infinitely often, which is a Büchi game on the macro graph.  The graph is
explored breadth first up to ``depth_bound`` levels:

* with unexplored macros counted as losing, a win yields a positional
  strategy; it becomes a witness once the constraint network of its
  unrolled run is consistent;
* with unexplored macros counted as winning, a loss proves emptiness.

Anything else is reported as unknown.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .automaton import (
    WAA, GroundConstraint, Move, UniversalMove, build_automaton, evaluate, gen_key, gen_str,
    generators, history_accepting, lattice_dnf, run_csp,
)
from .closure import augment, close, derive_signature
from .errors import StalError
from .spatial.csp import QCSP, csp_solve, path_consistency
from .syntax import Concept, Not, TBox, show

Macro = tuple  # (frozenset S, frozenset O)


@dataclass(frozen=True)
class SearchConfig:
    depth_bound: int = 32
    csp_check_interval: int = 1
    deterministic_seed: int = 0
    unrollings: int = 1
    max_macros: int = 20_000
    max_choices: int = 4_096
    max_witness_nodes: int = 20_000
    strategy_attempts: int = 16

    def __post_init__(self):
        if self.depth_bound < 1:
            raise ValueError("depth_bound must be at least 1")
        if self.csp_check_interval < 1:
            raise ValueError("csp_check_interval must be at least 1")
        if self.unrollings < 0:
            raise ValueError("unrollings must be non-negative")


class Status(Enum):
    SAT = "satisfiable"
    UNSAT = "unsatisfiable"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: Status
    reason: str = ""
    witness: "Witness | None" = None
    stats: dict = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool | None:
        if self.status is Status.UNKNOWN:
            return None
        return self.status is Status.SAT

    def as_dict(self) -> dict:
        return {
            "status": self.status.value,
            "reason": self.reason,
            "stats": dict(sorted(self.stats.items())),
            "witness": self.witness.as_dict() if self.witness else None,
        }


# -- choices ------------------------------------------------------------------

@dataclass(frozen=True)
class Choice:
    """One successor labeling of a macro state."""

    literals: frozenset
    constraints: frozenset
    children: tuple            # ((direction, macro), ...) sorted by direction
    picks: tuple               # ((state, clause), ...)
    threads: tuple             # ((direction, parent_state, child_state), ...)

    def kids(self):
        return [m for _, m in self.children]


def _clause_options(a: WAA) -> dict[str, list[frozenset]]:
    return {q: sorted(lattice_dnf(a.delta[q]), key=lambda c: sorted(gen_key(g) for g in c))
            for q in a.states}


class _Explorer:
    def __init__(self, a: WAA, cfg: SearchConfig):
        self.a = a
        self.cfg = cfg
        self.options = _clause_options(a)
        self.role_dirs = {}
        for d in a.directions:
            self.role_dirs.setdefault(d.role, []).append(d.index)
        self.csp_cache: dict[frozenset, bool] = {}
        self.truncated = False

    def local_ok(self, constraints: frozenset) -> bool:
        if not constraints:
            return True
        hit = self.csp_cache.get(constraints)
        if hit is None:
            net = run_csp({(): constraints}, self.a.algebra)
            hit = csp_solve(net) is not None
            self.csp_cache[constraints] = hit
        return hit

    def choices(self, macro: Macro) -> list[Choice]:
        s, o = macro
        partial = [((), frozenset())]   # (picks, union of generators)
        for q in sorted(s):
            nxt = {}
            for picks, gens in partial:
                for clause in self.options[q]:
                    union = gens | clause
                    if _clash(union):
                        continue
                    key = (union, frozenset(g for p, c in picks + ((q, clause),) if p in o
                                            for g in c))
                    if key not in nxt:
                        nxt[key] = (picks + ((q, clause),), union)
                        if len(nxt) > self.cfg.max_choices:
                            break
                if len(nxt) > self.cfg.max_choices:
                    self.truncated = True
                    break
            partial = [nxt[k] for k in sorted(nxt, key=_union_key)]
            if not partial:
                return []
        out = {}
        for picks, union in partial:
            c = self._build(picks, union, o)
            if c is None:
                continue
            key = (c.literals, c.constraints, c.children)
            if key not in out:
                out[key] = c
        return _undominated(list(out.values()))

    def _build(self, picks, union, o) -> Choice | None:
        acc = self.a.accepting
        lits = frozenset(g for g in union if isinstance(g, Concept))
        cons = frozenset(g for g in union if isinstance(g, GroundConstraint))
        if not self.local_ok(cons):
            return None
        threads = set()
        for p, clause in picks:
            for g in clause:
                if isinstance(g, Move):
                    threads.add((g.direction, p, g.state))
        dirs = {d for d, _, _ in threads}
        for p, clause in picks:
            for g in clause:
                if isinstance(g, UniversalMove):
                    for d in self.role_dirs.get(g.role, ()):
                        if d in dirs:
                            threads.add((d, p, g.state))
        children = []
        for d in sorted(dirs):
            sd = frozenset(q for dd, _, q in threads if dd == d)
            if o:
                od = frozenset(q for dd, p, q in threads if dd == d and p in o and q not in acc)
            else:
                od = frozenset(q for q in sd if q not in acc)
            children.append((d, (sd, od)))
        return Choice(lits, cons, tuple(children), tuple(picks), tuple(sorted(threads)))


def _clash(gens) -> bool:
    return any(isinstance(g, Not) and g.arg in gens for g in gens)


def _union_key(key):
    union, _ = key
    return sorted(gen_key(g) for g in union)


def _choice_order(c: Choice):
    return (len(c.children), len(c.constraints), len(c.literals),
            [(d, sorted(m[0]), sorted(m[1])) for d, m in c.children],
            sorted(gen_key(g) for g in c.literals | c.constraints))


def _dominates(c1: Choice, c2: Choice) -> bool:
    if not (c1.literals <= c2.literals and c1.constraints <= c2.constraints):
        return False
    kids2 = dict(c2.children)
    for d, (s1, o1) in c1.children:
        if d not in kids2:
            return False
        s2, o2 = kids2[d]
        if not (s1 <= s2 and o1 <= o2):
            return False
    return True


def _undominated(choices: list[Choice]) -> list[Choice]:
    choices.sort(key=_choice_order)
    kept: list[Choice] = []
    for c in choices:
        if not any(_dominates(k, c) for k in kept):
            kept.append(c)
    return kept


# -- game ---------------------------------------------------------------------

def solve_game(choices: Mapping, frontier: set, optimistic: bool):
    """Winning region and ranks of the breakpoint Büchi game.

    ``frontier`` macros have no known choices; they count as winning when
    ``optimistic`` and as losing otherwise.
    """
    nodes = list(choices)
    base = set(frontier) if optimistic else set()
    z = set(nodes) | base
    while True:
        y = set(base)
        rank = {m: 0 for m in base}
        r = 0
        while True:
            r += 1
            newly = []
            for m in nodes:
                if m in y:
                    continue
                acc = not m[1]
                for c in choices[m]:
                    kids = c.kids()
                    if all(k in y for k in kids) or (acc and all(k in z for k in kids)):
                        newly.append(m)
                        break
            if not newly:
                break
            for m in newly:
                y.add(m)
                rank[m] = r
        if y == z:
            return z, rank
        z = y


def _valid_choices(m, choices, win, rank) -> list[Choice]:
    out = []
    for c in choices[m]:
        kids = c.kids()
        if not m[1]:
            if all(k in win for k in kids):
                out.append(c)
        elif all(k in rank and rank[k] < rank[m] for k in kids):
            out.append(c)
    return out


# -- witness ------------------------------------------------------------------

@dataclass
class WitnessNode:
    word: tuple
    states: frozenset
    owing: frozenset
    threads: frozenset          # {(parent_state, state)}; root has (None, q0)
    literals: frozenset = frozenset()
    constraints: frozenset = frozenset()
    picks: tuple = ()
    cut_to: tuple | None = None


@dataclass
class Witness:
    nodes: dict
    scenario: list
    lassos: list
    directions: tuple

    def histories(self, word: tuple, limit: int = 10_000) -> set:
        """Explicit histories at ``word`` (raises when more than ``limit``)."""
        if word == ():
            node = self.nodes[()]
            return {(q,) for _, q in node.threads}
        parent = self.histories(word[:-1], limit)
        d = word[-1]
        out = set()
        for p, q in self.nodes[word].threads:
            for h in parent:
                if h[-1] == p:
                    out.add(h + (d, q))
                    if len(out) > limit:
                        raise StalError(f"more than {limit} histories at {word}")
        return out

    def as_dict(self) -> dict:
        nodes = []
        for w in sorted(self.nodes, key=lambda w: (len(w), w)):
            n = self.nodes[w]
            nodes.append({
                "word": list(w),
                "states": sorted(n.states),
                "owing": sorted(n.owing),
                "threads": sorted([p or "", q] for p, q in n.threads),
                "literals": sorted(show(x) for x in n.literals),
                "constraints": sorted(str(x) for x in n.constraints),
                "choice": {q: sorted(gen_str(g) for g in c) for q, c in n.picks},
                "cut_to": None if n.cut_to is None else list(n.cut_to),
            })
        return {
            "directions": [{"index": d.index, "label": d.label} for d in self.directions],
            "nodes": nodes,
            "lassos": self.lassos,
            "csp": {"scenario": self.scenario},
        }


def _unroll(a: WAA, m0, strategy: dict, cfg: SearchConfig, has_constraints: bool):
    limit = 1 + (cfg.unrollings if has_constraints else 0)
    root = WitnessNode((), m0[0], m0[1], frozenset({(None, a.initial)}))
    nodes = {(): root}
    stack = [((), m0, ((m0, ()),))]
    while stack:
        word, m, path = stack.pop()
        node = nodes[word]
        c = strategy[m]
        node.literals, node.constraints, node.picks = c.literals, c.constraints, c.picks
        for d, k in c.children:
            w2 = word + (d,)
            seen = [pw for pm, pw in path if pm == k]
            threads = frozenset((p, q) for dd, p, q in c.threads if dd == d)
            child = WitnessNode(w2, k[0], k[1], threads)
            nodes[w2] = child
            if len(nodes) > cfg.max_witness_nodes:
                return None
            if len(seen) >= limit:
                child.cut_to = seen[-1]
            else:
                stack.append((w2, k, path + ((k, w2),)))
    return nodes


def _lassos(nodes: dict, accepting) -> list:
    out = []
    for w in sorted(nodes, key=lambda x: (len(x), x)):
        n = nodes[w]
        if n.cut_to is None:
            continue
        anc = n.cut_to
        seg = [w[:i] for i in range(len(anc), len(w) + 1)]
        cycles = []
        for q in sorted(n.states):
            path = _thread_path(nodes, seg, q)
            if path is not None:
                cycles.append({"state": q, "cycle": path,
                               "accepting": history_accepting(_stem_states(nodes, anc), path[1:], accepting)})
        out.append({"leaf": list(w), "joint": list(anc), "stem": list(anc),
                    "cycle": list(w[len(anc):]), "threads": cycles})
    return out


def _thread_path(nodes, seg, q):
    """States of a thread from ``q`` at the joint back to ``q`` at the leaf, if one exists."""
    frontier = {q: [q]}
    for w in seg[1:]:
        nxt = {}
        for p, r in sorted(nodes[w].threads, key=lambda t: (t[0] or "", t[1])):
            if p in frontier and r not in nxt:
                nxt[r] = frontier[p] + [r]
        frontier = nxt
    return frontier.get(q)


def _stem_states(nodes, anc):
    return [sorted(nodes[anc[:i]].states) for i in range(len(anc) + 1)]


def _scenario(net: QCSP, scenario: dict) -> list:
    out = []
    for (x, y), atom in sorted(scenario.items(), key=lambda kv: repr(kv[0])):
        out.append([_var_str(x), _var_str(y), atom])
    return out


def _var_str(v) -> str:
    word, g = v
    return "<" + ".".join(f"d{d}" for d in word) + ("," if word else "") + g + ">"


# -- driver -------------------------------------------------------------------

def search(a: WAA, cfg: SearchConfig | None = None) -> Verdict:
    """Decide (within the bound) whether ``a`` accepts some tree."""
    cfg = cfg or SearchConfig()
    ex = _Explorer(a, cfg)
    m0 = (frozenset({a.initial}), frozenset())
    choices: dict = {}
    level = [m0]
    seen = {m0}
    stats = {"macros": 0, "levels": 0, "strategies_tried": 0}
    sat_failure = None
    for depth in range(cfg.depth_bound):
        nxt = []
        for m in level:
            choices[m] = ex.choices(m)
            for c in choices[m]:
                for k in c.kids():
                    if k not in seen:
                        seen.add(k)
                        nxt.append(k)
        level = sorted(nxt, key=lambda m: (sorted(m[0]), sorted(m[1])))
        stats["macros"] = len(seen)
        stats["levels"] = depth + 1
        frontier = set(level)
        if len(seen) > cfg.max_macros:
            return Verdict(Status.UNKNOWN, f"more than {cfg.max_macros} macro states", None, stats)
        exhausted = not frontier
        if not exhausted and (depth + 1) % cfg.csp_check_interval and depth + 1 < cfg.depth_bound:
            continue
        win, rank = solve_game(choices, frontier, optimistic=False)
        if m0 in win:
            witness, why = _certify(a, m0, choices, win, rank, cfg, stats)
            if witness is not None:
                return Verdict(Status.SAT, "accepting run found", witness, stats)
            sat_failure = why
        if not ex.truncated:
            owin, _ = solve_game(choices, frontier, optimistic=True)
            if m0 not in owin:
                reason = "no accepting run" if exhausted else "no accepting run within the bound"
                return Verdict(Status.UNSAT, reason, None, stats)
        if exhausted:
            break
    if sat_failure:
        return Verdict(Status.UNKNOWN, sat_failure, None, stats)
    if ex.truncated:
        return Verdict(Status.UNKNOWN, "choice enumeration truncated", None, stats)
    return Verdict(Status.UNKNOWN, f"bound {cfg.depth_bound} reached without a certificate",
                   None, stats)


def _certify(a, m0, choices, win, rank, cfg, stats):
    valid = {m: _valid_choices(m, choices, win, rank) for m in win if m in choices}
    rng = random.Random(cfg.deterministic_seed)
    tried = set()
    why = "no strategy with a consistent constraint network"
    for attempt in range(cfg.strategy_attempts):
        strategy = {}
        stack, reach = [m0], {m0}
        while stack:
            m = stack.pop()
            opts = valid[m]
            c = opts[0] if attempt == 0 else opts[rng.randrange(len(opts))]
            strategy[m] = c
            for k in c.kids():
                if k not in reach:
                    reach.add(k)
                    stack.append(k)
        key = tuple(sorted((repr(sorted(m[0])), repr(sorted(m[1])), _choice_order(c).__repr__())
                           for m, c in strategy.items()))
        if key in tried:
            continue
        tried.add(key)
        stats["strategies_tried"] = stats.get("strategies_tried", 0) + 1
        has_cons = any(c.constraints for c in strategy.values())
        nodes = _unroll(a, m0, strategy, cfg, has_cons)
        if nodes is None:
            why = f"witness exceeds {cfg.max_witness_nodes} nodes"
            continue
        live = {w: n.constraints for w, n in nodes.items() if n.cut_to is None}
        net = run_csp(live, a.algebra)
        scenario = csp_solve(net) if net.constraints else {}
        if scenario is None:
            continue
        return Witness(nodes, _scenario(net, scenario), _lassos(nodes, a.accepting),
                       a.directions), ""
    return None, why


def check_satisfiable(c: Concept, t: TBox, cfg: SearchConfig | None = None) -> Verdict:
    """Augment, close, build the automaton and search it."""
    cfg = cfg or SearchConfig()
    tc = augment(t, c)
    ct = close(tc, universals=True)
    sig = derive_signature(ct)
    a = build_automaton(ct, sig)
    v = search(a, cfg)
    v.stats.update({"states": len(a.states), "directions": len(a.directions)})
    v.automaton = a
    return v


# -- independent witness check ------------------------------------------------

def verify_witness(a: WAA, w: Witness) -> list[str]:
    """Re-check a witness against the automaton; return the problems found."""
    problems = []
    nodes = w.nodes
    root = nodes.get(())
    if root is None or set(root.threads) != {(None, a.initial)}:
        problems.append("root must carry exactly the initial history")
        return problems
    dir_role = {d.index: d.role for d in a.directions}
    for word, n in nodes.items():
        if word:
            parent = nodes.get(word[:-1])
            if parent is None or parent.cut_to is not None:
                problems.append(f"node {word} hangs below a missing or cut node")
                continue
            if not n.threads:
                problems.append(f"node {word} has no histories")
            if {q for _, q in n.threads} != set(n.states):
                problems.append(f"node {word}: states do not match histories")
            for p, q in n.threads:
                if p not in parent.states:
                    problems.append(f"node {word}: history from unknown state {p}")
        if n.cut_to is not None:
            anc = n.cut_to
            if not (len(anc) < len(word) and word[:len(anc)] == anc and anc in nodes):
                problems.append(f"node {word}: lasso joint {anc} is not an ancestor")
            elif set(nodes[anc].states) != set(n.states):
                problems.append(f"node {word}: lasso joint has different states")
            if any(word + (d,) in nodes for d in dir_role):
                problems.append(f"cut node {word} has children")
            continue
        if _clash(n.literals):
            problems.append(f"node {word}: clashing literals")
        kids = {d: nodes[word + (d,)] for d in dir_role if word + (d,) in nodes}
        for p in n.states:
            def holds(g, p=p):
                if isinstance(g, Concept):
                    return g in n.literals
                if isinstance(g, GroundConstraint):
                    return g in n.constraints
                if isinstance(g, Move):
                    k = kids.get(g.direction)
                    return k is not None and (p, g.state) in k.threads
                if isinstance(g, UniversalMove):
                    return all((p, g.state) in k.threads for d, k in kids.items()
                               if dir_role[d] == g.role)
                return False
            if not evaluate(a.delta[p], holds):
                problems.append(f"node {word}: choice violates the transition of {p}")
        for d, k in kids.items():
            for p, q in k.threads:
                allowed = any(
                    (isinstance(g, Move) and g.direction == d and g.state == q)
                    or (isinstance(g, UniversalMove) and g.role == dir_role[d] and g.state == q)
                    for g in _gens(a, p))
                if not allowed:
                    problems.append(f"node {word + (d,)}: history {p}->{q} not produced by {p}")
    problems.extend(_check_threads(a, nodes))
    problems.extend(_check_csp(a, w))
    return problems


def _gens(a, q):
    return generators(a.delta[q])


def _check_threads(a: WAA, nodes) -> list[str]:
    """Look for a cycle of histories that avoids accepting states forever."""
    def rep(word):
        n = nodes[word]
        return n.cut_to if n.cut_to is not None else word

    succ: dict = {}
    for word, n in nodes.items():
        if not word:
            continue
        parent = word[:-1]
        for p, q in n.threads:
            succ.setdefault((parent, p), set()).add((rep(word), q))
    bad = {v for v in set(succ) | {x for vs in succ.values() for x in vs} if v[1] not in a.accepting}
    # Tarjan-free check: repeatedly strip vertices without a bad successor
    graph = {v: {x for x in succ.get(v, ()) if x in bad} for v in bad}
    changed = True
    while changed:
        changed = False
        for v in list(graph):
            if not graph[v]:
                del graph[v]
                for vs in graph.values():
                    vs.discard(v)
                changed = True
    if graph:
        v = min(graph, key=repr)
        return [f"history cycle through non-accepting state {v[1]} at {v[0]}"]
    return []


def _check_csp(a: WAA, w: Witness) -> list[str]:
    live = {word: n.constraints for word, n in w.nodes.items() if n.cut_to is None}
    net = run_csp(live, a.algebra)
    if not net.constraints:
        return []
    given = {(x, y): atom for x, y, atom in w.scenario}
    alg = a.algebra
    atomic = QCSP(alg)
    for (x, y), mask in net.constraints.items():
        atom = given.get((_var_str(x), _var_str(y)))
        if atom is None:
            return [f"scenario misses constraint on {_var_str(x)}, {_var_str(y)}"]
        bit = alg.mask([atom])
        if not bit & mask:
            return [f"scenario atom {atom} outside constraint on {_var_str(x)}, {_var_str(y)}"]
        atomic.add(x, y, bit)
    if path_consistency(atomic) is None:
        return ["scenario is not path consistent"]
    return []


__all__ = [
    "Choice", "SearchConfig", "Status", "Verdict", "Witness", "WitnessNode", "check_satisfiable",
    "search", "solve_game", "verify_witness",
]
