import pytest
from hypothesis import given, settings, strategies as st

from stal.automaton import (
    FALSE, TRUE, WAA, Conj, Direction, Disj, Gen, GroundConstraint, Move, Run, UniversalMove,
    build_automaton, distribute, dual, evaluate, expand_run, history_accepting, kproj,
    last, lattice_dnf, qproj, run_csp, show_expr, to_dot,
)
from stal.closure import augment, close, derive_signature
from stal.errors import WeaknessError
from stal.oracles.corpus import CorpusParams, generate_corpus
from stal.spatial import csp_consistent, load_algebra
from stal.syntax import Name, Not, TBox, parse_concept_ex, parse_instance

RCC8 = load_algebra("rcc8")
A = Name("A")


def automaton(text, concept):
    inst = parse_instance(text)
    c, sig = parse_concept_ex(concept, inst.tbox.signature, inst.tbox.defined, implicit=True)
    ct = close(augment(TBox(inst.tbox.axioms, sig), c), universals=True)
    return build_automaton(ct, derive_signature(ct))


def hand_waa(delta, directions=(Direction(0, "role", "R", "d"),), accepting=None):
    states = tuple(sorted(delta))
    return WAA(states, "q0", directions, delta, frozenset(accepting or states),
               {q: frozenset(states) for q in states}, (), (), RCC8)


# -- lattice -----------------------------------------------------------------

def test_dnf_single():
    assert lattice_dnf(Gen("s")) == {frozenset({"s"})}


def test_dnf_distribution():
    e = Conj((Disj((Gen("a"), Gen("b"))), Gen("c")))
    assert lattice_dnf(e) == {frozenset("ac"), frozenset("bc")}


def test_dnf_subsumption():
    e = Disj((Gen("a"), Conj((Gen("a"), Gen("b")))))
    assert lattice_dnf(e) == {frozenset("a")}


def test_constants():
    assert lattice_dnf(TRUE) == {frozenset()}
    assert lattice_dnf(FALSE) == frozenset()
    assert show_expr(TRUE) == "true" and show_expr(FALSE) == "false"


exprs = st.recursive(st.sampled_from("abcd").map(Gen), lambda inner: st.one_of(
    st.lists(inner, max_size=3).map(lambda xs: Conj(tuple(xs))),
    st.lists(inner, max_size=3).map(lambda xs: Disj(tuple(xs))),
), max_leaves=10)


@settings(max_examples=200, deadline=None)
@given(exprs, st.sets(st.sampled_from("abcd")))
def test_dnf_preserves_truth(e, true):
    by_dnf = any(c <= true for c in lattice_dnf(e))
    assert evaluate(e, true) == by_dnf


@settings(max_examples=100, deadline=None)
@given(exprs, st.sets(st.sampled_from("abcd")))
def test_dual_is_de_morgan(e, true):
    assert evaluate(dual(e), true) == (not evaluate(e, set("abcd") - true))


@settings(max_examples=100, deadline=None)
@given(exprs)
def test_dnf_irredundant(e):
    cs = list(lattice_dnf(e))
    assert not any(a < b for a in cs for b in cs)


# -- construction ------------------------------------------------------------

def test_literal_automaton():
    a = automaton("", "A")
    assert lattice_dnf(a.delta["B_init"]) == {frozenset({A})}
    assert a.accepting == {"B_init"} and a.directions == ()


def test_eventuality_automaton(feature_tbox):
    ct = close(augment(feature_tbox, Name("B")), universals=True)
    a = build_automaton(ct)
    assert lattice_dnf(a.delta["B"]) == {frozenset({A}), frozenset({Move(0, "B")})}
    assert "B" not in a.accepting and "Bp" in a.accepting


def test_pred_automaton():
    a = automaton("", "(pred (f.g) (h) {EC})")
    (clause,) = lattice_dnf(a.delta["B_init"])
    (gc,) = [g for g in clause if isinstance(g, GroundConstraint)]
    (mv,) = [g for g in clause if isinstance(g, Move)]
    assert gc.relation == RCC8.relation(["EC"])
    assert gc.args == (((0,), "g"), ((), "h"))
    assert mv.direction == 0
    top_state = mv.state
    assert lattice_dnf(a.delta[top_state]) == {frozenset()}


def test_weakness_violation_raises():
    from stal.closure import ClosedTBox
    from stal.syntax import Signature, Some
    from stal.tbox import Kind
    axioms = {"B_init": frozenset({frozenset({Some("R", Name("X"))})}),
              "X": frozenset({frozenset({Some("R", Name("B_init"))})})}
    ct = ClosedTBox(axioms, "B_init", {"B_init": frozenset({"X"}), "X": frozenset()}, {}, (),
                    Signature((), {"R"}), {"B_init": Kind.ACYCLIC, "X": Kind.ACYCLIC})
    with pytest.raises(WeaknessError):
        build_automaton(ct)


def test_dot_output(ev_tbox):
    a = automaton(ev_tbox.to_text(), "B")
    dot = to_dot(a)
    assert dot.startswith("digraph waa {") and '"B" -> "B" [label="d0"];' in dot


CORPUS = generate_corpus(17, 80, CorpusParams(concrete=True))


@pytest.mark.parametrize("item", CORPUS, ids=[f"c{i}" for i in range(len(CORPUS))])
def test_built_automata_are_weak(item):
    ct = close(augment(item.tbox, item.concept), universals=True)
    a = build_automaton(ct)
    assert a.weakness_violations() == []
    assert a.accepting == {q for q in a.states if q not in ct.eventualities}


# -- runs ----------------------------------------------------------------------

def test_history_projections():
    h = ("q0", 1, "q1", 0, "q2")
    assert last(h) == "q2" and kproj(h) == (1, 0) and qproj(h) == ("q0", "q1", "q2")


def test_distribute_prefixes_moves():
    e = distribute(("q0",), Conj((Gen(Move(0, "q1")), Gen(A))))
    assert str(e.items[0].value.history) == str(("q0", 0, "q1"))
    assert e.items[1] == Gen(A)


def test_expand_literal_label():
    a = hand_waa({"q0": Gen(A)})
    (lab,) = expand_run(a, [("q0",)], label={"A"})
    assert lab.literals == {A} and not lab.constraints and not lab.children


def test_expand_two_moves_same_direction():
    a = hand_waa({"q0": Conj((Gen(Move(0, "q1")), Gen(Move(0, "q2")))), "q1": TRUE, "q2": TRUE})
    (lab,) = expand_run(a, [("q0",)])
    assert lab.children == {0: {("q0", 0, "q1"), ("q0", 0, "q2")}}


def test_expand_filters_by_label():
    a = hand_waa({"q0": Disj((Gen(A), Gen(Move(0, "q1")))), "q1": TRUE})
    labs = expand_run(a, [("q0",)], label=set())
    assert [lab.children for lab in labs] == [{0: {("q0", 0, "q1")}}]


def test_expand_drops_clashes():
    a = hand_waa({"q0": Conj((Gen(A), Gen(Not(A))))})
    assert expand_run(a, [("q0",)]) == []


def test_expand_universal_reaches_existing_children():
    a = hand_waa({"q0": Conj((Gen(Move(0, "q1")), Gen(UniversalMove("R", "q2")))),
                  "q1": TRUE, "q2": TRUE})
    (lab,) = expand_run(a, [("q0",)])
    assert lab.children[0] == {("q0", 0, "q1"), ("q0", 0, "q2")}


def test_run_csp_single():
    c = GroundConstraint(RCC8.relation(["EQ"]), (((1,), "g"), ((), "g")))
    net = run_csp({(): frozenset({c})}, RCC8)
    assert set(net.variables) == {((1,), "g"), ((), "g")}
    assert len(net.constraints) == 1


def test_run_csp_shares_variables():
    c = GroundConstraint(RCC8.relation(["EQ"]), (((1,), "g"), ((), "g")))
    run = Run()
    run.add((), [("q0",)], constraints={c})
    run.add((1,), [("q0", 1, "q0")], constraints={c})
    net = run_csp(run, RCC8)
    assert set(net.variables) == {((), "g"), ((1,), "g"), ((1, 1), "g")}
    assert len(net.constraints) == 2 and csp_consistent(net)


def test_run_csp_empty():
    net = run_csp({(): frozenset()}, RCC8)
    assert not net.constraints and csp_consistent(net)


@pytest.mark.parametrize("cycle, accepted", [(["N", "N"], True), (["E", "E"], False), ([], True)])
def test_history_acceptance(cycle, accepted):
    assert history_accepting(["B_init"], cycle, {"B_init", "N"}) is accepted
