import pytest

from stal.errors import TBoxError
from stal.syntax import And, Name, Some, parse_instance
from stal.tbox import Kind, analyze, depths, is_weakly_cyclic, uses_closure, uses_relation

from hand_tboxes import ACCEPTING, REJECTING


def tbox(text):
    return parse_instance(text).tbox


def test_depths_self():
    assert depths("B", Name("B")) == {0}


def test_depths_absent():
    assert depths("B", Name("A")) == frozenset()


def test_depths_union():
    assert depths("B", And(Name("B"), Some("R", Name("B")))) == {0, 1}


def test_uses_self_loop():
    t = tbox("primitive A; role R; B := (or A (some R B));")
    assert uses_relation(t) == {"B": {"B"}}


def test_uses_chain():
    t = tbox("primitive A; role R; B1 := (some R B2); B2 := A;")
    assert uses_relation(t) == {"B1": {"B2"}, "B2": set()}
    assert uses_closure(t)["B1"] == {"B2"}


def test_uses_mutual():
    t = tbox("B1 := B2; B2 := B1;")
    assert uses_closure(t) == {"B1": {"B1", "B2"}, "B2": {"B1", "B2"}}


@pytest.mark.parametrize("name, text, kinds", ACCEPTING, ids=[a[0] for a in ACCEPTING])
def test_hand_accepting(name, text, kinds):
    report = is_weakly_cyclic(tbox(text))
    assert report.accepted, report.diagnostics
    assert {n: c.kind.value for n, c in report.classes.items()} == kinds


@pytest.mark.parametrize("name, text, violation, offending", REJECTING,
                         ids=[r[0] for r in REJECTING])
def test_hand_rejecting(name, text, violation, offending):
    report = is_weakly_cyclic(tbox(text))
    assert not report.accepted
    assert report.violation == violation
    assert report.offending == offending


def test_mutual_cycle_message_names_both():
    report = is_weakly_cyclic(tbox(REJECTING[0][1]))
    assert report.diagnostics == ["axioms X and Y use each other"]


def test_feature_duals():
    a = analyze(tbox(ACCEPTING[1][1]))
    assert a.dual("B") == "Bp" and a.dual("Bp") == "B"
    assert a.kind("B") is Kind.EVENTUALITY_A
    assert a.classes["B"].role_used == "f"


@pytest.mark.parametrize("name, text, kinds", ACCEPTING, ids=[a[0] for a in ACCEPTING])
def test_accepted_invariants(name, text, kinds):
    t = tbox(text)
    a = analyze(t)
    for ax in t.axioms:
        ds = depths(ax.lhs, ax.rhs)
        assert ds == (frozenset({1}) if a.is_cyclic(ax.lhs) else frozenset())
    for n in a.cyclic_names:
        assert a.dual(a.dual(n)) == n


def test_analyze_raises_with_offenders():
    with pytest.raises(TBoxError) as exc:
        analyze(tbox(REJECTING[5][1]))
    assert exc.value.axioms == ("B",)


def test_dual_needs_same_role():
    t = tbox("primitive A; role R, S; B := (or A (some R B)); Bd := (and (not A) (all S Bd));")
    assert is_weakly_cyclic(t).violation == "dual-missing"


def test_push_negation_through_analysis():
    a = analyze(tbox(ACCEPTING[2][1]))
    from stal.syntax import Not
    assert a.push_negation(Not(Name("N"))) == Name("E")
