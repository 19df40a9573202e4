import copy
import json

import pytest

from stal.automaton import build_automaton
from stal.closure import augment, close
from stal.emptiness import SearchConfig, Status, check_satisfiable, search, verify_witness
from stal.oracles.corpus import CorpusParams, generate_corpus
from stal.syntax import BOT, Name, TBox, parse_concept_ex, parse_instance

CHAIN_TBOX = """
feature f;
cfeature g;
B := (and (pred (f.g) (g) {NTPP}) (all f B));
Bd := (or (pred (f.g) (g) {DC,EC,PO,TPP,TPPi,NTPPi,EQ}) (some f Bd));
"""

CYCLE_TBOX = """
feature f;
cfeature g;
B := (and (and (pred (g) (f.g) {NTPP}) (pred (f.f.f.g) (g) {EQ})) (all f B));
Bd := (or (pred (g) (f.g) {DC,EC,PO,TPP,TPPi,NTPPi,EQ}) (or (pred (f.f.f.g) (g) {DC,EC,PO,TPP,TPPi,NTPP,NTPPi}) (some f Bd)));
"""


def check(tbox_text, concept, **cfg):
    t = parse_instance(tbox_text).tbox
    c, sig = parse_concept_ex(concept, t.signature, t.defined, implicit=True)
    return check_satisfiable(c, TBox(t.axioms, sig), SearchConfig(**cfg))


def test_bottom_unsat():
    assert check_satisfiable(BOT, TBox((), parse_instance("").tbox.signature)).status is Status.UNSAT


def test_eventuality_sat(feature_tbox):
    v = check_satisfiable(Name("B"), feature_tbox)
    assert v.status is Status.SAT
    root = v.witness.nodes[()]
    assert Name("A") in root.literals
    assert verify_witness(v.automaton, v.witness) == []


def test_reflexive_dc_unsat():
    assert check("", "(pred (g) (g) {DC})").status is Status.UNSAT


@pytest.mark.parametrize("tbox, concept, status", [
    ("", "(and A (not A))", Status.UNSAT),
    ("", "(and (some R (some S A)) (all R (all S (not A))))", Status.UNSAT),
    ("", "(and (some R A) (some R (not A)))", Status.SAT),
    ("feature f;", "(and (some f A) (some f (not A)))", Status.UNSAT),
    ("", "(and (some f A) (some f (not A)))", Status.SAT),
    ("", "(and (pred (g) (h) {NTPP}) (pred (h) (g) {NTPP}))", Status.UNSAT),
    ("", "(and (pred (g) (h) {TPP,EC}) (pred (h) (g) {TPPi,DC}))", Status.SAT),
    ("primitive A; role R; B := (or A (some R B)); Bd := (and (not A) (all R Bd));",
     "(and B Bd)", Status.UNSAT),
    ("primitive A; role R; B := (or A (some R B)); Bd := (and (not A) (all R Bd));",
     "(and B (not A))", Status.SAT),
    (CHAIN_TBOX, "B", Status.SAT),
])
def test_fixed_verdicts(tbox, concept, status):
    v = check(tbox, concept)
    assert v.status is status, v.reason
    if status is Status.SAT:
        assert verify_witness(v.automaton, v.witness) == []


def test_chain_witness_has_lasso():
    v = check(CHAIN_TBOX, "B")
    lassos = v.witness.as_dict()["lassos"]
    assert lassos and all(t["accepting"] for lasso in lassos for t in lasso["threads"])
    assert v.witness.scenario


def test_periodic_inconsistency_is_not_unsat():
    # each node is locally consistent, but g shrinks strictly and must return after three steps
    v = check(CYCLE_TBOX, "B")
    assert v.status is Status.UNKNOWN


def test_eventuality_never_discharged_is_unsat(ev_tbox):
    v = check_satisfiable(parse_concept_ex("(and B (all R (not A)))", ev_tbox.signature,
                                           ev_tbox.defined)[0], ev_tbox)
    assert v.status is Status.SAT  # A at the root discharges it
    v = check(ev_tbox.to_text(), "(and (not A) (and B (all R Bd)))")
    assert v.status is Status.UNSAT


def test_faithful_closure_is_unsound():
    """Without universal propagation the automaton forgets (all R ...) obligations."""
    c, sig = parse_concept_ex("(and (some R (some S A)) (all R (all S (not A))))", None, (),
                              implicit=True)
    faithful = close(augment(TBox((), sig), c))
    assert search(build_automaton(faithful)).status is Status.SAT
    assert check_satisfiable(c, TBox((), sig)).status is Status.UNSAT


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(depth_bound=0)
    with pytest.raises(ValueError):
        SearchConfig(csp_check_interval=0)


def test_witness_json_is_serialisable(feature_tbox):
    v = check_satisfiable(Name("B"), feature_tbox)
    d = v.as_dict()
    assert json.loads(json.dumps(d, sort_keys=True))["status"] == "satisfiable"
    assert set(d["witness"]) == {"directions", "nodes", "lassos", "csp"}


@pytest.fixture(scope="module")
def chain_verdict():
    return check(CHAIN_TBOX, "B")


def test_tampered_literals_rejected(chain_verdict):
    w = copy.deepcopy(chain_verdict.witness)
    w.nodes[()].literals = frozenset()
    w.nodes[()].constraints = frozenset()
    assert verify_witness(chain_verdict.automaton, w)


def test_tampered_scenario_rejected(chain_verdict):
    w = copy.deepcopy(chain_verdict.witness)
    x, y, _ = w.scenario[0]
    w.scenario[0] = [x, y, "DC"]
    assert any("scenario" in p for p in verify_witness(chain_verdict.automaton, w))


def test_tampered_cut_rejected(chain_verdict):
    w = copy.deepcopy(chain_verdict.witness)
    leaf = next(n for n in w.nodes.values() if n.cut_to is not None)
    leaf.cut_to = leaf.word
    assert verify_witness(chain_verdict.automaton, w)


def test_rejecting_loop_detected(ev_tbox):
    v = check(ev_tbox.to_text(), "(and B (not A))")
    w = copy.deepcopy(v.witness)
    # point every existing child back at the root, so B is postponed forever
    for n in w.nodes.values():
        if n.word and n.cut_to is None and "B" in n.states and Name("A") in n.literals:
            n.literals = frozenset(x for x in n.literals if x != Name("A"))
    assert verify_witness(v.automaton, w)


def test_histories_follow_threads(chain_verdict):
    w = chain_verdict.witness
    for word in w.nodes:
        for h in w.histories(word):
            assert h[0] == chain_verdict.automaton.initial
            assert tuple(h[1::2]) == word
            assert h[-1] in w.nodes[word].states


SMALL = generate_corpus(23, 60, CorpusParams(max_connectives=4))


@pytest.mark.parametrize("item", SMALL, ids=[f"i{i}" for i in range(len(SMALL))])
def test_sat_is_monotone_in_bound(item):
    v = check_satisfiable(item.concept, item.tbox, SearchConfig(depth_bound=2))
    if v.status is Status.SAT:
        for b in (3, 6):
            assert check_satisfiable(item.concept, item.tbox,
                                     SearchConfig(depth_bound=b)).status is Status.SAT


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_seed_does_not_change_verdict(seed, feature_tbox):
    v = check_satisfiable(Name("B"), feature_tbox, SearchConfig(deterministic_seed=seed))
    assert v.status is Status.SAT
