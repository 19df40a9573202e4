"""Acceptance suite: one test per criterion, each reporting a single PASS/FAIL line.

The lines are collected in ``RESULTS`` and echoed in the terminal summary by
``conftest.py``; run ``python tests/test_acceptance.py`` to print them directly.
"""
import random
import subprocess
import sys
import time

import pytest

from hand_tboxes import ACCEPTING, REJECTING
from stal.automaton import build_automaton
from stal.closure import augment, close
from stal.emptiness import Status, check_satisfiable, verify_witness
from stal.normal_forms import clause_shape_ok, dnf1, dnf2
from stal.oracles.corpus import CorpusParams, connectives, generate_corpus
from stal.oracles.reference_closure import canonical, reference_closure
from stal.oracles.grid import (
    composition_witnesses, grid_csp_solve, random_region, region_catalog,
    relation_matrix, table_violations,
)
from stal.oracles.semantics import brute_force_models, oracle_depth_sufficient
from stal.spatial import QCSP, check_axioms, csp_consistent, load_algebra
from stal.syntax import BOT, Name, Not, TBox, parse_concept_ex, parse_instance
from stal.tbox import analyze, is_weakly_cyclic

RESULTS: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)


def clashes(clause) -> bool:
    return any(isinstance(x, Not) and x.arg in clause for x in clause)


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_weak_cyclicity_suite():
    t0 = time.perf_counter()
    wrong = []
    for name, text, _kinds in ACCEPTING:
        if not is_weakly_cyclic(parse_instance(text).tbox).accepted:
            wrong.append(name)
    for name, text, violation, names in REJECTING:
        r = is_weakly_cyclic(parse_instance(text).tbox)
        if r.accepted or r.violation != violation or tuple(r.offending) != names:
            wrong.append(name)
    dt = time.perf_counter() - t0
    ok = not wrong and len(ACCEPTING) == 6 and len(REJECTING) == 6 and dt < 1
    report(1, ok, f"{12 - len(wrong)}/12 hand TBoxes classified correctly in {dt:.2f}s")
    assert ok, wrong


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_dnf_clash_freeness():
    t0 = time.perf_counter()
    items = generate_corpus(2024, 1000, CorpusParams(max_connectives=8, concrete=True))
    bad = []
    clauses = 0
    for i, item in enumerate(items):
        assert connectives(item.concept) <= 8
        a = analyze(item.tbox)
        for second, d in ((False, dnf1(item.concept, a)), (True, dnf2(item.concept, a))):
            for s in d:
                clauses += 1
                if clashes(s) or not all(clause_shape_ok(x, second) for x in s):
                    bad.append(i)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    report(2, ok, f"1000 concepts, {clauses} clauses, {len(bad)} bad, {dt:.1f}s")
    assert ok, bad[:5]


# -- 3 and 4 ------------------------------------------------------------------

CLOSURE_CORPUS = generate_corpus(7, 300, CorpusParams(concrete=True))


def test_criterion_3_closure_fidelity():
    t0 = time.perf_counter()
    mismatched, cyclic_order = [], []
    for i, item in enumerate(CLOSURE_CORPUS):
        tc = augment(item.tbox, item.concept)
        ct = close(tc)
        mine = canonical(ct.axioms, ct.order, {n: ct.definitions[n] for n in ct.fresh})
        if mine != canonical(*reference_closure(tc, item.duals)):
            mismatched.append(i)
        if not ct.order_is_acyclic():
            cyclic_order.append(i)
    dt = time.perf_counter() - t0
    ok = not mismatched and not cyclic_order and dt < 60
    report(3, ok, f"{len(CLOSURE_CORPUS)} instances, {len(mismatched)} mismatches, "
                  f"{len(cyclic_order)} cyclic orders, {dt:.1f}s")
    assert ok


def test_criterion_4_weakness():
    violations = 0
    for item in CLOSURE_CORPUS:
        for universals in (False, True):
            a = build_automaton(close(augment(item.tbox, item.concept), universals=universals))
            violations += len(a.weakness_violations())
    report(4, violations == 0, f"{2 * len(CLOSURE_CORPUS)} automata, {violations} violations")
    assert violations == 0


# -- 5 ------------------------------------------------------------------------

def test_criterion_5_algebra_integrity():
    t0 = time.perf_counter()
    problems = check_axioms(load_algebra("rcc8")) + check_axioms(load_algebra("cda"))
    rng = random.Random(5)
    triples = [(random_region(rng), random_region(rng), random_region(rng)) for _ in range(10_000)]
    observed = composition_witnesses(triples)
    problems += table_violations(load_algebra("rcc8"), observed)
    dt = time.perf_counter() - t0
    ok = not problems and dt < 60
    report(5, ok, f"axioms hold for rcc8 and cda; 10000 grid triples cover {len(observed)}/64 "
                  f"table cells with {len(problems)} violations, {dt:.1f}s")
    assert ok, problems[:5]


# -- 6 ------------------------------------------------------------------------

def test_criterion_6_csp_decision():
    t0 = time.perf_counter()
    alg = load_algebra("rcc8")
    catalog = region_catalog(6, seed=0, extra=20)
    matrix = relation_matrix(catalog)
    rng = random.Random(6)
    counts = {"sat": 0, "unsat": 0}
    disagreements = []
    for k in range(500):
        nvars = rng.randint(2, 5)
        pick = [rng.randrange(len(catalog)) for _ in range(nvars)]
        cons = {}
        for i in range(nvars):
            for j in range(i + 1, nvars):
                if rng.random() < 0.7:
                    cons[(i, j)] = matrix[pick[i]][pick[j]]
        if cons and rng.random() < 0.5:
            key = rng.choice(sorted(cons))
            cons[key] = rng.choice(alg.atoms)
        net = QCSP(alg, range(nvars))
        for (x, y), atom in cons.items():
            net.add(x, y, alg.mask([atom]))
        solver = csp_consistent(net)
        oracle = grid_csp_solve({p: {a} for p, a in cons.items()}, catalog, matrix=matrix) is not None
        counts["sat" if solver else "unsat"] += 1
        if oracle and not solver:
            disagreements.append(k)
    dt = time.perf_counter() - t0
    ok = not disagreements and dt < 120
    report(6, ok, f"500 atomic networks ({counts['sat']} consistent, {counts['unsat']} inconsistent), "
                  f"{len(disagreements)} oracle-SAT/solver-UNSAT conflicts, {dt:.1f}s")
    assert ok, disagreements[:5]


# -- 7 and 8 ------------------------------------------------------------------

E2E_CORPUS = generate_corpus(11, 600, CorpusParams())
_verdicts: dict = {}


def verdicts():
    if not _verdicts:
        for i, item in enumerate(E2E_CORPUS):
            _verdicts[("e2e", i)] = (item, check_satisfiable(item.concept, item.tbox))
        for i, item in enumerate(CLOSURE_CORPUS):
            _verdicts[("cd", i)] = (item, check_satisfiable(item.concept, item.tbox))
    return _verdicts


def fixed_examples():
    feature = parse_instance("""primitive A; feature f;
        B := (or A (some f B)); Bp := (and (not A) (all f Bp));""").tbox
    c, sig = parse_concept_ex("(pred (g) (g) {DC})", None, (), implicit=True)
    return [
        ("bottom", check_satisfiable(BOT, TBox((), feature.signature)).status is Status.UNSAT),
        ("eventuality", check_satisfiable(Name("B"), feature).status is Status.SAT),
        ("reflexive DC", check_satisfiable(c, TBox((), sig)).status is Status.UNSAT),
    ]


def test_criterion_7_end_to_end():
    t0 = time.perf_counter()
    compared = mismatches = 0
    sats = unsats = 0
    for i, item in enumerate(E2E_CORPUS):
        if not oracle_depth_sufficient(item.concept, item.tbox, 3):
            continue
        _, v = verdicts()[("e2e", i)]
        truth = brute_force_models(item.concept, item.tbox, 3)
        compared += 1
        sats += truth
        unsats += not truth
        if v.satisfiable is not truth:
            mismatches += 1
    fixed = fixed_examples()
    dt = time.perf_counter() - t0
    ok = compared >= 500 and mismatches == 0 and all(f for _, f in fixed) and dt < 300
    report(7, ok, f"{compared} oracle-sufficient instances ({sats} SAT, {unsats} UNSAT), "
                  f"{mismatches} disagreements; fixed examples "
                  f"{'/'.join(n for n, f in fixed if f)} hold; {dt:.1f}s")
    assert ok


def test_criterion_8_certificates():
    checked = failures = 0
    for (_, _), (_, v) in verdicts().items():
        if v.status is Status.SAT:
            checked += 1
            if verify_witness(v.automaton, v.witness):
                failures += 1
    ok = failures == 0 and checked > 0
    report(8, ok, f"{checked} witnesses re-verified, {failures} failures")
    assert ok


# -- 9 ------------------------------------------------------------------------

FIXTURE_TBOX = """primitive A; role R; feature f; cfeature g;
B := (or A (some R B));
Bd := (and (not A) (all R Bd));
D := (and (pred (f.g) (g) {NTPP,TPP}) (some R A));
"""


def test_criterion_9_cli_determinism(tmp_path):
    tbox = tmp_path / "fixture.tbx"
    tbox.write_text(FIXTURE_TBOX)
    net = tmp_path / "net.qcn"
    net.write_text("a b {NTPP,TPP};\nb c {EC,PO};\nc a {DC,EC,PO};\n")
    t = ["--tbox", str(tbox)]
    invocations = [
        ["validate", *t],
        ["dnf", *t, "--concept", "(and B D)"],
        ["dnf", *t, "--concept", "(and B D)", "--second"],
        ["closure", *t, "--concept", "(and B D)"],
        ["automaton", *t, "--concept", "(and B D)"],
        ["automaton", *t, "--concept", "(and B D)", "--format", "dot"],
        ["csp", "solve", str(net)],
        ["check", *t, "--concept", "(and B (and D (not A)))", "--witness"],
    ]
    differing = []
    for argv in invocations:
        outs = [subprocess.run([sys.executable, "-m", "stal", *argv], capture_output=True)
                for _ in range(2)]
        if outs[0].stdout != outs[1].stdout or outs[0].returncode != outs[1].returncode \
                or not outs[0].stdout:
            differing.append(argv[0])
    ok = not differing
    report(9, ok, f"{len(invocations)} invocations over 6 subcommands, "
                  f"{len(differing)} with differing output")
    assert ok, differing


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
