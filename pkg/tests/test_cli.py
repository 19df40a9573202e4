import json

import pytest

from stal.cli import main

GOOD = """
primitive A;
role R;
B := (or A (some R B));
Bd := (and (not A) (all R Bd));
"""

MUTUAL = """
primitive A;
role R;
X := (some R Y);
Y := (some R X);
"""


@pytest.fixture
def files(tmp_path):
    good = tmp_path / "t.tbx"
    good.write_text(GOOD)
    bad = tmp_path / "bad.tbx"
    bad.write_text(MUTUAL)
    net = tmp_path / "net.qcn"
    net.write_text("a b {NTPP};\nb c {NTPP};  # chain\na c {DC,EC};\n")
    ok = tmp_path / "ok.qcn"
    ok.write_text("a b {NTPP};\nb c {TPP,NTPP};\n")
    concept = tmp_path / "c.txt"
    concept.write_text("(and B (not A))\n")
    return {"good": str(good), "bad": str(bad), "net": str(net), "ok": str(ok), "concept": str(concept)}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_contradiction(files, capsys):
    code, out, _ = run(capsys, "check", "--tbox", files["good"], "--concept", "(and A (not A))")
    assert code == 1 and json.loads(out)["status"] == "unsatisfiable"


def test_check_sat_with_witness(files, capsys):
    code, out, _ = run(capsys, "check", "--tbox", files["good"], "--concept-file", files["concept"],
                       "--witness")
    d = json.loads(out)
    assert code == 0 and d["witness"]["nodes"]


def test_inline_concept_wins(files, capsys):
    code, _, _ = run(capsys, "check", "--tbox", files["good"], "--concept", "(and A (not A))",
                     "--concept-file", files["concept"])
    assert code == 1


def test_check_unknown_exit(tmp_path, capsys):
    t = tmp_path / "cyc.tbx"
    t.write_text("""feature f; cfeature g;
B := (and (and (pred (g) (f.g) {NTPP}) (pred (f.f.f.g) (g) {EQ})) (all f B));
Bd := (or (pred (g) (f.g) {DC,EC,PO,TPP,TPPi,NTPPi,EQ}) (or (pred (f.f.f.g) (g) {DC,EC,PO,TPP,TPPi,NTPP,NTPPi}) (some f Bd)));
""")
    code, out, _ = run(capsys, "check", "--tbox", str(t), "--concept", "B", "--format", "text")
    assert code == 2 and out.startswith("unknown")


def test_validate_mutual_cycle(files, capsys):
    code, _, err = run(capsys, "validate", "--tbox", files["bad"])
    assert code == 3 and "X" in err and "Y" in err


def test_validate_ok(files, capsys):
    code, out, _ = run(capsys, "validate", "--tbox", files["good"], "--format", "text")
    assert code == 0 and out == "accepted\n"


def test_automaton_dot(files, capsys):
    code, out, _ = run(capsys, "automaton", "--tbox", files["good"], "--concept", "B", "--format", "dot")
    assert code == 0 and out.startswith("digraph")


@pytest.mark.parametrize("argv", [
    ["dnf", "--concept", "(or A (and A (not A)))"],
    ["dnf", "--concept", "(some R A)", "--second"],
    ["closure", "--concept", "(some R (some R A))"],
    ["automaton", "--concept", "(some R A)", "--format", "text"],
])
def test_subcommands_succeed(argv, capsys):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out


@pytest.mark.parametrize("net, code", [("net", 1), ("ok", 0)])
def test_csp_solve(files, capsys, net, code):
    got, out, _ = run(capsys, "csp", "solve", files[net])
    assert got == code and json.loads(out)["consistent"] is (code == 0)


def test_csp_bad_atom(tmp_path, capsys):
    p = tmp_path / "x.qcn"
    p.write_text("a b {XX};\n")
    code, _, err = run(capsys, "csp", "solve", str(p))
    assert code == 3 and "XX" in err


@pytest.mark.parametrize("argv", [
    ["check", "--depth", "0", "--concept", "A"],
    ["check", "--concept", "(and A"],
    ["check"],
    ["dnf", "--tbox", "/nonexistent/file", "--concept", "A"],
    ["check", "--concept", "A", "--algebra", "nope"],
    ["frobnicate"],
])
def test_input_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 3
    assert capsys.readouterr().err


def test_output_is_deterministic(files, capsys):
    argv = ["check", "--tbox", files["good"], "--concept", "(and B (not A))", "--witness"]
    assert run(capsys, *argv) == run(capsys, *argv)
