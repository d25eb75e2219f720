import json

import pytest

from weaksat.cli import main

AB = 'des (0,5,7)\n(0,"a",1)\n(1,"tau",2)\n(2,"b",3)\n(4,"a",5)\n(5,"b",6)\n'
THREE_PA = "states: x1 x2 x3;\nx1 -a-> 1/3 x2, 2/3 x3;\nx1 -b-> 1 x3;\nx2 -a-> 1 x1;\n"
NFA = 'des (0,3,3)\n(0,"tau",1)\n(1,"a",2)\n(0,"b",2)\naccepting: 2;\n'
CYCLE_PA = "states: x y;\nx -tau-> 1/2 x, 1/2 y;\ny -a-> 1 y;\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("ab.aut", AB), ("three.pa", THREE_PA), ("t.nfa", NFA), ("cycle.pa", CYCLE_PA),
                       ("p.ccs", "P = a.0 + tau.b.0;\n"), ("bad.aut", "des (0,1\n"), ("bad.ccs", "P = Q;\n"),
                       ("x.txt", "")]:
        (tmp_path / name).write_text(text)
        paths[name] = str(tmp_path / name)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_weakbisim_pair(files, capsys):
    assert run(capsys, "weakbisim", files["ab.aut"], "--states", "0", "4")[:2] == (0, "equivalent\n")
    assert run(capsys, "weakbisim", files["ab.aut"], "--states", "0", "1")[:2] == (1, "inequivalent\n")


def test_weakbisim_partition(files, capsys):
    code, out, _ = run(capsys, "weakbisim", files["ab.aut"])
    assert code == 0 and out.startswith("class 0: 0 4\n")


def test_probweakbisim_three_states(files, capsys):
    code, out, _ = run(capsys, "--format", "json", "probweakbisim", files["three.pa"], "--depth", "3")
    v = json.loads(out)
    assert code == 0 and v["classes"] == [["x1"], ["x2"], ["x3"]] and v["schema"] == 1
    assert v["kind"] == "partition" and v["depth_limited"] is False


def test_probweakbisim_verdicts(files, capsys):
    code, out, _ = run(capsys, "probweakbisim", files["three.pa"], "--depth", "3", "--states", "x1", "x3",
                       "--format", "json")
    v = json.loads(out)
    assert code == 1 and v["kind"] == "inequivalent" and "witness" in v
    # x cycles through a probabilistic τ-branch, so the chain never settles
    code, out, _ = run(capsys, "probweakbisim", files["cycle.pa"], "--depth", "2", "--states", "x", "y")
    assert code in (0, 3)
    assert "depth-limited" in out


def test_saturate(files, capsys):
    code, out, _ = run(capsys, "saturate", files["ab.aut"])
    assert code == 0 and out.startswith("des (0,")
    assert run(capsys, "saturate", files["three.pa"])[0] == 2
    code, out, _ = run(capsys, "saturate", files["cycle.pa"], "--depth", "2")
    assert code == 0 and out.startswith("# depth-limited\nstates: x y;")
    code, out, _ = run(capsys, "saturate", files["t.nfa"])
    assert code == 0 and "accepting:" in out


def test_wtraces(files, capsys):
    code, out, _ = run(capsys, "wtraces", files["t.nfa"], "--state", "0", "--maxlen", "2")
    assert code == 0 and out.split("\n")[:2] == ["a", "b"]
    code, out, _ = run(capsys, "wtraces", files["t.nfa"], "--state", "0")
    assert code == 0 and "accepting:" in out
    assert run(capsys, "wtraces", files["t.nfa"], "--state", "9")[0] == 2
    assert run(capsys, "wtraces", files["t.nfa"], "--state", "0", "--maxlen", "-1")[0] == 2


def test_wtrace_equiv(files, capsys):
    code, out, _ = run(capsys, "wtrace-equiv", files["t.nfa"], "--states", "0", "1")
    assert code == 1 and out == "inequivalent: b\n"
    assert run(capsys, "wtrace-equiv", files["t.nfa"], "--states", "2", "2")[0] == 0


def test_parse_ccs_and_quotient(files, capsys):
    code, out, _ = run(capsys, "parse-ccs", files["p.ccs"])
    assert code == 0 and out.startswith("des (0,3,3)") and "# state 0: P" in out
    code, out, _ = run(capsys, "quotient", files["ab.aut"])
    assert code == 0 and out == 'des (0,3,3)\n(0,"a",1)\n(1,"b",2)\n(1,"tau",1)\n'
    code, _, err = run(capsys, "parse-ccs", files["bad.ccs"])
    assert code == 2 and "undefined" in err


def test_dot(files, capsys):
    code, out, _ = run(capsys, "dot", files["three.pa"])
    assert code == 0 and out.startswith("digraph") and "a:1/3" in out


def test_laws(capsys):
    code, out, _ = run(capsys, "--format", "json", "laws", "--instance", "rel", "--seed", "42", "--trials", "200")
    v = json.loads(out)
    assert code == 0 and v["kind"] == "fuzz-report" and v["ok"]
    assert run(capsys, "laws", "--instance", "rel", "--trials", "0")[0] == 2


@pytest.mark.parametrize("argv", [
    [],
    ["nosuch"],
    ["weakbisim"],
    ["weakbisim", "missing.aut"],
    ["probweakbisim", "THREE", "--depth", "0"],
    ["weakbisim", "BAD"],
    ["weakbisim", "TXT"],
    ["weakbisim", "THREE"],
    ["laws", "--instance", "zzz"],
])
def test_usage_errors(files, capsys, argv):
    sub = {"THREE": files["three.pa"], "BAD": files["bad.aut"], "TXT": files["x.txt"]}
    code, out, err = run(capsys, *[sub.get(a, a) for a in argv])
    assert code == 2 and out == "" and err.startswith("weaksat: ")
    assert "Traceback" not in err


def test_format_error_is_positioned(files, capsys):
    _, _, err = run(capsys, "weakbisim", files["bad.aut"])
    assert ":1:1:" in err


def test_output_is_deterministic(files, capsys):
    for argv in (["--format", "json", "saturate", files["three.pa"], "--depth", "3"],
                 ["--format", "json", "laws", "--instance", "lts", "--seed", "3", "--trials", "30"],
                 ["weakbisim", files["ab.aut"]]):
        first = run(capsys, *argv)
        assert run(capsys, *argv) == first


def test_timing_only_on_request(files, capsys):
    _, out, _ = run(capsys, "--format", "json", "weakbisim", files["ab.aut"])
    assert "seconds" not in json.loads(out)
    _, out, _ = run(capsys, "weakbisim", files["ab.aut"], "--format", "json", "--timing")
    assert "seconds" in json.loads(out)
