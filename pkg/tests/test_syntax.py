from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import ltss, nfas, segalas
from weaksat.lts import TAU, Lts, disjoint_union, largest_weak_bisim
from weaksat.nfa import Nfa
from weaksat.segala import Distribution as D
from weaksat.syntax import (
    CcsError,
    FormatError,
    Nil,
    Par,
    Prefix,
    Restrict,
    StateLimitExceeded,
    Sum,
    Var,
    ccs_to_lts,
    format_program,
    format_term,
    parse_ccs,
    read_aut,
    read_nfa,
    read_pa,
    write_aut,
    write_dot,
    write_nfa,
    write_pa,
)


# ---------------------------------------------------------------- parsing

def test_parse_example():
    p = parse_ccs("P = a.0 + tau.b.0;")
    assert p.root == "P"
    assert p.env["P"] == Sum(Prefix("a", Nil()), Prefix(TAU, Prefix("b", Nil())))


def test_precedence_and_associativity():
    t = parse_ccs("P = a.0 | b.0 + c.0 \\ {c} | 'd.0;").env["P"]
    assert t == Sum(Par(Prefix("a", Nil()), Prefix("b", Nil())),
                    Par(Restrict(Prefix("c", Nil()), frozenset({"c"})), Prefix("'d", Nil())))
    assert parse_ccs("P = a.0 + b.0 + c.0;").env["P"] == \
        Sum(Sum(Prefix("a", Nil()), Prefix("b", Nil())), Prefix("c", Nil()))


@pytest.mark.parametrize("text, fragment", [
    ("P = Q;", "undefined"),
    ("P = P + a.0;", "unguarded"),
    ("P = Q; Q = P;", "unguarded"),
    ("P = a.0", "expected"),
    ("P = a.;", "unexpected"),
    ("", "empty"),
    ("P = a.0; P = b.0;", "duplicate"),
    ("P = a.0 \\ {tau};", "tau"),
    ("P = a.0 $ b.0;", "unexpected character"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(CcsError) as e:
        parse_ccs(text)
    assert fragment in str(e.value)


def test_error_position():
    with pytest.raises(CcsError) as e:
        parse_ccs("P = a.0;\nQ = b.$;")
    assert (e.value.line, e.value.col) == (2, 7)


def test_guarded_recursion_accepted():
    p = parse_ccs("P = a.P + Q; Q = b.P;")
    assert set(p.env) == {"P", "Q"}


names = st.sampled_from(["a", "b", "c"])
labels = st.one_of(names, names.map(lambda s: "'" + s), st.just(TAU))
terms = st.recursive(
    st.one_of(st.just(Nil()), st.just(Var("P"))),
    lambda sub: st.one_of(
        st.builds(Prefix, labels, sub),
        st.builds(Sum, sub, sub),
        st.builds(Par, sub, sub),
        st.builds(Restrict, sub, st.frozensets(names, min_size=1)),
    ),
    max_leaves=8,
)


@given(terms)
@settings(max_examples=200)
def test_parse_print_roundtrip(t):
    text = f"P = a.0 + {format_term(t, 2)};"
    try:
        prog = parse_ccs(text)
    except CcsError as e:
        assert "unguarded" in str(e)
        return
    assert prog.env["P"] == Sum(Prefix("a", Nil()), t)
    assert format_program(prog) == text + "\n" or parse_ccs(format_program(prog)) == prog
    again = format_program(prog)
    assert format_program(parse_ccs(again)) == again


# ---------------------------------------------------------------- semantics

def test_ccs_to_lts_example():
    lts = ccs_to_lts(parse_ccs("P = a.0 + tau.b.0;"))
    assert lts.n == 3
    named = {(lts.name(x), lab, lts.name(y)) for x, lab, y in lts.triples}
    assert named == {("P", "a", "0"), ("P", TAU, "b.0"), ("b.0", "b", "0")}


def test_synchronisation_under_restriction():
    lts = ccs_to_lts(parse_ccs("P = (a.0 | 'a.0) \\ {a};"))
    assert list(lts.triples) == [(0, TAU, 1)]
    assert lts.name(1) == "(0 | 0) \\ {a}"


def test_unrestricted_parallel_interleaves():
    lts = ccs_to_lts(parse_ccs("P = a.0 | 'a.0;"))
    assert sorted(lab for _, lab, _ in lts.triples).count(TAU) == 1
    assert lts.n == 4


def test_chains_are_weakly_bisimilar():
    a = ccs_to_lts(parse_ccs("P = a.tau.b.0;"))
    b = ccs_to_lts(parse_ccs("Q = a.b.0;"))
    assert (a.n, b.n) == (4, 3)
    assert largest_weak_bisim(disjoint_union(a, b)).same(0, a.n)


def test_recursion_and_state_limit():
    lts = ccs_to_lts(parse_ccs("P = a.P;"))
    assert list(lts.triples) == [(0, "a", 0)]
    with pytest.raises(StateLimitExceeded):
        ccs_to_lts(parse_ccs("P = a.(P | P);"), state_limit=5)
    with pytest.raises(ValueError):
        ccs_to_lts(parse_ccs("P = 0;"), state_limit=0)


def test_determinism():
    text = "P = (a.Q | 'a.R) \\ {a}; Q = b.Q + tau.0; R = c.R + 'b.0;"
    one, two = ccs_to_lts(parse_ccs(text), 500), ccs_to_lts(parse_ccs(text), 500)
    assert one == two and one.names == two.names


def test_sum_is_deduplicated_canonically():
    # both a-successors are the same state: P, b.0 + c.0 and 0
    lts = ccs_to_lts(parse_ccs("P = a.(b.0 + c.0) + a.(c.0 + b.0);"))
    assert lts.n == 3 and len(lts.triples) == 3


# ---------------------------------------------------------------- .aut and .nfa

def test_aut_worked_example():
    lts = Lts.from_triples(3, [(0, TAU, 1), (1, "s", 1), (2, "s", 0)])
    assert write_aut(lts) == 'des (0,3,3)\n(0,"tau",1)\n(1,"s",1)\n(2,"s",0)\n'


def test_aut_single_state():
    assert write_aut(Lts.from_triples(1, [])) == "des (0,0,1)\n"
    assert read_aut("des (0,0,1)\n").n == 1


@given(ltss())
@settings(max_examples=100)
def test_aut_roundtrip(lts):
    back = read_aut(write_aut(lts))
    assert back.triples == lts.triples and back.n == lts.n
    assert write_aut(back) == write_aut(lts)


def test_aut_names_roundtrip():
    lts = ccs_to_lts(parse_ccs("P = a.tau.b.0;"))
    back = read_aut(write_aut(lts, names=True))
    assert back.names == lts.names


@pytest.mark.parametrize("text, line", [
    ("des (0,1,1\n", 1),
    ('des (0,1,1)\n(0,"a",5)\n', 2),
    ('des (0,2,1)\n(0,"a",0)\n', 1),
    ('des (0,1,1)\n(0,a,0)\n', 2),
    ('des (3,0,1)\n', 1),
    ('', 1),
])
def test_aut_errors(text, line):
    with pytest.raises(FormatError) as e:
        read_aut(text)
    assert e.value.line == line


def test_nfa_format():
    nfa = Nfa.from_triples(2, [(0, "a", 1)], accepting=[1])
    text = write_nfa(nfa)
    assert text.endswith("accepting: 1;\n")
    assert read_nfa(text) == nfa
    with pytest.raises(FormatError):
        read_nfa('des (0,0,1)\n')
    with pytest.raises(FormatError):
        read_nfa('des (0,0,1)\naccepting: 4;\n')


@given(nfas())
@settings(max_examples=60)
def test_nfa_roundtrip(nfa):
    back = read_nfa(write_nfa(nfa))
    assert back.trans.triples == nfa.trans.triples and back.accepting == nfa.accepting


# ---------------------------------------------------------------- .pa

THREE_PA = "states: x1 x2 x3;\nx1 -a-> 1/3 x2, 2/3 x3;\nx1 -b-> 1 x3;\nx2 -a-> 1 x1;\n"


def test_pa_example():
    s = read_pa(THREE_PA)
    assert s.n == 3
    assert s.steps[0] == (("a", D.of({1: F(1, 3), 2: F(2, 3)})), ("b", D.dirac(2)))
    assert write_pa(s) == THREE_PA


def test_pa_tau_and_comments():
    s = read_pa("# header\nstates: x y z;\nx -tau-> 1/2 y, 1/2 z;  # split\n")
    assert s.steps[0] == ((TAU, D.of({1: F(1, 2), 2: F(1, 2)})),)


@pytest.mark.parametrize("text, fragment", [
    ("states: x y;\nx -a-> 1/2 y;\n", "sum to 1/2"),
    ("states: x y;\nx -a-> 1 q;\n", "unknown state"),
    ("states: x y;\nq -a-> 1 y;\n", "unknown state"),
    ("states: x y;\nx -a-> 1.5 y;\n", "malformed rational"),
    ("states: x y;\nx -a-> 1/0 y;\n", "malformed rational"),
    ("x -a-> 1 y;\n", "states"),
    ("", "states"),
    ("states: x x;\n", "duplicate"),
    ("states: x y;\nx a 1 y;\n", "malformed transition"),
])
def test_pa_errors(text, fragment):
    with pytest.raises(FormatError) as e:
        read_pa(text)
    assert fragment in str(e.value)


@given(segalas())
@settings(max_examples=60)
def test_pa_roundtrip(s):
    back = read_pa(write_pa(s))
    assert back.steps == s.steps and back.n == s.n


# ---------------------------------------------------------------- DOT

def test_dot_tau_loop():
    dot = write_dot(Lts.from_triples(1, [(0, TAU, 0)]))
    assert dot.count("->") == 1 and 'label="τ"' in dot


def test_dot_accepting():
    dot = write_dot(Nfa.from_triples(2, [(0, "a", 1)], accepting=[1]))
    assert dot.count("doublecircle") == 1


def test_dot_segala_fan():
    dot = write_dot(read_pa(THREE_PA))
    assert 'label="a:1/3"' in dot and 'label="a:2/3"' in dot
    assert dot.count("shape=point") == 3
    with pytest.raises(TypeError):
        write_dot(42)
