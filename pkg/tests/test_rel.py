import random

import pytest
from hypothesis import given, settings

from strategies import relations
from weaksat.kernel import saturate_by_powers
from weaksat.rel import Relation, RelInstance, rel_compose, rel_rtc, rel_rtc_warshall, scc


def rel(n, *pairs):
    return Relation.from_pairs(n, pairs)


def test_compose_examples():
    assert rel_compose(rel(4, (2, 3)), rel(4, (1, 2))) == rel(4, (1, 3))
    f = rel(5, (1, 2), (1, 3))
    assert rel_compose(rel(5, (2, 4), (3, 4)), f) == rel(5, (1, 4))
    assert rel_compose(Relation.identity(5), f) == f
    assert rel_compose(f, Relation.identity(5)) == f


def test_compose_carrier_mismatch():
    with pytest.raises(ValueError):
        rel_compose(Relation.identity(3), Relation.identity(2))


def test_rtc_examples():
    assert rel_rtc(Relation.empty(2)) == Relation.identity(2)
    chain = rel_rtc(rel(4, (1, 2), (2, 3)))
    assert chain == Relation.identity(4) | rel(4, (1, 2), (2, 3), (1, 3))
    cycle = rel(5, (1, 2), (2, 3), (3, 4), (4, 1))
    assert rel_rtc(cycle).pairs >= {(x, y) for x in range(1, 5) for y in range(1, 5)}
    assert rel_rtc(Relation.full(2)) == Relation.full(2)


def test_pair_outside_carrier():
    with pytest.raises(ValueError):
        rel(2, (0, 2))


def test_scc_order_is_reverse_topological():
    # 0 -> 1 <-> 2 -> 3
    comps, comp_of = scc(rel(4, (0, 1), (1, 2), (2, 1), (2, 3)).rows)
    assert sorted(map(sorted, comps)) == [[0], [1, 2], [3]]
    assert comp_of[3] < comp_of[1] < comp_of[0]


@given(relations())
def test_rtc_matches_warshall_and_powers(r):
    expected = rel_rtc_warshall(r)
    assert rel_rtc(r) == expected
    rep = saturate_by_powers(RelInstance(), r)
    assert rep.converged and rep.result == expected


@given(relations(), relations(), relations())
@settings(max_examples=50)
def test_kleene_laws(f, g, h):
    n = f.n_src
    g = Relation(n, n, tuple(r & ((1 << n) - 1) for r in (g.rows + (0,) * n)[:n]))
    h = Relation(n, n, tuple(r & ((1 << n) - 1) for r in (h.rows + (0,) * n)[:n]))
    assert rel_compose(h, f | g) == rel_compose(h, f) | rel_compose(h, g)
    assert rel_compose(f | g, h) == rel_compose(f, h) | rel_compose(g, h)
    zero = Relation.empty(n)
    assert rel_compose(f, zero) == zero == rel_compose(zero, f)


@given(relations())
def test_rtc_is_closure(r):
    s = rel_rtc(r)
    assert Relation.identity(r.n_src) <= s
    assert r <= s
    assert rel_compose(s, s) == s
    assert rel_rtc(s) == s


def test_inverse_and_symmetry():
    r = rel(3, (0, 1), (1, 2))
    assert r.inverse() == rel(3, (1, 0), (2, 1))
    assert not r.is_symmetric()
    assert (r | r.inverse()).is_symmetric()


def test_large_rtc_quick():
    rng = random.Random(0)
    n = 600
    r = Relation.from_pairs(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(3000)])
    assert rel_rtc(r) == rel_rtc_warshall(r)
