import random

import pytest
from hypothesis import given, settings, strategies as st

from finimod.euf import EGraph
from finimod.kernel import TermBank
from finimod.model import DefiningMap, Y, build_model, validate_defining_map

from helpers import defining_map_example, ground_literal_set


@pytest.fixture
def example():
    return defining_map_example()


def test_example_defining_map(example):
    b, S, c, e, fd, f, g, m = example
    d = m.maps[fd]
    expected = {
        (c[2], e): c[1], (c[4], c[6]): c[3], (c[2], c[2]): c[6], (e, e): c[4],
        (c[2], Y): c[1], (Y, c[4]): c[3], (Y, Y): c[4], (c[2], c[4]): c[1],
    }
    for p, v in expected.items():
        assert d.index.get(p) is v, p
    assert m.domain(S) == [c[1], c[2], c[3], c[4], c[6], e]
    assert validate_defining_map(d, m.domains) == []


def test_example_evaluations(example):
    b, S, c, e, fd, f, g, m = example
    assert m.eval_ground(f(c[2], c[3])) is c[1]
    assert m.maps[fd].msg((c[2], c[3])) == (c[2], Y)
    assert m.eval_ground(f(c[6], c[4])) is c[3]
    assert m.eval_ground(f(c[3], c[3])) is c[4]
    assert m.eval_ground(c[5]) is c[2]
    assert m.eval_ground(c[6]) is c[6]


def test_unused_function_gets_single_default_entry():
    b = TermBank()
    S = b.declare_sort("S")
    a = b.mk_app(b.declare_fun("a", [], S), [])
    h = b.declare_fun("h", [S, S], S)
    g = EGraph(b)
    g.register(a)
    m = build_model(g)
    assert m.maps[h].entries == [((Y, Y), a)]
    assert m.maps[a.decl].entries == [((), a)]


def test_validation_examples():
    b = TermBank()
    S = b.declare_sort("S")
    c1, c2 = (b.mk_app(b.declare_fun(n, [], S), []) for n in ("c1", "c2"))
    f = b.declare_fun("f", [S, S], S)
    d = DefiningMap(f, [((c1, Y), c2), ((Y, c2), c1)])
    v = validate_defining_map(d)
    assert any("missing instance" in x for x in v)
    assert any("no all-variable" in x for x in validate_defining_map(DefiningMap(f)))
    d.add((c1, c2), c2)
    d.add((Y, Y), c1)
    assert validate_defining_map(d, {S: [c1, c2]}) == []


def test_format_lines(example):
    b, S, c, e, fd, f, g, m = example
    text = m.format().splitlines()
    assert text[0] == "sort S : card 6 : {c1, c2, c3, c4, c6, e}"
    assert "f(c2,_) = c1" in text and "f(_,_) = c4" in text
    assert "c5 = c2" in text


# -- properties ----------------------------------------------------------------

def _consistent_graph(rng):
    b, ls, terms = ground_literal_set(rng, max_terms=7, with_cards=False)
    g = EGraph(b)
    kept = []
    for l in ls:
        m = g.mark()
        if g.assert_lit(l) is None:
            kept.append(l)
        else:
            g.undo_to(m)
    for ts in terms.values():
        for t in ts:
            g.register(t)
    return b, g, kept


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_model_satisfies_asserted_literals(seed):
    rng = random.Random(seed)
    b, g, kept = _consistent_graph(rng)
    m = build_model(g)
    for l in kept:
        assert m.holds(l), l
    for i, t in enumerate(g.nodes):
        if not t.sort.is_bool:
            assert m.eval_ground(t) is g.rep(t)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_flat_term_has_one_msg(seed):
    rng = random.Random(seed)
    b, g, _ = _consistent_graph(rng)
    m = build_model(g)
    for f, d in m.maps.items():
        assert validate_defining_map(d, m.domains) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_model_construction_is_deterministic(seed):
    rng = random.Random(seed)
    b, g, _ = _consistent_graph(rng)
    m1, m2 = build_model(g), build_model(g)
    assert m1.format() == m2.format()
    assert all(m1.maps[f].entries == m2.maps[f].entries for f in m1.maps)
