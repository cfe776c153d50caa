import random

import pytest
from hypothesis import given, settings, strategies as st

from finimod.formula import (And, Eq, Exists, Forall, Iff, Implies, Not, Or, atom,
                             free_vars)
from finimod.kernel import Literal, TermBank
from finimod.purifier import PurifyError, Purifier, purify

from helpers import formula_sat_at, purified_sat_at


def _key(c):
    return frozenset(c)


@pytest.fixture
def pq():
    b = TermBank()
    S = b.declare_sort("S")
    for n in "abc":
        b.declare_fun(n, [], S)
    b.declare_fun("P", [S, S], b.BOOL)
    b.declare_fun("Q", [S, S], b.BOOL)
    return b, S


def test_negative_occurrence_is_skolemized(pq):
    b, S = pq
    x = b.mk_var("x", S)
    B, C = b.const("b"), b.const("c")
    P = lambda s, t: b.app("P", s, t)
    Q = b.app("Q", B, C)
    body = atom(b, P(B, x))
    psi = And((Not(atom(b, P(B, C))), Iff(atom(b, Q), Forall((x,), body))))
    p = purify(b, psi)
    assert len(p.quant_records) == 1 and len(p.skolems) == 1
    q = p.quant_records[0]
    assert q.vars == (x,) and q.body == body
    k = b.mk_app(p.skolems[0], [])
    a = q.proxy_literal()
    expected = {
        _key([b.atom(P(B, C), False)]),
        _key([b.atom(P(B, k), False), b.atom(Q)]),
        _key([a, b.atom(Q, False)]),
    }
    assert {_key(c) for c in p.clauses} == expected


def test_ground_input_has_no_records(pq):
    b, S = pq
    a, c = b.const("a"), b.const("c")
    p = purify(b, Or((Eq(a, c), And((Not(Eq(a, c)), atom(b, b.app("P", a, c)))))))
    assert not p.quant_records and not p.skolems
    # the tautology a≈c ∨ a≉c is dropped
    assert {_key(c_) for c_ in p.clauses} == {
        _key([Literal(True, a, c), b.atom(b.app("P", a, c))])}


def test_positive_universal_becomes_unit_proxy():
    b = TermBank()
    S = b.declare_sort("S")
    f = b.declare_fun("f", [S], S)
    x = b.mk_var("x", S)
    psi = Forall((x,), Eq(b.mk_app(f, [x]), x))
    p = purify(b, psi)
    q, = p.quant_records
    assert [list(c) for c in p.clauses] == [[q.proxy_literal()]]
    for k in (1, 2):
        assert formula_sat_at(b, psi, k) == purified_sat_at(p, k)


def test_instantiate_examples(pq):
    b, S = pq
    x = b.mk_var("x", S)
    B, C = b.const("b"), b.const("c")
    pur = Purifier(b)
    p = pur.purify(Forall((x,), atom(b, b.app("P", B, x))))
    q, = p.quant_records
    out = pur.instantiate(q, {x: C})
    assert [_key(c) for c in out] == [_key([q.proxy_literal(False), b.atom(b.app("P", B, C))])]
    # repeated instance adds nothing
    assert pur.instantiate(q, {x: C}) == []
    with pytest.raises(PurifyError):
        pur.instantiate(q, {})


def test_instantiate_two_variable_body():
    b = TermBank()
    S = b.declare_sort("S")
    A, B = (b.mk_app(b.declare_fun(n, [], S), []) for n in "ab")
    f = b.declare_fun("f", [S], S)
    g = b.declare_fun("g", [S, S], S)
    h = b.declare_fun("h", [S, S], S)
    x1, x2 = b.mk_var("x1", S), b.mk_var("x2", S)
    body = Or((Eq(b.mk_app(f, [x1]), b.mk_app(g, [x2, B])),
               Not(Eq(b.mk_app(h, [x2, x1]), B))))
    pur = Purifier(b)
    q, = pur.purify(Forall((x1, x2), body)).quant_records
    out = pur.instantiate(q, {x1: B, x2: A})
    assert [_key(c) for c in out] == [_key([
        q.proxy_literal(False),
        Literal(True, b.mk_app(f, [B]), b.mk_app(g, [A, B])),
        Literal(False, b.mk_app(h, [A, B]), B)])]
    with pytest.raises(PurifyError):
        pur.instantiate(q, {x1: B})


def test_boolean_quantified_variable_rejected():
    b = TermBank()
    x = b.mk_var("p", b.BOOL)
    with pytest.raises(PurifyError):
        purify(b, Forall((x,), Eq(x, b.TRUE)))


def test_nested_universals_share_one_record():
    b = TermBank()
    S = b.declare_sort("S")
    f = b.declare_fun("f", [S, S], S)
    x, y = b.mk_var("x", S), b.mk_var("y", S)
    p = purify(b, Forall((x,), Forall((y,), Eq(b.mk_app(f, [x, y]), x))))
    q, = p.quant_records
    assert q.vars == (x, y)


def test_existential_under_universal_is_purified_lazily():
    b = TermBank()
    S = b.declare_sort("S")
    f = b.declare_fun("f", [S], S)
    c = b.mk_app(b.declare_fun("c", [], S), [])
    x, y = b.mk_var("x", S), b.mk_var("y", S)
    pur = Purifier(b)
    p = pur.purify(Forall((x,), Exists((y,), Eq(b.mk_app(f, [y]), x))))
    q, = p.quant_records
    pur.instantiate(q, {x: c})
    assert len(p.skolems) == 1
    assert all(l.lhs.ground and l.rhs.ground for cl in p.clauses for l in cl)


def test_large_disjunction_uses_definitions():
    b = TermBank()
    S = b.declare_sort("S")
    cs = [b.mk_app(b.declare_fun("c%d" % i, [], S), []) for i in range(12)]
    conj = [And((Eq(cs[i], cs[i + 1]), Eq(cs[i + 1], cs[i + 2]))) for i in range(0, 12, 3)]
    p = Purifier(b, distribute_limit=4).purify(Or(tuple(conj)))
    assert len(p.clauses) < 2 ** len(conj)
    for k in (1, 2):
        assert formula_sat_at(b, Or(tuple(conj)), k) == purified_sat_at(p, k)


# -- properties ----------------------------------------------------------------

def _random_psi(rng):
    b = TermBank()
    S = b.declare_sort("S")
    consts = [b.mk_app(b.declare_fun(n, [], S), []) for n in "abc"[:rng.randint(1, 3)]]
    funcs = [b.declare_fun(n, [S], S) for n in "fg"[:rng.randint(1, 2)]]
    P = b.declare_fun("P", [S], b.BOOL)
    x = b.mk_var("x", S)

    def term(leaves, d):
        if d == 0 or rng.random() < 0.4:
            return rng.choice(leaves)
        return b.mk_app(rng.choice(funcs), [term(leaves, d - 1)])

    def lit(leaves):
        if rng.random() < 0.25:
            e = atom(b, b.mk_app(P, [term(leaves, 1)]))
        else:
            e = Eq(term(leaves, 2), term(leaves, 2))
        return Not(e) if rng.random() < 0.4 else e

    def ground(d):
        if d == 0 or rng.random() < 0.4:
            return lit(consts)
        op = rng.choice((And, Or, Implies, Iff, Not))
        if op is Not:
            return Not(ground(d - 1))
        if op in (And, Or):
            return op((ground(d - 1), ground(d - 1)))
        return op(ground(d - 1), ground(d - 1))

    leaves = consts + [x]
    qbody = Or((lit(leaves), lit(leaves))) if rng.random() < 0.6 else lit(leaves)
    quant = (Forall if rng.random() < 0.6 else Exists)((x,), qbody)
    if rng.random() < 0.5:
        quant = Not(quant)
    op = rng.choice((And, Or, Implies, Iff))
    side = ground(2)
    psi = op((side, quant)) if op in (And, Or) else op(side, quant) if rng.random() < 0.5 \
        else op(quant, side)
    return b, psi


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_equisatisfiable_at_small_cardinalities(seed):
    rng = random.Random(seed)
    b, psi = _random_psi(rng)
    assert not free_vars(psi)
    p = purify(b, psi)
    for k in (1, 2, 3):
        assert formula_sat_at(b, psi, k) == purified_sat_at(p, k), k


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_clauses_ground_and_proxies_positive(seed):
    rng = random.Random(seed)
    b, psi = _random_psi(rng)
    pur = Purifier(b)
    p = pur.purify(psi)
    proxies = {q.proxy for q in p.quant_records}
    for c in p.clauses:
        for l in c:
            assert l.lhs.ground and l.rhs.ground
            for t in (l.lhs, l.rhs):
                if t.decl in proxies:
                    assert l.pos and (l.lhs is b.TRUE or l.rhs is b.TRUE)
    n = len(p.clauses)
    for q in list(p.quant_records):
        pur.instantiate(q, {x: b.const("a") for x in q.vars})
    for c in p.clauses[n:]:
        assert all(l.lhs.ground and l.rhs.ground for l in c)
