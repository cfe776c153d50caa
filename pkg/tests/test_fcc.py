import random
from itertools import product

from hypothesis import given, settings, strategies as st

from finimod.engine import SAT, UNSAT, Engine
from finimod.fcc import FCCConfig, card_term
from finimod.kernel import Clause, Literal, TermBank
from finimod.oracle import oracle_fcc

from helpers import ground_literal_set


def run(bank, lits, config=None):
    """Solve unit clauses; returns (engine, verdict, recorded theory actions)."""
    eng = Engine(bank, config or FCCConfig())
    acts = []
    for name in ("weak_effort", "strong_effort", "check_cliques_weak"):
        orig = getattr(eng.fcc, name)

        def wrap(orig=orig):
            a = orig()
            if a is not None:
                acts.append(a)
            return a
        setattr(eng.fcc, name, wrap)
    for s in bank.uninterpreted_sorts():
        eng.fcc.add_ladder_sort(s)
    ok = True
    for l in lits:
        ok = eng.add_input_clause(Clause([l])) and ok
    verdict = eng.check() if ok else UNSAT
    return eng, verdict, acts


def card(bank, scope, k, pos=True):
    return Literal(pos, card_term(bank, scope, k), bank.TRUE)


def consts(bank, sort, names):
    return [bank.mk_app(bank.declare_fun(n, [], sort), []) for n in names]


def lit_of(eng, code):
    return eng.literal(code)


def test_ladder_starts_with_signature_then_sort():
    b = TermBank()
    S = b.declare_sort("S")
    a, = consts(b, S, "a")
    eng, verdict, acts = run(b, [Literal(True, a, a)])
    kinds = [(k[0], lit_of(eng, k[1][0]) if k[0] == "learn" else lit_of(eng, k[1]))
             for k in acts[:4]]
    assert kinds == [("learn", card(b, None, 1)), ("decide", card(b, None, 1)),
                     ("learn", card(b, S, 1)), ("decide", card(b, S, 1))]
    assert verdict == SAT


def test_sum_conflict_two_sorts():
    b = TermBank()
    S1, S2 = b.declare_sort("S1"), b.declare_sort("S2")
    a1, b1 = consts(b, S1, ("a1", "b1"))
    a2, b2 = consts(b, S2, ("a2", "b2"))
    eng, verdict, acts = run(b, [Literal(False, a1, b1), Literal(False, a2, b2),
                                 card(b, None, 2), card(b, S1, 1, False),
                                 card(b, S2, 1, False)])
    want = {card(b, S1, 1), card(b, S2, 1), card(b, None, 2, False)}
    confl = [{lit_of(eng, c) for c in a[1]} for a in acts if a[0] == "conflict"]
    assert confl == [want]
    assert verdict == UNSAT
    # the clause holds for every pair of positive sizes
    for n1, n2 in product(range(1, 6), repeat=2):
        assert n1 <= 1 or n2 <= 1 or n1 + n2 > 2


def test_ladder_escalates_until_sum_fits():
    b = TermBank()
    S1, S2 = b.declare_sort("S1"), b.declare_sort("S2")
    a1, b1 = consts(b, S1, ("a1", "b1"))
    a2, b2 = consts(b, S2, ("a2", "b2"))
    eng, verdict, acts = run(b, [Literal(False, a1, b1), Literal(False, a2, b2)])
    assert verdict == SAT
    assert eng.fcc.fixed_bound(S1) == 2 and eng.fcc.fixed_bound(S2) == 2
    assert card(b, None, 4) in eng.trail_literals()


def test_clique_lemma_example():
    b = TermBank()
    S = b.declare_sort("S")
    c1, c2, c3, c4, c = consts(b, S, ("c1", "c2", "c3", "c4", "c"))
    lits = [Literal(True, c1, c), Literal(True, c4, c), Literal(False, c1, c2),
            Literal(False, c2, c3), Literal(False, c3, c4), card(b, S, 2)]
    eng = Engine(b, FCCConfig(ladder=False))
    for l in lits:
        eng.add_input_clause(Clause([l]))
    assert eng._propagate() is None
    act = eng.fcc.check_cliques_weak()
    assert act[0] == "lemma"
    got = {lit_of(eng, x) for x in act[1]}
    assert got == {card(b, S, 2, False), Literal(True, c1, c2), Literal(True, c1, c3),
                   Literal(True, c2, c3)}
    # negated lemma is unsatisfiable
    assert oracle_fcc([~l for l in got], b) == "unsat"


def test_clique_conflict_variant_uses_edge_sources():
    b = TermBank()
    S = b.declare_sort("S")
    c1, c2, c3 = consts(b, S, ("c1", "c2", "c3"))
    lits = [Literal(False, c1, c2), Literal(False, c2, c3), Literal(False, c1, c3),
            card(b, S, 2)]
    eng = Engine(b, FCCConfig(ladder=False, clique_explain="conflict"))
    for l in lits:
        eng.add_input_clause(Clause([l]))
    assert eng._propagate() is None
    act = eng.fcc.check_cliques_weak()
    assert act[0] == "conflict"
    assert {lit_of(eng, x) for x in act[1]} == {~l for l in lits}


def test_no_clique_check_without_bound_or_with_few_classes():
    b = TermBank()
    S = b.declare_sort("S")
    c1, c2 = consts(b, S, ("c1", "c2"))
    eng = Engine(b, FCCConfig(ladder=False))
    eng.add_input_clause(Clause([Literal(False, c1, c2)]))
    eng._propagate()
    assert eng.fcc.check_cliques_weak() is None
    eng.add_input_clause(Clause([card(b, S, 2)]))
    eng._propagate()
    assert eng.fcc.check_cliques_weak() is None


def test_split_example():
    b = TermBank()
    S = b.declare_sort("S")
    a, b_, c = consts(b, S, "abc")
    f = b.declare_fun("f", [S], S)
    lits = [Literal(True, a, b.mk_app(f, [b_])), Literal(True, b_, b.mk_app(f, [c])),
            Literal(False, a, b_), Literal(False, b_, c), card(b, S, 2),
            card(b, S, 1, False), card(b, None, 2), card(b, None, 1, False)]
    eng, verdict, acts = run(b, lits)
    splits = [a_ for a_ in acts if a_[0] == "split"]
    assert {splits[0][1], splits[0][2]} == {a, c}
    assert verdict == SAT and eng.egraph.same(a, c)


def test_split_refuted_by_congruence_is_recovered():
    b = TermBank()
    S = b.declare_sort("S")
    c1, c2, c3, c4 = consts(b, S, ("c1", "c2", "c3", "c4"))
    f = b.declare_fun("f", [S], S)
    lits = [Literal(True, c3, b.mk_app(f, [c1])), Literal(True, c4, b.mk_app(f, [c2])),
            Literal(False, c3, c4), card(b, S, 2)]
    eng, verdict, acts = run(b, lits, FCCConfig(ladder=False))
    assert verdict == SAT
    assert not eng.egraph.same(c1, c2)
    assert eng.egraph.num_classes(S) == 2
    assert oracle_fcc(lits, b) == "sat"


def test_four_unconstrained_constants_at_two():
    b = TermBank()
    S = b.declare_sort("S")
    cs = consts(b, S, ("c1", "c2", "c3", "c4"))
    eng, verdict, acts = run(b, [card(b, S, 2)] + [Literal(True, c, c) for c in cs])
    assert verdict == SAT
    assert any(a[0] == "split" for a in acts)
    assert eng.egraph.num_classes(S) == 1


def test_contradictory_bounds_conflict():
    b = TermBank()
    S = b.declare_sort("S")
    eng, verdict, _ = run(b, [card(b, S, 2), card(b, S, 3, False)])
    assert verdict == UNSAT


# -- properties ----------------------------------------------------------------

def _fcc_valid(eng, bank, codes):
    """The clause is valid: its negation has no model with the given bounds."""
    lits = [~eng.literal(c) for c in codes]
    sig = [l for l in lits if l.rhs.decl.kind == "card" and l.rhs.decl.info[0] is None
           or l.lhs.decl.kind == "card" and l.lhs.decl.info[0] is None]
    if not sig:
        return oracle_fcc(lits, bank) == "unsat"
    # a sum clause mentions only cardinality atoms: check all size vectors
    sorts = bank.uninterpreted_sorts()
    atoms = [(l.rhs if l.rhs.decl.kind == "card" else l.lhs).decl.info + (l.pos,) for l in lits]
    for sizes in product(range(1, 7), repeat=len(sorts)):
        n = dict(zip(sorts, sizes))
        total = sum(sizes)
        if all(((total if s is None else n[s]) <= k) == pos for s, k, pos in atoms):
            return False
    return True


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans(), st.sampled_from(["lemma", "conflict"]))
def test_emitted_clauses_are_valid(seed, regions, mode):
    rng = random.Random(seed)
    b, lits, terms = ground_literal_set(rng, max_terms=7)
    eng, verdict, acts = run(b, lits, FCCConfig(use_regions=regions, clique_explain=mode))
    for a in acts:
        if a[0] in ("conflict", "lemma"):
            assert _fcc_valid(eng, b, a[1]), [eng.literal(c) for c in a[1]]


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ladder_shape_minimality_and_atom_space(seed):
    rng = random.Random(seed)
    b, lits, terms = ground_literal_set(rng, max_terms=7)
    eng, verdict, acts = run(b, lits)
    input_terms = {b.TRUE, b.FALSE}
    for l in lits:
        for t in (l.lhs, l.rhs):
            input_terms.update(t.subterms())
    limit = {s: len([t for t in input_terms if t.sort is s]) for s in terms}
    for t in input_terms:
        if t.decl is not None and t.decl.kind == "card":
            scope, k = t.decl.info
            limit[scope] = max(limit[scope], k)
    limit = {s: k + 1 for s, k in limit.items()}
    limit[None] = sum(limit.values())
    for v, (lhs, rhs) in enumerate(eng.atoms):
        if v in eng.fcc.card_info:
            scope, k = eng.fcc.card_info[v]
            assert k <= limit[scope]
        else:
            assert lhs in input_terms and rhs in input_terms
    if verdict != SAT:
        return
    decisions = [eng.literal(c) for c in eng.decision_codes()]
    is_card = [l.rhs.decl.kind == "card" or l.lhs.decl.kind == "card" for l in decisions]
    pos_card = [c and l.pos for c, l in zip(is_card, decisions)]
    if True in pos_card:
        last = max(i for i, p in enumerate(pos_card) if p)
        assert all(is_card[:last + 1])
    trail = set(eng.trail_literals())
    for S in eng.fcc.ladder_sorts:
        k = eng.fcc.fixed_bound(S)
        assert k is not None and eng.egraph.num_classes(S) <= k
        for j in range(1, k):
            assert card(b, S, j, False) in trail


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_asserted_bounds_enforced_without_ladder(seed, regions):
    b, lits, _ = ground_literal_set(random.Random(seed))
    eng, verdict, _ = run(b, lits, FCCConfig(ladder=False, use_regions=regions))
    assert verdict == ("sat" if oracle_fcc(lits, b) == "sat" else "unsat")
    if verdict == SAT:
        for S in b.uninterpreted_sorts():
            k = eng.fcc.bound.get(S.id)
            if k is not None:
                assert eng.egraph.num_classes(S) <= k
