"""Random problem generators shared by the test modules."""

import random
from itertools import product

from finimod.euf import EGraph
from finimod.fcc import card_term
from finimod.formula import And, Eq, Forall, Not, Or, atom
from finimod.kernel import Literal, TermBank
from finimod.model import CandidateModel, DefiningMap, Y, build_model
from finimod.purifier import QuantRecord


def ground_literal_set(rng: random.Random, max_terms=6, with_cards=True):
    """Random ground literals over 1-2 sorts and at most ``max_terms`` terms.
    Returns (bank, literals, terms_by_sort)."""
    b = TermBank()
    nsorts = rng.choice((1, 2))
    sorts = [b.declare_sort(n) for n in "ST"[:nsorts]]
    fs = {s: b.declare_fun("f" + s.name, [s], s) for s in sorts}
    P = b.declare_fun("P", [sorts[0]], b.BOOL)
    g = b.declare_fun("g", [sorts[0]], sorts[-1]) if nsorts == 2 else None
    terms = {s: [] for s in sorts}
    budget = rng.randint(2, max_terms)
    ncon = {s: 0 for s in sorts}
    total = 0
    while total < budget:
        s = rng.choice(sorts)
        pool = terms[s]
        kind = rng.random()
        if pool and kind < 0.3:
            t = b.mk_app(fs[s], [rng.choice(pool)])
        elif g is not None and terms[sorts[0]] and kind < 0.4 and s is sorts[-1]:
            t = b.mk_app(g, [rng.choice(terms[sorts[0]])])
        else:
            name = "%s%d" % (s.name.lower(), ncon[s])
            ncon[s] += 1
            t = b.mk_app(b.declare_fun(name, [], s), [])
        if t not in pool:
            pool.append(t)
            total += 1
    lits = []
    for _ in range(rng.randint(1, 7)):
        s = rng.choice(sorts)
        pool = terms[s]
        r = rng.random()
        if r < 0.15 and terms[sorts[0]]:
            t = b.mk_app(P, [rng.choice(terms[sorts[0]])])
            lits.append(Literal(rng.random() < 0.5, t, b.TRUE))
        elif len(pool) >= 2:
            u, v = rng.sample(pool, 2)
            lits.append(Literal(rng.random() < 0.4, u, v))
    if with_cards:
        for _ in range(rng.randint(0, 2)):
            s = rng.choice(sorts)
            k = rng.randint(1, 3)
            lits.append(Literal(rng.random() < 0.7, card_term(b, s, k), b.TRUE))
    return b, lits, terms


def oracle_bound(bank, lits, terms):
    total = 0
    for s, ts in terms.items():
        need = max(1, len(ts))
        for l in lits:
            d = l.lhs.decl if l.lhs.decl.kind == "card" else l.rhs.decl
            if d.kind == "card" and d.info[0] is s and not l.pos:
                need = max(need, d.info[1] + 1)
        total += need
    return total


def random_model(rng: random.Random, nfuncs=2, max_dom=4, max_arity=2):
    """Random candidate model over one sort given by random defining maps."""
    b = TermBank()
    S = b.declare_sort("S")
    n = rng.randint(1, max_dom)
    dom = [b.mk_app(b.declare_fun("v%d" % i, [], S), []) for i in range(n)]
    maps = {}
    funcs = []
    for j in range(nfuncs):
        ar = rng.randint(1, max_arity)
        f = b.declare_fun("f%d" % j, [S] * ar, S)
        funcs.append(f)
        d = DefiningMap(f)
        for _ in range(rng.randint(0, 4)):
            pat = tuple(rng.choice(dom) if rng.random() < 0.6 else Y for _ in range(ar))
            d.add(pat, rng.choice(dom))
        d.close()
        if (Y,) * ar not in d.index:
            d.add((Y,) * ar, rng.choice(dom))
        maps[f] = d
    for v in dom:
        maps[v.decl] = DefiningMap(v.decl, [((), v)])
    m = CandidateModel(b, {b.BOOL: [b.FALSE, b.TRUE], S: dom}, maps, {S: dom[0]})
    return b, S, m, funcs


def random_term(rng, b, funcs, leaves, depth=2):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(leaves)
    f = rng.choice(funcs)
    return b.mk_app(f, [random_term(rng, b, funcs, leaves, depth - 1) for _ in range(f.arity)])


def random_body(rng, b, funcs, leaves, depth=2):
    if depth == 0 or rng.random() < 0.35:
        e = Eq(random_term(rng, b, funcs, leaves), random_term(rng, b, funcs, leaves))
        return Not(e) if rng.random() < 0.4 else e
    args = tuple(random_body(rng, b, funcs, leaves, depth - 1) for _ in range(rng.randint(2, 3)))
    return Or(args) if rng.random() < 0.6 else And(args)


def all_tuples(m, xs):
    return [dict(zip(xs, vals)) for vals in product(*(m.domain(x.sort) for x in xs))]


def quantified_problem(rng: random.Random, nconst=None, nvars=None):
    """Random formula: ground literals plus one or two universally
    quantified bodies over one sort.  Returns (bank, formula)."""
    b = TermBank()
    S = b.declare_sort("S")
    consts = [b.mk_app(b.declare_fun(n, [], S), []) for n in "abc"[:nconst or rng.randint(1, 3)]]
    funcs = [b.declare_fun("f", [S], S)]
    if rng.random() < 0.5:
        funcs.append(b.declare_fun("g", [S, S], S))
    P = b.declare_fun("P", [S], b.BOOL)
    parts = []
    for _ in range(rng.randint(0, 2)):
        u, v = rng.choice(consts), rng.choice(consts)
        if u is not v:
            e = Eq(u, v)
            parts.append(Not(e) if rng.random() < 0.6 else e)
    for _ in range(rng.randint(1, 2)):
        xs = tuple(b.mk_var("x%d" % i, S) for i in range(nvars or rng.randint(1, 2)))
        leaves = list(xs) + consts
        body = random_body(rng, b, funcs, leaves, depth=2)
        if rng.random() < 0.3:
            t = random_term(rng, b, funcs, leaves, 1)
            body = Or((body, atom(b, b.mk_app(P, [t]))))
        parts.append(Forall(xs, body))
    return b, And(tuple(parts)) if len(parts) > 1 else parts[0]


def _lazy_search(m, check, budget):
    from finimod.oracle import OracleLimit, _Need
    budget[0] -= 1
    if budget[0] < 0:
        raise OracleLimit("budget")
    try:
        return check(m)
    except _Need as e:
        table = m.tables[e.decl]
        for v in range(m.size(e.decl.ret_sort)):
            table[e.idx] = v
            if _lazy_search(m, check, budget):
                return True
        del table[e.idx]
        return False


def formula_sat_at(bank, f, k, limit=500_000):
    """Does ``f`` (closed) have a model with every uninterpreted sort of size k?"""
    from finimod.oracle import _Interp
    m = _Interp(bank, {s.id: k for s in bank.uninterpreted_sorts()}, {})
    return _lazy_search(m, lambda m: m.formula(f, {}), [limit])


def purified_sat_at(problem, k, limit=500_000):
    """Same question for the clauses plus the proxy definitions."""
    from finimod.oracle import _Interp
    bank = problem.bank
    proxies = {q.proxy: q for q in problem.quant_records}
    m = _Interp(bank, {s.id: k for s in bank.uninterpreted_sorts()}, proxies)

    def check(m):
        for c in problem.clauses:
            if not any(m.lit(l) for l in c):
                return False
        return True
    return _lazy_search(m, check, [limit])


def region_condition_holds(g):
    """Independent check of the region condition over raw adjacency."""
    K = g.K
    if K is None:
        return True
    for r, mem in g.members.items():
        ext = [sum(1 for w in g.adj[v] if w not in mem) for v in mem]
        for i in range(1, K):
            if sum(1 for e in ext if e >= i) >= K - i:
                return False
    return True


def cliques(adj, size):
    """All cliques of exactly ``size`` vertices, grown in increasing
    vertex order from common neighbourhoods."""
    out = []

    def grow(clique, cands):
        if len(clique) == size:
            out.append(tuple(clique))
            return
        for i, v in enumerate(cands):
            grow(clique + [v], [w for w in cands[i + 1:] if w in adj[v]])
    grow([], sorted(adj))
    return out


def region_fuzz(rng: random.Random, steps=30, use_regions=True, max_vertices=15):
    """Drive a RegionGraph through random events, checking invariants after
    each and exact undo at random marks.  Returns the number of events."""
    from finimod.journal import Journal
    from finimod.regions import RegionGraph
    J = Journal()
    g = RegionGraph(J, use_regions)
    nxt = 0
    marks = []
    for _ in range(steps):
        r = rng.random()
        vs = sorted(g.adj)
        if (r < 0.25 or len(vs) < 2) and len(vs) < max_vertices:
            g.add_vertex(nxt)
            nxt += 1
        elif r < 0.6 and len(vs) >= 2:
            u, v = rng.sample(vs, 2)
            g.add_edge(u, v)
        elif r < 0.72 and len(vs) >= 2:
            u, v = rng.sample(vs, 2)
            g.merge(u, v)
        elif r < 0.8:
            g.rebuild(rng.randint(2, 5))
        elif r < 0.86 and g.K is not None:
            g.split_pair()
        elif r < 0.93:
            marks.append((J.mark(), g.fingerprint(), nxt))
        elif marks:
            m, fp, nxt = marks.pop(rng.randrange(len(marks)))
            J.undo_to(m)
            marks = [x for x in marks if x[0] <= m]
            assert g.fingerprint() == fp
        assert g.violations() == [], g.violations()
        assert region_condition_holds(g)
        if g.K is not None and use_regions:
            for c in cliques(g.adj, g.K):
                assert len({g.region_of[v] for v in c}) == 1, c
    return steps


def load(text):
    """Parse and purify a script; returns (script, problem, purifier)."""
    from finimod.parser import parse
    from finimod.purifier import Purifier
    script = parse(text)
    pur = Purifier(script.bank)
    return script, pur.purify(script.formula()), pur


def eval_example():
    """Three-element model with f, g, h given by small defining maps."""
    b = TermBank()
    U = b.declare_sort("U")
    for n in "abc":
        b.declare_fun(n, [], U)
    f = b.declare_fun("f", [U], U)
    g = b.declare_fun("g", [U, U], U)
    h = b.declare_fun("h", [U, U], U)
    a, bb, c = (b.const(n) for n in "abc")
    maps = {f: DefiningMap(f, [((bb,), bb), ((Y,), a)]),
            g: DefiningMap(g, [((a, a), c), ((Y, bb), a), ((Y, Y), bb)]),
            h: DefiningMap(h, [((Y, Y), bb)])}
    for n, v in zip("abc", (a, bb, c)):
        d = b.decl_by_name[n]
        maps[d] = DefiningMap(d, [((), v)])
    m = CandidateModel(b, {b.BOOL: [b.FALSE, b.TRUE], U: [a, bb, c]}, maps, {U: a})
    x1, x2 = b.mk_var("x1", U), b.mk_var("x2", U)
    fx = b.mk_app(f, [x1])
    gx = b.mk_app(g, [x2, bb])
    hx = b.mk_app(h, [x2, x1])
    phi = Or((Eq(fx, gx), Not(Eq(hx, bb))))
    q = QuantRecord(None, (x1, x2), phi)
    return b, m, (a, bb, c), (x1, x2), (fx, gx, hx), q


def defining_map_example():
    """Constants c1..c6, e and a binary f under six asserted equations."""
    b = TermBank()
    S = b.declare_sort("S")
    c = {i: b.mk_app(b.declare_fun("c%d" % i, [], S), []) for i in range(1, 7)}
    e = b.mk_app(b.declare_fun("e", [], S), [])
    fd = b.declare_fun("f", [S, S], S)
    f = lambda s, t: b.mk_app(fd, [s, t])
    g = EGraph(b)
    for s, t in ((c[1], f(c[2], e)), (c[3], f(c[4], c[6])), (c[3], f(e, c[4])),
                 (c[6], f(c[2], c[5])), (c[2], c[5]), (c[4], f(e, e))):
        assert g.assert_lit(Literal(True, s, t)) is None
    U = [f(c[2], e), f(e, c[4]), f(e, e)]
    m = build_model(g, U, default_terms={S: e})
    return b, S, c, e, fd, f, g, m
