"""Reference procedures used as ground truth in tests.

``oracle_solve`` enumerates interpretations directly; ``oracle_fcc`` is the
recursive split-based decision procedure for ground literal sets;
``naive_closure`` is congruence closure by fixpoint iteration; and
``chromatic_number`` colors graphs by backtracking.  None of them share
code with the solver proper beyond the term language.
"""

from __future__ import annotations

from collections import namedtuple
from itertools import product
from typing import Dict, Iterable, Sequence, Tuple

from .formula import And, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or
from .kernel import Clause, FuncDecl, Literal, Term

OracleResult = namedtuple("OracleResult", "verdict cards")

SAT = "sat"
UNSAT_UP_TO = "unsat_up_to"


class OracleLimit(RuntimeError):
    """Enumeration would exceed the configured budget."""


# -- brute-force model enumeration ---------------------------------------------

def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Need(Exception):
    """Evaluation reached a table cell that is not assigned yet."""

    def __init__(self, decl, idx):
        self.decl = decl
        self.idx = idx


class _Interp:
    """Partial interpretation: table cells are assigned on demand."""

    def __init__(self, bank, sizes: Dict[int, int], proxies):
        self.bank = bank
        self.sizes = sizes          # sort id -> domain size
        self.tables: Dict[FuncDecl, Dict[int, int]] = {}
        self.proxies = proxies
        self.total = sum(sizes.values())

    def size(self, sort):
        return 2 if sort.is_bool else self.sizes[sort.id]

    def term(self, t: Term, env) -> int:
        d = t.decl
        if d is None:
            return env[t]
        b = self.bank
        if t is b.TRUE:
            return 1
        if t is b.FALSE:
            return 0
        if d.kind == "card":
            scope, k = d.info
            n = self.total if scope is None else self.sizes[scope.id]
            return 1 if n <= k else 0
        q = self.proxies.get(d)
        if q is not None:
            return 1 if self.formula(Forall(q.vars, q.body), {}) else 0
        idx = 0
        for a, s in zip(t.args, d.arg_sorts):
            idx = idx * self.size(s) + self.term(a, env)
        table = self.tables.setdefault(d, {})
        v = table.get(idx)
        if v is None:
            raise _Need(d, idx)
        return v

    @staticmethod
    def _any(items, test) -> bool:
        """True if some item passes; a missing cell is reported only when
        no assigned item already decides the answer."""
        need = None
        for it in items:
            try:
                if test(it):
                    return True
            except _Need as e:
                need = need or e
        if need is not None:
            raise need
        return False

    def formula(self, f: Formula, env) -> bool:
        if isinstance(f, Eq):
            return self.term(f.lhs, env) == self.term(f.rhs, env)
        if isinstance(f, Not):
            return not self.formula(f.arg, env)
        if isinstance(f, And):
            return not self._any(f.args, lambda a: not self.formula(a, env))
        if isinstance(f, Or):
            return self._any(f.args, lambda a: self.formula(a, env))
        if isinstance(f, Implies):
            return self._any((Not(f.lhs), f.rhs), lambda a: self.formula(a, env))
        if isinstance(f, Iff):
            return self.formula(f.lhs, env) == self.formula(f.rhs, env)
        if isinstance(f, Const):
            return f.value
        if isinstance(f, (Forall, Exists)):
            envs = ({**env, **dict(zip(f.vars, vals))}
                    for vals in product(*(range(self.size(x.sort)) for x in f.vars)))
            if isinstance(f, Exists):
                return self._any(envs, lambda e: self.formula(f.body, e))
            return not self._any(envs, lambda e: not self.formula(f.body, e))
        raise TypeError(f)

    def lit(self, l: Literal) -> bool:
        return (self.term(l.lhs, {}) == self.term(l.rhs, {})) == l.pos

    def clause(self, c):
        """True, False, or the first missing cell (as a ``_Need``)."""
        need = None
        for l in c:
            try:
                if self.lit(l):
                    return True
            except _Need as e:
                if need is None:
                    need = e
        return need if need is not None else False


def oracle_solve(problem, max_card: int, limit: int = 2_000_000) -> OracleResult:
    """Smallest cardinalities (sum first, then lexicographic per sort in
    declaration order) admitting a model of the clauses in which every
    proxy atom equals its quantified formula.

    Every interpretation is covered: table cells are branched on in the
    order evaluation demands them, and cells no clause reads are left
    free.  ``limit`` caps the number of search nodes per call."""
    bank = problem.bank
    sorts = bank.uninterpreted_sorts()
    proxies = {q.proxy: q for q in problem.quant_records}
    # Ground clauses first: their cells are cheap and prune early.
    clauses = sorted(problem.clauses, key=lambda c: any(
        l.lhs.decl in proxies or l.rhs.decl in proxies for l in c))
    budget = [limit]
    for total in range(len(sorts), max_card + 1):
        for ks in _compositions(total, len(sorts)):
            sizes = {s.id: k for s, k in zip(sorts, ks)}
            m = _Interp(bank, sizes, proxies)
            if _search(m, clauses, budget):
                return OracleResult(SAT, {s.name: k for s, k in zip(sorts, ks)})
    return OracleResult(UNSAT_UP_TO, max_card)


def _search(m: _Interp, clauses, budget) -> bool:
    budget[0] -= 1
    if budget[0] < 0:
        raise OracleLimit("enumeration budget exhausted")
    need = None
    for c in clauses:
        st = m.clause(c)
        if st is False:
            return False
        if st is not True and need is None:
            need = st
    if need is None:
        return True
    d, idx = need.decl, need.idx
    table = m.tables[d]
    for v in range(m.size(d.ret_sort)):
        table[idx] = v
        if _search(m, clauses, budget):
            return True
    del table[idx]
    return False


def problem_from_literals(bank, lits: Iterable[Literal]):
    from .purifier import PurifiedProblem
    p = PurifiedProblem(bank)
    for l in lits:
        p.add_clause(Clause([l]))
    return p


# -- congruence closure by fixpoint ------------------------------------------

def _all_terms(lits):
    seen = {}
    for l in lits:
        for t in (l.lhs, l.rhs):
            for s in t.subterms():
                seen.setdefault(s, None)
    return list(seen)


def naive_closure(lits: Sequence[Literal], extra_terms: Iterable[Term] = ()):
    """(consistent, find) for the equalities and disequalities in ``lits``.
    ``find`` maps each term to a canonical member of its class."""
    eqs = [l for l in lits if l.pos]
    diseqs = [l for l in lits if not l.pos]
    terms = list(dict.fromkeys(_all_terms(lits) + list(extra_terms)))
    rep = {t: t for t in terms}

    def find(t):
        while rep[t] is not t:
            t = rep[t]
        return t

    def union(a, b):
        a, b = find(a), find(b)
        if a is b:
            return False
        if b.id < a.id:
            a, b = b, a
        rep[b] = a
        return True

    for l in eqs:
        union(l.lhs, l.rhs)
    apps = [t for t in terms if t.args]
    changed = True
    while changed:
        changed = False
        for i, s in enumerate(apps):
            for t in apps[i + 1:]:
                if s.decl is t.decl and find(s) is not find(t) and \
                        all(find(a) is find(b) for a, b in zip(s.args, t.args)):
                    union(s, t)
                    changed = True
    ok = all(find(l.lhs) is not find(l.rhs) for l in diseqs)
    consts = [t for t in terms if t.decl is not None and t.decl.kind == "builtin"]
    if len(consts) == 2 and find(consts[0]) is find(consts[1]):
        ok = False
    return ok, {t: find(t) for t in terms}


# -- recursive FCC procedure ---------------------------------------------------

def oracle_fcc(lits: Sequence[Literal], bank) -> str:
    """'sat' or 'unsat' for ground equalities, disequalities and per-sort
    cardinality literals, by splitting on undetermined pairs."""
    plain, cards = [], []
    for l in lits:
        t = l.lhs if l.lhs.decl is not None and l.lhs.decl.kind == "card" else \
            l.rhs if l.rhs.decl is not None and l.rhs.decl.kind == "card" else None
        if t is None:
            plain.append(l)
        else:
            scope, k = t.decl.info
            if scope is None:
                raise ValueError("sum cardinality literals are not supported here")
            other = l.rhs if t is l.lhs else l.lhs
            cards.append((scope, k, l.pos == (other is bank.TRUE)))
    return _fcc(plain, cards, bank)


def _entails_diseq(plain, s, t, bank):
    ok, _ = naive_closure(plain + [Literal(True, s, t)], (bank.TRUE, bank.FALSE))
    return not ok


def _fcc(plain, cards, bank) -> str:
    ok, find = naive_closure(plain, (bank.TRUE, bank.FALSE))
    if not ok:
        return "unsat"
    sorts = []
    for scope, _, _ in cards:
        if scope not in sorts:
            sorts.append(scope)
    for S in sorts:
        pos = [k for s, k, p in cards if s is S and p]
        if not pos:
            continue
        k = min(pos)
        if any(j >= k for s, j, p in cards if s is S and not p):
            return "unsat"
    for S in sorts:
        pos = [k for s, k, p in cards if s is S and p]
        if not pos:
            continue
        k = min(pos)
        classes = []
        for t, r in find.items():
            if t.sort is S and r not in classes:
                classes.append(r)
        if len(classes) <= k:
            continue
        for i, a in enumerate(classes):
            for b in classes[i + 1:]:
                if not _entails_diseq(plain, a, b, bank):
                    if _fcc(plain + [Literal(True, a, b)], cards, bank) == "sat":
                        return "sat"
                    return _fcc(plain + [Literal(False, a, b)], cards, bank)
        return "unsat"
    return "sat"


# -- graph coloring ------------------------------------------------------------

def chromatic_number(n: int, edges: Iterable[Tuple[int, int]]) -> int:
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    if n == 0:
        return 0
    order = sorted(range(n), key=lambda v: -len(adj[v]))

    def colorable(k):
        color = {}

        def go(i):
            if i == n:
                return True
            v = order[i]
            used = {color[u] for u in adj[v] if u in color}
            for c in range(min(k, len(set(color.values())) + 1)):
                if c not in used:
                    color[v] = c
                    if go(i + 1):
                        return True
                    del color[v]
            return False
        return go(0)

    k = 1
    while not colorable(k):
        k += 1
    return k
