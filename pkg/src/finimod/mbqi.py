"""Model-based quantifier instantiation.

``eval`` computes the value of a term or formula under a substitution in a
candidate model together with a set of *critical* variables: changing any
other variable cannot change the value.  ``h_m`` walks the instance space
in lexicographic order and uses the critical sets to skip whole blocks of
instances, returning one representative per block that the model falsifies.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .formula import And, Const, Eq, Exists, Forall, Formula, Not, Or
from .kernel import FuncDecl, Term
from .model import CandidateModel

EMPTY: FrozenSet[Term] = frozenset()


class EvalError(ValueError):
    pass


class FunctionIndex:
    """Trie over the full table of ``f`` with arguments taken in ``order``.

    Each node records the residual function's value when it is constant
    over the arguments not yet fixed, so a lookup can stop at the first
    prefix that determines the result."""

    def __init__(self, m: CandidateModel, f: FuncDecl, order: Sequence[int]):
        self.f = f
        self.order = tuple(order)
        doms = [m.domain(s) for s in f.arg_sorts]
        self.doms = doms
        n = f.arity
        args = [None] * n

        def build(depth):
            if depth == n:
                return (m.apply(f, args), None)
            pos = self.order[depth]
            children = {}
            common = None
            same = True
            for v in doms[pos]:
                args[pos] = v
                child = build(depth + 1)
                children[v] = child
                if child[0] is None:
                    same = False
                elif common is None:
                    common = child[0]
                elif common is not child[0]:
                    same = False
            args[pos] = None
            return (common if same else None, children)
        self.root = build(0)

    def lookup(self, values: Sequence[Term]) -> Tuple[Term, Tuple[int, ...]]:
        """Value of ``f(values)`` and the positions needed to determine it."""
        node = self.root
        for depth, pos in enumerate(self.order):
            if node[0] is not None:
                return node[0], self.order[:depth]
            node = node[1][values[pos]]
        return node[0], self.order

    def is_constant_below(self, prefix: Sequence[Term]) -> bool:
        node = self.root
        for v in prefix:
            if node[0] is not None:
                return True
            node = node[1][v]
        return node[0] is not None


class Evaluator:
    """``eval`` over one candidate model with cached function indices."""

    def __init__(self, m: CandidateModel, table_limit: int = 200000):
        self.m = m
        self.table_limit = table_limit
        self._indices: Dict[tuple, Optional[FunctionIndex]] = {}

    def index(self, f: FuncDecl, order: Sequence[int]) -> Optional[FunctionIndex]:
        key = (f, tuple(order))
        if key not in self._indices:
            size = 1
            for s in f.arg_sorts:
                size *= len(self.m.domain(s))
            self._indices[key] = (FunctionIndex(self.m, f, order)
                                  if size <= self.table_limit else None)
        return self._indices[key]

    def term(self, t: Term, sigma) -> Tuple[Term, FrozenSet[Term]]:
        if t.decl is None:
            if t not in sigma:
                raise EvalError("unmapped variable %r" % (t,))
            return sigma[t], frozenset((t,))
        if t.ground:
            return self.m.eval_ground(t), EMPTY
        res = [self.term(a, sigma) for a in t.args]
        vals = [r[0] for r in res]
        order = sorted(range(len(res)), key=lambda i: len(res[i][1]))
        idx = self.index(t.decl, order)
        if idx is None:
            v, C = self.m.apply(t.decl, vals), range(len(res))
        else:
            v, C = idx.lookup(vals)
        crit = EMPTY
        for i in C:
            crit = crit | res[i][1]
        return v, crit

    def formula(self, f: Formula, sigma) -> Tuple[bool, FrozenSet[Term]]:
        if isinstance(f, Eq):
            v1, x1 = self.term(f.lhs, sigma)
            v2, x2 = self.term(f.rhs, sigma)
            return v1 is v2, x1 | x2
        if isinstance(f, Not):
            v, x = self.formula(f.arg, sigma)
            return not v, x
        if isinstance(f, (Or, And)):
            decisive = isinstance(f, Or)
            res = [self.formula(a, sigma) for a in f.args]
            best = None
            for v, x in res:
                if v == decisive and (best is None or len(x) < len(best)):
                    best = x
            if best is not None:
                return decisive, best
            crit = EMPTY
            for _, x in res:
                crit = crit | x
            return not decisive, crit
        if isinstance(f, Const):
            return f.value, EMPTY
        if isinstance(f, (Forall, Exists)):
            decisive = isinstance(f, Exists)
            bound = frozenset(f.vars)
            doms = [self.m.domain(x.sort) for x in f.vars]
            crit = EMPTY
            inner = dict(sigma)
            for vals in product(*doms):
                inner.update(zip(f.vars, vals))
                v, x = self.formula(f.body, inner)
                if v == decisive:
                    return decisive, x - bound
                crit = crit | x
            return not decisive, crit - bound
        raise EvalError("cannot evaluate %r" % (f,))

    def __call__(self, t, sigma):
        if isinstance(t, Formula):
            return self.formula(t, sigma)
        return self.term(t, sigma)


def eval(m: CandidateModel, t, sigma) -> tuple:  # noqa: A001 - mirrors the procedure name
    return Evaluator(m)(t, sigma)


class TupleCursor:
    """Lexicographic enumeration of ``V_{x1} × ... × V_{xn}``."""

    def __init__(self, domains: Sequence[Sequence[Term]]):
        self.domains = [list(d) for d in domains]
        self.pos = [0] * len(self.domains)

    @property
    def n(self):
        return len(self.domains)

    def current(self) -> Tuple[Term, ...]:
        return tuple(d[p] for d, p in zip(self.domains, self.pos))

    def is_min(self) -> bool:
        return not any(self.pos)

    def set(self, values: Sequence[Term]):
        self.pos = [d.index(v) for d, v in zip(self.domains, values)]

    def next_i(self, i: int) -> Tuple[Term, ...]:
        """Advance to next_i of the current tuple (wrapping to the minimum)."""
        n = self.n
        j = n + 1 - i
        pos = self.pos
        while j >= 1:
            if pos[j - 1] + 1 < len(self.domains[j - 1]):
                pos[j - 1] += 1
                for k in range(j, n):
                    pos[k] = 0
                return self.current()
            j -= 1
        self.pos = [0] * n
        return self.current()


def next_i(domains, values, i):
    c = TupleCursor(domains)
    c.set(values)
    return c.next_i(i)


def h_m(m: CandidateModel, q, evaluator: Evaluator = None, cap: int = 0,
        stats: dict = None, trace: list = None) -> List[Dict[Term, Term]]:
    """Falsifying substitutions for ``∀ q.vars. q.body`` (one per block).

    If ``trace`` is a list, one row ``(t, (value, critical), added, i, next)``
    is appended per iteration."""
    ev = evaluator or Evaluator(m)
    xs = list(q.vars)
    n = len(xs)
    position = {x: i + 1 for i, x in enumerate(xs)}
    cur = TupleCursor([m.domain(x.sort) for x in xs])
    if any(not d for d in cur.domains):
        return []
    out = []
    visits = 0
    while True:
        sigma = dict(zip(xs, cur.current()))
        v, crit = ev.formula(q.body, sigma)
        visits += 1
        if not v:
            out.append(sigma)
            if cap and len(out) >= cap:
                break
        top = max((position[x] for x in crit if x in position), default=0)
        t = cur.current()
        nxt = cur.next_i(n + 1 - top)
        if trace is not None:
            trace.append((t, (v, frozenset(crit)), None if v else sigma, n + 1 - top, nxt))
        if cur.is_min():
            break
    if stats is not None:
        stats["hm_visits"] = stats.get("hm_visits", 0) + visits
    return out


def exhaustive(m: CandidateModel, q) -> List[Dict[Term, Term]]:
    xs = list(q.vars)
    return [dict(zip(xs, vals)) for vals in product(*(m.domain(x.sort) for x in xs))]


# -- E-matching ---------------------------------------------------------------

def _body_terms(f: Formula):
    from .formula import subterms
    return subterms(f)


def choose_trigger(q) -> Optional[Term]:
    """Smallest application in the body containing every quantified
    variable and no others (first in pre-order on ties)."""
    want = set(q.vars)
    best = None
    seen = set()
    for t in _body_terms(q.body):
        if t in seen or t.decl is None or t.ground:
            continue
        seen.add(t)
        if t.decl.kind in ("builtin", "card"):
            continue
        fv = set(t.free_vars())
        if fv != want:
            continue
        if best is None or t.size < best.size:
            best = t
    return best


def _match(eg, pat: Term, cls: int, binding: dict, by_decl):
    """Generate bindings extending ``binding`` under which ``pat`` is in the
    class rooted at ``cls``."""
    if pat.decl is None:
        b = binding.get(pat)
        if b is None:
            nb = dict(binding)
            nb[pat] = cls
            yield nb
        elif eg.find(b) == cls:
            yield binding
        return
    if pat.ground:
        i = eg.node_of.get(pat)
        if i is not None and eg.find(i) == cls:
            yield binding
        return
    for node in eg.class_members(cls):
        if eg.nodes[node].decl is not pat.decl:
            continue
        yield from _match_args(eg, pat.args, eg.children[node], 0, binding, by_decl)


def _match_args(eg, pats, kids, k, binding, by_decl):
    if k == len(pats):
        yield binding
        return
    for b in _match(eg, pats[k], eg.find(kids[k]), binding, by_decl):
        yield from _match_args(eg, pats, kids, k + 1, b, by_decl)


def e_match(q, egraph, exclude=None) -> List[Dict[Term, Term]]:
    """Instances of ``q`` whose trigger matches a registered term modulo
    the congruence; values are class representatives."""
    trig = choose_trigger(q)
    if trig is None:
        return []
    eg = egraph
    out = []
    seen = set()
    xs = list(q.vars)
    for i, t in enumerate(eg.nodes):
        if t.decl is not trig.decl:
            continue
        for b in _match_args(eg, trig.args, eg.children[i], 0, {}, None):
            sigma = {x: eg.nodes[eg.minrep[eg.find(b[x])]] for x in xs}
            key = tuple(sigma[x] for x in xs)
            if key in seen or (exclude is not None and key in exclude):
                continue
            seen.add(key)
            out.append(sigma)
    return out


MODES = ("exhaustive", "mbqi", "mbqi+ematch", "exhaustive+ematch")


def choose_instances(mode: str, m: CandidateModel, q, egraph=None, exclude=None,
                     evaluator: Evaluator = None, cap: int = 0, stats: dict = None):
    if mode not in MODES:
        raise ValueError("unknown instantiation mode %r" % mode)
    if mode.endswith("+ematch") and egraph is not None:
        found = e_match(q, egraph, exclude)
        if found:
            if stats is not None:
                stats["ematch_instances"] = stats.get("ematch_instances", 0) + len(found)
            return found[:cap] if cap else found
    if mode.startswith("mbqi"):
        return h_m(m, q, evaluator, cap, stats)
    out = exhaustive(m, q)
    if exclude is not None:
        xs = list(q.vars)
        out = [s for s in out if tuple(s[x] for x in xs) not in exclude]
    return out[:cap] if cap else out
