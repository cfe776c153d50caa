"""Candidate models given by defining maps.

Domain values of an uninterpreted sort are the representative terms of its
congruence classes.  Each function symbol gets a *defining map*: entries
``f(p1..pn) = v`` where each ``pi`` is either a domain value or the
placeholder ``Y`` (the variable ``y_i``).  A flat term takes the value of
its unique most specific generalization among the entries.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .kernel import FuncDecl, Sort, Term, TermBank

Y = None  # pattern placeholder for y_i
Pattern = Tuple[Optional[Term], ...]

_SKIP_KINDS = ("builtin", "card")
_PRINT_KINDS = ("user",)


def unify_patterns(p: Pattern, q: Pattern) -> Optional[Pattern]:
    """Most general common instance of two patterns, or None."""
    out = []
    for a, b in zip(p, q):
        if a is Y:
            out.append(b)
        elif b is Y or a is b:
            out.append(a)
        else:
            return None
    return tuple(out)


def generalizes(p: Pattern, q: Pattern) -> bool:
    return all(a is Y or a is b for a, b in zip(p, q))


def _fixed(p: Pattern) -> int:
    return sum(1 for a in p if a is not Y)


class DefiningMap:
    def __init__(self, func: FuncDecl, entries=()):
        self.func = func
        self.entries: List[Tuple[Pattern, Term]] = []
        self.index: Dict[Pattern, Term] = {}
        for p, v in entries:
            self.add(p, v)

    def add(self, p: Pattern, v: Term) -> bool:
        if p in self.index:
            return False
        self.index[p] = v
        self.entries.append((p, v))
        return True

    def close(self):
        """Add mgu instances of overlapping entries until closed; the new
        entry takes the value of the earlier of the two."""
        entries = self.entries
        j = 0
        while j < len(entries):
            pj = entries[j][0]
            if Y in pj:
                for i in range(j):
                    pi, vi = entries[i]
                    if Y not in pi:
                        continue
                    u = unify_patterns(pi, pj)
                    if u is not None and u not in self.index:
                        self.add(u, vi)
            j += 1

    def msg(self, args: Sequence[Term]) -> Optional[Pattern]:
        """Most specific generalization of the flat term ``f(args)``."""
        n = len(args)
        if n <= 10:
            for mask in _masks(n):
                p = tuple(a if m else Y for a, m in zip(args, mask))
                if p in self.index:
                    return p
            return None
        best = None
        for p, _ in self.entries:
            if generalizes(p, args) and (best is None or _fixed(p) > _fixed(best)):
                best = p
        return best

    def lookup(self, args: Sequence[Term]) -> Term:
        p = self.msg(args)
        if p is None:
            raise KeyError("no generalization of %s%r" % (self.func.name, tuple(args)))
        return self.index[p]

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "DefiningMap(%s, %d entries)" % (self.func.name, len(self.entries))


_MASKS: Dict[int, list] = {}


def _masks(n):
    m = _MASKS.get(n)
    if m is None:
        m = sorted(product((1, 0), repeat=n), key=lambda t: -sum(t))
        _MASKS[n] = m
    return m


class CandidateModel:
    def __init__(self, bank: TermBank, domains: Dict[Sort, List[Term]],
                 maps: Dict[FuncDecl, DefiningMap], default_terms: Dict[Sort, Term]):
        self.bank = bank
        self.domains = domains
        self.maps = maps
        self.default_terms = default_terms
        self.order = {s: {v: i for i, v in enumerate(vs)} for s, vs in domains.items()}
        self._cache: Dict[Term, Term] = {}

    def domain(self, sort: Sort) -> List[Term]:
        return self.domains[sort]

    def card(self, sort: Sort) -> int:
        return len(self.domains[sort])

    def default_value(self, sort: Sort) -> Term:
        if sort.is_bool:
            return self.bank.FALSE
        return self.domains[sort][0]

    def apply(self, f: FuncDecl, args: Sequence[Term]) -> Term:
        d = self.maps.get(f)
        if d is None:
            return self.default_value(f.ret_sort)
        return d.lookup(args)

    def eval_ground(self, t: Term) -> Term:
        v = self._cache.get(t)
        if v is not None:
            return v
        if not t.ground:
            raise ValueError("eval_ground on non-ground term %r" % (t,))
        b = self.bank
        if t is b.TRUE or t is b.FALSE:
            v = t
        elif t.decl.kind == "card":
            scope, k = t.decl.info
            n = (sum(len(vs) for s, vs in self.domains.items() if not s.is_bool)
                 if scope is None else self.card(scope))
            v = b.TRUE if n <= k else b.FALSE
        else:
            args = [self.eval_ground(a) for a in t.args]
            v = self.apply(t.decl, args)
        self._cache[t] = v
        return v

    def holds(self, lit) -> bool:
        return (self.eval_ground(lit.lhs) is self.eval_ground(lit.rhs)) == lit.pos

    def satisfies_clause(self, clause) -> bool:
        return any(self.holds(l) for l in clause)

    def format(self) -> str:
        lines = []
        for s, vs in self.domains.items():
            if s.is_bool:
                continue
            lines.append("sort %s : card %d : {%s}" % (s.name, len(vs), ", ".join(map(repr, vs))))
        for f, d in self.maps.items():
            if f.kind not in _PRINT_KINDS:
                continue
            for p, v in d.entries:
                if f.arity == 0:
                    lines.append("%s = %r" % (f.name, v))
                else:
                    lines.append("%s(%s) = %r" % (f.name, ",".join(
                        "_" if a is Y else repr(a) for a in p), v))
        return "\n".join(lines)


def _padding(bank, s, have, n):
    """``n`` domain elements of sort ``s`` outside ``have``, reusing earlier
    padding constants so repeated builds agree."""
    prefix = "e_%s!" % s.name
    out = []
    for d in bank.decls:
        if len(out) == n:
            return out
        if d.kind == "domain" and d.ret_sort is s and d.name.startswith(prefix):
            t = bank.mk_app(d, [])
            if t not in have:
                out.append(t)
    while len(out) < n:
        out.append(bank.fresh_const("e_" + s.name, s, "domain"))
    return out


def build_model(egraph, U: Optional[Sequence[Term]] = None,
                default_terms: Optional[Dict[Sort, Term]] = None,
                bounds: Optional[Dict[Sort, int]] = None,
                lower: Optional[Dict[Sort, int]] = None) -> CandidateModel:
    """Defining maps from the e-graph state.  ``U`` defaults to every
    registered term; D1 and D2 are enumerated in registration order.
    A sort with fewer classes than its ``lower`` bound (or none at all) is
    padded with fresh domain elements."""
    bank = egraph.bank
    TRUE, FALSE = bank.TRUE, bank.FALSE
    true_root = egraph.find(egraph.true_id)
    nodes = egraph.nodes

    def val(i):
        t = nodes[i]
        if t.sort.is_bool:
            return TRUE if egraph.find(i) == true_root else FALSE
        return nodes[egraph.minrep[egraph.find(i)]]

    domains: Dict[Sort, List[Term]] = {bank.BOOL: [FALSE, TRUE]}
    for s in bank.uninterpreted_sorts():
        vs = egraph.classes_of_sort(s)
        if bounds is not None and s in bounds and len(vs) > bounds[s]:
            raise AssertionError("sort %s has %d classes, bound %d" % (s, len(vs), bounds[s]))
        want = max(1, (lower or {}).get(s, 1))
        if len(vs) < want:
            vs = vs + _padding(bank, s, set(vs), want - len(vs))
        domains[s] = vs

    defaults: Dict[Sort, Term] = {}
    for s in bank.uninterpreted_sorts():
        ids = [i for i in egraph.class_roots(s)]
        members = [j for r in ids for j in egraph.class_members(r)]
        defaults[s] = nodes[min(members, key=lambda j: nodes[j].id)] if members else domains[s][0]
    if default_terms:
        defaults.update(default_terms)
    default_val = {}
    for s, e in defaults.items():
        i = egraph.node_of.get(e)
        default_val[s] = val(i) if i is not None else domains[s][0]

    maps: Dict[FuncDecl, DefiningMap] = {}
    for f in bank.decls:
        if f.kind not in _SKIP_KINDS:
            maps[f] = DefiningMap(f)

    n = len(nodes)
    if U is None:
        u_ids = range(n)
    else:
        u_ids = sorted(egraph.node_of[t] for t in U)
    # D1
    for i in range(n):
        t = nodes[i]
        d = maps.get(t.decl)
        if d is not None:
            d.add(tuple(val(c) for c in egraph.children[i]), val(i))
    # D2
    for i in u_ids:
        t = nodes[i]
        d = maps.get(t.decl)
        if d is None or not t.args:
            continue
        pat = []
        for c in egraph.children[i]:
            s = nodes[c].sort
            e = defaults.get(s)
            ei = egraph.node_of.get(e) if e is not None else None
            if ei is not None and egraph.find(ei) == egraph.find(c):
                pat.append(Y)
            else:
                pat.append(val(c))
        d.add(tuple(pat), val(i))
    for f, d in maps.items():
        d.close()
        top = (Y,) * f.arity
        if top not in d.index:
            rs = f.ret_sort
            d.add(top, FALSE if rs.is_bool else default_val.get(rs, domains[rs][0]))
    return CandidateModel(bank, domains, maps, defaults)


def validate_defining_map(d: DefiningMap, domains: Optional[Dict[Sort, List[Term]]] = None,
                          limit: int = 20000) -> List[str]:
    """Violations of the defining-map conditions (empty list when valid).
    With ``domains``, also checks that every flat term has exactly one most
    specific generalization (skipped above ``limit`` tuples)."""
    out = []
    f = d.func
    seen = {}
    for p, v in d.entries:
        if p in seen and seen[p] is not v:
            out.append("%s: two values for %r" % (f.name, p))
        seen[p] = v
    pats = list(seen)
    for i, p in enumerate(pats):
        for q in pats[i + 1:]:
            u = unify_patterns(p, q)
            if u is None:
                continue
            if u == p and u == q:
                out.append("%s: empty unifier for distinct %r %r" % (f.name, p, q))
            if u not in seen:
                out.append("%s: missing instance %r of %r and %r" % (f.name, u, p, q))
    if (Y,) * f.arity not in seen:
        out.append("%s: no all-variable entry" % f.name)
    if domains is not None and not out:
        doms = [domains[s] for s in f.arg_sorts]
        total = 1
        for dm in doms:
            total *= len(dm)
        if total <= limit:
            for args in product(*doms):
                gens = [p for p in pats if generalizes(p, args)]
                maximal = [p for p in gens
                           if not any(q != p and generalizes(p, q) for q in gens)]
                if len(maximal) != 1:
                    out.append("%s%r: %d most specific generalizations"
                               % (f.name, args, len(maximal)))
    return out
