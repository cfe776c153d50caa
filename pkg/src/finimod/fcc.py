"""Theory of equality with finite cardinality constraints.

Cardinality atoms ``card[S,k]`` (sort ``S`` has at most ``k`` elements) and
``card[Σ,k]`` (the sort sizes sum to at most ``k``) are boolean constants
routed here instead of to the e-graph.  The solver implements the
fixed-cardinality ladder, clique detection over region graphs and
splitting on pairs of classes.

Effort checks return *actions* that the engine applies:

``("learn", codes)``     tautology introducing a new atom
``("decide", code)``     decide a ladder atom
``("conflict", codes)``  clause falsified by the trail
``("lemma", codes, pairs)``  clique lemma; ``pairs`` lists its equality atoms
``("split", s, t)``      split on ``s ≈ t`` with positive phase
``("unknown",)``         signature bound above the configured limit
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .journal import Journal
from .regions import RegionGraph

SIGMA = -1


def card_term(bank, scope, k):
    """The atom ``card[scope,k]``; ``scope`` None stands for the sum over sorts."""
    key = (scope, k)
    name = "card[%s,%d]" % ("Σ" if scope is None else scope.name, k)
    d = bank.decl_by_name.get(name)
    if d is not None and (d.kind != "card" or d.info != key):
        for x in bank.decls:
            if x.kind == "card" and x.info == key:
                return bank.mk_app(x, [])
        name = bank.fresh_name(name)
        d = None
    if d is None:
        d = bank.declare_fun(name, [], bank.BOOL, kind="card", info=key)
    return bank.mk_app(d, [])


@dataclass
class FCCConfig:
    use_regions: bool = True
    clique_explain: str = "lemma"
    ladder: bool = True
    max_card: int = 0


class FCCSolver:
    def __init__(self, engine, journal: Journal, config: FCCConfig = None):
        self.engine = engine
        self.bank = engine.bank
        self.J = journal
        self.config = config or FCCConfig()
        self.graphs: Dict[int, RegionGraph] = {}
        self.card_vars: Dict[tuple, int] = {}
        self.card_info: Dict[int, tuple] = {}
        self.pos: Dict[int, dict] = {SIGMA: {}}
        self.neg: Dict[int, dict] = {SIGMA: {}}
        self.bound: Dict[int, Optional[int]] = {}
        self.ladder_sorts: List = []
        self.n_ladder = 0
        self.n_cliques = 0
        self.n_splits = 0
        self.n_sum_conflicts = 0
        self.n_card_conflicts = 0

    # -- graph events from the e-graph --------------------------------------

    def graph(self, sort) -> RegionGraph:
        g = self.graphs.get(sort.id)
        if g is None:
            g = self.graphs[sort.id] = RegionGraph(self.J, self.config.use_regions)
        return g

    def on_new_class(self, i, sort):
        if not sort.is_bool:
            self.graph(sort).add_vertex(i)

    def on_merge(self, keep, gone, sort):
        if not sort.is_bool:
            self.graph(sort).merge(keep, gone)

    def on_diseq(self, i, j, sort):
        if not sort.is_bool:
            self.graph(sort).add_edge(i, j)

    # -- cardinality atoms --------------------------------------------------

    def add_ladder_sort(self, sort):
        if sort not in self.ladder_sorts:
            self.ladder_sorts.append(sort)
            self.pos.setdefault(sort.id, {})
            self.neg.setdefault(sort.id, {})

    def card_term(self, scope, k):
        return card_term(self.bank, scope, k)

    def card_var(self, scope, k, create=True) -> Optional[int]:
        key = (SIGMA if scope is None else scope.id, k)
        v = self.card_vars.get(key)
        if v is None and create:
            t = self.card_term(scope, k)
            v = self.engine.var_of_atom(t, self.bank.TRUE)
            self.card_vars[key] = v
            self.card_info[v] = (scope, k)
        return v

    def card_code(self, scope, k, pos=True) -> int:
        return 2 * self.card_var(scope, k) + (0 if pos else 1)

    def is_card_var(self, v) -> bool:
        return v in self.card_info

    def scope_key(self, scope):
        return SIGMA if scope is None else scope.id

    def fixed_bound(self, sort) -> Optional[int]:
        return self.bound.get(sort.id)

    def lower_bound(self, sort) -> int:
        """Smallest size allowed by the negative atoms ``¬card[S,j]`` asserted."""
        negs = self.neg.get(sort.id)
        return max(negs) + 1 if negs else 1

    def assert_card(self, v, pos, code):
        scope, k = self.card_info[v]
        key = self.scope_key(scope)
        J = self.J
        if pos:
            if scope is None and not self.config.ladder:
                raise ValueError("signature cardinality atoms require the ladder")
            negs = self.neg[key]
            bad = [j for j in negs if j > k]
            if bad:
                self.n_card_conflicts += 1
                return [code ^ 1, negs[min(bad)] ^ 1]
            J.dict_set(self.pos[key], k, code)
            b = self.bound.get(key)
            if b is None or k < b:
                J.dict_set(self.bound, key, k)
                if scope is not None:
                    self.graph(scope).rebuild(k + 1)
        else:
            poss = self.pos[key]
            bad = [j for j in poss if j < k]
            if bad:
                self.n_card_conflicts += 1
                return [poss[min(bad)] ^ 1, code ^ 1]
            J.dict_set(self.neg[key], k, code)
        return None

    def card_phase(self, v) -> bool:
        scope, k = self.card_info[v]
        b = self.bound.get(self.scope_key(scope))
        return b is not None and k >= b

    # -- effort checks ------------------------------------------------------

    def _fix(self, scope, k):
        v = self.card_var(scope, k, create=False)
        if v is None:
            v = self.card_var(scope, k)
            self.n_ladder += 1
            return ("learn", [2 * v, 2 * v + 1])
        x = self.engine.values[2 * v]
        if x == 0:
            return ("decide", 2 * v)
        return None

    def weak_effort(self):
        if not self.ladder_sorts:
            return None
        if not self.config.ladder:
            return self.check_cliques_weak()
        n = len(self.ladder_sorts)
        k = n
        negs = self.neg[SIGMA]
        while k in negs:
            k += 1
        if self.config.max_card and k > self.config.max_card:
            return ("unknown",)
        act = self._fix(None, k)
        if act is not None:
            return act
        ks = []
        for S in self.ladder_sorts:
            j = 1
            negs = self.neg[S.id]
            while j in negs:
                j += 1
            act = self._fix(S, j)
            if act is not None:
                return act
            ks.append(j)
        if sum(ks) > k:
            self.n_sum_conflicts += 1
            codes = [self.card_code(S, j - 1) for S, j in zip(self.ladder_sorts, ks) if j > 1]
            codes.append(self.card_code(None, k, False))
            return ("conflict", codes)
        return self.check_cliques_weak()

    def check_cliques_weak(self):
        eg = self.engine.egraph
        for S in self.ladder_sorts:
            k = self.bound.get(S.id)
            if k is None:
                continue
            w = self.graph(S).find_clique()
            if w is None:
                continue
            self.n_cliques += 1
            card_neg = self.card_code(S, k, False)
            if self.config.clique_explain == "conflict":
                codes = [card_neg]
                for i, u in enumerate(w):
                    for v in w[i + 1:]:
                        codes.extend(x ^ 1 for x in eg.explain_diseq_ids(u, v))
                return ("conflict", list(dict.fromkeys(codes)))
            reps = [eg.nodes[eg.minrep[u]] for u in w]
            pairs = [(s, t) for i, s in enumerate(reps) for t in reps[i + 1:]]
            codes = [card_neg] + [2 * self.engine.var_of_atom(s, t) for s, t in pairs]
            return ("lemma", codes, pairs)
        return None

    def strong_effort(self):
        eg = self.engine.egraph
        for S in self.ladder_sorts:
            k = self.bound.get(S.id)
            if k is None or eg.num_classes(S) <= k:
                continue
            p = self.graph(S).split_pair()
            if p is None:
                raise AssertionError("no splittable pair in sort %s" % S)
            self.n_splits += 1
            u, v = p
            return ("split", eg.nodes[eg.minrep[u]], eg.nodes[eg.minrep[v]])
        return None
