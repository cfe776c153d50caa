"""DPLL(T) search with the finite-cardinality theory attached.

Trail literals are handed to the e-graph (equalities and boolean atoms)
or to the cardinality solver (``card`` atoms) in trail order.  Before a
decision on an equality atom the e-graph is asked whether the atom is
already entailed; if so it is propagated with an explanation instead.
"""

from __future__ import annotations

import time
from typing import Optional

from .euf import EGraph
from .fcc import FCCConfig, FCCSolver
from .journal import Journal
from .kernel import Clause, Literal, Term, TermBank
from .sat_core import SatCore

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class Engine(SatCore):
    def __init__(self, bank: TermBank, config: FCCConfig = None):
        super().__init__()
        self.bank = bank
        self.journal = Journal()
        self.fcc = FCCSolver(self, self.journal, config)
        self.egraph = EGraph(bank, self.journal, listener=self.fcc)
        self.marks = []
        self.tq = 0
        self.n_theory_props = 0
        self.n_theory_conflicts = 0

    # -- hooks --------------------------------------------------------------

    def _on_new_level(self):
        self.marks.append(self.journal.mark())

    def _on_backjump(self, level):
        self.journal.undo_to(self.marks[level])
        del self.marks[level:]
        if self.tq > self.trail_len:
            self.tq = self.trail_len

    # -- clauses ------------------------------------------------------------

    def _register_literal(self, l: Literal):
        b = self.bank
        for t in (l.lhs, l.rhs):
            if t.decl is not None and t.decl.kind == "card":
                scope, k = t.decl.info
                self.fcc.card_var(scope, k)
                if scope is not None:
                    self.fcc.add_ladder_sort(scope)
                continue
            self.egraph.register(t)
            for s in t.subterms():
                for a in s.args:
                    if a.sort.is_bool and a is not b.TRUE and a is not b.FALSE:
                        self.var_of_atom(a, b.TRUE)

    def add_input_clause(self, c: Clause) -> bool:
        """Add a problem clause (the engine should be at level 0).
        Returns False when the clause set became trivially unsatisfiable."""
        for l in c:
            self._register_literal(l)
            for t in (l.lhs, l.rhs):
                if not t.sort.is_bool:
                    self.fcc.add_ladder_sort(t.sort)
        confl = self.add_clause_codes([self.code(l) for l in c])
        if confl is not None and not self.inconsistent:
            self.pending_conflict = confl
        return not self.inconsistent

    def register_term(self, t: Term):
        self.egraph.register(t)
        if not t.sort.is_bool:
            self.fcc.add_ladder_sort(t.sort)

    # -- theory interface ---------------------------------------------------

    def _assert_theory(self, code) -> Optional[list]:
        v = code >> 1
        pos = not (code & 1)
        if v in self.fcc.card_info:
            return self.fcc.assert_card(v, pos, code)
        lhs, rhs = self.atoms[v]
        eg = self.egraph
        b = self.bank
        if lhs is b.TRUE:
            expl = eg.assert_eq(rhs, b.TRUE if pos else b.FALSE, code)
        elif pos:
            expl = eg.assert_eq(lhs, rhs, code)
        else:
            expl = eg.assert_diseq(lhs, rhs, code)
        if expl is None:
            return None
        self.n_theory_conflicts += 1
        return [x ^ 1 for x in expl]

    def _propagate(self) -> Optional[list]:
        trail = self.trail
        while True:
            c = self.propagate_codes()
            if c is not None:
                return self.clause_codes(c)
            if self.tq >= self.trail_len:
                return None
            while self.tq < self.trail_len:
                code = trail[self.tq]
                self.tq += 1
                confl = self._assert_theory(code)
                if confl is not None:
                    return confl

    def entailed(self, v) -> Optional[tuple]:
        """(code, explanation) if the e-graph entails a value for atom v."""
        if v in self.fcc.card_info:
            return None
        lhs, rhs = self.atoms[v]
        eg = self.egraph
        i, j = eg.node_of.get(lhs), eg.node_of.get(rhs)
        if i is None or j is None:
            return None
        if eg.find(i) == eg.find(j):
            return (2 * v, eg.explain_ids(i, j))
        if lhs is self.bank.TRUE and eg.find(j) == eg.find(eg.false_id):
            return (2 * v + 1, eg.explain_ids(j, eg.false_id))
        if eg._diseq_entry(i, j) is not None:
            return (2 * v + 1, eg.explain_diseq_ids(i, j))
        return None

    def _propagate_entailed(self, vars_):
        for v in vars_:
            if self.values[2 * v] != 0:
                continue
            e = self.entailed(v)
            if e is not None:
                self.n_theory_props += 1
                self.theory_propagate(e[0], e[1])

    # -- search -------------------------------------------------------------

    def _apply(self, act) -> Optional[str]:
        kind = act[0]
        if kind == "learn":
            self.add_clause_codes(act[1], learned=True)
        elif kind == "decide":
            self.decide_code(act[1])
        elif kind == "conflict":
            if not self.analyze_codes(act[1]):
                return UNSAT
        elif kind == "lemma":
            confl = self.add_clause_codes(act[1], learned=True)
            if confl is not None:
                if not self.analyze_codes(confl):
                    return UNSAT
            else:
                self._propagate_entailed([c >> 1 for c in act[1][1:]])
        elif kind == "split":
            s, t = act[1], act[2]
            v = self.var_of_atom(s, t)
            self.phase[v] = 1
            self.add_clause_codes([2 * v, 2 * v + 1], learned=True)
            if self.values[2 * v] == 0:
                e = self.entailed(v)
                if e is not None:
                    self.theory_propagate(e[0], e[1])
                else:
                    self.decide_code(2 * v)
        elif kind == "unknown":
            return UNKNOWN
        else:
            raise ValueError(kind)
        return None

    def _decide_next(self) -> bool:
        v = self.next_unassigned()
        if v is None:
            return False
        if v in self.fcc.card_info:
            self.decide_code(2 * v + (0 if self.fcc.card_phase(v) else 1))
            return True
        e = self.entailed(v)
        if e is not None:
            self.n_theory_props += 1
            self.theory_propagate(e[0], e[1])
            return True
        self.decide_code(2 * v + (0 if self.phase[v] else 1))
        return True

    def check(self, deadline: Optional[float] = None) -> str:
        steps = 0
        if self.pending_conflict is not None:
            confl, self.pending_conflict = self.pending_conflict, None
            if not self.analyze_codes(confl):
                return UNSAT
        while True:
            if self.inconsistent:
                return UNSAT
            steps += 1
            if deadline is not None and steps & 63 == 0 and time.monotonic() > deadline:
                return UNKNOWN
            confl = self._propagate()
            if confl is not None:
                if not self.analyze_codes(confl):
                    return UNSAT
                continue
            act = self.fcc.weak_effort()
            if act is not None:
                r = self._apply(act)
                if r is not None:
                    return r
                continue
            if self._decide_next():
                continue
            act = self.fcc.strong_effort()
            if act is None:
                return SAT
            r = self._apply(act)
            if r is not None:
                return r

    # -- inspection ---------------------------------------------------------

    def is_true(self, l: Literal) -> bool:
        return self.value(l) is True

    def sort_cardinality(self, sort) -> int:
        return self.egraph.num_classes(sort)
