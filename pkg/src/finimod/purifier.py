"""Clausification with quantified subformulas abstracted by proxy atoms.

Positive occurrences of ``∀x̄ φ`` become a fresh boolean proxy ``a`` with
the side record ``a ⇔ ∀x̄ φ``; negative occurrences are Skolemized with
fresh constants.  Clausification distributes ``∨`` over ``∧`` and falls
back to definitional (Tseitin-style) clauses once a disjunction would
produce more than ``distribute_limit`` clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .formula import (And, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not,
                      Or, substitute)
from .kernel import Clause, FuncDecl, Literal, Term, TermBank


class PurifyError(ValueError):
    pass


@dataclass
class QuantRecord:
    proxy: FuncDecl
    vars: Tuple[Term, ...]
    body: Formula
    proxy_term: Term = field(repr=False, default=None)
    true_term: Term = field(repr=False, default=None)

    def proxy_literal(self, pos=True) -> Literal:
        return Literal(pos, self.proxy_term, self.true_term)

    def __repr__(self):
        return "%s ⇔ ∀%s. %r" % (self.proxy.name, " ".join(map(repr, self.vars)), self.body)


@dataclass
class PurifiedProblem:
    bank: TermBank
    clauses: List[Clause] = field(default_factory=list)
    quant_records: List[QuantRecord] = field(default_factory=list)
    skolems: List[FuncDecl] = field(default_factory=list)
    clause_keys: set = field(default_factory=set, repr=False)

    def add_clause(self, c: Clause) -> bool:
        k = c.key()
        if k in self.clause_keys:
            return False
        self.clause_keys.add(k)
        self.clauses.append(c)
        return True

    def is_ground(self) -> bool:
        return not self.quant_records

    def record_of(self, proxy: FuncDecl) -> QuantRecord:
        for q in self.quant_records:
            if q.proxy is proxy:
                return q
        raise KeyError(proxy)


def nnf(f: Formula, pos: bool = True) -> Formula:
    """Negation normal form without ``⇒``/``⇔``; merges nested ∀ prefixes."""
    if isinstance(f, Const):
        return f if pos else Const(not f.value)
    if isinstance(f, Eq):
        return f if pos else Not(f)
    if isinstance(f, Not):
        return nnf(f.arg, not pos)
    if isinstance(f, And):
        args = tuple(nnf(a, pos) for a in f.args)
        return And(args) if pos else Or(args)
    if isinstance(f, Or):
        args = tuple(nnf(a, pos) for a in f.args)
        return Or(args) if pos else And(args)
    if isinstance(f, Implies):
        return nnf(Or((Not(f.lhs), f.rhs)), pos)
    if isinstance(f, Iff):
        return nnf(And((Or((Not(f.lhs), f.rhs)), Or((f.lhs, Not(f.rhs))))), pos)
    if isinstance(f, (Forall, Exists)):
        universal = isinstance(f, Forall) == pos
        body = nnf(f.body, pos)
        cls = Forall if universal else Exists
        if isinstance(body, cls):
            return cls(tuple(f.vars) + tuple(body.vars), body.body)
        return cls(tuple(f.vars), body)
    raise TypeError(f)


class Purifier:
    def __init__(self, bank: TermBank, problem: PurifiedProblem = None,
                 distribute_limit: int = 64):
        self.bank = bank
        self.problem = problem if problem is not None else PurifiedProblem(bank)
        self.distribute_limit = distribute_limit
        self._proxies: Dict[Formula, QuantRecord] = {}
        self._tseitin: Dict[Formula, Term] = {}

    # -- quantifier abstraction ------------------------------------------

    def _check_vars(self, vars):
        for x in vars:
            if x.sort.is_bool:
                raise PurifyError("quantified variable %r has boolean sort" % x)

    def _proxy(self, f: Forall) -> Term:
        q = self._proxies.get(f)
        if q is None:
            self._check_vars(f.vars)
            t = self.bank.fresh_const("q", self.bank.BOOL, "proxy")
            q = QuantRecord(t.decl, tuple(f.vars), f.body, t, self.bank.TRUE)
            self._proxies[f] = q
            self.problem.quant_records.append(q)
        return q.proxy_term

    def _skolemize(self, f: Exists) -> Formula:
        self._check_vars(f.vars)
        sigma = {}
        for x in f.vars:
            k = self.bank.fresh_const("sk_" + x.name, x.sort, "skolem")
            self.problem.skolems.append(k.decl)
            sigma[x] = k
        return substitute(self.bank, f.body, sigma)

    def _abstract(self, f: Formula) -> Formula:
        if isinstance(f, (Const, Eq, Not)):
            return f
        if isinstance(f, And):
            return And(tuple(self._abstract(a) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(self._abstract(a) for a in f.args))
        if isinstance(f, Forall):
            return Eq(self._proxy(f), self.bank.TRUE)
        if isinstance(f, Exists):
            return self._abstract(self._skolemize(f))
        raise TypeError(f)

    # -- clausification ---------------------------------------------------

    def _lit_value(self, l: Literal):
        if l.lhs is l.rhs:
            return l.pos
        b = self.bank
        if {l.lhs, l.rhs} == {b.TRUE, b.FALSE}:
            return not l.pos
        return None

    def _cnf(self, f: Formula) -> List[List[Literal]]:
        if isinstance(f, Const):
            return [] if f.value else [[]]
        if isinstance(f, Eq):
            return [[f.literal(True)]]
        if isinstance(f, Not):
            return [[f.arg.literal(False)]]
        if isinstance(f, And):
            out = []
            for a in f.args:
                out.extend(self._cnf(a))
            return out
        if isinstance(f, Or):
            parts = [self._cnf(a) for a in f.args]
            size = 1
            for p in parts:
                size *= max(1, len(p))
            if size > self.distribute_limit:
                parts = [p if len(p) <= 1 else [[self._define(a, p)]]
                         for a, p in zip(f.args, parts)]
            acc = [[]]
            for p in parts:
                acc = [c + d for c in acc for d in p]
            return acc
        raise TypeError(f)

    def _define(self, f: Formula, clauses) -> Literal:
        t = self._tseitin.get(f)
        if t is None:
            t = self.bank.fresh_const("d", self.bank.BOOL, "tseitin")
            self._tseitin[f] = t
            neg = Literal(False, t, self.bank.TRUE)
            for c in clauses:
                self._emit([neg] + c)
        return Literal(True, t, self.bank.TRUE)

    def _emit(self, lits) -> Clause:
        out = []
        for l in lits:
            v = self._lit_value(l)
            if v is True:
                return None
            if v is None:
                out.append(l)
        c = Clause(out)
        if c.is_tautology():
            return None
        self.problem.add_clause(c)
        return c

    def clausify(self, f: Formula) -> List[Clause]:
        g = self._abstract(nnf(f))
        out = []
        for lits in self._cnf(g):
            c = self._emit(lits)
            if c is not None:
                out.append(c)
        return out

    # -- public ------------------------------------------------------------

    def purify(self, f: Formula) -> PurifiedProblem:
        self.clausify(f)
        return self.problem

    def instantiate(self, q: QuantRecord, sigma) -> List[Clause]:
        """Purified clauses of ``¬a ∨ body·σ``; nested quantifiers yield new
        records appended to the problem.  Returns only clauses that are new."""
        if set(sigma) != set(q.vars):
            raise PurifyError("substitution domain %r does not match %r"
                              % (sorted(sigma, key=lambda t: t.id), q.vars))
        for x, v in sigma.items():
            if not v.ground:
                raise PurifyError("non-ground instance %r for %r" % (v, x))
        before = len(self.problem.clauses)
        body = substitute(self.bank, q.body, sigma)
        self.clausify(Or((Not(Eq(q.proxy_term, self.bank.TRUE)), body)))
        return self.problem.clauses[before:]


def purify(bank: TermBank, f: Formula, **kw) -> PurifiedProblem:
    return Purifier(bank, **kw).purify(f)
