"""Quantified formulas over the term language.

Atoms are equalities between terms; a boolean term ``p`` is the atom
``p ≈ true``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .kernel import Literal, Term, TermBank, apply_subst


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __repr__(self):
        return "⊤" if self.value else "⊥"


TOP = Const(True)
BOT = Const(False)


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.rhs.id < self.lhs.id:
            lhs, rhs = self.rhs, self.lhs
            object.__setattr__(self, "lhs", lhs)
            object.__setattr__(self, "rhs", rhs)

    def literal(self, pos=True) -> Literal:
        return Literal(pos, self.lhs, self.rhs)

    def __repr__(self):
        return repr(self.literal())


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __repr__(self):
        return "¬(%r)" % (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]

    def __repr__(self):
        return "(%s)" % " ∧ ".join(map(repr, self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]

    def __repr__(self):
        return "(%s)" % " ∨ ".join(map(repr, self.args))


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: Tuple[Term, ...]
    body: Formula

    def __repr__(self):
        return "∀%s. %r" % (" ".join(map(repr, self.vars)), self.body)


@dataclass(frozen=True)
class Exists(Formula):
    vars: Tuple[Term, ...]
    body: Formula

    def __repr__(self):
        return "∃%s. %r" % (" ".join(map(repr, self.vars)), self.body)


def atom(bank: TermBank, t: Term) -> Formula:
    return Eq(t, bank.TRUE)


def lit_formula(l: Literal) -> Formula:
    e = Eq(l.lhs, l.rhs)
    return e if l.pos else Not(e)


def free_vars(f: Formula) -> set:
    if isinstance(f, Eq):
        out = set(f.lhs.free_vars())
        out.update(f.rhs.free_vars())
        return out
    if isinstance(f, Const):
        return set()
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = set()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, (Implies, Iff)):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - set(f.vars)
    raise TypeError(f)


def substitute(bank: TermBank, f: Formula, sigma) -> Formula:
    if not sigma:
        return f
    if isinstance(f, Eq):
        return Eq(apply_subst(bank, f.lhs, sigma), apply_subst(bank, f.rhs, sigma))
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(substitute(bank, f.arg, sigma))
    if isinstance(f, And):
        return And(tuple(substitute(bank, a, sigma) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute(bank, a, sigma) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(bank, f.lhs, sigma), substitute(bank, f.rhs, sigma))
    if isinstance(f, Iff):
        return Iff(substitute(bank, f.lhs, sigma), substitute(bank, f.rhs, sigma))
    if isinstance(f, (Forall, Exists)):
        inner = {x: t for x, t in sigma.items() if x not in f.vars}
        return type(f)(f.vars, substitute(bank, f.body, inner))
    raise TypeError(f)


def subterms(f: Formula):
    """All terms occurring in ``f`` (pre-order, left to right)."""
    if isinstance(f, Eq):
        yield from f.lhs.subterms()
        yield from f.rhs.subterms()
    elif isinstance(f, Not):
        yield from subterms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from subterms(a)
    elif isinstance(f, (Implies, Iff)):
        yield from subterms(f.lhs)
        yield from subterms(f.rhs)
    elif isinstance(f, (Forall, Exists)):
        yield from subterms(f.body)


def has_quantifier(f: Formula) -> bool:
    if isinstance(f, (Forall, Exists)):
        return True
    if isinstance(f, Not):
        return has_quantifier(f.arg)
    if isinstance(f, (And, Or)):
        return any(has_quantifier(a) for a in f.args)
    if isinstance(f, (Implies, Iff)):
        return has_quantifier(f.lhs) or has_quantifier(f.rhs)
    return False
