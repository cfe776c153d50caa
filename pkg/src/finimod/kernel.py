"""Sorted first-order syntax: sorts, declarations, hash-consed terms,
literals, clauses, substitutions and syntactic unification."""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Optional, Tuple

UNINTERPRETED = "uninterpreted"
BOOLEAN = "boolean"


class SortError(TypeError):
    pass


class Sort:
    __slots__ = ("id", "name", "kind")

    def __init__(self, id: int, name: str, kind: str):
        self.id = id
        self.name = name
        self.kind = kind

    @property
    def is_bool(self) -> bool:
        return self.kind == BOOLEAN

    def __repr__(self):
        return self.name


class FuncDecl:
    """Function symbol ``name : arg_sorts -> ret_sort``.

    ``kind`` distinguishes user symbols from solver-introduced ones:
    ``user``, ``skolem``, ``proxy``, ``tseitin``, ``card``, ``builtin``
    (true/false), ``domain`` (fresh domain elements).
    """

    __slots__ = ("id", "name", "arg_sorts", "ret_sort", "kind", "info")

    def __init__(self, id, name, arg_sorts, ret_sort, kind="user", info=None):
        self.id = id
        self.name = name
        self.arg_sorts = tuple(arg_sorts)
        self.ret_sort = ret_sort
        self.kind = kind
        self.info = info

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self):
        return self.name


class Term:
    """Hash-consed term; two terms are structurally equal iff they are the
    same object, so the default identity ``__eq__``/``__hash__`` are kept."""

    __slots__ = ("id", "decl", "args", "sort", "name", "ground", "size")

    def __init__(self, id, decl, args, sort, name=None):
        self.id = id
        self.decl = decl
        self.args = args
        self.sort = sort
        self.name = name
        if decl is None:
            self.ground = False
            self.size = 1
        else:
            self.ground = all(a.ground for a in args)
            self.size = 1 + sum(a.size for a in args)

    @property
    def is_var(self) -> bool:
        return self.decl is None

    def subterms(self) -> Iterator["Term"]:
        """Pre-order, left to right, with repetitions removed."""
        seen = set()
        stack = [self]
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            yield t
            stack.extend(reversed(t.args))

    def free_vars(self) -> List["Term"]:
        return [t for t in self.subterms() if t.decl is None]

    def __repr__(self):
        if self.decl is None:
            return self.name
        if not self.args:
            return self.decl.name
        return "%s(%s)" % (self.decl.name, ", ".join(map(repr, self.args)))

    def __lt__(self, other):
        return self.id < other.id


class Literal:
    """``lhs ≈ rhs`` or its negation; (lhs, rhs) is ordered by term id so
    a literal and its complement share one atom."""

    __slots__ = ("pos", "lhs", "rhs", "_hash")

    def __init__(self, pos: bool, lhs: Term, rhs: Term):
        if lhs.sort is not rhs.sort:
            raise SortError("literal sides differ in sort: %r : %r vs %r : %r"
                            % (lhs, lhs.sort, rhs, rhs.sort))
        if rhs.id < lhs.id:
            lhs, rhs = rhs, lhs
        self.pos = bool(pos)
        self.lhs = lhs
        self.rhs = rhs
        self._hash = hash((self.pos, lhs.id, rhs.id))

    @property
    def atom(self) -> Tuple[Term, Term]:
        return (self.lhs, self.rhs)

    def negate(self) -> "Literal":
        return Literal(not self.pos, self.lhs, self.rhs)

    __invert__ = negate

    def __eq__(self, other):
        return (isinstance(other, Literal) and self.pos == other.pos
                and self.lhs is other.lhs and self.rhs is other.rhs)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        lhs, rhs = self.lhs, self.rhs
        if lhs.sort.is_bool and lhs.decl is not None and lhs.decl.kind == "builtin":
            return repr(rhs) if (lhs.decl.name == "true") == self.pos else "¬%r" % rhs
        return "%r %s %r" % (lhs, "≈" if self.pos else "≉", rhs)


class Clause(tuple):
    """Duplicate-free disjunction of literals (the empty clause is ⊥)."""

    def __new__(cls, lits: Iterable[Literal] = ()):
        seen = []
        for l in lits:
            if l not in seen:
                seen.append(l)
        return super().__new__(cls, seen)

    def key(self) -> frozenset:
        return frozenset(self)

    def is_tautology(self) -> bool:
        s = set(self)
        return any(l.negate() in s for l in self)

    def __repr__(self):
        if not self:
            return "⊥"
        return " ∨ ".join(map(repr, self))


Substitution = Dict[Term, Term]


class TermBank:
    """Per-problem interning arena for sorts, declarations and terms."""

    def __init__(self):
        self.sorts: List[Sort] = []
        self.sort_by_name: Dict[str, Sort] = {}
        self.decls: List[FuncDecl] = []
        self.decl_by_name: Dict[str, FuncDecl] = {}
        self.terms: List[Term] = []
        self._apps: Dict[tuple, Term] = {}
        self._vars: Dict[tuple, Term] = {}
        self._fresh = 0
        self.BOOL = self._new_sort("Bool", BOOLEAN)
        self.true_decl = self.declare_fun("true", [], self.BOOL, kind="builtin")
        self.false_decl = self.declare_fun("false", [], self.BOOL, kind="builtin")
        self.TRUE = self.mk_app(self.true_decl, [])
        self.FALSE = self.mk_app(self.false_decl, [])

    def _new_sort(self, name, kind):
        s = Sort(len(self.sorts), name, kind)
        self.sorts.append(s)
        self.sort_by_name[name] = s
        return s

    def declare_sort(self, name: str) -> Sort:
        if name in self.sort_by_name:
            raise ValueError("sort %s already declared" % name)
        return self._new_sort(name, UNINTERPRETED)

    def declare_fun(self, name, arg_sorts, ret_sort, kind="user", info=None) -> FuncDecl:
        if name in self.decl_by_name:
            raise ValueError("symbol %s already declared" % name)
        d = FuncDecl(len(self.decls), name, arg_sorts, ret_sort, kind, info)
        self.decls.append(d)
        self.decl_by_name[name] = d
        return d

    def fresh_name(self, prefix: str) -> str:
        while True:
            self._fresh += 1
            name = "%s!%d" % (prefix, self._fresh)
            if name not in self.decl_by_name:
                return name

    def fresh_const(self, prefix: str, sort: Sort, kind: str) -> Term:
        d = self.declare_fun(self.fresh_name(prefix), [], sort, kind=kind)
        return self.mk_app(d, [])

    def uninterpreted_sorts(self) -> List[Sort]:
        return [s for s in self.sorts if s.kind == UNINTERPRETED]

    def mk_app(self, decl: FuncDecl, args) -> Term:
        args = tuple(args)
        key = (decl.id,) + tuple(a.id for a in args)
        t = self._apps.get(key)
        if t is not None:
            return t
        if len(args) != decl.arity:
            raise SortError("%s expects %d arguments, got %d"
                            % (decl.name, decl.arity, len(args)))
        for i, (a, s) in enumerate(zip(args, decl.arg_sorts)):
            if a.sort is not s:
                raise SortError("argument %d of %s has sort %s, expected %s"
                                % (i + 1, decl.name, a.sort, s))
        t = Term(len(self.terms), decl, args, decl.ret_sort)
        self.terms.append(t)
        self._apps[key] = t
        return t

    def mk_var(self, name: str, sort: Sort) -> Term:
        key = (name, sort.id)
        t = self._vars.get(key)
        if t is None:
            t = Term(len(self.terms), None, (), sort, name)
            self.terms.append(t)
            self._vars[key] = t
        return t

    def const(self, name: str) -> Term:
        return self.mk_app(self.decl_by_name[name], [])

    def app(self, name: str, *args: Term) -> Term:
        return self.mk_app(self.decl_by_name[name], args)

    def eq(self, s: Term, t: Term, pos: bool = True) -> Literal:
        return Literal(pos, s, t)

    def atom(self, t: Term, pos: bool = True) -> Literal:
        """Boolean term ``t`` as the literal ``t ≈ true``."""
        return Literal(pos, t, self.TRUE)


def apply_subst(bank: TermBank, t: Term, sigma: Substitution) -> Term:
    if not sigma or t.ground:
        return t
    if t.decl is None:
        return sigma.get(t, t)
    return bank.mk_app(t.decl, [apply_subst(bank, a, sigma) for a in t.args])


def _occurs(x: Term, t: Term, sigma: Substitution) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        if u.decl is None:
            if u is x:
                return True
            if u in sigma:
                stack.append(sigma[u])
        else:
            stack.extend(u.args)
    return False


def mgu(bank: TermBank, t1: Term, t2: Term) -> Optional[Substitution]:
    """Most general unifier of ``t1`` and ``t2`` (idempotent), or None."""
    if t1.sort is not t2.sort:
        raise SortError("mgu of terms of different sorts")
    sigma: Substitution = {}

    def walk(t):
        while t.decl is None and t in sigma:
            t = sigma[t]
        return t

    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a), walk(b)
        if a is b:
            continue
        if a.decl is None:
            if _occurs(a, b, sigma):
                return None
            sigma[a] = b
        elif b.decl is None:
            if _occurs(b, a, sigma):
                return None
            sigma[b] = a
        elif a.decl is not b.decl:
            return None
        else:
            stack.extend(zip(a.args, b.args))
    # resolve bindings to an idempotent substitution
    out = {}
    for x in sigma:
        out[x] = _resolve(bank, x, sigma)
    return out


def _resolve(bank, t, sigma):
    if t.decl is None:
        if t in sigma:
            return _resolve(bank, sigma[t], sigma)
        return t
    if t.ground:
        return t
    return bank.mk_app(t.decl, [_resolve(bank, a, sigma) for a in t.args])
