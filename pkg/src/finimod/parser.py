"""S-expression input language.

Accepted commands: ``declare-sort`` (arity 0 only), ``declare-fun``,
``declare-const``, ``assert``, ``check-sat`` (at most once), ``get-model``
and ``set-option``.  Formulas use ``= not and or => forall exists`` and
boolean applications; ``(= p q)`` between booleans is read as ``⇔``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .formula import (BOT, TOP, And, Eq, Exists, Forall, Formula, Iff, Implies,
                      Not, Or, atom)
from .kernel import SortError, Term, TermBank

KEYWORDS = ("declare-sort", "declare-fun", "declare-const", "assert",
            "check-sat", "get-model", "set-option")
_LOGIC = ("=", "not", "and", "or", "=>", "forall", "exists", "true", "false")


class ParseError(ValueError):
    def __init__(self, msg, line=0, col=0):
        super().__init__("%d:%d: %s" % (line, col, msg))
        self.msg = msg
        self.line = line
        self.col = col


class Sym(str):
    """Atom token carrying its source position."""
    line = 0
    col = 0


class SList(list):
    line = 0
    col = 0


def _tok(cls, value, line, col):
    t = cls(value)
    t.line, t.col = line, col
    return t


def read_sexps(text: str) -> List:
    """Tokenize and read all top-level S-expressions."""
    out: List = []
    stack: List[SList] = []
    i, n = 0, len(text)
    line, col = 1, 1

    def adv(k):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line, col = line + 1, 1
            else:
                col += 1
            i += 1

    def emit(x):
        if stack:
            stack[-1].append(x)
        else:
            out.append(x)

    while i < n:
        ch = text[i]
        if ch.isspace():
            adv(1)
        elif ch == ";":
            while i < n and text[i] != "\n":
                adv(1)
        elif ch == "(":
            stack.append(_tok(SList, [], line, col))
            adv(1)
        elif ch == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            adv(1)
            emit(stack.pop())
        elif ch == '"':
            l0, c0 = line, col
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ParseError("unterminated string", l0, c0)
            s = text[i:j + 1]
            adv(j + 1 - i)
            emit(_tok(Sym, s, l0, c0))
        elif ch == "|":
            l0, c0 = line, col
            j = text.find("|", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted symbol", l0, c0)
            s = text[i + 1:j]
            adv(j + 1 - i)
            emit(_tok(Sym, s, l0, c0))
        else:
            l0, c0 = line, col
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"|':
                j += 1
            s = text[i:j]
            adv(j - i)
            emit(_tok(Sym, s, l0, c0))
    if stack:
        s = stack[-1]
        raise ParseError("unbalanced '('", s.line, s.col)
    return out


def strip(x):
    """Position-free copy: nested tuples of plain strings."""
    if isinstance(x, list):
        return tuple(strip(y) for y in x)
    return str(x)


def _pos(x):
    return getattr(x, "line", 0), getattr(x, "col", 0)


def _err(msg, at):
    return ParseError(msg, *_pos(at))


def _sexp_text(x) -> str:
    if isinstance(x, tuple):
        return "(" + " ".join(_sexp_text(y) for y in x) + ")"
    return x


@dataclass(frozen=True)
class Command:
    kind: str
    args: Tuple

    def text(self) -> str:
        return _sexp_text((self.kind,) + self.args)


@dataclass
class Script:
    commands: List[Command] = field(default_factory=list)
    bank: TermBank = field(default=None, compare=False, repr=False)
    assertions: List[Formula] = field(default_factory=list, compare=False, repr=False)
    options: Dict[str, str] = field(default_factory=dict, compare=False)
    check_sat: bool = field(default=False, compare=False)
    get_model: bool = field(default=False, compare=False)

    def text(self) -> str:
        return "".join(c.text() + "\n" for c in self.commands)

    def formula(self) -> Formula:
        if not self.assertions:
            return TOP
        if len(self.assertions) == 1:
            return self.assertions[0]
        return And(tuple(self.assertions))


class _Elaborator:
    def __init__(self):
        self.bank = TermBank()

    def sort(self, x):
        if isinstance(x, list):
            raise _err("expected a sort name", x)
        s = self.bank.sort_by_name.get(str(x))
        if s is None:
            raise _err("unknown sort %s" % x, x)
        return s

    def symbol(self, x, what="symbol"):
        if isinstance(x, list):
            raise _err("expected a %s" % what, x)
        return str(x)

    def declare(self, name_tok, args, ret):
        name = str(name_tok)
        if name in _LOGIC or name in self.bank.decl_by_name or name in KEYWORDS:
            raise _err("symbol %s already declared or reserved" % name, name_tok)
        self.bank.declare_fun(name, args, ret)

    # -- terms and formulas ----------------------------------------------

    def term(self, x, env) -> Term:
        b = self.bank
        if not isinstance(x, list):
            name = str(x)
            if name in env:
                return env[name]
            if name == "true":
                return b.TRUE
            if name == "false":
                return b.FALSE
            d = b.decl_by_name.get(name)
            if d is None or d.kind != "user":
                raise _err("undeclared symbol %s" % name, x)
            if d.arity:
                raise _err("%s expects %d arguments" % (name, d.arity), x)
            return b.mk_app(d, [])
        if not x:
            raise _err("empty application", x)
        head = x[0]
        if isinstance(head, list):
            raise _err("expected a function symbol", head)
        name = str(head)
        if name in _LOGIC:
            raise _err("formula %s used where a term is expected" % name, head)
        d = b.decl_by_name.get(name)
        if d is None or d.kind != "user":
            raise _err("undeclared symbol %s" % name, head)
        args = [self.term(a, env) for a in x[1:]]
        try:
            return b.mk_app(d, args)
        except SortError as e:
            raise _err(str(e), x)

    def _is_formula_head(self, x, env) -> bool:
        if isinstance(x, list):
            return bool(x) and not isinstance(x[0], list) and str(x[0]) in _LOGIC
        return False

    def _is_bool(self, x, env) -> bool:
        if self._is_formula_head(x, env):
            return True
        if not isinstance(x, list) and str(x) in ("true", "false"):
            return True
        return self.term(x, env).sort.is_bool

    def formula(self, x, env) -> Formula:
        b = self.bank
        if not isinstance(x, list):
            if str(x) == "true":
                return TOP
            if str(x) == "false":
                return BOT
            t = self.term(x, env)
            if not t.sort.is_bool:
                raise _err("expected a boolean, got sort %s" % t.sort.name, x)
            return atom(b, t)
        if not x:
            raise _err("empty formula", x)
        head = x[0]
        op = None if isinstance(head, list) else str(head)
        args = x[1:]
        if op == "not":
            self._arity(x, 1)
            return Not(self.formula(args[0], env))
        if op in ("and", "or"):
            if not args:
                return TOP if op == "and" else BOT
            fs = tuple(self.formula(a, env) for a in args)
            if len(fs) == 1:
                return fs[0]
            return And(fs) if op == "and" else Or(fs)
        if op == "=>":
            if len(args) < 2:
                raise _err("=> expects at least 2 arguments", x)
            fs = [self.formula(a, env) for a in args]
            out = fs[-1]
            for f in reversed(fs[:-1]):
                out = Implies(f, out)
            return out
        if op == "=":
            self._arity(x, 2)
            l, r = args
            if self._is_bool(l, env) or self._is_bool(r, env):
                return Iff(self.formula(l, env), self.formula(r, env))
            s, t = self.term(l, env), self.term(r, env)
            if s.sort is not t.sort:
                raise _err("= between sorts %s and %s" % (s.sort.name, t.sort.name), x)
            return Eq(s, t)
        if op in ("forall", "exists"):
            self._arity(x, 2)
            binds = args[0]
            if not isinstance(binds, list) or not binds:
                raise _err("expected a non-empty binder list", binds)
            inner = dict(env)
            vs = []
            for bd in binds:
                if not isinstance(bd, list) or len(bd) != 2 or isinstance(bd[0], list):
                    raise _err("expected (name Sort)", bd)
                s = self.sort(bd[1])
                if s.is_bool:
                    raise _err("quantified variables of sort Bool are not supported", bd)
                v = b.mk_var(str(bd[0]), s)
                inner[str(bd[0])] = v
                vs.append(v)
            body = self.formula(args[1], inner)
            return (Forall if op == "forall" else Exists)(tuple(vs), body)
        t = self.term(x, env)
        if not t.sort.is_bool:
            raise _err("expected a boolean, got sort %s" % t.sort.name, x)
        return atom(b, t)

    @staticmethod
    def _arity(x, k):
        if len(x) != k + 1:
            raise _err("%s expects %d argument%s" % (x[0], k, "" if k == 1 else "s"), x)


def parse(text: str) -> Script:
    el = _Elaborator()
    script = Script(bank=el.bank)
    for x in read_sexps(text):
        if not isinstance(x, list) or not x or isinstance(x[0], list):
            raise _err("expected a command", x)
        kw = str(x[0])
        args = x[1:]
        if kw == "declare-sort":
            if len(args) not in (1, 2) or isinstance(args[0], list):
                raise _err("expected (declare-sort S 0)", x)
            if len(args) == 2 and str(args[1]) != "0":
                raise _err("only arity-0 sorts are supported", args[1])
            name = str(args[0])
            if name in el.bank.sort_by_name:
                raise _err("sort %s already declared" % name, args[0])
            el.bank.declare_sort(name)
            args = (args[0], _tok(Sym, "0", x.line, x.col))
        elif kw == "declare-fun":
            if len(args) != 3 or not isinstance(args[1], list):
                raise _err("expected (declare-fun f (S...) R)", x)
            el.symbol(args[0])
            el.declare(args[0], [el.sort(s) for s in args[1]], el.sort(args[2]))
        elif kw == "declare-const":
            if len(args) != 2:
                raise _err("expected (declare-const c S)", x)
            el.symbol(args[0])
            el.declare(args[0], [], el.sort(args[1]))
        elif kw == "assert":
            if len(args) != 1:
                raise _err("assert expects one formula", x)
            script.assertions.append(el.formula(args[0], {}))
        elif kw == "check-sat":
            if args:
                raise _err("check-sat takes no arguments", x)
            if script.check_sat:
                raise _err("at most one check-sat", x)
            script.check_sat = True
        elif kw == "get-model":
            if args:
                raise _err("get-model takes no arguments", x)
            script.get_model = True
        elif kw == "set-option":
            if len(args) != 2 or isinstance(args[0], list) or not str(args[0]).startswith(":"):
                raise _err("expected (set-option :key value)", x)
            script.options[str(args[0])[1:]] = strip(args[1]) if isinstance(args[1], list) \
                else str(args[1]).strip('"')
        else:
            raise _err("unknown command %s" % kw, x[0])
        script.commands.append(Command(kw, strip(list(args))))
    return script


def parse_file(path: str) -> Script:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
