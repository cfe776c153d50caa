"""CDCL engine over equality atoms.

Atoms are ordered pairs of terms; atom ``v`` has literal codes ``2v``
(positive) and ``2v+1`` (negative).  Decisions and propagations live on a
single trail with per-level start positions.  Conflict analysis is first
UIP; there are no restarts and no activity heuristics.
"""

from __future__ import annotations

from array import array
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import _kernels
from .kernel import Clause, Literal, Term

DECISION = -1
THEORY = -2
UNASSIGNED = -3
AXIOM = -4


class SatCore:
    def __init__(self):
        self.atoms: List[Tuple[Term, Term]] = []
        self.atom_index: Dict[Tuple[int, int], int] = {}
        self.lit_objs: List[Literal] = []
        self.values = array("b")
        self.levels = array("i")
        self.reasons = array("i")
        self.phase = array("b")
        self.trail = array("i")
        self.trail_len = 0
        self.qhead = 0
        self.trail_lim: List[int] = []
        self.lits = array("i")
        self.start = array("i")
        self.size = array("i")
        self.learned: List[bool] = []
        self.clause_keys: Dict[frozenset, int] = {}
        self.watches: List[list] = []
        self.theory_reason: Dict[int, tuple] = {}
        self.inconsistent = False
        self.pending_conflict = None
        self._dpos = 0
        self.n_decisions = 0
        self.n_conflicts = 0
        self.n_learned = 0
        self.n_propagations = 0

    # -- atoms and literals -------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.atoms)

    @property
    def level(self) -> int:
        return len(self.trail_lim)

    def var_of_atom(self, lhs: Term, rhs: Term) -> int:
        if rhs.id < lhs.id:
            lhs, rhs = rhs, lhs
        key = (lhs.id, rhs.id)
        v = self.atom_index.get(key)
        if v is None:
            v = len(self.atoms)
            self.atoms.append((lhs, rhs))
            self.atom_index[key] = v
            self.lit_objs.append(Literal(True, lhs, rhs))
            self.lit_objs.append(Literal(False, lhs, rhs))
            self.values.extend((0, 0))
            self.levels.append(-1)
            self.reasons.append(UNASSIGNED)
            self.phase.append(0)
            self.trail.append(0)
            self.watches.append([])
            self.watches.append([])
            self._on_new_atom(v)
        return v

    def find_var(self, lhs: Term, rhs: Term) -> Optional[int]:
        if rhs.id < lhs.id:
            lhs, rhs = rhs, lhs
        return self.atom_index.get((lhs.id, rhs.id))

    def code(self, l: Literal) -> int:
        return 2 * self.var_of_atom(l.lhs, l.rhs) + (0 if l.pos else 1)

    def literal(self, code: int) -> Literal:
        return self.lit_objs[code]

    def value(self, l: Literal) -> Optional[bool]:
        v = self.find_var(l.lhs, l.rhs)
        if v is None:
            return None
        x = self.values[2 * v + (0 if l.pos else 1)]
        return None if x == 0 else x == 1

    def trail_codes(self) -> List[int]:
        return list(self.trail[:self.trail_len])

    def trail_literals(self) -> List[Literal]:
        return [self.lit_objs[c] for c in self.trail[:self.trail_len]]

    def decision_codes(self) -> List[int]:
        return [self.trail[p] for p in self.trail_lim]

    # -- hooks --------------------------------------------------------------

    def _on_new_atom(self, v):
        pass

    def _on_new_level(self):
        pass

    def _on_backjump(self, level):
        pass

    # -- assignment ---------------------------------------------------------

    def _assign(self, code, reason):
        self.values[code] = 1
        self.values[code ^ 1] = -1
        v = code >> 1
        self.levels[v] = len(self.trail_lim)
        self.reasons[v] = reason
        self.trail[self.trail_len] = code
        self.trail_len += 1

    def decide_code(self, code):
        if self.values[code] != 0:
            raise AssertionError("decision on assigned literal %r" % self.lit_objs[code])
        self.trail_lim.append(self.trail_len)
        self._on_new_level()
        self.n_decisions += 1
        self._assign(code, DECISION)

    def decide(self, l: Literal):
        self.decide_code(self.code(l))

    def theory_propagate(self, code, explanation: Sequence[int]):
        """Assign ``code`` with a theory reason: the true literals
        ``explanation`` (all earlier on the trail) entail it."""
        self._assign(code, THEORY)
        self.theory_reason[code >> 1] = tuple(explanation)

    def backjump(self, level: int):
        if level >= len(self.trail_lim):
            return
        pos = self.trail_lim[level]
        values, reasons, trail = self.values, self.reasons, self.trail
        tr = self.theory_reason
        dpos = self._dpos
        for i in range(self.trail_len - 1, pos - 1, -1):
            c = trail[i]
            values[c] = 0
            values[c ^ 1] = 0
            v = c >> 1
            if reasons[v] == THEORY:
                del tr[v]
            reasons[v] = UNASSIGNED
            if v < dpos:
                dpos = v
        self._dpos = dpos
        self.trail_len = pos
        if self.qhead > pos:
            self.qhead = pos
        del self.trail_lim[level:]
        self._on_backjump(level)

    def next_unassigned(self) -> Optional[int]:
        values = self.values
        v = self._dpos
        n = len(self.atoms)
        while v < n and values[2 * v] != 0:
            v += 1
        self._dpos = v
        return v if v < n else None

    # -- clauses ------------------------------------------------------------

    def clause_codes(self, c: int) -> List[int]:
        s = self.start[c]
        return list(self.lits[s:s + self.size[c]])

    def clause(self, c: int) -> Clause:
        return Clause(self.lit_objs[x] for x in self.clause_codes(c))

    @property
    def num_clauses(self) -> int:
        return len(self.start)

    def _store(self, codes, learned) -> int:
        idx = len(self.start)
        self.start.append(len(self.lits))
        self.size.append(len(codes))
        self.lits.extend(codes)
        self.learned.append(learned)
        self.watches[codes[0]].append(idx)
        self.watches[codes[1]].append(idx)
        return idx

    def add_clause(self, c: Clause, kind: str = "input"):
        """Register a clause; returns False if it was a duplicate."""
        codes = [self.code(l) for l in c]
        if frozenset(codes) in self.clause_keys:
            return False
        confl = self.add_clause_codes(codes, learned=(kind == "learned"))
        if confl is not None:
            self.pending_conflict = confl
        return True

    def add_clause_codes(self, codes: Iterable[int], learned=False) -> Optional[list]:
        """Add a clause under the current trail, repairing the trail so
        watches stay sound.  Returns a conflicting clause (list of codes)
        that still needs analysis, or None.  Duplicates are ignored."""
        codes = list(dict.fromkeys(codes))
        key = frozenset(codes)
        if key in self.clause_keys:
            return None
        cs = set(codes)
        if any((c ^ 1) in cs for c in codes):
            self.clause_keys[key] = -1
            return None
        if learned:
            self.n_learned += 1
        values, levels = self.values, self.levels
        if not codes:
            self.clause_keys[key] = -1
            self.inconsistent = True
            return []

        def rank(c):
            x = values[c]
            if x == 1:
                return (0, levels[c >> 1])
            if x == 0:
                return (1, 0)
            return (2, -levels[c >> 1])
        codes.sort(key=rank)
        if len(codes) == 1:
            self.clause_keys[key] = -1
            c = codes[0]
            if values[c] == 1 and levels[c >> 1] == 0:
                return None
            if values[c] == -1 and levels[c >> 1] == 0:
                self.inconsistent = True
                return [c]
            self.backjump(0)
            self._assign(c, AXIOM)
            return None
        idx = self._store(codes, learned)
        self.clause_keys[key] = idx
        c0, c1 = codes[0], codes[1]
        v0, v1 = values[c0], values[c1]
        if v1 != -1:
            return None
        l1 = levels[c1 >> 1]
        if v0 == 1:
            if levels[c0 >> 1] <= l1:
                return None
            self.backjump(l1)
            self._assign(c0, idx)
            return None
        if v0 == 0:
            self.backjump(l1)
            self._assign(c0, idx)
            return None
        # all literals false
        l0 = levels[c0 >> 1]
        if l0 == 0:
            self.inconsistent = True
            return codes
        self.backjump(l0)
        if l1 < l0:
            self.backjump(l1)
            self._assign(c0, idx)
            return None
        return codes

    # -- propagation --------------------------------------------------------

    def propagate_codes(self) -> Optional[int]:
        before = self.trail_len
        confl, self.qhead, self.trail_len = _kernels.propagate(
            self.values, self.levels, self.reasons, self.trail, self.trail_len,
            self.qhead, self.lits, self.start, self.size, self.watches,
            len(self.trail_lim))
        self.n_propagations += self.trail_len - before
        return None if confl < 0 else confl

    def propagate_units(self) -> Optional[Clause]:
        if self.pending_conflict is not None:
            codes, self.pending_conflict = self.pending_conflict, None
            return Clause(self.lit_objs[x] for x in codes)
        c = self.propagate_codes()
        return None if c is None else self.clause(c)

    # -- conflict analysis --------------------------------------------------

    def _reason_codes(self, v, p):
        r = self.reasons[v]
        if r >= 0:
            s = self.start[r]
            return [x for x in self.lits[s:s + self.size[r]] if x != p]
        if r == THEORY:
            return [x ^ 1 for x in self.theory_reason[v]]
        return []

    def analyze_codes(self, conflict: Sequence[int]) -> bool:
        """First-UIP learning and backjump; False iff the conflict is at
        level 0 (refutation)."""
        self.n_conflicts += 1
        levels = self.levels
        if not conflict:
            self.inconsistent = True
            return False
        top = max(levels[c >> 1] for c in conflict)
        if top == 0:
            self.inconsistent = True
            return False
        if top < self.level:
            self.backjump(top)
        at_top = [c for c in conflict if levels[c >> 1] == top]
        if len(at_top) == 1:
            learnt = at_top + [c for c in conflict if levels[c >> 1] != top]
        else:
            learnt = self._first_uip(conflict, top)
        self._learn_asserting(learnt)
        return True

    def _first_uip(self, conflict, cur):
        levels, trail = self.levels, self.trail
        seen = bytearray(len(self.atoms))
        learnt = [0]
        counter = 0
        idx = self.trail_len - 1
        reason = conflict
        while True:
            for q in reason:
                v = q >> 1
                if not seen[v] and levels[v] > 0:
                    seen[v] = 1
                    if levels[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            reason = self._reason_codes(v, p)
        learnt[0] = p ^ 1
        return learnt

    def _learn_asserting(self, learnt):
        levels = self.levels
        if len(learnt) == 1:
            self.backjump(0)
            key = frozenset(learnt)
            if key not in self.clause_keys:
                self.clause_keys[key] = -1
                self.n_learned += 1
            self._assign(learnt[0], AXIOM)
            return
        j = max(range(1, len(learnt)), key=lambda i: levels[learnt[i] >> 1])
        learnt[1], learnt[j] = learnt[j], learnt[1]
        bj = levels[learnt[1] >> 1]
        self.backjump(bj)
        key = frozenset(learnt)
        idx = self.clause_keys.get(key)
        if idx is None or idx < 0:
            self.n_learned += 1
            idx = self._store(learnt, True)
            self.clause_keys[key] = idx
        self._assign(learnt[0], idx)

    def analyze_and_backjump(self, conflict: Clause) -> bool:
        return self.analyze_codes([self.code(l) for l in conflict])

    # -- plain propositional search (no theory) -----------------------------

    def solve(self) -> bool:
        if self.inconsistent:
            return False
        while True:
            confl = self.propagate_codes()
            if confl is not None:
                if not self.analyze_codes(self.clause_codes(confl)):
                    return False
                continue
            v = self.next_unassigned()
            if v is None:
                return True
            self.decide_code(2 * v + (0 if self.phase[v] else 1))
