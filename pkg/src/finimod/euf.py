"""Backtrackable congruence closure with explanations.

Union by size without path compression keeps every mutation undoable
through the shared :class:`Journal`.  A proof forest records why classes
were merged (an asserted reason or a congruence between two applications)
so that equalities and conflicts can be explained by asserted reasons.
Entailed disequalities are not propagated.
"""

from __future__ import annotations

from typing import Dict, List

from .journal import Journal
from .kernel import Literal, Term, TermBank


class Cong:
    __slots__ = ("p", "q")

    def __init__(self, p, q):
        self.p = p
        self.q = q

    def __repr__(self):
        return "Cong(%d,%d)" % (self.p, self.q)


class Conflict(Exception):
    """Raised internally; :meth:`EGraph.assert_lit` returns the explanation."""

    def __init__(self, explanation):
        self.explanation = explanation


class EGraph:
    def __init__(self, bank: TermBank, journal: Journal = None, listener=None):
        self.bank = bank
        self.journal = journal if journal is not None else Journal()
        self.listener = listener
        self.nodes: List[Term] = []
        self.node_of: Dict[Term, int] = {}
        self.children: List[tuple] = []
        self.parent: List[int] = []
        self.size: List[int] = []
        self.next: List[int] = []
        self.minrep: List[int] = []
        self.use: List[list] = []
        self.diseqs: List[list] = []
        self.pf_parent: List[int] = []
        self.pf_reason: list = []
        self.table: dict = {}
        self.roots_by_sort: Dict[int, set] = {}
        self.merges = 0
        self.true_id = self.register(bank.TRUE)
        self.false_id = self.register(bank.FALSE)
        self._add_diseq(self.true_id, self.false_id, None)

    # -- union-find ---------------------------------------------------------

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            i = parent[i]
        return i

    def rep(self, t: Term) -> Term:
        i = self.node_of.get(t)
        if i is None:
            raise KeyError("term %r is not registered" % (t,))
        return self.nodes[self.minrep[self.find(i)]]

    def rep_id(self, i: int) -> int:
        return self.minrep[self.find(i)]

    def same(self, s: Term, t: Term) -> bool:
        i, j = self.node_of.get(s), self.node_of.get(t)
        if i is None or j is None:
            return s is t
        return self.find(i) == self.find(j)

    def class_members(self, i: int):
        start = i
        yield i
        i = self.next[i]
        while i != start:
            yield i
            i = self.next[i]

    # -- registration -------------------------------------------------------

    def register(self, t: Term) -> int:
        i = self.node_of.get(t)
        if i is not None:
            return i
        if not t.ground:
            raise ValueError("cannot register non-ground term %r" % (t,))
        kids = tuple(self.register(a) for a in t.args)
        J = self.journal
        i = len(self.nodes)
        for lst, v in ((self.nodes, t), (self.children, kids), (self.parent, i),
                       (self.size, 1), (self.next, i), (self.minrep, i),
                       (self.use, []), (self.diseqs, []), (self.pf_parent, i),
                       (self.pf_reason, None)):
            J.append(lst, v)
        J.dict_set(self.node_of, t, i)
        roots = self.roots_by_sort.get(t.sort.id)
        if roots is None:
            roots = self.roots_by_sort[t.sort.id] = set()
        J.set_add(roots, i)
        if self.listener is not None:
            self.listener.on_new_class(i, t.sort)
        if kids:
            for k in set(self.find(k) for k in kids):
                J.append(self.use[k], i)
            key = self._sig(i)
            q = self.table.get(key)
            if q is not None and self._sig(q) == key:
                self._merge_loop([(i, q, Cong(i, q))])
            else:
                J.dict_set(self.table, key, i)
        return i

    def _sig(self, i):
        t = self.nodes[i]
        return (t.decl.id,) + tuple(self.find(c) for c in self.children[i])

    # -- assertions -----------------------------------------------------------

    def assert_eq(self, s: Term, t: Term, reason):
        """Merge; returns None or a conflict explanation (set of reasons)."""
        i, j = self.register(s), self.register(t)
        try:
            self._merge_loop([(i, j, reason)])
        except Conflict as c:
            return c.explanation
        return None

    def assert_diseq(self, s: Term, t: Term, reason):
        i, j = self.register(s), self.register(t)
        if self.find(i) == self.find(j):
            expl = self.explain_ids(i, j)
            if reason is not None:
                expl.add(reason)
            return expl
        self._add_diseq(i, j, reason)
        return None

    def assert_lit(self, l: Literal, reason=None):
        """Assert a literal; boolean atoms ``p ≈ true`` asserted negatively
        merge ``p`` with ``false``.  Returns None or a conflict explanation."""
        if reason is None:
            reason = l
        b = self.bank
        if l.lhs is b.TRUE or l.rhs is b.TRUE:
            p = l.rhs if l.lhs is b.TRUE else l.lhs
            return self.assert_eq(p, b.TRUE if l.pos else b.FALSE, reason)
        if l.pos:
            return self.assert_eq(l.lhs, l.rhs, reason)
        return self.assert_diseq(l.lhs, l.rhs, reason)

    def _add_diseq(self, i, j, reason):
        J = self.journal
        entry = (i, j, reason)
        ri, rj = self.find(i), self.find(j)
        J.append(self.diseqs[ri], entry)
        J.append(self.diseqs[rj], entry)
        if self.listener is not None:
            self.listener.on_diseq(ri, rj, self.nodes[i].sort)

    def _merge_loop(self, pending):
        J = self.journal
        find = self.find
        while pending:
            a, b, reason = pending.pop()
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            if self.size[ra] < self.size[rb]:
                a, b, ra, rb = b, a, rb, ra
            self.merges += 1
            self._pf_link(b, a, reason)
            # union rb into ra
            J.setitem(self.parent, rb, ra)
            J.setitem(self.size, ra, self.size[ra] + self.size[rb])
            nxt = self.next
            na, nb = nxt[ra], nxt[rb]
            J.setitem(nxt, ra, nb)
            J.setitem(nxt, rb, na)
            ma, mb = self.minrep[ra], self.minrep[rb]
            if self.nodes[mb].id < self.nodes[ma].id:
                J.setitem(self.minrep, ra, mb)
            J.set_discard(self.roots_by_sort[self.nodes[ra].sort.id], rb)
            J.extend(self.diseqs[ra], self.diseqs[rb])
            if self.listener is not None:
                self.listener.on_merge(ra, rb, self.nodes[ra].sort)
            for (u, v, r) in self.diseqs[rb]:
                if find(u) == find(v):
                    expl = self.explain_ids(u, v)
                    if r is not None:
                        expl.add(r)
                    raise Conflict(expl)
            use_b = self.use[rb]
            for p in use_b:
                key = self._sig(p)
                q = self.table.get(key)
                if q is not None and q != p and self._sig(q) == key:
                    if find(p) != find(q):
                        pending.append((p, q, Cong(p, q)))
                else:
                    J.dict_set(self.table, key, p)
            J.extend(self.use[ra], use_b)

    # -- proof forest ---------------------------------------------------------

    def _pf_link(self, b, a, reason):
        """Add proof edge b -> a after rerooting b's tree at b."""
        J = self.journal
        pp, pr = self.pf_parent, self.pf_reason
        path = [b]
        x = b
        while pp[x] != x:
            x = pp[x]
            path.append(x)
        saved = [(y, pp[y], pr[y]) for y in path]

        def undo():
            for y, p, r in saved:
                pp[y] = p
                pr[y] = r
        # reverse the path b=x0 -> x1 -> ... -> xk
        for k in range(len(path) - 1, 0, -1):
            child, par = path[k - 1], path[k]
            pp[par] = child
            pr[par] = pr[child]
        pp[b] = a
        pr[b] = reason
        J.push(undo)

    def explain_ids(self, a: int, b: int) -> set:
        out = set()
        todo = [(a, b)]
        seen = set()
        pp, pr = self.pf_parent, self.pf_reason
        while todo:
            x, y = todo.pop()
            if x == y or (x, y) in seen:
                continue
            seen.add((x, y))
            anc = {x: 0}
            path_x = [x]
            z = x
            while pp[z] != z:
                z = pp[z]
                anc[z] = len(path_x)
                path_x.append(z)
            path_y = [y]
            z = y
            while z not in anc:
                if pp[z] == z:
                    raise AssertionError("explain on nodes in different classes")
                z = pp[z]
                path_y.append(z)
            lca = z
            edges = path_x[:anc[lca]] + path_y[:-1]
            for n in edges:
                r = pr[n]
                if isinstance(r, Cong):
                    for c1, c2 in zip(self.children[r.p], self.children[r.q]):
                        todo.append((c1, c2))
                elif r is not None:
                    out.add(r)
        return out

    def explain_eq(self, s: Term, t: Term) -> set:
        i, j = self.node_of[s], self.node_of[t]
        if self.find(i) != self.find(j):
            raise ValueError("%r and %r are not equal" % (s, t))
        return self.explain_ids(i, j)

    # -- queries --------------------------------------------------------------

    def _diseq_entry(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return None
        a, b = self.diseqs[ri], self.diseqs[rj]
        if len(b) < len(a):
            a = b
        find = self.find
        for e in a:
            fu, fv = find(e[0]), find(e[1])
            if (fu == ri and fv == rj) or (fu == rj and fv == ri):
                return e
        return None

    def are_disequal(self, s: Term, t: Term) -> bool:
        i, j = self.node_of.get(s), self.node_of.get(t)
        if i is None or j is None:
            return False
        return self._diseq_entry(i, j) is not None

    def explain_diseq_ids(self, i: int, j: int) -> set:
        e = self._diseq_entry(i, j)
        if e is None:
            raise ValueError("classes are not disequal")
        u, v, r = e
        if self.find(u) != self.find(i):
            u, v = v, u
        out = self.explain_ids(i, u) | self.explain_ids(j, v)
        if r is not None:
            out.add(r)
        return out

    def explain_diseq(self, s: Term, t: Term) -> set:
        return self.explain_diseq_ids(self.node_of[s], self.node_of[t])

    def class_roots(self, sort) -> List[int]:
        roots = self.roots_by_sort.get(sort.id, ())
        nodes, minrep = self.nodes, self.minrep
        return sorted(roots, key=lambda r: nodes[minrep[r]].id)

    def classes_of_sort(self, sort) -> List[Term]:
        return [self.nodes[self.minrep[r]] for r in self.class_roots(sort)]

    def num_classes(self, sort) -> int:
        return len(self.roots_by_sort.get(sort.id, ()))

    def terms(self) -> List[Term]:
        return list(self.nodes)

    def mark(self) -> int:
        return self.journal.mark()

    def undo_to(self, mark: int):
        self.journal.undo_to(mark)

    def partition(self):
        """Fingerprint of the current class partition."""
        out = {}
        for i, t in enumerate(self.nodes):
            out.setdefault(self.find(i), []).append(t.id)
        return sorted(tuple(sorted(v)) for v in out.values())
