"""Disequality graph of one sort with a maintained K-regionalization.

Vertices are congruence-class roots, edges are asserted disequalities
between classes.  Vertices are partitioned into regions so that every
K-clique lies inside a single region; large regions (at least K vertices)
carry a watched set of K vertices that is tested for being a clique.

The region condition used here: for every ``0 < i < K`` fewer than
``K - i`` vertices of the region have ``i`` or more neighbours outside it.
(``i = K`` would demand a negative count, so it is excluded.)

All mutations go through the shared :class:`Journal` and are undone
exactly on backtracking.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .journal import Journal


class RegionGraph:
    def __init__(self, journal: Journal = None, use_regions: bool = True):
        self.J = journal if journal is not None else Journal()
        self.use_regions = use_regions
        self.K: Optional[int] = None
        self.adj: Dict[int, Dict[int, int]] = {}
        self.region_of: Dict[int, int] = {}
        self.members: Dict[int, set] = {}
        self.ext: Dict[int, int] = {}
        self.boundary: Dict[int, set] = {}
        self.watched: Dict[int, tuple] = {}
        self.next_rid = 0
        self.region_merges = 0
        if not use_regions:
            self.members[0] = set()
            self.boundary[0] = set()
            self.next_rid = 1

    # -- basic queries ------------------------------------------------------

    @property
    def vertices(self):
        return self.adj.keys()

    def adjacent(self, u, v) -> bool:
        return v in self.adj[u]

    def degree(self, v) -> int:
        return len(self.adj[v])

    def regions(self) -> List[List[int]]:
        return [sorted(self.members[r]) for r in sorted(self.members) if self.members[r]]

    def is_region(self, rid) -> bool:
        K = self.K
        if K is None:
            return True
        ext = self.ext
        exts = [ext[v] for v in self.boundary[rid]]
        if not exts:
            return True
        for i in range(1, K):
            cnt = 0
            for e in exts:
                if e >= i:
                    cnt += 1
            if cnt >= K - i:
                return False
        return True

    # -- events -------------------------------------------------------------

    def add_vertex(self, v):
        J = self.J
        J.dict_set(self.adj, v, {})
        J.dict_set(self.ext, v, 0)
        if self.use_regions:
            rid = self.next_rid
            J.setattr(self, "next_rid", rid + 1)
            J.dict_set(self.members, rid, {v})
            J.dict_set(self.boundary, rid, set())
        else:
            rid = 0
            J.set_add(self.members[0], v)
        J.dict_set(self.region_of, v, rid)
        self._refresh_watch(rid)

    def add_edge(self, u, v):
        if u == v:
            return
        J = self.J
        au, av = self.adj[u], self.adj[v]
        if v in au:
            J.dict_set(au, v, au[v] + 1)
            J.dict_set(av, u, av[u] + 1)
            return
        J.dict_set(au, v, 1)
        J.dict_set(av, u, 1)
        if self.region_of[u] != self.region_of[v]:
            self._set_ext(u, self.ext[u] + 1)
            self._set_ext(v, self.ext[v] + 1)
        if self.K is not None:
            self.fix_region(self.region_of[u])
            self.fix_region(self.region_of[v])

    def merge(self, keep, gone):
        """Quotient: ``gone`` is absorbed into ``keep`` and inherits its edges."""
        J = self.J
        adj = self.adj
        rk, rg = self.region_of[keep], self.region_of[gone]
        ak = adj[keep]
        nbrs = list(adj[gone].items())
        for w, m in nbrs:
            aw = adj[w]
            J.dict_del(aw, gone)
            if w == keep:
                continue
            if w in ak:
                J.dict_set(ak, w, ak[w] + m)
                J.dict_set(aw, keep, aw[keep] + m)
            else:
                J.dict_set(ak, w, m)
                J.dict_set(aw, keep, m)
        J.dict_del(adj, gone)
        J.set_discard(self.members[rg], gone)
        J.set_discard(self.boundary[rg], gone)
        J.dict_del(self.region_of, gone)
        J.dict_del(self.ext, gone)
        self._recompute_ext(keep)
        for w, _ in nbrs:
            if w != keep:
                self._recompute_ext(w)
        if rg != rk and not self.members[rg]:
            self._drop_region(rg)
        self._refresh_watch(rk)
        if rg in self.members:
            self._refresh_watch(rg)
        if self.K is not None:
            self.fix_region(rk)
            if rg != rk and rg in self.members:
                self.fix_region(rg)

    def rebuild(self, K: int):
        """Discard the regionalization and build a fresh K-regionalization
        from singleton regions."""
        J = self.J
        old = (self.K, self.region_of, self.members, self.ext, self.boundary,
               self.watched, self.next_rid)

        def undo():
            (self.K, self.region_of, self.members, self.ext, self.boundary,
             self.watched, self.next_rid) = old
        J.push(undo)
        self.K = K
        self.watched = {}
        verts = sorted(self.adj)
        if self.use_regions:
            self.region_of = {v: i for i, v in enumerate(verts)}
            self.members = {i: {v} for i, v in enumerate(verts)}
            self.ext = {v: len(self.adj[v]) for v in verts}
            self.boundary = {i: ({v} if self.adj[v] else set()) for i, v in enumerate(verts)}
            self.next_rid = len(verts)
            for rid in range(len(verts)):
                self._refresh_watch(rid)
            for rid in range(len(verts)):
                if rid in self.members:
                    self.fix_region(rid)
        else:
            self.region_of = {v: 0 for v in verts}
            self.members = {0: set(verts)}
            self.ext = {v: 0 for v in verts}
            self.boundary = {0: set()}
            self._refresh_watch(0)

    # -- region maintenance -------------------------------------------------

    def _set_ext(self, v, e):
        J = self.J
        J.dict_set(self.ext, v, e)
        b = self.boundary[self.region_of[v]]
        if e > 0:
            J.set_add(b, v)
        else:
            J.set_discard(b, v)

    def _recompute_ext(self, v):
        r = self.region_of[v]
        ro = self.region_of
        e = 0
        for w in self.adj[v]:
            if ro[w] != r:
                e += 1
        if e != self.ext[v] or (e > 0) != (v in self.boundary[r]):
            self._set_ext(v, e)

    def _drop_region(self, rid):
        J = self.J
        J.dict_del(self.members, rid)
        J.dict_del(self.boundary, rid)
        if rid in self.watched:
            J.dict_del(self.watched, rid)

    def _edges_to_regions(self, rid) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        ro = self.region_of
        for v in self.boundary[rid]:
            for w in self.adj[v]:
                r = ro[w]
                if r != rid:
                    counts[r] = counts.get(r, 0) + 1
        return counts

    def fix_region(self, rid):
        """Merge ``rid`` with its densest neighbouring region until it
        satisfies the region condition.  Returns the final region id."""
        while rid in self.members and not self.is_region(rid):
            counts = self._edges_to_regions(rid)
            size = len(self.members[rid])
            best = min(counts, key=lambda r: (
                -Fraction(counts[r], size * len(self.members[r])),
                size + len(self.members[r]), r))
            rid = self.merge_regions(rid, best)
        return rid

    def merge_regions(self, a, b) -> int:
        J = self.J
        ma, mb = self.members[a], self.members[b]
        keep, other = (a, b) if (len(ma), -a) >= (len(mb), -b) else (b, a)
        self.region_merges += 1
        seed = self.watched.get(keep, ()) + self.watched.get(other, ())
        touched = list(self.boundary[keep]) + list(self.boundary[other])
        moved = list(self.members[other])
        mk = self.members[keep]
        for v in moved:
            J.dict_set(self.region_of, v, keep)
            J.set_add(mk, v)
        bo = list(self.boundary[other])
        self._drop_region(other)
        bk = self.boundary[keep]
        for v in bo:
            J.set_add(bk, v)
        for v in touched:
            self._recompute_ext(v)
        self._refresh_watch(keep, seed)
        return keep

    def _refresh_watch(self, rid, seed=None):
        J = self.J
        K = self.K
        if K is None:
            return
        mem = self.members[rid]
        if len(mem) < K:
            if rid in self.watched:
                J.dict_del(self.watched, rid)
            return
        src = seed if seed is not None else self.watched.get(rid, ())
        cur = [v for v in dict.fromkeys(src) if v in mem]
        adj = self.adj

        def rank(v):
            return (-len(adj[v]), v)
        if len(cur) > K:
            cur = sorted(cur, key=rank)[:K]
        elif len(cur) < K:
            have = set(cur)
            cand = sorted((v for v in mem if v not in have), key=rank)
            cur += cand[:K - len(cur)]
        new = tuple(sorted(cur))
        if self.watched.get(rid) != new:
            J.dict_set(self.watched, rid, new)

    # -- clique / split -----------------------------------------------------

    def _is_clique(self, vs) -> bool:
        adj = self.adj
        for i, u in enumerate(vs):
            au = adj[u]
            for v in vs[i + 1:]:
                if v not in au:
                    return False
        return True

    def find_clique(self) -> Optional[tuple]:
        """A watched set forming a K-clique, if any."""
        for rid in sorted(self.watched):
            w = self.watched[rid]
            if self._is_clique(w):
                return w
        return None

    def _nonadjacent_in_watched(self):
        adj = self.adj
        for rid in sorted(self.watched):
            w = self.watched[rid]
            for i, u in enumerate(w):
                for v in w[i + 1:]:
                    if v not in adj[u]:
                        return (u, v)
        return None

    def split_pair(self) -> Optional[Tuple[int, int]]:
        """Two non-adjacent vertices to split on (requires more than K-1
        vertices).  Merges the densest pair of small regions until some
        region becomes large."""
        while True:
            p = self._nonadjacent_in_watched()
            if p is not None:
                return p
            live = sorted(self.members)
            if len(live) < 2:
                break
            counts: Dict[Tuple[int, int], int] = {}
            for r in live:
                for r2, c in self._edges_to_regions(r).items():
                    if r < r2:
                        counts[(r, r2)] = c
            sizes = {r: len(self.members[r]) for r in live}
            best = min(((r1, r2) for i, r1 in enumerate(live) for r2 in live[i + 1:]),
                       key=lambda p: (-Fraction(counts.get(p, 0), sizes[p[0]] * sizes[p[1]]),
                                      sizes[p[0]] + sizes[p[1]], p))
            rid = self.merge_regions(*best)
            self.fix_region(rid)
        verts = sorted(self.adj)
        for i, u in enumerate(verts):
            for v in verts[i + 1:]:
                if v not in self.adj[u]:
                    return (u, v)
        return None

    # -- auditing -----------------------------------------------------------

    def fingerprint(self):
        return (self.K,
                tuple(sorted((v, tuple(sorted(a.items()))) for v, a in self.adj.items())),
                tuple(sorted((r, tuple(sorted(m))) for r, m in self.members.items())),
                tuple(sorted(self.watched.items())),
                tuple(sorted(self.ext.items())))

    def violations(self) -> List[str]:
        out = []
        seen = {}
        for r, mem in self.members.items():
            for v in mem:
                if v in seen:
                    out.append("vertex %d in regions %d and %d" % (v, seen[v], r))
                seen[v] = r
                if self.region_of.get(v) != r:
                    out.append("region_of[%d] mismatch" % v)
        if set(seen) != set(self.adj):
            out.append("partition does not cover the vertex set")
        for v, a in self.adj.items():
            e = sum(1 for w in a if self.region_of[w] != self.region_of[v])
            if e != self.ext.get(v):
                out.append("ext[%d]=%r, expected %d" % (v, self.ext.get(v), e))
            if (e > 0) != (v in self.boundary[self.region_of[v]]):
                out.append("boundary membership of %d" % v)
            for w, m in a.items():
                if self.adj[w].get(v) != m:
                    out.append("asymmetric edge %d-%d" % (v, w))
        if self.K is not None:
            for r in self.members:
                if not self.is_region(r):
                    out.append("region %d violates the %d-region condition" % (r, self.K))
                mem = self.members[r]
                if len(mem) >= self.K:
                    w = self.watched.get(r)
                    if w is None or len(w) != self.K or not set(w) <= mem:
                        out.append("bad watched set for region %d" % r)
                elif r in self.watched:
                    out.append("small region %d has a watched set" % r)
        return out
