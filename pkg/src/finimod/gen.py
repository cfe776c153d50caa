"""Random graph-coloring benchmarks: one sort, one constant per vertex,
one disequality per edge."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import List, Tuple


@dataclass(frozen=True)
class ColoringInstance:
    n: int
    edges: Tuple[Tuple[int, int], ...]
    seed: int

    def script(self) -> str:
        lines = ["(declare-sort S 0)"]
        lines += ["(declare-const v%d S)" % i for i in range(self.n)]
        lines += ["(assert (not (= v%d v%d)))" % e for e in self.edges]
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


def random_coloring(n: int, m: int, seed: int) -> ColoringInstance:
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    pairs = list(combinations(range(n), 2))
    if m > len(pairs):
        raise ValueError("%d edges requested but a %d-vertex graph has at most %d"
                         % (m, n, len(pairs)))
    rng = random.Random(seed)
    edges = tuple(sorted(rng.sample(pairs, m)))
    return ColoringInstance(n, edges, seed)


def gen_coloring(n: int, m: int, seed: int) -> str:
    return random_coloring(n, m, seed).script()


def edges_of(inst: ColoringInstance) -> List[Tuple[int, int]]:
    return list(inst.edges)
