"""Top-level finite model finding loop and the domain-constant baseline.

``solve`` alternates three steps until nothing changes: find a satisfying
assignment under the smallest cardinalities the ladder allows, read a
candidate model off the e-graph, and instantiate every active quantifier
at the substitutions the model falsifies.  The engine stays warm between
rounds; new instance clauses are added at decision level 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional

from .engine import SAT, UNKNOWN, UNSAT, Engine
from .fcc import FCCConfig
from .kernel import Clause, Literal, Term
from .mbqi import Evaluator, choose_instances
from .model import CandidateModel, build_model
from .purifier import PurifiedProblem, Purifier


@dataclass
class SolverConfig:
    mbqi: str = "full"            # full | none (none = exhaustive instantiation)
    ematch: bool = False
    regions: bool = True
    clique_explain: str = "lemma"  # lemma | conflict
    max_card: int = 0
    inst_cap: int = 0
    seed: int = 0
    mace: bool = False
    timeout: float = 0.0
    certify: bool = False

    @property
    def mode(self) -> str:
        base = "mbqi" if self.mbqi == "full" else "exhaustive"
        return base + ("+ematch" if self.ematch else "")

    def fcc_config(self, ladder=True) -> FCCConfig:
        return FCCConfig(use_regions=self.regions, clique_explain=self.clique_explain,
                         ladder=ladder, max_card=self.max_card)


@dataclass
class SolveResult:
    verdict: str
    model: Optional[CandidateModel] = None
    stats: Dict[str, object] = field(default_factory=dict)
    cards: Dict[str, int] = field(default_factory=dict)
    trail: List[Literal] = field(default_factory=list)


class UsageError(ValueError):
    """Input outside what the selected mode supports."""


def _sorts_needing_domain(problem: PurifiedProblem, engine: Engine):
    bank = problem.bank
    have = set()
    for t in engine.egraph.nodes:
        have.add(t.sort)
    return [s for s in bank.uninterpreted_sorts() if s not in have]


def _active(problem: PurifiedProblem, engine: Engine):
    out = []
    for q in problem.quant_records:
        if engine.value(q.proxy_literal()) is True:
            out.append(q)
    return out


def _collect_stats(engine: Engine, stats: dict):
    f = engine.fcc
    stats.update(
        decisions=engine.n_decisions,
        conflicts=engine.n_conflicts,
        propagations=engine.n_propagations,
        learned=engine.n_learned,
        theory_props=engine.n_theory_props,
        ladder=f.n_ladder,
        cliques=f.n_cliques,
        splits=f.n_splits,
        sum_conflicts=f.n_sum_conflicts,
        card_conflicts=f.n_card_conflicts,
        merges=engine.egraph.merges,
    )


def _lower_bounds(bank, engine: Engine) -> Dict:
    return {s: engine.fcc.lower_bound(s) for s in bank.uninterpreted_sorts()}


def _cards(m: CandidateModel) -> Dict[str, int]:
    return {s.name: m.card(s) for s in m.domains if not s.is_bool}


def solve(problem: PurifiedProblem, cfg: SolverConfig = None,
          purifier: Purifier = None) -> SolveResult:
    cfg = cfg or SolverConfig()
    if cfg.mace:
        return solve_mace(problem, cfg)
    t0 = time.monotonic()
    deadline = t0 + cfg.timeout if cfg.timeout else None
    bank = problem.bank
    purifier = purifier or Purifier(bank, problem)
    engine = Engine(bank, cfg.fcc_config())
    stats = {"rounds": 0, "instances": 0}

    def finish(verdict, model=None):
        _collect_stats(engine, stats)
        stats["time"] = round(time.monotonic() - t0, 4)
        r = SolveResult(verdict, model, stats)
        if model is not None:
            r.cards = _cards(model)
            r.trail = engine.trail_literals()
        return r

    for s in bank.uninterpreted_sorts():
        engine.fcc.add_ladder_sort(s)
    for c in problem.clauses:
        if not engine.add_input_clause(c):
            return finish(UNSAT)
    for s in _sorts_needing_domain(problem, engine):
        engine.register_term(bank.fresh_const("e_" + s.name, s, "domain"))
    fed = len(problem.clauses)
    done: Dict[int, set] = {}

    while True:
        stats["rounds"] += 1
        verdict = engine.check(deadline)
        if verdict != SAT:
            return finish(verdict)
        model = build_model(engine.egraph, lower=_lower_bounds(bank, engine))
        ev = Evaluator(model)
        new_keys = []
        for q in _active(problem, engine):
            seen = done.setdefault(id(q), set())
            sigmas = choose_instances(cfg.mode, model, q, engine.egraph, exclude=seen,
                                      evaluator=ev, cap=cfg.inst_cap, stats=stats)
            for sigma in sigmas:
                key = tuple(sigma[x] for x in q.vars)
                if key not in seen:
                    new_keys.append((q, sigma, key))
            if deadline is not None and time.monotonic() > deadline:
                return finish(UNKNOWN)
        for q, sigma, key in new_keys:
            done[id(q)].add(key)
            purifier.instantiate(q, sigma)
        added = problem.clauses[fed:]
        fed = len(problem.clauses)
        if not added:
            if cfg.certify and not validate_model(model, problem, engine.trail_literals()):
                raise AssertionError("model failed certification")
            return finish(SAT, model)
        stats["instances"] += len(new_keys)
        engine.backjump(0)
        for c in added:
            if not engine.add_input_clause(c):
                return finish(UNSAT)


def validate_model(m: CandidateModel, problem: PurifiedProblem,
                   trail: List[Literal] = None) -> bool:
    """Exhaustive check of every clause, every trail literal and every
    instance of each quantifier whose proxy the model makes true."""
    for c in problem.clauses:
        if not m.satisfies_clause(c):
            return False
    for l in trail or ():
        if l.lhs.decl is not None and l.lhs.decl.kind == "card":
            continue
        if l.rhs.decl is not None and l.rhs.decl.kind == "card":
            continue
        if not m.holds(l):
            return False
    ev = Evaluator(m)
    TRUE = problem.bank.TRUE
    for q in problem.quant_records:
        if m.eval_ground(q.proxy_term) is not TRUE:
            continue
        xs = q.vars
        for vals in product(*(m.domain(x.sort) for x in xs)):
            if not ev.formula(q.body, dict(zip(xs, vals)))[0]:
                return False
    return True


# -- domain-constant baseline --------------------------------------------------

def _single_sort(problem: PurifiedProblem):
    if not problem.is_ground():
        raise UsageError("the domain-constant baseline accepts only ground input")
    sorts = set(problem.bank.uninterpreted_sorts())
    for c in problem.clauses:
        for l in c:
            for t in (l.lhs, l.rhs):
                for s in t.subterms():
                    if not s.sort.is_bool:
                        sorts.add(s.sort)
    if len(sorts) > 1:
        raise UsageError("the domain-constant baseline accepts a single sort, got %s"
                         % ", ".join(sorted(s.name for s in sorts)))
    if not sorts:
        return None
    sort = sorts.pop()
    return sort if _terms_of_sort(problem.clauses, sort) else None


def _terms_of_sort(clauses, sort):
    seen = {}
    for c in clauses:
        for l in c:
            for t in (l.lhs, l.rhs):
                for s in t.subterms():
                    if s.sort is sort:
                        seen.setdefault(s, None)
    return list(seen)


def encode_mace(clauses, k: int, bank, consts: List[Term] = None) -> List[Clause]:
    """``clauses`` plus distinctness of ``k`` domain constants and one
    domain clause per term of the (single) sort."""
    sort = None
    for c in clauses:
        for l in c:
            for t in (l.lhs, l.rhs):
                for s in t.subterms():
                    if not s.sort.is_bool:
                        if sort is not None and s.sort is not sort:
                            raise UsageError("multi-sort input")
                        sort = s.sort
    out = list(clauses)
    if sort is None:
        return out
    terms = _terms_of_sort(clauses, sort)
    consts = list(consts or [])
    while len(consts) < k:
        consts.append(bank.fresh_const("dom", sort, "domain"))
    cs = consts[:k]
    for i in range(k):
        for j in range(i + 1, k):
            out.append(Clause([Literal(False, cs[i], cs[j])]))
    for t in terms:
        out.append(Clause([Literal(True, t, c) for c in cs]))
    return out


def solve_mace(problem: PurifiedProblem, cfg: SolverConfig = None) -> SolveResult:
    cfg = cfg or SolverConfig(mace=True)
    t0 = time.monotonic()
    deadline = t0 + cfg.timeout if cfg.timeout else None
    sort = _single_sort(problem)
    bank = problem.bank
    n_terms = len(_terms_of_sort(problem.clauses, sort)) if sort is not None else 0
    consts: List[Term] = []
    k = 1
    stats = {"mace_rounds": 0}
    while True:
        if cfg.max_card and k > cfg.max_card:
            stats["time"] = round(time.monotonic() - t0, 4)
            return SolveResult(UNKNOWN, None, stats)
        stats["mace_rounds"] += 1
        engine = Engine(bank, cfg.fcc_config(ladder=False))
        while len(consts) < k and sort is not None:
            consts.append(bank.fresh_const("dom", sort, "domain"))
        ok = True
        for c in encode_mace(problem.clauses, k, bank, consts):
            if not engine.add_input_clause(c):
                ok = False
                break
        verdict = engine.check(deadline) if ok else UNSAT
        if verdict == SAT:
            model = build_model(engine.egraph)
            _collect_stats(engine, stats)
            stats["time"] = round(time.monotonic() - t0, 4)
            r = SolveResult(SAT, model, stats, _cards(model), engine.trail_literals())
            return r
        if verdict == UNKNOWN:
            stats["time"] = round(time.monotonic() - t0, 4)
            return SolveResult(UNKNOWN, None, stats)
        if k >= max(1, n_terms):
            stats["time"] = round(time.monotonic() - t0, 4)
            return SolveResult(UNSAT, None, stats)
        k += 1
