"""Backtracking enumeration of clause groundings against a trail.

Variables are bound in order of first occurrence to irreducible ground terms
below beta.  A literal is evaluated as soon as all its variables are bound,
so falsity and definedness checks prune partial groundings early.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .ordering import enumerate_ground_terms_below, literal_below
from .terms import Clause, Literal, Subst, Term, apply_subst, clause_vars, literal_vars
from .trail import FALSE, TRUE, UNDEFINED, Trail, TruthValue

# a literal status: (below beta, truth value)
Status = Tuple[bool, TruthValue]


def domain(trail: Trail, beta: Term, sig, cfg) -> List[Term]:
    """Irreducible ground terms below beta, ascending."""
    return [t for t in enumerate_ground_terms_below(beta, sig, cfg) if trail.irreducible(t)]


def status(trail: Trail, lit: Literal, beta: Term) -> Status:
    cache = trail.__dict__.setdefault("_status", {})
    key = (beta, lit)
    hit = cache.get(key)
    if hit is None:
        below = literal_below(lit, beta, trail.cfg)
        hit = (below, trail.value_of(lit) if below else UNDEFINED)
        cache[key] = hit
    return hit


def _schedule(clause: Clause) -> Tuple[List[int], List[List[int]]]:
    """Variable order and, per depth, the literals that become ground there."""
    variables = list(clause_vars(clause))
    depth_of = {v: i for i, v in enumerate(variables)}
    ready: List[List[int]] = [[] for _ in range(len(variables) + 1)]
    for i, lit in enumerate(clause):
        vs = literal_vars(lit)
        d = max((depth_of[v] + 1 for v in vs), default=0)
        ready[d].append(i)
    return variables, ready


def groundings(trail: Trail, clause: Clause, beta: Term, dom: Sequence[Term],
               accept: Callable[[int, Literal, Status, Dict[int, object]], bool]
               ) -> Iterator[Tuple[Subst, List[Literal], List[Status]]]:
    """Yield (σ, ground literals, statuses) for groundings accepted literal by literal.

    ``accept(i, ground_lit, status, scratch)`` may keep cross-literal state in
    ``scratch``; it is undone on backtracking by snapshotting.
    """
    variables, ready = _schedule(clause)
    n = len(clause)
    ground: List[Optional[Literal]] = [None] * n
    stats: List[Optional[Status]] = [None] * n

    def check(depth: int, sigma: Subst, scratch: Dict[int, object]) -> bool:
        for i in ready[depth]:
            g = apply_subst(clause[i], sigma)
            st = status(trail, g, beta)
            ground[i] = g
            stats[i] = st
            if not accept(i, g, st, scratch):
                return False
        return True

    def rec(depth: int, sigma: Subst, scratch: Dict[int, object]):
        if depth == len(variables):
            yield dict(sigma), list(ground), list(stats)
            return
        v = variables[depth]
        for t in dom:
            sigma[v] = t
            local = dict(scratch)
            if check(depth + 1, sigma, local):
                yield from rec(depth + 1, sigma, local)
        sigma.pop(v, None)

    scratch: Dict[int, object] = {}
    if check(0, {}, scratch):
        yield from rec(0, {}, scratch)


def false_groundings(trail: Trail, clause: Clause, beta: Term, dom: Sequence[Term]
                     ) -> Iterator[Subst]:
    def accept(i, g, st, scratch):
        return st[0] and st[1] is FALSE

    for sigma, _, _ in groundings(trail, clause, beta, dom, accept):
        yield sigma


def first_false_grounding(trail: Trail, clause: Clause, beta: Term, dom: Sequence[Term]
                          ) -> Optional[Subst]:
    return next(false_groundings(trail, clause, beta, dom), None)


def propagation_groundings(trail: Trail, clause: Clause, beta: Term, dom: Sequence[Term]
                           ) -> Iterator[Tuple[Subst, int, Tuple[int, ...], Literal]]:
    """Groundings where every literal is false except copies of one undefined literal.

    Yields (σ, index of L, indices of further copies, ground L).
    """
    def accept(i, g, st, scratch):
        below, val = st
        if val is FALSE and below:
            return True
        if val is not UNDEFINED or not below:
            return False
        prev = scratch.get(-1)
        if prev is None:
            scratch[-1] = g
            return True
        return prev.same(g)

    for sigma, lits, stats in groundings(trail, clause, beta, dom, accept):
        undef = [i for i, st in enumerate(stats) if st[1] is UNDEFINED]
        if not undef:
            continue
        yield sigma, undef[0], tuple(undef[1:]), lits[undef[0]]


def decision_groundings(trail: Trail, clause: Clause, beta: Term, dom: Sequence[Term]
                        ) -> Iterator[Tuple[Subst, List[int], bool]]:
    """Groundings below beta with an undefined literal and a non-false rest.

    Yields (σ, indices of undefined literals, whether the instance is already true).
    """
    def accept(i, g, st, scratch):
        return st[0]

    for sigma, lits, stats in groundings(trail, clause, beta, dom, accept):
        undef = [i for i, st in enumerate(stats) if st[1] is UNDEFINED]
        if not undef:
            continue
        if len(undef) == 1 and all(st[1] is FALSE for j, st in enumerate(stats) if j != undef[0]):
            # the rest is false: this is a propagation, not a decision
            continue
        is_true = any(st[1] is TRUE for st in stats)
        yield sigma, undef, is_true


def undefined_instances(trail: Trail, clause: Clause, beta: Term, dom: Sequence[Term]
                        ) -> Iterator[Tuple[Subst, List[Literal]]]:
    """Groundings below beta that still contain an undefined literal."""
    def accept(i, g, st, scratch):
        return st[0]

    for sigma, lits, stats in groundings(trail, clause, beta, dom, accept):
        undef = [lits[i] for i, st in enumerate(stats) if st[1] is UNDEFINED]
        if undef:
            yield sigma, undef
