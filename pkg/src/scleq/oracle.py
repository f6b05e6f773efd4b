"""Independent ground reasoning for auditing the prover.

Congruence closure with union-find decides ground equational entailment,
and a small DPLL search over literal choices decides satisfiability of
ground clause sets.  Nothing here shares code with the rewriting engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .terms import App, Clause, Closure, Literal, Term, ground_instances_below


class OracleLimit(RuntimeError):
    """The problem is too large for the exhaustive oracle."""


class CongruenceClosure:
    def __init__(self):
        self.parent: Dict[Term, Term] = {}
        self.members: Dict[Term, List[Term]] = {}
        self.uses: Dict[Term, List[Term]] = {}
        self.table: Dict[tuple, Term] = {}

    def copy(self) -> "CongruenceClosure":
        cc = CongruenceClosure()
        cc.parent = dict(self.parent)
        cc.members = {k: list(v) for k, v in self.members.items()}
        cc.uses = {k: list(v) for k, v in self.uses.items()}
        cc.table = dict(self.table)
        return cc

    def find(self, t: Term) -> Term:
        p = self.parent[t]
        while p != t:
            t, p = p, self.parent[p]
        return t

    def _signature(self, t: App) -> tuple:
        return (t.fn,) + tuple(self.find(a) for a in t.args)

    def add(self, t: Term) -> Term:
        if t in self.parent:
            return self.find(t)
        if not isinstance(t, App) or not t.ground:
            raise ValueError("congruence closure works on ground terms")
        for a in t.args:
            self.add(a)
        self.parent[t] = t
        self.members[t] = [t]
        self.uses[t] = []
        if t.args:
            for a in t.args:
                self.uses[self.find(a)].append(t)
            sig = self._signature(t)
            other = self.table.get(sig)
            if other is not None:
                self.merge(t, other)
            else:
                self.table[sig] = t
        return self.find(t)

    def merge(self, s: Term, t: Term) -> None:
        self.add(s)
        self.add(t)
        pending = [(s, t)]
        while pending:
            a, b = pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if len(self.members[ra]) < len(self.members[rb]):
                ra, rb = rb, ra
            # rb joins ra
            self.parent[rb] = ra
            self.members[ra].extend(self.members.pop(rb))
            moved = self.uses.pop(rb)
            for u in moved:
                sig = self._signature(u)
                other = self.table.get(sig)
                if other is not None and self.find(other) != self.find(u):
                    pending.append((u, other))
                else:
                    self.table[sig] = u
            self.uses[ra].extend(moved)

    def equal(self, s: Term, t: Term) -> bool:
        return self.add(s) == self.add(t)

    def classes(self) -> List[List[Term]]:
        return [list(m) for m in self.members.values()]


def cc_entails(facts: Iterable[Literal], lit: Literal) -> bool:
    """Whether a set of ground literals entails a ground literal."""
    facts = list(facts)
    cc = CongruenceClosure()
    diseqs = []
    for f in facts:
        cc.add(f.lhs)
        cc.add(f.rhs)
        if f.positive:
            cc.merge(f.lhs, f.rhs)
        else:
            diseqs.append((f.lhs, f.rhs))
    cc.add(lit.lhs)
    cc.add(lit.rhs)
    if any(cc.equal(u, v) for u, v in diseqs):
        return True
    if lit.positive:
        return cc.equal(lit.lhs, lit.rhs)
    trial = cc.copy()
    trial.merge(lit.lhs, lit.rhs)
    return any(trial.equal(u, v) for u, v in diseqs)


def consistent(facts: Iterable[Literal]) -> bool:
    cc = CongruenceClosure()
    diseqs = []
    for f in facts:
        cc.add(f.lhs)
        cc.add(f.rhs)
        if f.positive:
            cc.merge(f.lhs, f.rhs)
        else:
            diseqs.append((f.lhs, f.rhs))
    return not any(cc.equal(u, v) for u, v in diseqs)


# -- satisfiability ----------------------------------------------------------


@dataclass
class GroundProblem:
    clauses: List[Clause]
    universe: Set[Term] = field(default_factory=set)


@dataclass
class Model:
    classes: List[List[Term]]
    diseqs: List[Tuple[Term, Term]]
    literals: List[Literal]


class _Node:
    def __init__(self, cc: CongruenceClosure, diseqs: List[Tuple[Term, Term]],
                 chosen: List[Literal]):
        self.cc = cc
        self.diseqs = diseqs
        self.chosen = chosen

    def copy(self) -> "_Node":
        return _Node(self.cc.copy(), list(self.diseqs), list(self.chosen))

    def assert_lit(self, lit: Literal) -> bool:
        self.chosen.append(lit)
        if lit.positive:
            self.cc.merge(lit.lhs, lit.rhs)
            return not any(self.cc.equal(u, v) for u, v in self.diseqs)
        if self.cc.equal(lit.lhs, lit.rhs):
            return False
        self.diseqs.append((lit.lhs, lit.rhs))
        return True

    def value(self, lit: Literal) -> Optional[bool]:
        """True/False when already decided by the node, None otherwise."""
        same = self.cc.equal(lit.lhs, lit.rhs)
        if same:
            return lit.positive
        a, b = self.cc.find(lit.lhs), self.cc.find(lit.rhs)
        for u, v in self.diseqs:
            fu, fv = self.cc.find(u), self.cc.find(v)
            if (fu == a and fv == b) or (fu == b and fv == a):
                return not lit.positive
        return None


def ground_sat(problem, max_clauses: int = 20000) -> Optional[Model]:
    """A model of the ground clauses, or None if they are unsatisfiable."""
    clauses = problem.clauses if isinstance(problem, GroundProblem) else list(problem)
    if len(clauses) > max_clauses:
        raise OracleLimit(f"{len(clauses)} clauses exceed the oracle limit")
    root = _Node(CongruenceClosure(), [], [])
    for c in clauses:
        for l in c:
            root.cc.add(l.lhs)
            root.cc.add(l.rhs)
    return _search(root, [list(c) for c in clauses])


def _search(node: _Node, clauses: List[List[Literal]]) -> Optional[Model]:
    while True:
        remaining: List[List[Literal]] = []
        unit = None
        for c in clauses:
            open_lits = []
            satisfied = False
            for l in c:
                v = node.value(l)
                if v is True:
                    satisfied = True
                    break
                if v is None:
                    open_lits.append(l)
            if satisfied:
                continue
            if not open_lits:
                return None
            if len(open_lits) == 1 and unit is None:
                unit = open_lits[0]
            remaining.append(open_lits)
        if unit is None:
            break
        if not node.assert_lit(unit):
            return None
        clauses = remaining
    clauses = remaining
    if not clauses:
        return Model(node.cc.classes(), list(node.diseqs), list(node.chosen))
    lit = clauses[0][0]
    for choice in (lit, lit.complement()):
        child = node.copy()
        if child.assert_lit(choice):
            found = _search(child, clauses)
            if found is not None:
                return found
    return None


def entails(clauses: Iterable[Clause], target: Clause, max_clauses: int = 20000) -> bool:
    """Whether the ground clauses entail the ground target clause."""
    negated = [Clause((l.complement(),)) for l in target]
    return ground_sat(list(clauses) + negated, max_clauses) is None


def model_satisfies(model: Model, clause: Clause) -> bool:
    facts = model.literals
    return any(cc_entails(facts, l) for l in clause)


def is_redundant(closure: Closure, pool: Iterable[Clause], trail, beta: Term, sig, cfg,
                 max_clauses: int = 20000) -> bool:
    """Whether the ground clause is entailed by pool instances that are not larger
    in the trail-induced ordering."""
    from .trail import gamma_star_compare_clauses
    from .ordering import GT

    target = closure.ground()
    smaller = []
    for clause in pool:
        for inst in ground_instances_below(clause, beta, sig, cfg):
            g = inst.ground()
            if gamma_star_compare_clauses(trail, beta, g, target) is not GT:
                smaller.append(g)
    return entails(smaller, target, max_clauses)


def gnd_below(clauses: Iterable[Clause], beta: Term, sig, cfg) -> List[Clause]:
    out = []
    for c in clauses:
        out.extend(i.ground() for i in ground_instances_below(c, beta, sig, cfg))
    return out
