"""The regular-run driver.

Rule selection follows a fixed precedence: Conflict, then Propagate, then
Decide.  Propagation is exhausted at every level before deciding, which is
stronger than a regular run demands and makes the complement check for
decisions vacuous.  Inside conflict resolution the order is Factorize,
Equality-Resolution, Backtrack, Skip, Explore-Refutation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import calculus as calc
from . import grounding as gr
from .calculus import (
    InvariantError,
    ProverState,
    RuleApplication,
    Status,
    Stored,
)
from .ordering import GT, LT, KboConfig, Signature, kbo_compare, literal_key
from .problem import Problem
from .terms import (
    App,
    Clause,
    Literal,
    Subst,
    Term,
    apply_subst,
    apply_term,
    clause_vars,
    match_literal,
    match_term,
    mgu,
    positions,
    replace_at,
    subterm_at,
)
from .trail import FALSE, TRUE, UNDEFINED


class ScriptError(ValueError):
    """A scripted decision cannot be applied."""


class AuditFailure(AssertionError):
    """A state produced during a run violates the soundness conditions."""


@dataclass
class SearchConfig:
    beta: Optional[Term] = None
    grow_limit: int = 0
    max_steps: int = 20000
    heuristic: str = "default"
    seed: int = 0
    audit: bool = False
    decisions: Optional[Sequence[Literal]] = None
    keep_history: bool = False
    simplify: bool = True

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("the step limit must be positive")
        if self.grow_limit < 0:
            raise ValueError("the grow limit must not be negative")
        if self.heuristic not in ("default", "random", "scripted"):
            raise ValueError(f"unknown decision heuristic {self.heuristic}")


@dataclass
class RunResult:
    verdict: str
    state: ProverState
    trace: List[RuleApplication]
    history: List[Tuple[ProverState, RuleApplication, ProverState]] = field(default_factory=list)
    initial_beta: Optional[Term] = None

    @property
    def learned(self) -> List[Clause]:
        return [r.clause for r in self.state.learned]

    def trace_lines(self) -> List[str]:
        return [a.format() for a in self.trace]


# -- bound -------------------------------------------------------------------


def default_beta(sig: Signature, cfg: KboConfig) -> Term:
    """The largest function symbol applied twice to the largest constant.

    Without function symbols the bound is the largest constant, which is
    a poor bound: nothing lies below the largest constant except smaller
    constants.  Callers then pass an explicit bound.
    """
    consts = [s for s, n in sig.items() if n == 0]
    if not consts:
        raise ValueError("the signature has no constant")
    top = max(consts, key=lambda s: (cfg.weight(s), cfg.rank[s]))
    t: Term = App(top, ())
    funs = [s for s, n in sig.items() if n > 0]
    if not funs:
        return t
    f = max(funs, key=lambda s: cfg.rank[s])
    for _ in range(2):
        t = App(f, (t,) * sig[f])
    return t


def grow_beta(beta: Term, sig: Signature, cfg: KboConfig) -> Term:
    funs = [s for s, n in sig.items() if n > 0]
    if not funs:
        raise ValueError("cannot grow the bound without function symbols")
    f = max(funs, key=lambda s: cfg.rank[s])
    return App(f, (beta,) * sig[f])


# -- candidate discovery -----------------------------------------------------


def _domain(st: ProverState):
    hit = st.trail.__dict__.get("_dom")
    if hit is not None and hit[0] == st.beta:
        return hit[1]
    dom = gr.domain(st.trail, st.beta, st.sig, st.cfg)
    st.trail.__dict__["_dom"] = (st.beta, dom)
    return dom


def find_conflict(st: ProverState) -> Optional[Tuple[str, Subst]]:
    dom = _domain(st)
    for s in st.clauses:
        sigma = gr.first_false_grounding(st.trail, s.clause, st.beta, dom)
        if sigma is not None:
            return s.name, sigma
    return None


@dataclass(frozen=True)
class Propagation:
    name: str
    sigma: Subst
    lit: int
    copies: Tuple[int, ...]
    pushed: Literal


def propagation_candidates(st: ProverState) -> Iterator[Propagation]:
    dom = _domain(st)
    for s in st.clauses:
        for sigma, lit, copies, ground in gr.propagation_groundings(st.trail, s.clause, st.beta, dom):
            main = s.clause[lit]
            ok = True
            unifier: Subst = {}
            for i in copies:
                other = s.clause[i]
                if apply_subst(other, sigma) != ground:
                    other = other.flipped()
                mu = mgu([apply_subst(main, unifier), apply_subst(other, unifier)])
                if mu is None:
                    ok = False
                    break
                unifier = {**{x: apply_subst(t, mu) for x, t in unifier.items()}, **mu}
            if not ok:
                continue
            pushed = Literal(ground.positive, st.trail.nf(ground.lhs), st.trail.nf(ground.rhs))
            yield Propagation(s.name, sigma, lit, copies, pushed)


def find_propagation(st: ProverState) -> Optional[Propagation]:
    """The candidate whose pushed literal is smallest in the term ordering."""
    best = None
    best_key = None
    for p in propagation_candidates(st):
        k = literal_key(p.pushed, st.cfg)
        if best is None or k < best_key:
            best, best_key = p, k
    return best


@dataclass(frozen=True)
class DecisionCandidate:
    name: str
    sigma: Subst
    lit: int
    ground: Literal
    satisfied: bool


def decision_candidates(st: ProverState) -> List[DecisionCandidate]:
    dom = _domain(st)
    out = []
    for s in st.clauses:
        for sigma, undef, is_true in gr.decision_groundings(st.trail, s.clause, st.beta, dom):
            for i in undef:
                out.append(DecisionCandidate(s.name, sigma, i, apply_subst(s.clause[i], sigma), is_true))
    return out


class DecisionPolicy:
    """Chooses decisions: by instance counts, at random, or from a script."""

    def __init__(self, heuristic: str = "default", seed: int = 0,
                 script: Optional[Sequence[Literal]] = None):
        self.heuristic = heuristic
        self.rng = random.Random(seed)
        self.script = list(script or [])
        self.used = 0

    def choose(self, st: ProverState) -> Optional[DecisionCandidate]:
        cands = decision_candidates(st)
        if not cands:
            return None
        if self.used < len(self.script):
            want = self.script[self.used]
            self.used += 1
            for c in cands:
                if c.ground.same(want):
                    return c
            raise ScriptError(f"scripted decision {want!r} is not a legal decision here")
        open_ = [c for c in cands if not c.satisfied] or cands
        if self.heuristic == "random":
            return self.rng.choice(open_)
        counts = {}
        for c in open_:
            counts[(c.name, c.lit)] = counts.get((c.name, c.lit), 0) + 1
        return min(open_, key=lambda c: (-counts[(c.name, c.lit)], literal_key(c.ground, st.cfg)))


def find_decision(st: ProverState, policy: Optional[DecisionPolicy] = None
                  ) -> Optional[DecisionCandidate]:
    return (policy or DecisionPolicy()).choose(st)


# -- conflict resolution -----------------------------------------------------


def conflict_step(st: ProverState) -> ProverState:
    """Apply the next conflict-resolution rule."""
    if st.status is not Status.CONFLICT:
        raise InvariantError("no conflict to resolve")
    if not st.conflict.clause.literals:
        raise InvariantError("empty conflict clause above level 0")
    pairs = calc.factor_pairs(st)
    if pairs:
        return calc.factorize(st, *pairs[0])
    if calc.resolvable_literals(st):
        return calc.equality_resolution(st)
    if calc.backtrack_split(st) is not None and calc.backtrack_allowed(st):
        return calc.backtrack(st)
    try:
        return calc.skip(st)
    except calc.GuardViolation:
        pass
    try:
        return calc.explore_refutation(st)
    except calc.GuardViolation as e:
        raise InvariantError(f"no conflict-resolution rule applies: {e}") from e


def resolve_conflict(st: ProverState) -> ProverState:
    while st.status is Status.CONFLICT:
        st = conflict_step(st)
    return st


# -- simplification ----------------------------------------------------------


def _is_tautology(c: Clause) -> bool:
    for i, l in enumerate(c):
        if l.positive and l.lhs == l.rhs:
            return True
        if any(l.same(m.complement()) for m in c.literals[i + 1:]):
            return True
    return False


def _clean(c: Clause) -> Clause:
    out: List[Literal] = []
    for l in c:
        if not l.positive and l.lhs == l.rhs:
            continue
        if any(l.same(m) for m in out):
            continue
        out.append(l)
    return Clause(tuple(out))


def _rewrite_once(c: Clause, lhs: Term, rhs: Term) -> Optional[Clause]:
    for i, lit in enumerate(c):
        for side in (1, 2):
            t = lit.side(side)
            for p in positions(t):
                sub = subterm_at(t, p)
                mu = match_term(lhs, sub)
                if mu is not None:
                    new_t = replace_at(t, p, apply_term(rhs, mu))
                    new_lit = Literal(lit.positive, new_t, lit.rhs) if side == 1 else \
                        Literal(lit.positive, lit.lhs, new_t)
                    lits = list(c.literals)
                    lits[i] = new_lit
                    return Clause(tuple(lits))
    return None


def _subsumes(c: Clause, d: Clause) -> bool:
    """Whether Cσ is a sub-multiset of D for some σ."""
    if len(c) > len(d):
        return False

    def rec(i: int, used: frozenset, sigma: Subst) -> bool:
        if i == len(c):
            return True
        for j, m in enumerate(d):
            if j in used:
                continue
            s = match_literal(c[i], m, sigma)
            if s is not None and rec(i + 1, used | {j}, s):
                return True
        return False

    return rec(0, frozenset(), {})


def simplify_clauses(st: ProverState) -> Tuple[ProverState, List[str]]:
    """Simplify N and U to a fixpoint without touching the trail."""
    cfg = st.cfg
    groups = [list(st.N), list(st.U)]
    changes: List[str] = []

    def all_stored():
        return [s for g in groups for s in g]

    def set_clause(name: str, new: Optional[Clause], why: str):
        for g in groups:
            for i, s in enumerate(g):
                if s.name == name:
                    if new is None:
                        del g[i]
                        changes.append(f"{why} deletes {name}")
                    else:
                        g[i] = Stored(name, new)
                        changes.append(f"{why} {name} -> {new!r}")
                    return

    progress = True
    while progress:
        progress = False
        for s in all_stored():
            if _is_tautology(s.clause):
                set_clause(s.name, None, "tautology")
                progress = True
                continue
            cleaned = _clean(s.clause)
            if cleaned != s.clause:
                set_clause(s.name, cleaned, "cleanup")
                progress = True
        if progress:
            continue
        units = [s for s in all_stored() if len(s.clause) == 1]
        for u in units:
            lit = u.clause[0]
            if not lit.positive:
                continue
            o = kbo_compare(lit.lhs, lit.rhs, cfg)
            if o is GT:
                lhs, rhs = lit.lhs, lit.rhs
            elif o is LT:
                lhs, rhs = lit.rhs, lit.lhs
            else:
                continue
            for s in all_stored():
                if s.name == u.name:
                    continue
                new = _rewrite_once(s.clause, lhs, rhs)
                if new is not None:
                    set_clause(s.name, new, f"rewrite by {u.name}")
                    progress = True
                    break
            if progress:
                break
        if progress:
            continue
        for u in units:
            k = u.clause[0]
            for s in all_stored():
                if s.name == u.name:
                    continue
                for i, m in enumerate(s.clause):
                    if match_literal(k, m.complement()) is not None:
                        set_clause(s.name, s.clause.without(i), f"resolve with {u.name}")
                        progress = True
                        break
                if progress:
                    break
            if progress:
                break
        if progress:
            continue
        stored = all_stored()
        for a in stored:
            for b in stored:
                if a.name != b.name and len(a.clause) < len(b.clause) and _subsumes(a.clause, b.clause):
                    set_clause(b.name, None, f"subsumed by {a.name}")
                    progress = True
                    break
            if progress:
                break
    new_st = replace(st, N=tuple(groups[0]), U=tuple(groups[1]))
    return new_st, changes


def simplify(st: ProverState) -> Tuple[ProverState, List[RuleApplication]]:
    """Simplify, then restart if the trail may rely on a changed clause."""
    if st.status is not Status.TOP:
        return st, []
    new, changes = simplify_clauses(st)
    if not changes:
        return st, []
    app = RuleApplication("Simplify", note="; ".join(changes))
    new = replace(new, last=app)
    apps = [app]
    if len(new.trail):
        new = calc.restart(new)
        apps.append(new.last)
    return new, apps


# -- the run -----------------------------------------------------------------


def stuck_violations(st: ProverState) -> List[str]:
    """Clause instances below beta that still have an undefined literal."""
    dom = gr.domain(st.trail, st.beta, st.sig, st.cfg)
    out = []
    for s in st.clauses:
        for sigma, undef in gr.undefined_instances(st.trail, s.clause, st.beta, dom):
            out.append(f"{s.name}: {undef[0]!r} undefined")
            break
    return out


def _variant(c: Clause, d: Clause) -> bool:
    return len(c) == len(d) and _subsumes(c, d) and _subsumes(d, c)


def with_bound(problem: Problem, beta: Optional[Term] = None) -> Tuple[Problem, Term]:
    """The problem and its bound.

    A signature without function symbols has no ground term above its
    largest constant, so a fresh constant on top of the precedence is added
    and used as the bound.
    """
    beta = beta or problem.beta
    if beta is not None:
        return problem, beta
    if any(n > 0 for n in problem.sig.values()):
        return problem, default_beta(problem.sig, problem.cfg)
    name, i = "top", 0
    while name in problem.sig:
        i += 1
        name = f"top{i}"
    sig = dict(problem.sig)
    sig[name] = 0
    cfg = KboConfig(problem.cfg.precedence + (name,), problem.cfg.weights, problem.cfg.var_weight)
    return replace(problem, sig=sig, cfg=cfg), App(name, ())


def initial(problem: Problem, cfg: SearchConfig) -> ProverState:
    problem, beta = with_bound(problem, cfg.beta)
    return calc.initial_state(problem.clauses, beta, problem.sig, problem.cfg)


class Prover:
    """Steps a regular run one rule application at a time."""

    def __init__(self, problem: Problem, cfg: Optional[SearchConfig] = None):
        self.problem = problem
        self.cfg = cfg or SearchConfig()
        script = self.cfg.decisions if self.cfg.decisions is not None else problem.decisions
        self.policy = DecisionPolicy(self.cfg.heuristic, self.cfg.seed, script)
        self.state = initial(problem, self.cfg)
        self.initial_beta = self.state.beta
        self.trace: List[RuleApplication] = []
        self.history: List[Tuple[ProverState, RuleApplication, ProverState]] = []
        self.grows = 0
        self.verdict: Optional[str] = None
        self.steps = 0
        self._simplify()

    def _record(self, before: ProverState, after: ProverState, app: RuleApplication) -> None:
        self.trace.append(app)
        if self.cfg.keep_history:
            self.history.append((before, app, after))
        if self.cfg.audit:
            bad = calc.check_sound_state(after)
            if bad:
                raise AuditFailure(f"after {app.format()}: {bad}")
        self.state = after

    def _simplify(self) -> None:
        if not self.cfg.simplify:
            return
        before = self.state
        new, apps = simplify(before)
        if not apps:
            return
        # record the intermediate state for a restart separately
        if len(apps) == 2:
            mid, _ = simplify_clauses(before)
            mid = replace(mid, last=apps[0])
            self._record(before, mid, apps[0])
            self._record(mid, new, apps[1])
        else:
            self._record(before, new, apps[0])

    def step(self) -> Optional[str]:
        """Apply one rule; returns the verdict once the run has ended."""
        if self.verdict is not None:
            return self.verdict
        st = self.state
        if st.status is Status.BOTTOM:
            self.verdict = "Unsatisfiable"
            return self.verdict
        if self.steps >= self.cfg.max_steps:
            self.verdict = "ResourceOut"
            return self.verdict
        self.steps += 1
        if st.status is Status.CONFLICT:
            new = conflict_step(st)
            self._record(st, new, new.last)
            if new.last.rule == "Backtrack":
                learned = new.U[-1].clause
                for other in new.U[:-1]:
                    if _variant(other.clause, learned):
                        raise InvariantError(f"learned clause {learned!r} repeats {other.name}")
                self._simplify()
            return None
        found = find_conflict(st)
        if found is not None:
            new = calc.conflict(st, *found)
            self._record(st, new, new.last)
            return None
        prop = find_propagation(st)
        if prop is not None:
            new = calc.propagate(st, prop.name, prop.sigma, prop.lit, prop.copies)
            self._record(st, new, new.last)
            return None
        dec = self.policy.choose(st)
        if dec is not None:
            new = calc.decide(st, dec.name, dec.sigma, dec.lit)
            self._record(st, new, new.last)
            return None
        if self.grows < self.cfg.grow_limit:
            self.grows += 1
            new = calc.grow(st, grow_beta(st.beta, st.sig, st.cfg))
            self._record(st, new, new.last)
            return None
        self.verdict = "BoundedModel"
        return self.verdict

    def run(self) -> RunResult:
        while self.step() is None:
            pass
        return RunResult(self.verdict, self.state, self.trace, self.history, self.initial_beta)


def run(problem: Problem, cfg: Optional[SearchConfig] = None) -> RunResult:
    return Prover(problem, cfg).run()


# -- replay and validation ---------------------------------------------------


def apply_recorded(st: ProverState, app: RuleApplication) -> ProverState:
    """Re-apply one recorded rule application."""
    r = app.rule
    if r == "Propagate":
        copies = app.param("copies", "-")
        cp = () if copies == "-" else tuple(int(x) for x in copies.split(","))
        return calc.propagate(st, app.clause, dict(app.subst), int(app.param("lit")), cp)
    if r == "Decide":
        return calc.decide(st, app.clause, dict(app.subst), int(app.param("lit")))
    if r == "Conflict":
        return calc.conflict(st, app.clause, dict(app.subst))
    if r == "Skip":
        return calc.skip(st)
    if r == "Explore-Refutation":
        return calc.explore_refutation(st, int(app.param("step")) - 1)
    if r == "Factorize":
        return calc.factorize(st, int(app.param("keep")), int(app.param("drop")))
    if r == "Equality-Resolution":
        return calc.equality_resolution(st, int(app.param("lit")))
    if r == "Backtrack":
        return calc.backtrack(st)
    if r == "Grow":
        from .frontend.parser import parse_term

        return calc.grow(st, parse_term(app.param("beta"), st.sig))
    if r == "Restart":
        return calc.restart(st)
    if r == "Simplify":
        new, _ = simplify_clauses(st)
        return replace(new, last=RuleApplication("Simplify", note=app.note))
    raise ValueError(f"unknown rule {r}")


def replay(st: ProverState, apps: Iterable[RuleApplication]) -> ProverState:
    for app in apps:
        st = apply_recorded(st, app)
    return st


def validate_regular_run(history: Sequence[Tuple[ProverState, RuleApplication, ProverState]]
                         ) -> List[str]:
    """Check the regular-run discipline on a recorded history."""
    out: List[str] = []
    conflict_after_decide = False
    for n, (before, app, after) in enumerate(history):
        r = app.rule
        where = f"step {n} ({r})"
        if before.status is Status.TOP and r in ("Propagate", "Decide", "Grow"):
            if find_conflict(before) is not None:
                out.append(f"{where}: a conflict was available")
        if before.status is Status.CONFLICT and r != "Factorize" and calc.factor_pairs(before):
            out.append(f"{where}: Factorize was available")
        if r == "Decide":
            if before.level == 0 and find_propagation(before) is not None:
                out.append(f"{where}: decided at level 0 with a pending propagation")
            pushed = after.trail[-1].literal.complement()
            for p in propagation_candidates(before):
                if p.pushed.same(pushed):
                    out.append(f"{where}: the complement of the decision was propagatable")
                    break
        if r == "Conflict":
            conflict_after_decide = bool(history[n - 1][1].rule == "Decide") if n else False
        if r == "Backtrack":
            if before.skips == 0 and not conflict_after_decide:
                out.append(f"{where}: backtracked without a Skip")
            if conflict_after_decide and before.skips == 0:
                comp = before.trail[-1].literal.complement()
                if not any(l.same(comp) for l in before.conflict.ground()):
                    out.append(f"{where}: backtracked from a decision conflict too early")
    return out
