"""Prover states and the guarded transition rules.

Every rule is a pure function from a state to a new state.  A rule whose
side conditions fail raises ``GuardViolation`` naming the failed condition;
choosing which rule to apply is left to the search driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import grounding as gr
from .ordering import KboConfig, Signature, enumerate_ground_terms_below, kbo_compare, literal_below, LT
from .rewriting import (
    NotFalse,
    ReductionChain,
    leaf,
    reduction_chain_application,
    refutation,
)
from .terms import (
    Clause,
    Closure,
    Literal,
    Subst,
    Term,
    Var,
    apply_subst,
    clause_vars,
    format_subst,
    literal_vars,
    mgu,
    restrict,
)
from .trail import FALSE, TRUE, UNDEFINED, EntryKind, Trail, TrailEntry


class GuardViolation(ValueError):
    """A rule was applied although one of its side conditions fails."""


class InvariantError(RuntimeError):
    """Conflict resolution reached a state where no rule applies."""


class Status(Enum):
    TOP = "Top"
    BOTTOM = "Bottom"
    CONFLICT = "Conflict"


@dataclass(frozen=True)
class Stored:
    name: str
    clause: Clause

    def __repr__(self):
        return f"{self.name}: {self.clause!r}"


@dataclass(frozen=True)
class Learned:
    """A learned clause with what was known when it was learned."""

    name: str
    clause: Clause
    instance: Closure
    trail: Trail
    pool: Tuple[Stored, ...]
    beta: Term


@dataclass(frozen=True)
class Context:
    sig: Signature
    cfg: KboConfig
    origin: Tuple[Clause, ...]
    cache: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    clause: Optional[str] = None
    subst: Mapping[int, Term] = field(default_factory=dict)
    params: Tuple[Tuple[str, str], ...] = ()
    note: str = ""

    def param(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def format(self) -> str:
        parts = [f"rule={self.rule}"]
        if self.clause is not None:
            parts.append(f"clause={self.clause}")
            parts.append(f"subst={format_subst(self.subst)}")
        parts.extend(f"{k}={v}" for k, v in self.params)
        line = " ".join(parts)
        return f"{line} | {self.note}" if self.note else line


@dataclass(frozen=True)
class ProverState:
    trail: Trail
    N: Tuple[Stored, ...]
    U: Tuple[Stored, ...]
    beta: Term
    level: int
    status: Status
    ctx: Context
    conflict: Optional[Closure] = None
    skips: int = 0
    after_decide: bool = False
    last_was_decide: bool = False
    learned: Tuple[Learned, ...] = ()
    next_id: int = 0
    last: Optional[RuleApplication] = None

    @property
    def cfg(self) -> KboConfig:
        return self.ctx.cfg

    @property
    def sig(self) -> Signature:
        return self.ctx.sig

    @property
    def clauses(self) -> Tuple[Stored, ...]:
        return self.N + self.U

    def clause(self, name: str) -> Clause:
        for s in self.clauses:
            if s.name == name:
                return s.clause
        raise GuardViolation(f"no clause named {name} in N or U")

    def describe(self) -> str:
        d = {Status.TOP: "⊤", Status.BOTTOM: "⊥"}.get(self.status, repr(self.conflict))
        return f"(trail={self.trail!r}; beta={self.beta!r}; k={self.level}; D={d})"

    def signature(self) -> tuple:
        """Everything observable about the state, for replay comparison."""
        return (
            tuple(self.trail.dump()),
            tuple(map(repr, self.N)),
            tuple(map(repr, self.U)),
            repr(self.beta),
            self.level,
            self.status.value,
            repr(self.conflict),
        )


def initial_state(clauses: Sequence[Clause], beta: Term, sig: Signature, cfg: KboConfig
                  ) -> ProverState:
    if not beta.ground:
        raise GuardViolation("the bound must be a ground term")
    stored = tuple(Stored(f"N{i}", c) for i, c in enumerate(clauses))
    return ProverState(Trail(cfg), stored, (), beta, 0, Status.TOP,
                       Context(dict(sig), cfg, tuple(clauses)))


# -- helpers -----------------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise GuardViolation(msg)


def _require_status(st: ProverState, status: Status, rule: str) -> None:
    _require(st.status is status, f"{rule} needs status {status.value}, state is {st.status.value}")


def _check_grounding(st: ProverState, clause: Clause, sigma: Subst) -> None:
    missing = [v for v in clause_vars(clause) if v not in sigma or not sigma[v].ground]
    _require(not missing, f"grounding leaves X{missing[0] if missing else ''} open")
    for v in clause_vars(clause):
        _require(st.trail.irreducible(sigma[v]),
                 f"grounding value {sigma[v]!r} of X{v} is reducible by the trail")


def _beta_value(st: ProverState, lit: Literal):
    return st.trail.beta_value_of(lit, st.beta)


def canonical_clause(clause: Clause, sigma: Optional[Subst] = None) -> Tuple[Clause, Subst]:
    """Rename variables to X0, X1, ... by first occurrence."""
    ren = {old: Var(new) for new, old in enumerate(clause_vars(clause))}
    renamed = apply_subst(clause, ren)
    ground = {}
    if sigma is not None:
        ground = {ren[old].index: sigma[old] for old in ren}
    return renamed, ground


def _push_chain(st: ProverState, chain: ReductionChain, level: int, decision: bool) -> Trail:
    final = chain.last
    if decision:
        grounding = restrict(final.grounding, literal_vars(final.literal))
        entry = TrailEntry.decision(final.literal, level, grounding, final.ground_literal)
    else:
        entry = TrailEntry.from_step(final, level, EntryKind.PROPAGATED)
    _require(literal_below(entry.literal, st.beta, st.cfg), f"{entry.literal!r} is not below beta")
    return st.trail.push(entry)


# -- rules -------------------------------------------------------------------


def propagate(st: ProverState, name: str, sigma: Subst, lit: int,
              copies: Sequence[int] = ()) -> ProverState:
    """Propagate literal ``lit`` of clause ``name``.

    ``copies`` index further literals with the same ground instance; they are merged into it."""
    _require_status(st, Status.TOP, "Propagate")
    clause = st.clause(name)
    _require(0 <= lit < len(clause), "literal index out of range")
    _require(lit not in copies and all(0 <= i < len(clause) for i in copies), "bad copy indices")
    _check_grounding(st, clause, sigma)
    main = clause[lit]
    ground_main = apply_subst(main, sigma)
    unifier: Subst = {}
    for i in copies:
        other = clause[i]
        _require(apply_subst(other, sigma).same(ground_main),
                 f"literal {i} is not an instance copy of the propagated literal")
        if apply_subst(other, sigma) != ground_main:
            other = other.flipped()
        mu = mgu([apply_subst(main, unifier), apply_subst(other, unifier)])
        _require(mu is not None, f"literal {i} does not unify with the propagated literal")
        unifier = {**{x: apply_subst(t, mu) for x, t in unifier.items()}, **mu}
    rest_idx = [i for i in range(len(clause)) if i != lit and i not in copies]
    for i in rest_idx:
        _require(_beta_value(st, apply_subst(clause[i], sigma)) is FALSE,
                 f"literal {i} of {name} is not beta-false under the grounding")
    _require(_beta_value(st, ground_main) is UNDEFINED and literal_below(ground_main, st.beta, st.cfg),
             f"{ground_main!r} is not beta-undefined below beta")
    new_lit = apply_subst(main, unifier)
    new_rest = Clause(tuple(apply_subst(clause[i], unifier) for i in rest_idx))
    grounding = restrict(sigma, clause_vars(Clause((new_lit,) + new_rest.literals)))
    target = leaf(new_lit, new_rest, grounding)
    chain = reduction_chain_application(st.trail, target, st.cfg)
    trail = _push_chain(st, chain, st.level, decision=False)
    app = RuleApplication("Propagate", name, dict(sigma),
                          (("lit", str(lit)), ("copies", ",".join(map(str, copies)) or "-")),
                          f"push {trail[-1].literal!r} lvl={st.level} chain={len(chain)}")
    return replace(st, trail=trail, last_was_decide=False, last=app)


def decide(st: ProverState, name: str, sigma: Subst, lit: int) -> ProverState:
    _require_status(st, Status.TOP, "Decide")
    clause = st.clause(name)
    _require(0 <= lit < len(clause), "literal index out of range")
    _check_grounding(st, clause, sigma)
    ground = apply_subst(clause, sigma)
    _require(all(literal_below(l, st.beta, st.cfg) for l in ground), "clause instance is not below beta")
    _require(_beta_value(st, ground[lit]) is UNDEFINED, f"{ground[lit]!r} is not beta-undefined")
    rest_vals = [_beta_value(st, l) for i, l in enumerate(ground) if i != lit]
    _require(any(v is not FALSE for v in rest_vals),
             "the rest of the clause is beta-false; this is a propagation")
    target = leaf(clause[lit], clause.without(lit), sigma)
    chain = reduction_chain_application(st.trail, target, st.cfg)
    trail = _push_chain(st, chain, st.level + 1, decision=True)
    app = RuleApplication("Decide", name, dict(sigma), (("lit", str(lit)),),
                          f"push {trail[-1].literal!r} lvl={st.level + 1}")
    return replace(st, trail=trail, level=st.level + 1, last_was_decide=True, last=app)


def conflict(st: ProverState, name: str, sigma: Subst) -> ProverState:
    _require_status(st, Status.TOP, "Conflict")
    clause = st.clause(name)
    _check_grounding(st, clause, sigma)
    ground = apply_subst(clause, sigma)
    _require(all(_beta_value(st, l) is FALSE for l in ground), f"{ground!r} is not beta-false")
    level = st.trail.clause_level(ground)
    grounding = restrict(sigma, clause_vars(clause))
    if level == 0:
        app = RuleApplication("Conflict", name, dict(sigma), (("level", "0"),), "⊥")
        return replace(st, status=Status.BOTTOM, conflict=None, last=app)
    app = RuleApplication("Conflict", name, dict(sigma), (("level", str(level)),), repr(ground))
    return replace(st, status=Status.CONFLICT, conflict=Closure(clause, grounding),
                   skips=0, after_decide=st.last_was_decide, last_was_decide=False, last=app)


def skip(st: ProverState) -> ProverState:
    _require_status(st, Status.CONFLICT, "Skip")
    _require(len(st.trail) >= 1, "Skip needs a non-empty trail")
    shorter = st.trail.pop_to(len(st.trail) - 1)
    ground = st.conflict.ground()
    _require(all(shorter.beta_value_of(l, st.beta) is FALSE for l in ground),
             "the conflict clause depends on the rightmost trail literal")
    dropped = st.trail[-1].literal
    app = RuleApplication("Skip", note=f"drop {dropped!r}")
    return replace(st, trail=shorter, level=shorter.level, skips=st.skips + 1, last=app)


def maximal_literal(st: ProverState, clause: Clause) -> Tuple[int, bool]:
    """Index of a ≺Γ*-maximal literal and whether it is strictly maximal."""
    keys = [st.trail.gamma_key(l, st.beta) for l in clause]
    top = max(keys)
    idx = keys.index(top)
    return idx, keys.count(top) == 1


def explore_candidates(st: ProverState) -> Tuple[ReductionChain, List[int]]:
    """The refutation of the maximal conflict literal and its qualifying steps."""
    _require_status(st, Status.CONFLICT, "Explore-Refutation")
    clo = st.conflict
    ground = clo.ground()
    _require(len(ground) > 0, "the conflict clause is empty")
    idx, strict = maximal_literal(st, ground)
    _require(strict, "the maximal conflict literal is not strictly maximal")
    d = st.trail.defining_index(ground[idx])
    _require(d is not None and d == len(st.trail) - 1,
             "the rightmost trail literal does not define the maximal conflict literal")
    target = leaf(clo.clause[idx], clo.clause.without(idx), clo.grounding)
    try:
        chain = refutation(st.trail, target, st.cfg)
    except NotFalse as e:
        raise GuardViolation(str(e)) from e
    key = st.trail.gamma_clause_key(ground, st.beta)
    good = []
    for j, step in enumerate(chain):
        g = step.ground_clause
        if all(_beta_value(st, l) is FALSE for l in g) and st.trail.gamma_clause_key(g, st.beta) < key:
            good.append(j)
    return chain, good


def explore_refutation(st: ProverState, j: Optional[int] = None) -> ProverState:
    chain, good = explore_candidates(st)
    if j is None:
        _require(bool(good), "no refutation step qualifies as a new conflict clause")
        j = min(good, key=lambda i: st.trail.gamma_clause_key(chain[i].ground_clause, st.beta))
    _require(j in good, f"refutation step {j + 1} does not qualify")
    step = chain[j]
    clo = Closure(step.clause, dict(step.grounding))
    app = RuleApplication("Explore-Refutation", params=(("step", str(j + 1)), ("chain", str(len(chain)))),
                          note=repr(step.ground_clause))
    return replace(st, conflict=clo, last=app)


def factor_pairs(st: ProverState) -> List[Tuple[int, int]]:
    if st.status is not Status.CONFLICT:
        return []
    ground = st.conflict.ground()
    return [(i, k) for i in range(len(ground)) for k in range(i + 1, len(ground))
            if ground[i].same(ground[k])]


def factorize(st: ProverState, i: int, k: int) -> ProverState:
    _require_status(st, Status.CONFLICT, "Factorize")
    clo = st.conflict
    c = clo.clause
    _require(0 <= i < len(c) and 0 <= k < len(c) and i != k, "bad literal indices")
    g = clo.ground()
    _require(g[i].same(g[k]), f"{g[i]!r} and {g[k]!r} are different ground literals")
    other = c[k] if apply_subst(c[k], clo.grounding) == g[i] else c[k].flipped()
    mu = mgu([c[i], other])
    _require(mu is not None, "the two literals do not unify")
    new = apply_subst(c.without(k), mu)
    grounding = restrict(clo.grounding, clause_vars(new))
    app = RuleApplication("Factorize", params=(("keep", str(i)), ("drop", str(k))), note=repr(g[k]))
    return replace(st, conflict=Closure(new, grounding), last=app)


def resolvable_literals(st: ProverState) -> List[int]:
    if st.status is not Status.CONFLICT:
        return []
    g = st.conflict.ground()
    return [i for i, l in enumerate(g) if not l.positive and l.lhs == l.rhs]


def equality_resolution(st: ProverState, i: Optional[int] = None) -> ProverState:
    _require_status(st, Status.CONFLICT, "Equality-Resolution")
    options = resolvable_literals(st)
    if i is None:
        _require(bool(options), "no negative literal with equal ground sides")
        i = options[0]
    _require(i in options, f"literal {i} is not a reflexive inequation")
    clo = st.conflict
    lit = clo.clause[i]
    mu = mgu([lit.lhs, lit.rhs])
    _require(mu is not None, "the sides of the inequation do not unify")
    new = apply_subst(clo.clause.without(i), mu)
    grounding = restrict(clo.grounding, clause_vars(new))
    app = RuleApplication("Equality-Resolution", params=(("lit", str(i)),),
                          note=repr(apply_subst(lit, clo.grounding)))
    return replace(st, conflict=Closure(new, grounding), last=app)


def backtrack_split(st: ProverState) -> Optional[int]:
    """Index of the single conflict literal of the current level, if any."""
    levels = [st.trail.level_of(l) for l in st.conflict.ground()]
    top = [i for i, lv in enumerate(levels) if lv == st.level]
    if len(top) != 1 or any(lv > st.level for lv in levels):
        return None
    return top[0]


def backtrack_allowed(st: ProverState) -> bool:
    """The extra conditions a regular run puts on Backtrack."""
    if st.skips >= 1:
        return True
    if not st.after_decide or not len(st.trail):
        return False
    last = st.trail[-1].literal.complement()
    return any(l.same(last) for l in st.conflict.ground())


def backtrack(st: ProverState, regular: bool = True) -> ProverState:
    _require_status(st, Status.CONFLICT, "Backtrack")
    _require(st.level > 0, "Backtrack at level 0")
    _require(backtrack_split(st) is not None,
             "the conflict clause needs exactly one literal of the current level")
    if regular:
        _require(backtrack_allowed(st), "a regular run may not backtrack here yet")
    clause = st.conflict.clause
    cut = None
    for n in range(1, len(st.trail) + 1):
        prefix = st.trail.pop_to(n)
        dom = gr.domain(prefix, st.beta, st.sig, st.cfg)
        if gr.first_false_grounding(prefix, clause, st.beta, dom) is not None:
            cut = n - 1
            break
    _require(cut is not None, "no trail prefix falsifies the conflict clause")
    k_entry = st.trail[cut]
    level = k_entry.level - (1 if k_entry.is_decision else 0)
    learned, grounding = canonical_clause(clause, st.conflict.grounding)
    name = f"U{st.next_id}"
    record = Learned(name, learned, Closure(learned, grounding), st.trail, st.clauses, st.beta)
    app = RuleApplication("Backtrack", params=(("learn", name), ("to", str(cut)), ("level", str(level))),
                          note=repr(learned))
    return replace(st, trail=st.trail.pop_to(cut), U=st.U + (Stored(name, learned),), level=level,
                   status=Status.TOP, conflict=None, skips=0, after_decide=False,
                   last_was_decide=False, learned=st.learned + (record,), next_id=st.next_id + 1,
                   last=app)


def grow(st: ProverState, new_beta: Term) -> ProverState:
    _require_status(st, Status.TOP, "Grow")
    _require(new_beta.ground and kbo_compare(st.beta, new_beta, st.cfg) is LT,
             f"{new_beta!r} is not larger than the current bound {st.beta!r}")
    app = RuleApplication("Grow", params=(("beta", repr(new_beta)),))
    return replace(st, trail=Trail(st.cfg), beta=new_beta, level=0, last_was_decide=False, last=app)


def restart(st: ProverState) -> ProverState:
    _require_status(st, Status.TOP, "Restart")
    return replace(st, trail=Trail(st.cfg), level=0, last_was_decide=False,
                   last=RuleApplication("Restart"))


# -- soundness audit ---------------------------------------------------------


@dataclass
class AuditLimits:
    max_universe: int = 30
    max_instances: int = 3000


def _ground_pool(ctx: Context, clauses: Sequence[Clause], beta: Term, limits: AuditLimits
                 ) -> Optional[List[Clause]]:
    from .oracle import gnd_below

    key = ("pool", beta, tuple(clauses))
    if key in ctx.cache:
        return ctx.cache[key]
    out = None
    if len(enumerate_ground_terms_below(beta, ctx.sig, ctx.cfg)) <= limits.max_universe:
        out = gnd_below(clauses, beta, ctx.sig, ctx.cfg)
        if len(out) > limits.max_instances:
            out = None
    ctx.cache[key] = out
    return out


def _entailed(ctx: Context, pool: Optional[List[Clause]], key: tuple, target: Clause) -> Optional[bool]:
    from .oracle import OracleLimit, entails

    if pool is None:
        return None
    ck = ("ent", key, target)
    if ck not in ctx.cache:
        try:
            ctx.cache[ck] = entails(pool, target)
        except OracleLimit:
            ctx.cache[ck] = None
    return ctx.cache[ck]


def check_sound_state(st: ProverState, limits: Optional[AuditLimits] = None) -> List[str]:
    """Violations of the soundness conditions; an empty list means sound."""
    from .oracle import consistent

    limits = limits or AuditLimits()
    out: List[str] = []
    trail, beta, cfg = st.trail, st.beta, st.cfg
    lits = trail.literals
    if not consistent(lits):
        out.append("1: the trail is inconsistent")
    for lit in lits:
        if not literal_below(lit, beta, cfg):
            out.append(f"trail literal {lit!r} is not below beta")
    current = [s.clause for s in st.clauses]
    pool = _ground_pool(st.ctx, current, beta, limits)
    pool_key = (beta, tuple(current))
    for i, e in enumerate(trail):
        prefix = trail.pop_to(i)
        if prefix.beta_value_of(e.literal, beta) is not UNDEFINED:
            out.append(f"{2 if not e.is_decision else 3}: entry {i} {e.literal!r} was defined before it")
        if not (prefix.irreducible(e.literal.lhs) and prefix.irreducible(e.literal.rhs)):
            out.append(f"{2 if not e.is_decision else 3}: entry {i} {e.literal!r} is reducible by its prefix")
        just = e.justification.ground()
        if not all(literal_below(l, beta, cfg) for l in just):
            out.append(f"{2 if not e.is_decision else 3}: justification of entry {i} is not below beta")
        if apply_subst(e.just_literal, e.grounding) != e.literal:
            out.append(f"entry {i}: literal does not match its justification")
        if e.is_decision:
            if e.just_rest != Clause((e.just_literal.complement(),)):
                out.append(f"3: decision {i} is not justified by a tautology")
            continue
        rest = apply_subst(e.just_rest, e.grounding)
        if not all(prefix.beta_value_of(l, beta) is FALSE for l in rest):
            out.append(f"2: justification rest of entry {i} is not beta-false in its prefix")
        if _entailed(st.ctx, pool, pool_key, just) is False:
            out.append(f"2: justification of entry {i} is not entailed by N and U")
    for rec in st.learned:
        pcl = [s.clause for s in rec.pool]
        ppool = _ground_pool(st.ctx, pcl, rec.beta, limits)
        if _entailed(st.ctx, ppool, (rec.beta, tuple(pcl)), rec.instance.ground()) is False:
            out.append(f"4: learned {rec.name} is not entailed at learn time")
    if st.status is Status.CONFLICT:
        g = st.conflict.ground()
        if not all(trail.beta_value_of(l, beta) is FALSE for l in g):
            out.append(f"5: conflict clause {g!r} is not beta-false")
        if _entailed(st.ctx, pool, pool_key, g) is False:
            out.append(f"5: conflict clause {g!r} is not entailed by N and U")
    return out
