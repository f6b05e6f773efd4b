"""Ground rewrite systems, rewrite steps and rewrite inferences.

A rewrite step is a proof node: a literal closure taken from a justification
clause, and, for inner nodes, the two premises and the position that was
rewritten.  Completion of the positive trail equations yields a convergent
ground system whose rules carry such steps as provenance, so normalizing a
literal can be replayed as a chain of rewrite inferences.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ordering import KboConfig
from .terms import (
    App,
    Clause,
    Closure,
    Literal,
    Position,
    Subst,
    Term,
    Var,
    apply_subst,
    clause_vars,
    format_subst,
    literal_replace,
    literal_subterm,
    literal_vars,
    max_var,
    mgu,
    replace_at,
    shift_vars,
)


class InferenceError(ValueError):
    """A rewrite inference was requested whose premises do not fit."""


class NotFalse(ValueError):
    """A refutation was requested for a literal that is not false."""


@dataclass(eq=False)
class RewriteStep:
    literal: Literal
    rest: Clause
    grounding: Subst
    left: Optional["RewriteStep"] = None
    right: Optional["RewriteStep"] = None
    position: Optional[Position] = None
    tag: object = None
    _ground: Optional[Literal] = field(default=None, repr=False)
    _ground_rest: Optional[Clause] = field(default=None, repr=False)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def clause(self) -> Clause:
        return Clause((self.literal,) + self.rest.literals)

    @property
    def ground_literal(self) -> Literal:
        if self._ground is None:
            self._ground = apply_subst(self.literal, self.grounding)
        return self._ground

    @property
    def ground_rest(self) -> Clause:
        if self._ground_rest is None:
            self._ground_rest = apply_subst(self.rest, self.grounding)
        return self._ground_rest

    @property
    def ground_clause(self) -> Clause:
        return Clause((self.ground_literal,) + self.ground_rest.literals)

    @property
    def rewrite_literal(self) -> Closure:
        return Closure(Clause((self.literal,)), self.grounding)

    @property
    def justification(self) -> Closure:
        return Closure(self.clause, self.grounding)

    def __repr__(self):
        where = "" if self.is_leaf else f" @{''.join(map(str, self.position))}"
        return f"<{self.ground_literal!r} :: {self.ground_clause!r}{where}>"


def leaf(literal: Literal, rest: Clause, grounding: Subst, tag: object = None) -> RewriteStep:
    return RewriteStep(literal, rest, dict(grounding), tag=tag)


def _canonical(lit: Literal, rest: Clause, sigma: Subst) -> Tuple[Literal, Clause, Subst]:
    """Rename variables to 0, 1, ... by first occurrence; restrict the grounding."""
    order = list(literal_vars(lit))
    for v in clause_vars(rest):
        if v not in order:
            order.append(v)
    ren = {old: Var(new) for new, old in enumerate(order)}
    ground = {}
    for old, new in ren.items():
        if old not in sigma:
            raise InferenceError(f"variable X{old} is left without a ground value")
        ground[new.index] = sigma[old]
    return apply_subst(lit, ren), apply_subst(rest, ren), ground


def _oriented(step: RewriteStep, cfg: KboConfig) -> Tuple[Term, Term]:
    lit, g = step.literal, step.ground_literal
    kl, kr = cfg.key(g.lhs), cfg.key(g.rhs)
    if kr < kl:
        return lit.lhs, lit.rhs
    if kl < kr:
        return lit.rhs, lit.lhs
    raise InferenceError("the left premise is a trivial equation and cannot rewrite")


def rewrite_inference(i1: RewriteStep, i2: RewriteStep, p: Position, cfg: KboConfig) -> RewriteStep:
    """Rewrite the literal of i2 at position p with the equation of i1.

    The equation is used left to right in the direction that decreases its
    ground instance.  When p lies below a variable of i2's literal, that
    variable is first instantiated by a linear term with fresh variables so
    that p becomes a proper position.
    """
    if not i1.literal.positive:
        raise InferenceError("the left premise must be a positive equation")
    l1, r1 = _oriented(i1, cfg)
    g2 = i2.ground_literal
    l1_ground = apply_subst(l1, i1.grounding)
    try:
        at_p = literal_subterm(g2, p)
    except ValueError as exc:
        raise InferenceError(str(exc)) from None
    if at_p != l1_ground:
        raise InferenceError(f"{at_p!r} at {p} does not match {l1_ground!r}")

    offset = max(max_var(i2.literal, i2.rest, i2.grounding), -1) + 1
    lit1 = shift_vars(i1.literal, offset)
    rest1 = shift_vars(i1.rest, offset)
    sigma1 = shift_vars(dict(i1.grounding), offset)
    l1, r1 = shift_vars(l1, offset), shift_vars(r1, offset)
    sigma: Subst = dict(i2.grounding)
    sigma.update(sigma1)

    lit2, rest2 = i2.literal, i2.rest
    below = _variable_above(lit2, p)
    if below is not None:
        prefix, x = below
        fresh = max(max_var(lit1, rest1, sigma1), offset - 1) + 1
        shape, rho = _shape(i2.grounding[x], p[len(prefix):], fresh)
        delta = {x: shape}
        lit2, rest2 = apply_subst(lit2, delta), apply_subst(rest2, delta)
        sigma.update(rho)

    target = literal_subterm(lit2, p)
    mu = mgu([target, l1])
    if mu is None:
        raise InferenceError("rewrite position does not unify with the equation")
    new_lit = apply_subst(literal_replace(lit2, p, r1), mu)
    new_rest = apply_subst(Clause(rest1.literals + rest2.literals), mu)
    new_lit, new_rest, ground = _canonical(new_lit, new_rest, sigma)
    return RewriteStep(new_lit, new_rest, ground, left=i1, right=i2, position=tuple(p))


def _variable_above(lit: Literal, p: Position) -> Optional[Tuple[Position, int]]:
    """If p passes strictly below a variable of lit, the variable's position and index."""
    t = lit.side(p[0])
    for depth, i in enumerate(p[1:]):
        if isinstance(t, Var):
            return tuple(p[: depth + 1]), t.index
        t = t.args[i - 1]
    return None


def _shape(value: Term, path: Position, fresh: int) -> Tuple[Term, Subst]:
    """A linear term with fresh variables along the shape of value leading to path.

    Returns the term and the matcher from its variables onto value.
    """
    rho: Subst = {}
    counter = [fresh]

    def new_var(bound: Term) -> Var:
        v = Var(counter[0])
        counter[0] += 1
        rho[v.index] = bound
        return v

    def build(t: Term, rest: Position) -> Term:
        if not rest:
            return new_var(t)
        assert isinstance(t, App)
        args = [build(a, rest[1:]) if j == rest[0] else new_var(a)
                for j, a in enumerate(t.args, 1)]
        return App(t.fn, args)

    return build(value, path), rho


# -- ground rewrite systems --------------------------------------------------


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    step: Optional[RewriteStep] = None
    sources: Tuple[int, ...] = ()

    def __repr__(self):
        return f"{self.lhs!r} -> {self.rhs!r}"


def _contains(t: Term, s: Term) -> bool:
    if t == s:
        return True
    if isinstance(t, App) and t.size > s.size:
        return any(_contains(a, s) for a in t.args)
    return False


class Trs:
    """A ground rewrite system indexed by left-hand side."""

    def __init__(self, rules: Optional[Dict[Term, Rule]] = None):
        self.rules: Dict[Term, Rule] = dict(rules or {})
        self._nf: Dict[Term, Term] = {}

    def __iter__(self):
        return iter(self.rules.values())

    def __len__(self):
        return len(self.rules)

    def __contains__(self, lhs: Term) -> bool:
        return lhs in self.rules

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.rules.values())) + "}"

    def pairs(self) -> Dict[Term, Term]:
        return {r.lhs: r.rhs for r in self.rules.values()}

    def nf(self, t: Term) -> Term:
        """Normal form, memoized; the system must be terminating."""
        hit = self._nf.get(t)
        if hit is not None:
            return hit
        if isinstance(t, App) and t.args:
            u = App(t.fn, [self.nf(a) for a in t.args])
        else:
            u = t
        rule = self.rules.get(u)
        out = self.nf(rule.rhs) if rule is not None else u
        self._nf[t] = out
        return out

    def irreducible(self, t: Term) -> bool:
        return self.nf(t) == t

    def find_redex(self, t: Term) -> Optional[Tuple[Position, Rule]]:
        """Leftmost-innermost reducible position."""
        if isinstance(t, App):
            for i, a in enumerate(t.args, 1):
                hit = self.find_redex(a)
                if hit is not None:
                    return (i,) + hit[0], hit[1]
        rule = self.rules.get(t)
        if rule is not None:
            return (), rule
        return None


def normalize(t: Term, trs: Trs) -> Tuple[Term, List[Tuple[Rule, Position]]]:
    """Normal form of t with the sequence of (rule, position) rewrites applied."""
    trace: List[Tuple[Rule, Position]] = []
    while True:
        hit = trs.find_redex(t)
        if hit is None:
            return t, trace
        pos, rule = hit
        trace.append((rule, pos))
        t = replace_at(t, pos, rule.rhs)


@dataclass
class _Pending:
    lhs: Term
    rhs: Term
    step: Optional[RewriteStep]
    sources: Tuple[int, ...]


def _rewrite_side(eqn: _Pending, side: int, trs: Trs, cfg: KboConfig) -> _Pending:
    while True:
        term = eqn.lhs if side == 1 else eqn.rhs
        hit = trs.find_redex(term)
        if hit is None:
            return eqn
        pos, rule = hit
        new_term = replace_at(term, pos, rule.rhs)
        step = eqn.step
        if step is not None:
            step = rewrite_inference(rule.step, step, (side,) + pos, cfg)
        sources = tuple(sorted(set(eqn.sources) | set(rule.sources)))
        if side == 1:
            eqn = _Pending(new_term, eqn.rhs, step, sources)
        else:
            eqn = _Pending(eqn.lhs, new_term, step, sources)


def complete(base: Trs, equations: Iterable[_Pending], cfg: KboConfig) -> Trs:
    """Ground completion by interreduction; returns a reduced convergent system."""
    rules = dict(base.rules)
    queue = deque(equations)
    while queue:
        eqn = queue.popleft()
        trs = Trs(rules)
        eqn = _rewrite_side(eqn, 1, trs, cfg)
        eqn = _rewrite_side(eqn, 2, trs, cfg)
        if eqn.lhs == eqn.rhs:
            continue
        if cfg.key(eqn.lhs) > cfg.key(eqn.rhs):
            new = Rule(eqn.lhs, eqn.rhs, eqn.step, eqn.sources)
        else:
            new = Rule(eqn.rhs, eqn.lhs, eqn.step, eqn.sources)
        stale_rhs = []
        for old in list(rules.values()):
            if _contains(old.lhs, new.lhs):
                del rules[old.lhs]
                queue.append(_rule_as_pending(old))
            elif _contains(old.rhs, new.lhs):
                stale_rhs.append(old)
        rules[new.lhs] = new
        for old in stale_rhs:
            trs = Trs(rules)
            pend = _rule_as_pending(old)
            side = 1 if pend.lhs == old.rhs else 2
            pend = _rewrite_side(pend, side, trs, cfg)
            lhs, rhs = (pend.rhs, pend.lhs) if side == 1 else (pend.lhs, pend.rhs)
            rules[old.lhs] = Rule(lhs, rhs, pend.step, pend.sources)
    return Trs(rules)


def _rule_as_pending(rule: Rule) -> _Pending:
    if rule.step is None:
        return _Pending(rule.lhs, rule.rhs, None, rule.sources)
    g = rule.step.ground_literal
    return _Pending(g.lhs, g.rhs, rule.step, rule.sources)


def equation(lhs: Term, rhs: Term, step: Optional[RewriteStep] = None,
             sources: Sequence[int] = ()) -> _Pending:
    return _Pending(lhs, rhs, step, tuple(sources))


def step_equation(step: RewriteStep, sources: Sequence[int] = ()) -> _Pending:
    g = step.ground_literal
    return _Pending(g.lhs, g.rhs, step, tuple(sources))


def complete_equations(pairs: Iterable[Tuple[Term, Term]], cfg: KboConfig) -> Trs:
    return complete(Trs(), [equation(s, t) for s, t in pairs], cfg)


# -- chains ------------------------------------------------------------------


@dataclass
class ReductionChain:
    steps: List[RewriteStep]

    @property
    def last(self) -> RewriteStep:
        return self.steps[-1]

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]


def collect_chain(final: RewriteStep) -> ReductionChain:
    """All steps the final step depends on, leaves first, premises before use."""
    seen: Dict[int, RewriteStep] = {}
    order: List[RewriteStep] = []

    def visit(s: RewriteStep) -> None:
        if id(s) in seen:
            return
        seen[id(s)] = s
        if not s.is_leaf:
            visit(s.right)
            visit(s.left)
        order.append(s)

    visit(final)
    leaves = [s for s in order if s.is_leaf]
    inner = [s for s in order if not s.is_leaf]
    return ReductionChain(leaves + inner)


def normalize_step(step: RewriteStep, trs: Trs, cfg: KboConfig) -> RewriteStep:
    """Rewrite both sides of a step's literal to normal form by inferences."""
    eqn = step_equation(step)
    eqn = _rewrite_side(eqn, 1, trs, cfg)
    eqn = _rewrite_side(eqn, 2, trs, cfg)
    return eqn.step


def reduction_chain_application(trail, target: RewriteStep, cfg: KboConfig) -> ReductionChain:
    """Normalize the target literal under conv of the trail, recording inferences."""
    return collect_chain(normalize_step(target, trail.conv_steps(), cfg))


def refutation(trail, target: RewriteStep, cfg: KboConfig) -> ReductionChain:
    """A minimal chain from the trail and the target ending in a literal s != s."""
    g = target.ground_literal
    conv = trail.conv_steps()
    if not g.positive:
        final = normalize_step(target, conv, cfg)
        if final.ground_literal.lhs != final.ground_literal.rhs:
            raise NotFalse(f"{g!r} is not false in the trail")
        return collect_chain(final)
    extended = complete(conv, [step_equation(target)], cfg)
    for entry in trail.entries:
        if entry.literal.positive:
            continue
        final = normalize_step(entry.leaf(), extended, cfg)
        fl = final.ground_literal
        if fl.lhs == fl.rhs:
            return collect_chain(final)
    raise NotFalse(f"{g!r} is not false in the trail")


def same_step_content(a: RewriteStep, b: RewriteStep) -> bool:
    return a.ground_literal == b.ground_literal and a.ground_rest == b.ground_rest


def is_reduction_chain(steps: Sequence[RewriteStep], leaves: Sequence[RewriteStep],
                       cfg: KboConfig) -> bool:
    """Every step is an allowed leaf or an inference from earlier steps."""
    earlier: List[RewriteStep] = []
    for s in steps:
        if s.is_leaf:
            if not any(s is l or same_step_content(s, l) for l in leaves):
                return False
        else:
            if not any(s.left is e for e in earlier) or not any(s.right is e for e in earlier):
                return False
            try:
                redo = rewrite_inference(s.left, s.right, s.position, cfg)
            except InferenceError:
                return False
            if not same_step_content(redo, s):
                return False
        earlier.append(s)
    return True


def describe_step(step: RewriteStep) -> str:
    return f"{step.literal!r} :: {step.clause!r} · {format_subst(step.grounding)}"
