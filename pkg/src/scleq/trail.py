"""The annotated trail, truth evaluation and the trail-induced literal ordering.

Each trail keeps one snapshot per prefix holding the completed rewrite
system of that prefix.  Snapshots are shared between trails that share a
prefix, so pushing and popping are cheap and every prefix can be queried,
which is what defining literals and levels need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ordering import EQ, GT, LT, KboConfig, OrderResult, literal_below, literal_key
from .rewriting import RewriteStep, Trs, complete, equation, leaf, step_equation
from .terms import Clause, Closure, Literal, Subst, Term, apply_subst, format_subst


class TruthValue(Enum):
    TRUE = "true"
    FALSE = "false"
    UNDEFINED = "undefined"


TRUE, FALSE, UNDEFINED = TruthValue.TRUE, TruthValue.FALSE, TruthValue.UNDEFINED


class EntryKind(Enum):
    DECISION = "decision"
    PROPAGATED = "propagated"


class TrailError(ValueError):
    pass


@dataclass(frozen=True)
class TrailEntry:
    """A ground literal with its level and justification closure.

    The justification clause is ``just_literal | just_rest`` under
    ``grounding``; the entry literal is the ground instance of just_literal.
    """

    literal: Literal
    level: int
    kind: EntryKind
    just_literal: Literal
    just_rest: Clause
    grounding: Subst
    _leaf: list = field(default_factory=list, compare=False, repr=False)

    @classmethod
    def from_step(cls, step: RewriteStep, level: int, kind: EntryKind) -> "TrailEntry":
        return cls(step.ground_literal, level, kind, step.literal, step.rest, dict(step.grounding))

    @classmethod
    def decision(cls, lit: Literal, level: int, grounding: Optional[Subst] = None,
                 ground: Optional[Literal] = None) -> "TrailEntry":
        """A decision justified by the tautology lit | comp(lit)."""
        grounding = dict(grounding or {})
        g = ground if ground is not None else apply_subst(lit, grounding)
        return cls(g, level, EntryKind.DECISION, lit, Clause((lit.complement(),)), grounding)

    @property
    def is_decision(self) -> bool:
        return self.kind is EntryKind.DECISION

    @property
    def justification(self) -> Closure:
        return Closure(Clause((self.just_literal,) + self.just_rest.literals), self.grounding)

    def leaf(self) -> RewriteStep:
        if not self._leaf:
            self._leaf.append(leaf(self.just_literal, self.just_rest, self.grounding, tag=self))
        return self._leaf[0]

    def dump(self) -> str:
        return (f"{self.literal!r} [lvl={self.level}] [{self.kind.value}] "
                f"[just={self.justification.clause!r}·{format_subst(self.grounding)}]")


class _Snapshot:
    """Rewrite system and inequations of one trail prefix."""

    __slots__ = ("cfg", "trs", "diseqs", "_steps", "_parent", "_entry", "_index", "_joins")

    def __init__(self, cfg: KboConfig, trs: Trs, diseqs: Tuple[Tuple[Term, Term], ...],
                 parent: Optional["_Snapshot"], entry: Optional[TrailEntry], index: int):
        self.cfg = cfg
        self.trs = trs
        self.diseqs = diseqs
        self._steps: Optional[Trs] = None if parent is not None else Trs()
        self._parent = parent
        self._entry = entry
        self._index = index
        self._joins: Dict[Tuple[Term, Term], bool] = {}

    def extend(self, entry: TrailEntry) -> "_Snapshot":
        lit = entry.literal
        if lit.positive:
            trs = complete(self.trs, [equation(lit.lhs, lit.rhs)], self.cfg)
            diseqs = self.diseqs
        else:
            trs = self.trs
            diseqs = self.diseqs + ((lit.lhs, lit.rhs),)
        return _Snapshot(self.cfg, trs, diseqs, self, entry, self._index + 1)

    def steps(self) -> Trs:
        if self._steps is None:
            base = self._parent.steps()
            e = self._entry
            if e.literal.positive:
                self._steps = complete(base, [step_equation(e.leaf(), [self._index - 1])], self.cfg)
            else:
                self._steps = base
        return self._steps

    def joins(self, s: Term, t: Term) -> bool:
        """Whether adding s = t would make some inequation's sides equal."""
        if not self.diseqs:
            return False
        key = (s, t)
        hit = self._joins.get(key)
        if hit is None:
            ext = complete(self.trs, [equation(s, t)], self.cfg)
            hit = any(ext.nf(u) == ext.nf(v) for u, v in self.diseqs)
            self._joins[key] = hit
            self._joins[(t, s)] = hit
        return hit

    def value(self, lit: Literal) -> TruthValue:
        s, t = self.trs.nf(lit.lhs), self.trs.nf(lit.rhs)
        if s == t:
            return TRUE if lit.positive else FALSE
        if self.joins(s, t):
            return FALSE if lit.positive else TRUE
        return UNDEFINED


class Trail:
    """An immutable sequence of trail entries with per-prefix rewrite systems."""

    def __init__(self, cfg: KboConfig, _entries: Tuple[TrailEntry, ...] = (),
                 _snaps: Optional[Tuple[_Snapshot, ...]] = None):
        self.cfg = cfg
        self.entries = _entries
        self._snaps = _snaps or (_Snapshot(cfg, Trs(), (), None, None, 0),)
        self._defining: Dict[Literal, Optional[int]] = {}
        self._gkeys: Dict[Tuple[Term, Literal], tuple] = {}

    @classmethod
    def of(cls, cfg: KboConfig, entries: Iterable[TrailEntry], check: bool = True) -> "Trail":
        t = cls(cfg)
        for e in entries:
            t = t.push(e, check=check)
        return t

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __repr__(self):
        return "[" + ", ".join(repr(e.literal) for e in self.entries) + "]"

    @property
    def level(self) -> int:
        return self.entries[-1].level if self.entries else 0

    @property
    def literals(self) -> List[Literal]:
        return [e.literal for e in self.entries]

    # -- structure -----------------------------------------------------------

    def push(self, entry: TrailEntry, check: bool = True) -> "Trail":
        lit = entry.literal
        if not lit.ground:
            raise TrailError(f"trail literals must be ground: {lit!r}")
        if check:
            if self.value_of(lit) is not UNDEFINED:
                raise TrailError(f"{lit!r} is already defined in the trail")
            if not (self.irreducible(lit.lhs) and self.irreducible(lit.rhs)):
                raise TrailError(f"{lit!r} is reducible by the trail's rewrite system")
            prev = self.level
            if entry.is_decision and entry.level != prev + 1:
                raise TrailError("a decision must raise the level by one")
            if not entry.is_decision and entry.level != prev:
                raise TrailError("a propagated literal must keep the current level")
        snap = self._snaps[-1].extend(entry)
        return Trail(self.cfg, self.entries + (entry,), self._snaps + (snap,))

    def pop_to(self, n: int) -> "Trail":
        if not 0 <= n <= len(self.entries):
            raise TrailError(f"cannot cut a trail of length {len(self.entries)} to {n}")
        return Trail(self.cfg, self.entries[:n], self._snaps[: n + 1])

    prefix = pop_to

    def conv(self) -> Trs:
        """conv of the trail as a plain rewrite system."""
        return self._snaps[-1].trs

    def conv_steps(self) -> Trs:
        """conv of the trail with rewrite-step provenance on every rule."""
        return self._snaps[-1].steps()

    def nf(self, t: Term) -> Term:
        return self._snaps[-1].trs.nf(t)

    def irreducible(self, t: Term) -> bool:
        return self._snaps[-1].trs.irreducible(t)

    # -- truth ---------------------------------------------------------------

    def value_of(self, lit: Literal) -> TruthValue:
        return self._snaps[-1].value(lit)

    def prefix_value(self, n: int, lit: Literal) -> TruthValue:
        return self._snaps[n].value(lit)

    def beta_value_of(self, lit: Literal, beta: Term) -> TruthValue:
        if not literal_below(lit, beta, self.cfg):
            return UNDEFINED
        return self.value_of(lit)

    def clause_value(self, clause: Iterable[Literal], beta: Term) -> TruthValue:
        vals = [self.beta_value_of(l, beta) for l in clause]
        if any(v is TRUE for v in vals):
            return TRUE
        if all(v is FALSE for v in vals):
            return FALSE
        return UNDEFINED

    def defining_index(self, lit: Literal) -> Optional[int]:
        """Index of the defining literal: the last entry of the shortest defining prefix.

        None when the literal is defined by the empty trail.
        """
        if lit in self._defining:
            return self._defining[lit]
        n = len(self.entries)
        if self._snaps[n].value(lit) is UNDEFINED:
            raise TrailError(f"{lit!r} is undefined in the trail")
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi) // 2
            if self._snaps[mid].value(lit) is UNDEFINED:
                lo = mid + 1
            else:
                hi = mid
        out = None if lo == 0 else lo - 1
        self._defining[lit] = out
        return out

    def defining_literal(self, lit: Literal) -> Optional[Tuple[TrailEntry, List[TrailEntry]]]:
        """The defining entry and one defining core, or None if trivially defined."""
        d = self.defining_index(lit)
        if d is None:
            return None
        core = list(self.entries[: d + 1])
        i = 0
        while i < len(core) - 1:
            trial = core[:i] + core[i + 1:]
            if literals_value([e.literal for e in trial], lit, self.cfg) is not UNDEFINED:
                core = trial
            else:
                i += 1
        return self.entries[d], core

    def level_of(self, lit: Literal) -> int:
        d = self.defining_index(lit)
        return 0 if d is None else self.entries[d].level

    def clause_level(self, clause: Iterable[Literal]) -> int:
        return max((self.level_of(l) for l in clause), default=0)

    # -- trail-induced ordering ----------------------------------------------

    def gamma_key(self, lit: Literal, beta: Term) -> tuple:
        """Sort key realizing the trail-induced ordering on ground literals."""
        k = self._gkeys.get((beta, lit))
        if k is not None:
            return k
        lkey = literal_key(lit, self.cfg)
        if not literal_below(lit, beta, self.cfg) or self.value_of(lit) is UNDEFINED:
            k = (3, lkey)
        else:
            d = self.defining_index(lit)
            if d is None or self.entries[d].level == 0:
                k = (0, lkey)
            else:
                anchor = self.entries[d].literal
                if lit.same(anchor):
                    k = (1, d, 0)
                elif lit.same(anchor.complement()):
                    k = (1, d, 1)
                else:
                    k = (1, d, 2, lkey)
        self._gkeys[(beta, lit)] = k
        return k

    def gamma_clause_key(self, clause: Iterable[Literal], beta: Term) -> tuple:
        return tuple(sorted((self.gamma_key(l, beta) for l in clause), reverse=True))

    def dump(self) -> List[str]:
        return [e.dump() for e in self.entries]


def literals_value(lits: Sequence[Literal], lit: Literal, cfg: KboConfig) -> TruthValue:
    """Truth of a ground literal in an arbitrary consistent set of ground literals."""
    trs = complete(Trs(), [equation(l.lhs, l.rhs) for l in lits if l.positive], cfg)
    snap = _Snapshot(cfg, trs, tuple((l.lhs, l.rhs) for l in lits if not l.positive), None, None, 0)
    return snap.value(lit)


def _cmp(a, b) -> OrderResult:
    return EQ if a == b else (LT if a < b else GT)


# -- functional interface ----------------------------------------------------


def value_of(trail: Trail, lit: Literal) -> TruthValue:
    return trail.value_of(lit)


def beta_value_of(trail: Trail, lit: Literal, beta: Term) -> TruthValue:
    return trail.beta_value_of(lit, beta)


def defining_literal(trail: Trail, lit: Literal):
    return trail.defining_literal(lit)


def level_of(trail: Trail, lit: Literal) -> int:
    return trail.level_of(lit)


def clause_level(trail: Trail, clause: Iterable[Literal]) -> int:
    return trail.clause_level(clause)


def gamma_star_compare(trail: Trail, beta: Term, k: Literal, h: Literal) -> OrderResult:
    return _cmp(trail.gamma_key(k, beta), trail.gamma_key(h, beta))


def gamma_star_compare_clauses(trail: Trail, beta: Term, c: Iterable[Literal],
                               d: Iterable[Literal]) -> OrderResult:
    return _cmp(trail.gamma_clause_key(c, beta), trail.gamma_clause_key(d, beta))


def push(trail: Trail, entry: TrailEntry) -> Trail:
    return trail.push(entry)


def pop_to(trail: Trail, n: int) -> Trail:
    return trail.pop_to(n)
