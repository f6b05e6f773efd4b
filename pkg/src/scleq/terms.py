"""First-order terms, equational literals, clauses and substitutions.

Variables are identified by integer indices.  Terms are immutable and hash
in constant time after construction, so they can be used freely as keys.
Literal storage is oriented: ``s = t`` and ``t = s`` are different objects,
and helpers that need symmetry say so explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Position = Tuple[int, ...]
Subst = Dict[int, "Term"]

EPSILON: Position = ()


class InvalidPosition(ValueError):
    pass


class Term:
    __slots__ = ()

    is_var = False
    ground = False


class Var(Term):
    __slots__ = ("index", "_hash")
    is_var = True
    ground = False

    def __init__(self, index: int):
        self.index = index
        self._hash = hash(("v", index))

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.index == self.index)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"X{self.index}"


class App(Term):
    __slots__ = ("fn", "args", "_hash", "ground", "size")

    def __init__(self, fn: str, args: Sequence[Term] = ()):
        self.fn = fn
        self.args = tuple(args)
        self._hash = hash((fn, self.args))
        self.ground = all(a.ground for a in self.args)
        self.size = 1 + sum(a.size if isinstance(a, App) else 1 for a in self.args)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.fn == other.fn
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({','.join(map(repr, self.args))})"


def const(name: str) -> App:
    return App(name, ())


def term_vars(t: Term, acc: Optional[Dict[int, None]] = None) -> Dict[int, None]:
    """Variables of t in order of first occurrence (an ordered set)."""
    if acc is None:
        acc = {}
    if isinstance(t, Var):
        acc.setdefault(t.index, None)
    elif not t.ground:
        for a in t.args:
            term_vars(a, acc)
    return acc


def positions(t: Term) -> List[Position]:
    """All positions of t in pre-order, starting with the root."""
    out: List[Position] = [EPSILON]
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            out.extend((i,) + q for q in positions(a))
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"{p} is not a position of the term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    i = p[0]
    if not isinstance(t, App) or not 1 <= i <= len(t.args):
        raise InvalidPosition(f"{p} is not a position of the term")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], p[1:], s)
    return App(t.fn, args)


def term_depth(t: Term) -> int:
    if isinstance(t, App) and t.args:
        return 1 + max(term_depth(a) for a in t.args)
    return 0


# -- literals and clauses ----------------------------------------------------


@dataclass(frozen=True)
class Literal:
    positive: bool
    lhs: Term
    rhs: Term

    def __repr__(self):
        return f"{self.lhs!r}{'=' if self.positive else '!='}{self.rhs!r}"

    @property
    def ground(self) -> bool:
        return self.lhs.ground and self.rhs.ground

    def complement(self) -> "Literal":
        return Literal(not self.positive, self.lhs, self.rhs)

    def flipped(self) -> "Literal":
        return Literal(self.positive, self.rhs, self.lhs)

    def side(self, i: int) -> Term:
        return self.lhs if i == 1 else self.rhs

    def is_trivial_eq(self) -> bool:
        return self.lhs == self.rhs

    def same(self, other: "Literal") -> bool:
        """Equality up to the symmetry of the equality predicate."""
        return self.positive == other.positive and (
            (self.lhs == other.lhs and self.rhs == other.rhs)
            or (self.lhs == other.rhs and self.rhs == other.lhs)
        )


def eq(s: Term, t: Term) -> Literal:
    return Literal(True, s, t)


def neq(s: Term, t: Term) -> Literal:
    return Literal(False, s, t)


def complement(lit: Literal) -> Literal:
    return lit.complement()


def literal_vars(lit: Literal, acc: Optional[Dict[int, None]] = None) -> Dict[int, None]:
    acc = term_vars(lit.lhs, acc)
    return term_vars(lit.rhs, acc)


def literal_positions(lit: Literal) -> List[Position]:
    """Positions of a literal: 1 addresses the left side, 2 the right side."""
    return [(1,) + p for p in positions(lit.lhs)] + [(2,) + p for p in positions(lit.rhs)]


def literal_subterm(lit: Literal, p: Position) -> Term:
    if not p or p[0] not in (1, 2):
        raise InvalidPosition(f"{p} is not a position of the literal")
    return subterm_at(lit.side(p[0]), p[1:])


def literal_replace(lit: Literal, p: Position, s: Term) -> Literal:
    if not p or p[0] not in (1, 2):
        raise InvalidPosition(f"{p} is not a position of the literal")
    if p[0] == 1:
        return Literal(lit.positive, replace_at(lit.lhs, p[1:], s), lit.rhs)
    return Literal(lit.positive, lit.lhs, replace_at(lit.rhs, p[1:], s))


@dataclass(frozen=True)
class Clause:
    literals: Tuple[Literal, ...] = ()

    def __post_init__(self):
        if not isinstance(self.literals, tuple):
            object.__setattr__(self, "literals", tuple(self.literals))

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def __getitem__(self, i):
        return self.literals[i]

    def __repr__(self):
        if not self.literals:
            return "⊥"
        return " | ".join(map(repr, self.literals))

    @property
    def ground(self) -> bool:
        return all(l.ground for l in self.literals)

    def is_empty(self) -> bool:
        return not self.literals

    def without(self, *indices: int) -> "Clause":
        drop = set(indices)
        return Clause(tuple(l for i, l in enumerate(self.literals) if i not in drop))

    def __add__(self, other: "Clause") -> "Clause":
        return Clause(self.literals + tuple(other))


def clause_vars(c: Union[Clause, Iterable[Literal]]) -> Dict[int, None]:
    acc: Dict[int, None] = {}
    for lit in c:
        literal_vars(lit, acc)
    return acc


def max_var(*objs) -> int:
    """Largest variable index in the given terms/literals/clauses/substs, or -1."""
    best = -1
    for o in objs:
        if isinstance(o, Term):
            vs = term_vars(o)
        elif isinstance(o, Literal):
            vs = literal_vars(o)
        elif isinstance(o, Clause):
            vs = clause_vars(o)
        elif isinstance(o, Mapping):
            vs = dict.fromkeys(o)
            for t in o.values():
                term_vars(t, vs)
        else:
            raise TypeError(type(o))
        if vs:
            best = max(best, max(vs))
    return best


# -- substitutions -----------------------------------------------------------


def apply_term(t: Term, sigma: Mapping[int, Term]) -> Term:
    if t.ground or not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.index, t)
    return App(t.fn, [apply_term(a, sigma) for a in t.args])


def apply_subst(obj, sigma: Mapping[int, Term]):
    """Apply sigma to a term, literal or clause (simultaneous replacement)."""
    if isinstance(obj, Term):
        return apply_term(obj, sigma)
    if isinstance(obj, Literal):
        return Literal(obj.positive, apply_term(obj.lhs, sigma), apply_term(obj.rhs, sigma))
    if isinstance(obj, Clause):
        return Clause(tuple(apply_subst(l, sigma) for l in obj.literals))
    raise TypeError(f"cannot apply a substitution to {type(obj).__name__}")


def compose(first: Mapping[int, Term], then: Mapping[int, Term]) -> Subst:
    """The substitution x -> (x first) then, restricted to moved variables."""
    out: Subst = {}
    for x, t in first.items():
        u = apply_term(t, then)
        if not (isinstance(u, Var) and u.index == x):
            out[x] = u
    for x, t in then.items():
        if x not in first and not (isinstance(t, Var) and t.index == x):
            out[x] = t
    return out


def restrict(sigma: Mapping[int, Term], variables: Iterable[int]) -> Subst:
    return {x: sigma[x] for x in variables if x in sigma}


def format_subst(sigma: Mapping[int, Term]) -> str:
    return "{" + ",".join(f"X{x}->{sigma[x]!r}" for x in sorted(sigma)) + "}"


def _walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t.index in s:
        t = s[t.index]
    return t


def _occurs(x: int, t: Term, s: Subst) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.index == x
    if t.ground:
        return False
    return any(_occurs(x, a, s) for a in t.args)


def _unify_into(pairs: List[Tuple[Term, Term]], s: Subst) -> bool:
    while pairs:
        a, b = pairs.pop()
        a, b = _walk(a, s), _walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var) and isinstance(b, Var):
            hi, lo = (a, b) if a.index > b.index else (b, a)
            s[hi.index] = lo
        elif isinstance(a, Var):
            if _occurs(a.index, b, s):
                return False
            s[a.index] = b
        elif isinstance(b, Var):
            if _occurs(b.index, a, s):
                return False
            s[b.index] = a
        else:
            if a.fn != b.fn or len(a.args) != len(b.args):
                return False
            pairs.extend(zip(a.args, b.args))
    return True


def _resolve(s: Subst) -> Subst:
    def full(t: Term) -> Term:
        t = _walk(t, s)
        if isinstance(t, Var) or t.ground:
            return t
        return App(t.fn, [full(a) for a in t.args])

    return {x: full(t) for x, t in s.items()}


def mgu(items: Sequence[Union[Term, Literal]]) -> Optional[Subst]:
    """Idempotent most general unifier of the items, or None."""
    if not items:
        raise ValueError("mgu of an empty sequence")
    pairs: List[Tuple[Term, Term]] = []
    first = items[0]
    for other in items[1:]:
        if isinstance(first, Literal):
            if not isinstance(other, Literal) or other.positive != first.positive:
                return None
            pairs.append((first.lhs, other.lhs))
            pairs.append((first.rhs, other.rhs))
        else:
            if isinstance(other, Literal):
                raise TypeError("cannot unify a term with a literal")
            pairs.append((first, other))
    pairs.reverse()
    s: Subst = {}
    if not _unify_into(pairs, s):
        return None
    return _resolve(s)


def match_term(pattern: Term, target: Term, sigma: Optional[Subst] = None) -> Optional[Subst]:
    """A substitution binding pattern variables with pattern·σ = target."""
    s: Subst = dict(sigma) if sigma else {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = s.get(p.index)
            if bound is None:
                s[p.index] = t
            elif bound != t:
                return None
        elif p.ground:
            if p != t:
                return None
        else:
            if not isinstance(t, App) or t.fn != p.fn or len(t.args) != len(p.args):
                return None
            stack.extend(zip(p.args, t.args))
    return s


def match_literal(pattern: Literal, target: Literal, sigma: Optional[Subst] = None,
                  symmetric: bool = True) -> Optional[Subst]:
    if pattern.positive != target.positive:
        return None
    s = match_term(pattern.lhs, target.lhs, sigma)
    if s is not None:
        s = match_term(pattern.rhs, target.rhs, s)
        if s is not None:
            return s
    if not symmetric:
        return None
    s = match_term(pattern.lhs, target.rhs, sigma)
    if s is not None:
        s = match_term(pattern.rhs, target.lhs, s)
    return s


def shift_vars(obj, offset: int):
    """Rename every variable x to x + offset."""
    if offset == 0:
        return obj
    if isinstance(obj, Term):
        vs = term_vars(obj)
        return apply_term(obj, {x: Var(x + offset) for x in vs})
    if isinstance(obj, Literal):
        return Literal(obj.positive, shift_vars(obj.lhs, offset), shift_vars(obj.rhs, offset))
    if isinstance(obj, Clause):
        return Clause(tuple(shift_vars(l, offset) for l in obj.literals))
    if isinstance(obj, Mapping):
        return {x + offset: shift_vars(t, offset) for x, t in obj.items()}
    raise TypeError(type(obj))


# -- closures and grounding enumeration --------------------------------------


@dataclass(frozen=True)
class Closure:
    """A clause together with a grounding substitution for its variables."""

    clause: Clause
    grounding: Mapping[int, Term]

    def ground(self) -> Clause:
        return apply_subst(self.clause, self.grounding)

    def __repr__(self):
        return f"({self.clause!r})·{format_subst(self.grounding)}"


def ground_instances_below(clause: Clause, beta: Term, sig, cfg) -> List[Closure]:
    """All closures C·σ with every literal of Cσ below beta in the term ordering.

    Groundings draw from the ground terms below beta, which suffices: a
    variable occurring in a literal below beta is itself bound below beta.
    """
    from .ordering import enumerate_ground_terms_below, literal_below

    variables = list(clause_vars(clause))
    if not variables:
        ok = all(literal_below(l, beta, cfg) for l in clause)
        return [Closure(clause, {})] if ok else []
    universe = enumerate_ground_terms_below(beta, sig, cfg)
    out: List[Closure] = []

    def extend(i: int, sigma: Subst) -> None:
        for lit in clause:
            if all(v in sigma for v in literal_vars(lit)):
                if not literal_below(apply_subst(lit, sigma), beta, cfg):
                    return
        if i == len(variables):
            out.append(Closure(clause, dict(sigma)))
            return
        for t in universe:
            sigma[variables[i]] = t
            extend(i + 1, sigma)
        sigma.pop(variables[i], None)

    extend(0, {})
    return out
