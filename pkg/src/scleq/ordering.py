"""Knuth-Bendix ordering on terms and its multiset liftings.

Ground comparisons go through a precomputed sort key: on ground terms with
positive weights, KBO is exactly lexicographic comparison of
``(weight, precedence rank, argument keys)``.  Multisets of ground objects
are compared by their descending-sorted key sequences, which coincides
with the Dershowitz-Manna extension for total orders.
"""

from __future__ import annotations

from collections import Counter
from enum import Enum
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .terms import App, Clause, Literal, Term, Var, term_vars


class OrderResult(Enum):
    LT = "<"
    GT = ">"
    EQ = "="
    INCOMPARABLE = "?"

    def flip(self) -> "OrderResult":
        return {OrderResult.LT: OrderResult.GT, OrderResult.GT: OrderResult.LT}.get(self, self)


LT, GT, EQ, INCOMPARABLE = OrderResult.LT, OrderResult.GT, OrderResult.EQ, OrderResult.INCOMPARABLE


class NoGroundTerms(ValueError):
    pass


Signature = Dict[str, int]


class KboConfig:
    """Symbol weights, a total precedence, and the variable weight.

    ``precedence`` lists the symbols in ascending order.
    """

    def __init__(self, precedence: Sequence[str], weights: Optional[Mapping[str, int]] = None,
                 var_weight: int = 1):
        if var_weight <= 0:
            raise ValueError("variable weight must be positive")
        if len(set(precedence)) != len(precedence):
            raise ValueError("precedence lists a symbol twice")
        self.precedence: Tuple[str, ...] = tuple(precedence)
        self.rank: Dict[str, int] = {s: i for i, s in enumerate(self.precedence)}
        self.weights: Dict[str, int] = dict(weights or {})
        self.var_weight = var_weight
        for s, w in self.weights.items():
            if w < var_weight:
                raise ValueError(f"weight of {s} is below the variable weight")
        self._keys: Dict[Term, tuple] = {}
        self._below: Dict[Tuple[Term, tuple], List[Term]] = {}

    @classmethod
    def default(cls, sig: Signature) -> "KboConfig":
        """Unit weights; symbols declared earlier are larger in the precedence."""
        return cls(list(reversed(list(sig))))

    def __repr__(self):
        return f"KboConfig(precedence={' < '.join(self.precedence)}, weights={self.weights})"

    def __eq__(self, other):
        return (
            isinstance(other, KboConfig)
            and self.precedence == other.precedence
            and {s: self.weight(s) for s in self.precedence}
            == {s: other.weight(s) for s in other.precedence}
            and self.var_weight == other.var_weight
        )

    def __hash__(self):
        return hash(self.precedence)

    def weight(self, sym: str) -> int:
        return self.weights.get(sym, 1)

    def covers(self, sig: Signature) -> bool:
        return all(s in self.rank for s in sig)

    def key(self, t: Term) -> tuple:
        """Sort key of a ground term; key order is the ordering."""
        k = self._keys.get(t)
        if k is None:
            if not isinstance(t, App) or not t.ground:
                raise ValueError(f"sort keys exist only for ground terms, got {t!r}")
            args = tuple(self.key(a) for a in t.args)
            w = self.weight(t.fn) + sum(a[0] for a in args)
            k = (w, self.rank[t.fn], args)
            self._keys[t] = k
        return k

    def term_weight(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.var_weight
        if t.ground:
            return self.key(t)[0]
        return self.weight(t.fn) + sum(self.term_weight(a) for a in t.args)


# -- terms -------------------------------------------------------------------


def _var_counts(t: Term, acc: Counter) -> Counter:
    if isinstance(t, Var):
        acc[t.index] += 1
    elif not t.ground:
        for a in t.args:
            _var_counts(a, acc)
    return acc


def kbo_compare(s: Term, t: Term, cfg: KboConfig) -> OrderResult:
    if s == t:
        return EQ
    if s.ground and t.ground:
        ks, kt = cfg.key(s), cfg.key(t)
        return LT if ks < kt else GT
    vs, vt = _var_counts(s, Counter()), _var_counts(t, Counter())
    s_covers = all(vs[x] >= n for x, n in vt.items())
    t_covers = all(vt[x] >= n for x, n in vs.items())
    ws, wt = cfg.term_weight(s), cfg.term_weight(t)
    if ws > wt:
        return GT if s_covers else INCOMPARABLE
    if wt > ws:
        return LT if t_covers else INCOMPARABLE
    if isinstance(s, Var) or isinstance(t, Var):
        # equal weight and a variable on one side: with positive weights the
        # other side can only be a constant or a different variable
        return INCOMPARABLE
    if s.fn != t.fn:
        greater = cfg.rank[s.fn] > cfg.rank[t.fn]
        if greater:
            return GT if s_covers else INCOMPARABLE
        return LT if t_covers else INCOMPARABLE
    for a, b in zip(s.args, t.args):
        r = kbo_compare(a, b, cfg)
        if r is EQ:
            continue
        if r is GT:
            return GT if s_covers else INCOMPARABLE
        if r is LT:
            return LT if t_covers else INCOMPARABLE
        return INCOMPARABLE
    return EQ


# -- multisets ---------------------------------------------------------------


def compare_multisets(xs: Sequence, ys: Sequence, cmp: Callable[[object, object], OrderResult]
                      ) -> OrderResult:
    """Dershowitz-Manna extension of a (partial) order given by cmp."""
    xs, ys = list(xs), list(ys)
    rest_y = list(ys)
    rest_x = []
    for x in xs:
        for i, y in enumerate(rest_y):
            if cmp(x, y) is EQ:
                del rest_y[i]
                break
        else:
            rest_x.append(x)
    if not rest_x and not rest_y:
        return EQ
    if rest_x and all(any(cmp(x, y) is GT for x in rest_x) for y in rest_y):
        return GT
    if rest_y and all(any(cmp(y, x) is GT for y in rest_y) for x in rest_x):
        return LT
    return INCOMPARABLE


def literal_multiset(lit: Literal) -> List[Term]:
    if lit.positive:
        return [lit.lhs, lit.rhs]
    return [lit.lhs, lit.lhs, lit.rhs, lit.rhs]


def literal_key(lit: Literal, cfg: KboConfig) -> tuple:
    a, b = cfg.key(lit.lhs), cfg.key(lit.rhs)
    hi, lo = (a, b) if a >= b else (b, a)
    return (hi, lo) if lit.positive else (hi, hi, lo, lo)


def clause_key(clause: Iterable[Literal], cfg: KboConfig) -> tuple:
    return tuple(sorted((literal_key(l, cfg) for l in clause), reverse=True))


def _cmp_keys(a, b) -> OrderResult:
    return EQ if a == b else (LT if a < b else GT)


def compare_literals(k: Literal, h: Literal, cfg: KboConfig) -> OrderResult:
    if k.ground and h.ground:
        return _cmp_keys(literal_key(k, cfg), literal_key(h, cfg))
    return compare_multisets(literal_multiset(k), literal_multiset(h),
                             lambda a, b: kbo_compare(a, b, cfg))


def compare_clauses(c: Clause, d: Clause, cfg: KboConfig) -> OrderResult:
    if c.ground and d.ground:
        return _cmp_keys(clause_key(c, cfg), clause_key(d, cfg))
    return compare_multisets(list(c), list(d), lambda a, b: compare_literals(a, b, cfg))


def compare_T(x, y, cfg: KboConfig) -> OrderResult:
    """The term ordering lifted to literals, clauses and multisets of terms."""
    if isinstance(x, Term) and isinstance(y, Term):
        return kbo_compare(x, y, cfg)
    if isinstance(x, Literal) and isinstance(y, Literal):
        return compare_literals(x, y, cfg)
    if isinstance(x, Clause) and isinstance(y, Clause):
        return compare_clauses(x, y, cfg)
    if isinstance(x, Clause) and isinstance(y, Term):
        return compare_clause_term(x, y, cfg)
    if isinstance(x, Literal) and isinstance(y, Term):
        return compare_multisets(literal_multiset(x), [y], lambda a, b: kbo_compare(a, b, cfg))
    return compare_multisets(list(x), list(y), lambda a, b: kbo_compare(a, b, cfg))


def compare_clause_term(c: Clause, t: Term, cfg: KboConfig) -> OrderResult:
    """Compare a clause with the one-literal multiset {{t}}."""
    def lit_vs(a, b):
        ma = literal_multiset(a) if isinstance(a, Literal) else a
        mb = literal_multiset(b) if isinstance(b, Literal) else b
        return compare_multisets(ma, mb, lambda u, v: kbo_compare(u, v, cfg))

    return compare_multisets(list(c), [[t]], lit_vs)


def literal_below(lit: Literal, beta: Term, cfg: KboConfig) -> bool:
    """Whether a ground literal is below beta, i.e. both sides are smaller."""
    kb = cfg.key(beta)
    return cfg.key(lit.lhs) < kb and cfg.key(lit.rhs) < kb


def clause_below(clause: Iterable[Literal], beta: Term, cfg: KboConfig) -> bool:
    return all(literal_below(l, beta, cfg) for l in clause)


def term_below(t: Term, beta: Term, cfg: KboConfig) -> bool:
    return cfg.key(t) < cfg.key(beta)


# -- enumeration -------------------------------------------------------------


def _terms_by_weight(sig: Signature, cfg: KboConfig, max_weight: int) -> Dict[int, List[Term]]:
    by_w: Dict[int, List[Term]] = {w: [] for w in range(max_weight + 1)}
    for w in range(1, max_weight + 1):
        for f, n in sig.items():
            rest = w - cfg.weight(f)
            if n == 0:
                if rest == 0:
                    by_w[w].append(App(f, ()))
                continue
            if rest < n:
                continue
            for split in _compositions(rest, n):
                pools = [by_w[k] for k in split]
                if all(pools):
                    for args in product(*pools):
                        by_w[w].append(App(f, args))
    return by_w


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_ground_terms_below(beta: Term, sig: Signature, cfg: KboConfig) -> List[Term]:
    """Every ground term over sig strictly below beta, in ascending order."""
    if not any(n == 0 for n in sig.values()):
        raise NoGroundTerms("the signature has no constant")
    sig_key = tuple(sorted(sig.items()))
    cached = cfg._below.get((beta, sig_key))
    if cached is not None:
        return cached
    kb = cfg.key(beta)
    by_w = _terms_by_weight(sig, cfg, kb[0])
    found = [t for ts in by_w.values() for t in ts if cfg.key(t) < kb]
    found.sort(key=cfg.key)
    cfg._below[(beta, sig_key)] = found
    return found
