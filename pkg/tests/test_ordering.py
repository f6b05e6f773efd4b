import random

import pytest
from hypothesis import given, settings, strategies as st

from scleq.ordering import (
    EQ, GT, INCOMPARABLE, LT, KboConfig, NoGroundTerms, clause_below, compare_clauses, compare_literals,
    compare_multisets, compare_T, enumerate_ground_terms_below, kbo_compare, literal_below, literal_key,
)
from scleq.terms import App, Clause, Var, eq, neq

import oracles
from gen import random_term

SIG = {"h": 1, "g": 2, "a": 0, "b": 0, "c": 0}
CFG = KboConfig(["c", "b", "a", "h", "g"], {"g": 2})
WEIGHTS = {"g": 2}

a, b, c = App("a"), App("b"), App("c")


def f(*args):
    return App("f", args)


def h(t):
    return App("h", (t,))


def expected(s, t):
    if s == t:
        return EQ
    if oracles.kbo_greater(s, t, WEIGHTS, CFG.precedence):
        return GT
    if oracles.kbo_greater(t, s, WEIGHTS, CFG.precedence):
        return LT
    return INCOMPARABLE


def test_kbo_matches_definition_on_random_terms():
    rng = random.Random(7)
    for _ in range(2000):
        nvars = rng.choice([0, 0, 2])
        s = random_term(rng, SIG, 3, nvars)
        t = random_term(rng, SIG, 3, nvars)
        assert kbo_compare(s, t, CFG) is expected(s, t), (s, t)


def test_kbo_is_total_on_ground_terms():
    rng = random.Random(8)
    for _ in range(500):
        s, t = random_term(rng, SIG, 3), random_term(rng, SIG, 3)
        r = kbo_compare(s, t, CFG)
        assert (r is EQ) == (s == t)
        assert r is not INCOMPARABLE


def test_kbo_subterm_property():
    rng = random.Random(9)
    for _ in range(300):
        t = random_term(rng, SIG, 3, 2)
        if isinstance(t, App) and t.args:
            for arg in t.args:
                assert kbo_compare(t, arg, CFG) is GT


def test_kbo_stable_under_substitution():
    rng = random.Random(10)
    from scleq.terms import apply_subst

    for _ in range(500):
        s, t = random_term(rng, SIG, 2, 2), random_term(rng, SIG, 2, 2)
        r = kbo_compare(s, t, CFG)
        if r in (GT, LT):
            sigma = {0: random_term(rng, SIG, 2), 1: random_term(rng, SIG, 2)}
            assert kbo_compare(apply_subst(s, sigma), apply_subst(t, sigma), CFG) is r


def test_variables_incomparable_with_distinct_terms():
    assert kbo_compare(Var(0), Var(1), CFG) is INCOMPARABLE
    assert kbo_compare(h(Var(0)), Var(0), CFG) is GT
    assert kbo_compare(h(Var(0)), a, CFG) is GT
    assert kbo_compare(a, Var(0), CFG) is INCOMPARABLE
    assert kbo_compare(h(Var(0)), h(Var(1)), CFG) is INCOMPARABLE


def test_precedence_breaks_weight_ties():
    assert kbo_compare(a, b, CFG) is GT
    assert kbo_compare(h(c), h(b), CFG) is LT


def test_config_rejects_bad_weights():
    with pytest.raises(ValueError):
        KboConfig(["a", "a"])
    with pytest.raises(ValueError):
        KboConfig(["a"], {"a": 0})


def test_default_config_makes_earlier_symbols_larger():
    cfg = KboConfig.default({"f": 1, "a": 0, "b": 0})
    assert cfg.precedence == ("b", "a", "f")


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 5), max_size=5), st.lists(st.integers(0, 5), max_size=5))
def test_multiset_extension_matches_definition(xs, ys):
    def cmp(x, y):
        return EQ if x == y else (GT if x > y else LT)

    r = compare_multisets(xs, ys, cmp)
    gt = oracles.multiset_greater(xs, ys, lambda x, y: x > y)
    lt = oracles.multiset_greater(ys, xs, lambda x, y: x > y)
    assert (r is GT) == gt
    assert (r is LT) == lt
    assert (r is EQ) == (sorted(xs) == sorted(ys))


def test_literal_ordering_uses_multiset_encoding():
    # a negative literal beats the positive one over the same terms
    assert compare_literals(neq(a, b), eq(a, b), CFG) is GT
    # a positive literal with a larger top term wins
    assert compare_literals(eq(h(c), c), neq(a, b), CFG) is GT


def test_literal_ordering_matches_definition():
    rng = random.Random(11)
    from scleq.terms import Literal

    def term_gt(x, y):
        return oracles.kbo_greater(x, y, WEIGHTS, CFG.precedence)

    for _ in range(500):
        k = Literal(rng.random() < 0.5, random_term(rng, SIG, 2), random_term(rng, SIG, 2))
        l = Literal(rng.random() < 0.5, random_term(rng, SIG, 2), random_term(rng, SIG, 2))
        mk, ml = oracles.literal_multiset(k), oracles.literal_multiset(l)
        r = compare_literals(k, l, CFG)
        assert (r is GT) == oracles.multiset_greater(mk, ml, term_gt)
        assert (r is LT) == oracles.multiset_greater(ml, mk, term_gt)
        # the sort key agrees with the comparison
        kk, kl = literal_key(k, CFG), literal_key(l, CFG)
        assert (kk > kl) == (r is GT)


def test_clause_ordering_matches_definition():
    rng = random.Random(12)
    from scleq.terms import Literal

    def lit_gt(x, y):
        return compare_literals(x, y, CFG) is GT

    for _ in range(300):
        cs = [Clause(tuple(Literal(rng.random() < 0.5, random_term(rng, SIG, 1), random_term(rng, SIG, 1))
                           for _ in range(rng.randint(0, 3)))) for _ in range(2)]
        r = compare_clauses(cs[0], cs[1], CFG)
        assert (r is GT) == oracles.multiset_greater(list(cs[0]), list(cs[1]), lit_gt)


def test_compare_T_dispatch():
    assert compare_T(a, b, CFG) is GT
    assert compare_T(eq(a, b), eq(a, c), CFG) is GT
    assert compare_T(Clause((eq(a, b),)), Clause(()), CFG) is GT
    assert compare_T(Clause((eq(a, b),)), h(a), CFG) is LT


@pytest.mark.parametrize("beta", [h(h(a)), App("g", (a, a)), h(App("g", (b, c)))])
def test_enumeration_matches_brute_force(beta):
    got = enumerate_ground_terms_below(beta, SIG, CFG)
    want = oracles.ground_terms_below(beta, SIG, WEIGHTS, CFG.precedence)
    assert sorted(map(repr, got)) == sorted(map(repr, want))
    keys = [CFG.key(t) for t in got]
    assert keys == sorted(keys)


def test_enumeration_without_constants_fails():
    with pytest.raises(NoGroundTerms):
        enumerate_ground_terms_below(h(h(Var(0))), {"h": 1}, KboConfig(["h"]))


def test_literal_below_beta():
    beta = h(a)
    assert literal_below(eq(a, b), beta, CFG)
    assert not literal_below(eq(h(a), b), beta, CFG)
    assert clause_below(Clause(()), beta, CFG)
