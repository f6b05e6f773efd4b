import random
from collections import Counter

import pytest

from scleq.frontend import parse_literal, parse_term
from scleq.oracle import cc_entails
from scleq.ordering import KboConfig
from scleq.rewriting import (
    InferenceError, NotFalse, Trs, collect_chain, complete_equations, is_reduction_chain, leaf, normalize,
    refutation, rewrite_inference,
)
from scleq.terms import App, Clause, Literal, Var, eq
from scleq.trail import EntryKind, Trail, TrailEntry

import inferences
from gen import random_term

PAIR_SIG = {"f": 2, "a": 0, "b": 0, "c": 0, "d": 0}
PAIR_CFG = KboConfig(["d", "c", "b", "a", "f"])
UNARY_SIG = {"f": 1, "h": 1, "g": 1, "a": 0, "b": 0, "c": 0, "d": 0}
UNARY_CFG = KboConfig(["d", "c", "b", "a", "g", "h", "f"])


def lit(text, sig):
    return parse_literal(text, sig)


def clause(text, sig):
    return Clause(tuple(lit(p.strip(), sig) for p in text.split("|")))


def same_clause(c, d):
    """Equality of ground clauses as multisets, up to symmetry of each literal."""
    def norm(l):
        return (l.positive,) + tuple(sorted((repr(l.lhs), repr(l.rhs))))
    return Counter(map(norm, c)) == Counter(map(norm, d))


def test_ground_pair_inferences_match_worked_example():
    s = PAIR_SIG
    i1 = leaf(lit("f(a,a) != f(b,b)", s), clause("f(a,a) = f(b,b)", s), {})
    i2 = leaf(lit("a = b", s), clause("f(a,a) = f(b,b)", s), {})
    i3 = rewrite_inference(i2, i1, (1, 1), PAIR_CFG)
    assert i3.ground_literal == lit("f(b,a) != f(b,b)", s)
    assert same_clause(i3.ground_clause, clause("f(b,a) != f(b,b) | f(a,a) = f(b,b) | f(a,a) = f(b,b)", s))
    i4 = rewrite_inference(i2, i3, (1, 2), PAIR_CFG)
    assert i4.ground_literal == lit("f(b,b) != f(b,b)", s)
    assert same_clause(i4.ground_clause,
                       clause("f(b,b) != f(b,b) | f(a,a) = f(b,b) | f(a,a) = f(b,b) | f(a,a) = f(b,b)", s))


def test_rewriting_below_a_variable_instantiates_it():
    s = UNARY_SIG
    x = Var(0)
    c1_lit = Literal(True, App("f", (x,)), parse_term("h(b)", s))
    c1_rest = Clause((Literal(False, x, parse_term("g(a)", s)),))
    i1 = leaf(c1_lit, c1_rest, {0: parse_term("g(a)", s)})
    i3 = leaf(lit("a = b", s), clause("f(g(b)) = h(b)", s), {})
    i4 = rewrite_inference(i3, i1, (1, 1, 1), UNARY_CFG)
    assert i4.ground_literal == lit("f(g(b)) = h(b)", s)
    assert same_clause(i4.ground_clause, clause("f(g(b)) = h(b) | g(a) != g(a) | f(g(b)) = h(b)", s))
    # the variable was replaced by a term with the rewritten subterm exposed
    assert i4.literal.lhs.args[0] != Var(0)


def test_nonground_inferences_of_the_decision_example():
    s = UNARY_SIG
    x = Var(0)
    sigma = {0: parse_term("a", s)}

    def L(pos, f, g):
        return Literal(pos, App(f, (x,)), App(g, (x,)))

    i1 = leaf(L(False, "f", "h"), Clause((L(False, "f", "g"),)), sigma)
    i2 = leaf(L(True, "f", "g"), Clause((L(False, "f", "g"),)), sigma)
    i3 = leaf(L(True, "h", "g"), Clause((L(False, "h", "g"),)), sigma)
    i4 = rewrite_inference(i2, i1, (1,), UNARY_CFG)
    assert i4.ground_literal.same(lit("h(a) != g(a)", s))
    assert same_clause(i4.ground_clause, clause("h(a) != g(a) | f(a) != g(a) | f(a) != g(a)", s))
    assert i4.literal.same(L(False, "h", "g")) or i4.literal.same(L(False, "g", "h"))
    i5 = rewrite_inference(i3, i4, (2,) if i4.ground_literal.rhs == parse_term("h(a)", s) else (1,), UNARY_CFG)
    assert i5.ground_literal == lit("g(a) != g(a)", s)
    assert same_clause(i5.ground_clause,
                       clause("g(a) != g(a) | f(a) != g(a) | f(a) != g(a) | h(a) != g(a)", s))


def test_inference_rejects_mismatched_position():
    s = UNARY_SIG
    i1 = leaf(lit("a = b", s), Clause(()), {})
    i2 = leaf(lit("f(c) = d", s), Clause(()), {})
    with pytest.raises(InferenceError):
        rewrite_inference(i1, i2, (1, 1), UNARY_CFG)
    with pytest.raises(InferenceError):
        rewrite_inference(leaf(lit("a != b", s), Clause(()), {}), i2, (1,), UNARY_CFG)


def test_random_inferences_have_the_expected_conclusion():
    rng = random.Random(3)
    for _ in range(200):
        inst = inferences.random_instance(rng)
        assert inferences.check_instance(inst) == []


def test_completion_decides_the_equational_theory():
    rng = random.Random(5)
    sig = {"f": 1, "g": 2, "a": 0, "b": 0, "c": 0}
    cfg = KboConfig.default(sig)
    for _ in range(150):
        pairs = [(random_term(rng, sig, 2), random_term(rng, sig, 2)) for _ in range(rng.randint(1, 4))]
        trs = complete_equations(pairs, cfg)
        facts = [eq(s, t) for s, t in pairs]
        for _ in range(5):
            s, t = random_term(rng, sig, 2), random_term(rng, sig, 2)
            assert (trs.nf(s) == trs.nf(t)) == cc_entails(facts, eq(s, t))
        for rule in trs:
            assert cfg.key(rule.lhs) > cfg.key(rule.rhs)
            # reduced: neither side reducible by another rule
            others = Trs({k: r for k, r in trs.rules.items() if k != rule.lhs})
            assert others.irreducible(rule.lhs)
            assert trs.irreducible(rule.rhs)


def test_normalize_records_steps():
    s = UNARY_SIG
    trs = complete_equations([(parse_term("f(a)", s), parse_term("a", s))], UNARY_CFG)
    nf, steps = normalize(parse_term("f(f(a))", s), trs)
    assert nf == parse_term("a", s)
    assert len(steps) == 2


def _trail(cfg, lits, sig):
    t = Trail(cfg)
    for n, text in enumerate(lits):
        l = lit(text, sig)
        t = t.push(TrailEntry(l, 0, EntryKind.PROPAGATED, l, Clause(()), {}))
    return t


def test_refutation_of_a_false_literal_ends_in_trivial_disequation():
    s = UNARY_SIG
    trail = _trail(UNARY_CFG, ["a = b", "f(b) = c"], s)
    target = leaf(lit("f(a) != c", s), clause("d = d", s), {})
    chain = refutation(trail, target, UNARY_CFG)
    final = chain.last.ground_literal
    assert not final.positive and final.lhs == final.rhs
    assert is_reduction_chain(chain.steps, [target] + [e.leaf() for e in trail], UNARY_CFG)


def test_refutation_of_a_positive_literal_uses_a_trail_disequation():
    s = UNARY_SIG
    trail = _trail(UNARY_CFG, ["f(a) != c", "f(b) = c"], s)
    target = leaf(lit("a = b", s), Clause(()), {})
    chain = refutation(trail, target, UNARY_CFG)
    final = chain.last.ground_literal
    assert not final.positive and final.lhs == final.rhs


def test_refutation_requires_a_false_literal():
    s = UNARY_SIG
    trail = _trail(UNARY_CFG, ["a = b"], s)
    with pytest.raises(NotFalse):
        refutation(trail, leaf(lit("c != d", s), Clause(()), {}), UNARY_CFG)
    with pytest.raises(NotFalse):
        refutation(trail, leaf(lit("c = d", s), Clause(()), {}), UNARY_CFG)


def test_collect_chain_orders_premises_first():
    s = PAIR_SIG
    i1 = leaf(lit("f(a,a) != f(b,b)", s), Clause(()), {})
    i2 = leaf(lit("a = b", s), Clause(()), {})
    i3 = rewrite_inference(i2, i1, (1, 1), PAIR_CFG)
    i4 = rewrite_inference(i2, i3, (1, 2), PAIR_CFG)
    chain = collect_chain(i4)
    assert chain.last is i4
    assert len(chain) == 4
    assert is_reduction_chain(chain.steps, [i1, i2], PAIR_CFG)
    assert not is_reduction_chain(chain.steps, [i1], PAIR_CFG)
