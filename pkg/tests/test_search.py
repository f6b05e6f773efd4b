import random

import pytest

from scleq import calculus as calc
from scleq.calculus import InvariantError, Status
from scleq.frontend import parse_literal, parse_native, parse_term
from scleq.search import (
    DecisionPolicy, Prover, ScriptError, SearchConfig, default_beta, find_conflict, find_propagation,
    grow_beta, replay, run, simplify_clauses, stuck_violations, validate_regular_run, with_bound,
)
from scleq.terms import App, Clause
from scleq.trail import UNDEFINED, Trail, TrailEntry

import problems
from gen import small_problem


def test_default_bound_applies_the_largest_function_twice():
    p = parse_native("sig f/1 g/2 a/0 b/0; clause a = b.")
    assert repr(default_beta(p.sig, p.cfg)) == "f(f(a))"
    assert repr(grow_beta(App("a"), p.sig, p.cfg)) == "f(a)"


def test_function_free_problems_get_a_fresh_top_constant():
    p = parse_native("sig a/0 top/0; clause a = top.")
    q, beta = with_bound(p)
    assert repr(beta) == "top1"
    assert q.cfg.precedence[-1] == "top1"
    assert "top1" not in p.sig


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_steps=0)
    with pytest.raises(ValueError):
        SearchConfig(heuristic="clever")
    with pytest.raises(ValueError):
        SearchConfig(grow_limit=-1)


def test_refutation_run_needs_no_decisions():
    r = run(problems.load("refut"), SearchConfig(audit=True))
    assert r.verdict == "Unsatisfiable"
    assert all(a.rule != "Decide" for a in r.trace)


def test_bounded_model_is_stuck():
    r = run(problems.load("ai"), SearchConfig(audit=True))
    assert r.verdict == "BoundedModel"
    assert stuck_violations(r.state) == []
    assert all(a.rule == "Decide" for a in r.trace)


def test_undefined_literals_need_no_extra_clauses():
    p = problems.load("ai")
    p, beta = with_bound(p)
    t = Trail(p.cfg).push(TrailEntry.decision(parse_literal("b = c", p.sig), 1))
    for i in (1, 2, 3):
        for other in ("b", "c"):
            lit = parse_literal(f"a{i} = {other}", p.sig)
            assert t.value_of(lit) is UNDEFINED


def test_step_limit_gives_resource_out():
    r = run(problems.load("rewvar"), SearchConfig(max_steps=3))
    assert r.verdict == "ResourceOut"
    assert len(r.trace) <= 4


def test_grow_raises_the_bound():
    p = parse_native("sig f/1 a/0 b/0; beta f(a); clause f(f(a)) != f(f(a)) | a = b.")
    r = run(p, SearchConfig(grow_limit=2, simplify=False, audit=True))
    grows = [a for a in r.trace if a.rule == "Grow"]
    assert grows
    assert r.verdict in ("BoundedModel", "Unsatisfiable")
    if r.verdict == "BoundedModel":
        assert len(grows) == 2


def test_scripted_decisions_must_be_legal():
    p = problems.load("intro")
    p.decisions = [parse_literal("c = b", p.sig)]
    with pytest.raises(ScriptError):
        run(p)


def test_scripted_decisions_are_followed():
    r = run(problems.load("intro"), SearchConfig(keep_history=True))
    decisions = [a for a in r.trace if a.rule == "Decide"][:2]
    assert [a.note.split()[1] for a in decisions] == ["h(a)=g(a)", "f(a)=g(a)"]


def test_simplification_rules():
    p = parse_native("""
        sig f/1 a/0 b/0 c/0;
        clause f(a) = b.
        clause f(a) = c | a = a.
        clause f(a) != c | c != c | f(a) != c.
        clause b = c | a = b.
        clause a = b | a = c | b = c.
    """)
    p, beta = with_bound(p)
    st = calc.initial_state(p.clauses, beta, p.sig, p.cfg)
    new, changes = simplify_clauses(st)
    text = {s.name: repr(s.clause) for s in new.clauses}
    assert "N1" not in text                      # tautology
    assert text["N2"] == "b!=c"                  # cleaned and rewritten by N0
    assert text["N3"] == "a=b"                   # resolved with the unit b != c
    assert text["N0"] == "f(b)=b"                # rewritten by the new unit a = b
    assert "N4" not in text                      # rewritten into a tautology
    assert changes[:4] == ["tautology deletes N1", "cleanup N2 -> f(a)!=c", "rewrite by N0 N2 -> b!=c",
                           "resolve with N2 N3 -> a=b"]
    again, more = simplify_clauses(new)
    assert more == []


def test_simplify_restarts_a_non_empty_trail():
    r = run(problems.load("rewvar"), SearchConfig(keep_history=True))
    rules = [a.rule for a in r.trace]
    i = rules.index("Simplify")
    assert rules[i + 1] == "Restart"


def test_learning_a_repeated_clause_is_an_invariant_error():
    p = problems.load("faa")
    pr = Prover(p, SearchConfig(simplify=False))
    while pr.step() is None:
        if pr.state.U:
            break
    from dataclasses import replace
    from scleq.calculus import Stored

    st = pr.state
    pr.state = replace(st, U=st.U + (Stored("U9", st.U[0].clause),))
    # rerun the same conflict by hand
    st2 = calc.initial_state(p.clauses, st.beta, p.sig, p.cfg)
    st2 = replace(st2, U=pr.state.U)
    st2 = calc.decide(st2, "N0", {}, 0)
    st2 = calc.conflict(st2, "N1", {})
    pr.state = st2
    with pytest.raises(InvariantError):
        while pr.step() is None:
            pass


def test_default_heuristic_prefers_frequent_open_literals():
    p = problems.load("ai")
    p, beta = with_bound(p)
    st = calc.initial_state(p.clauses, beta, p.sig, p.cfg)
    c = DecisionPolicy().choose(st)
    assert c is not None and not c.satisfied


def test_random_heuristic_is_seeded():
    p = problems.load("rewvar")
    a = run(p, SearchConfig(heuristic="random", seed=3)).trace_lines()
    b = run(p, SearchConfig(heuristic="random", seed=3)).trace_lines()
    assert a == b


def test_replay_reproduces_the_final_state():
    for name in problems.ALL:
        p = problems.load(name)
        r = run(p)
        q, beta = with_bound(p)
        st = calc.initial_state(q.clauses, r.initial_beta, q.sig, q.cfg)
        assert replay(st, r.trace).signature() == r.state.signature()


def test_random_runs_are_regular():
    rng = random.Random(21)
    for _ in range(20):
        p = small_problem(rng)
        r = run(p, SearchConfig(keep_history=True, audit=True))
        assert validate_regular_run(r.history) == []
        if r.verdict == "BoundedModel":
            assert stuck_violations(r.state) == []


def test_validator_flags_an_irregular_decision():
    p = problems.load("propsmeq")
    q, beta = with_bound(p)
    st = calc.initial_state(q.clauses, beta, q.sig, q.cfg)
    # deciding while a level-zero propagation is pending
    after = calc.decide(st, "N1", {}, 1)
    issues = validate_regular_run([(st, after.last, after)])
    assert any("pending propagation" in i for i in issues)


def test_conflict_and_propagation_search():
    p = problems.load("refut")
    q, beta = with_bound(p)
    st = calc.initial_state(q.clauses, beta, q.sig, q.cfg)
    assert find_conflict(st) is None
    prop = find_propagation(st)
    assert prop is not None and prop.name == "N2"


def test_subsumption_deletes_instances_of_smaller_clauses():
    p = parse_native("""
        sig f/1 a/0 b/0 c/0;
        clause f(X) != a.
        clause f(b) != a | b = c.
        clause a != b.
        clause a != b | c = b.
    """)
    q, beta = with_bound(p)
    st = calc.initial_state(q.clauses, beta, q.sig, q.cfg)
    new, changes = simplify_clauses(st)
    assert [s.name for s in new.clauses] == ["N0", "N2"]
    assert "subsumed by N0 deletes N1" in changes
    assert "subsumed by N2 deletes N3" in changes
