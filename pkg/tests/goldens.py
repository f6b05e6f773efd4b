"""Golden expectations for the worked example runs. Each check raises AssertionError on a mismatch."""

import time

from scleq import calculus as calc
from scleq.frontend import parse_literal, parse_term
from scleq.search import SearchConfig, run, with_bound
from scleq.terms import App, Clause, Literal, Var

import problems
from test_calculus import lits, same_clause, variant

FAST = 1.0


def timed_run(name, **kw):
    t = time.perf_counter()
    r = run(problems.load(name), SearchConfig(**kw))
    elapsed = time.perf_counter() - t
    assert elapsed < FAST, f"{name} took {elapsed:.2f}s"
    return r


def _unit(p, text):
    return Clause((parse_literal(text, p.sig),))


def _c4():
    x = Var(0)
    return Clause((Literal(False, App("h", (x,)), App("g", (x,))),
                   Literal(False, App("f", (x,)), App("g", (x,)))))


def check_intro():
    r = timed_run("intro", audit=True)
    assert len(r.learned) == 1
    assert variant(r.learned[0], _c4()), r.learned
    decisions = [a.note.split()[1] for a in r.trace if a.rule == "Decide"][:2]
    assert decisions == ["h(a)=g(a)", "f(a)=g(a)"]


def check_refutation():
    r = timed_run("refut", audit=True)
    assert r.verdict == "Unsatisfiable"
    assert [a.rule for a in r.trace].count("Decide") == 0
    props = [a for a in r.trace if a.rule == "Propagate"]
    pushed = [a.note.split()[1] for a in props]
    assert "a!=b" in pushed
    assert any(a.clause == "N1" for a in props)
    assert all(a.note.split()[2] == "lvl=0" for a in props)
    last = r.trace[-1]
    assert last.rule == "Conflict" and last.param("level") == "0" and last.note == "⊥"


def check_saturation():
    r = timed_run("sat", audit=True)
    p = problems.load("sat")
    got = [s.clause for s in r.state.clauses]
    want = [_unit(p, "e1 = e2"), _unit(p, "c != d"), lits(p, "f(a) != f(b) | g(c) != g(d)")]
    assert len(got) == len(want)
    for w in want:
        assert any(variant(g, w) for g in got), (w, got)
    assert variant(r.learned[0], _unit(p, "c != d"))


def check_implicit_conflict():
    p = problems.load("intro")
    p, beta = with_bound(p)
    st = calc.initial_state(p.clauses, beta, p.sig, p.cfg)
    a = {0: parse_term("a", p.sig)}
    st = calc.decide(st, "N0", a, 0)
    st = calc.decide(st, "N1", a, 0)
    st = calc.conflict(st, "N2", a)
    chain, good = calc.explore_candidates(st)
    want = [
        "f(a) != h(a) | f(a) != g(a)",
        "f(a) = g(a) | f(a) != g(a)",
        "h(a) = g(a) | h(a) != g(a)",
        "h(a) != g(a) | f(a) != g(a) | f(a) != g(a)",
        "g(a) != g(a) | f(a) != g(a) | f(a) != g(a) | h(a) != g(a)",
    ]
    assert len(chain) == len(want)
    for step, text in zip(chain, want):
        assert same_clause(step.ground_clause, lits(p, text)), step
    assert good == [3, 4]
    st = calc.explore_refutation(st, 4)
    st = calc.equality_resolution(st)
    while calc.factor_pairs(st):
        st = calc.factorize(st, *calc.factor_pairs(st)[0])
    st = calc.backtrack(st)
    assert variant(st.U[0].clause, _c4())


def check_ground_pair():
    r = timed_run("faa", audit=True)
    p = problems.load("faa")
    assert [c for c in r.learned] == [_unit(p, "f(a,a) = f(b,b)")]


def check_rewrite_below_variable():
    r = timed_run("rewvar", audit=True)
    p = problems.load("rewvar")
    assert r.learned[0] == _unit(p, "f(g(b)) = h(b)")
    stored = {s.name: s.clause for s in r.state.clauses}
    assert stored["N1"] == _unit(p, "c = d")


def check_smaller_equation():
    r = timed_run("propsmeq", audit=True, simplify=False)
    assert [repr(l) for l in r.state.trail.literals] == ["c=d", "a=b", "b=d"]
    assert r.trace[-1].rule == "Propagate" and r.trace[-1].clause == "N2"


GOLDEN = {
    1: [check_intro],
    2: [check_refutation],
    3: [check_saturation],
    4: [check_implicit_conflict, check_ground_pair, check_rewrite_below_variable, check_smaller_equation],
}
