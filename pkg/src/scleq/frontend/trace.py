"""Proof traces: one rule application per line, replayable.

A trace starts with a ``% beta <term>`` header; other lines beginning with
``%`` are comments.  Rule lines look like::

    rule=Propagate clause=N2 subst={X0->a} lit=0 copies=- | push a!=b lvl=0
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, List, Optional, Tuple

from ..calculus import ProverState, RuleApplication
from ..problem import Problem
from ..terms import Term
from .parser import ParseError, parse_term

_SUBST_ITEM = re.compile(r"X(\d+)->")


def format_trace(beta: Term, apps: Iterable[RuleApplication], learned: Iterable[Tuple[str, object]] = ()
                 ) -> str:
    lines = [f"% beta {beta!r}"]
    lines.extend(a.format() for a in apps)
    lines.extend(f"% learned {name}: {clause!r}" for name, clause in learned)
    return "\n".join(lines) + "\n"


def _parse_subst(text: str, sig) -> Dict[int, Term]:
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"malformed substitution {text}")
    body = text[1:-1]
    out: Dict[int, Term] = {}
    if not body:
        return out
    starts = list(_SUBST_ITEM.finditer(body))
    for n, m in enumerate(starts):
        end = starts[n + 1].start() - 1 if n + 1 < len(starts) else len(body)
        out[int(m.group(1))] = parse_term(body[m.end():end], sig)
    return out


def parse_trace_line(line: str, sig) -> RuleApplication:
    head, _, note = line.partition(" | ")
    fields = head.split()
    if not fields or not fields[0].startswith("rule="):
        raise ParseError(f"not a rule line: {line}")
    rule = fields[0][5:]
    clause: Optional[str] = None
    subst: Dict[int, Term] = {}
    params: List[Tuple[str, str]] = []
    for f in fields[1:]:
        key, eq, val = f.partition("=")
        if not eq:
            raise ParseError(f"malformed field {f}")
        if key == "clause":
            clause = val
        elif key == "subst":
            subst = _parse_subst(val, sig)
        else:
            params.append((key, val))
    return RuleApplication(rule, clause, subst, tuple(params), note.strip())


def parse_trace(text: str, sig) -> Tuple[Optional[Term], List[RuleApplication]]:
    beta = None
    apps = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            parts = line[1:].split(None, 1)
            if len(parts) == 2 and parts[0] == "beta":
                beta = parse_term(parts[1], sig)
            continue
        apps.append(parse_trace_line(line, sig))
    return beta, apps


def replay_trace(problem: Problem, text: str) -> ProverState:
    """Re-run a trace from the problem's initial state."""
    from ..calculus import initial_state
    from ..search import replay, with_bound

    problem, _ = with_bound(problem)
    beta, apps = parse_trace(text, problem.sig)
    if beta is None:
        raise ParseError("the trace has no '% beta' header")
    st = initial_state(problem.clauses, beta, problem.sig, problem.cfg)
    return replay(st, apps)
