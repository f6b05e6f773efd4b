"""Readers and a writer for problem files.

The native format::

    % comment
    sig f/1 a/0 b/0;
    order kbo;
    weights {f:1, a:1};
    precedence b < a < f;
    beta f(f(a));
    decide f(a) = b;
    clause f(X) != a | f(X) = b.
    clause .

Statements end with ``;`` or ``.``.  Names starting with an uppercase
letter are variables, numbered per clause in order of appearance.  Without
a ``sig`` statement the signature is collected from the clauses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..ordering import KboConfig
from ..problem import Problem
from ..terms import App, Clause, Literal, Term, Var


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


class UnsupportedFeature(ParseError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*|/\*.*?\*/)
  | (?P<neq>!=)
  | (?P<name>[A-Za-z_$][A-Za-z0-9_']*)
  | (?P<num>\d+)
  | (?P<quoted>'[^']*')
  | (?P<sym>[()\[\],;.|=:{}/<~&])
""", re.VERBOSE | re.DOTALL)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind if kind != "sym" else chunk, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Reader:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None) -> ParseError:
        t = tok or self.tok
        return ParseError(msg, t.line, t.col)

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, kind: str) -> Optional[Token]:
        if self.tok.kind == kind:
            return self.next()
        return None

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what or repr(kind)}, found {found!r}")
        return self.next()


class _Symbols:
    """Signature checking, or collection when no signature was declared."""

    def __init__(self, sig: Optional[Dict[str, int]] = None):
        self.declared = sig is not None
        self.sig: Dict[str, int] = dict(sig or {})
        self.first: Dict[str, Tuple[int, int]] = {}

    def use(self, name: str, arity: int, tok: Token) -> None:
        known = self.sig.get(name)
        if known is None:
            if self.declared:
                raise ParseError(f"unknown symbol {name}", tok.line, tok.col)
            self.sig[name] = arity
            self.first[name] = (tok.line, tok.col)
        elif known != arity:
            raise ParseError(f"{name} has arity {known}, used with {arity} arguments", tok.line, tok.col)

    def signature(self) -> Dict[str, int]:
        """The signature, inferred symbols in order of first occurrence."""
        if self.declared:
            return dict(self.sig)
        return {s: self.sig[s] for s in sorted(self.sig, key=lambda s: self.first[s])}


def _is_var(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


def _term(r: _Reader, syms: _Symbols, vars_: Optional[Dict[str, int]]) -> Term:
    tok = r.expect("name", "a term")
    name = tok.text
    if _is_var(name):
        if vars_ is None:
            raise ParseError(f"variable {name} in a ground position", tok.line, tok.col)
        if name not in vars_:
            vars_[name] = len(vars_)
        return Var(vars_[name])
    args: List[Term] = []
    if r.accept("("):
        args.append(_term(r, syms, vars_))
        while r.accept(","):
            args.append(_term(r, syms, vars_))
        r.expect(")")
    syms.use(name, len(args), tok)
    return App(name, tuple(args))


def _literal(r: _Reader, syms: _Symbols, vars_: Optional[Dict[str, int]]) -> Literal:
    if r.accept("~"):
        r.expect("(")
        lit = _literal(r, syms, vars_)
        r.expect(")")
        return lit.complement()
    start = r.tok
    lhs = _term(r, syms, vars_)
    if r.accept("="):
        return Literal(True, lhs, _term(r, syms, vars_))
    if r.accept("neq"):
        return Literal(False, lhs, _term(r, syms, vars_))
    if isinstance(lhs, App):
        raise UnsupportedFeature(f"predicate {lhs.fn}/{len(lhs.args)} is not an equation; "
                                 "only = and != literals are supported", start.line, start.col)
    raise r.error("expected = or !=")


def _end(r: _Reader) -> None:
    if not (r.accept(";") or r.accept(".")):
        raise r.error("expected ';' or '.'")


def parse_term(text: str, sig: Optional[Dict[str, int]] = None) -> Term:
    r = _Reader(text)
    t = _term(r, _Symbols(sig), {})
    r.expect("eof", "end of term")
    return t


def parse_literal(text: str, sig: Optional[Dict[str, int]] = None) -> Literal:
    r = _Reader(text)
    lit = _literal(r, _Symbols(sig), {})
    r.expect("eof", "end of literal")
    return lit


def parse_native(text: str) -> Problem:
    r = _Reader(text)
    syms = _Symbols(None)
    clauses: List[Clause] = []
    weights: Dict[str, int] = {}
    precedence: Optional[List[str]] = None
    beta_src: Optional[Tuple[int, int]] = None
    decide_src: List[int] = []
    deferred: List[Tuple[str, int]] = []
    while r.tok.kind != "eof":
        kw = r.expect("name", "a statement keyword")
        word = kw.text
        if word == "sig":
            if clauses or syms.sig:
                raise ParseError("sig must come before symbols are used", kw.line, kw.col)
            sig: Dict[str, int] = {}
            while r.tok.kind == "name":
                nt = r.next()
                r.expect("/")
                arity = int(r.expect("num", "an arity").text)
                if nt.text in sig:
                    raise ParseError(f"symbol {nt.text} declared twice", nt.line, nt.col)
                if _is_var(nt.text):
                    raise ParseError(f"symbol {nt.text} must start in lowercase", nt.line, nt.col)
                sig[nt.text] = arity
            syms = _Symbols(sig)
            _end(r)
        elif word == "order":
            o = r.expect("name", "an ordering name")
            if o.text != "kbo":
                raise UnsupportedFeature(f"ordering {o.text} is not supported", o.line, o.col)
            _end(r)
        elif word == "weights":
            r.expect("{")
            while not r.accept("}"):
                nt = r.expect("name", "a symbol")
                r.expect(":")
                weights[nt.text] = int(r.expect("num", "a weight").text)
                r.accept(",")
            _end(r)
        elif word == "precedence":
            precedence = [r.expect("name", "a symbol").text]
            while r.accept("<"):
                precedence.append(r.expect("name", "a symbol").text)
            _end(r)
        elif word in ("beta", "decide"):
            # parsed after the signature is complete
            deferred.append((word, r.i))
            while r.tok.kind not in (";", ".", "eof"):
                r.next()
            _end(r)
        elif word == "clause":
            vars_: Dict[str, int] = {}
            lits: List[Literal] = []
            if r.tok.kind != ".":
                lits.append(_literal(r, syms, vars_))
                while r.accept("|"):
                    lits.append(_literal(r, syms, vars_))
            r.expect(".", "'.' ending the clause")
            clauses.append(Clause(tuple(lits)))
        else:
            raise ParseError(f"unknown statement {word}", kw.line, kw.col)
    sig = syms.signature()
    beta = None
    decisions: List[Literal] = []
    for word, at in deferred:
        r.i = at
        if word == "beta":
            beta = _term(r, syms, None)
        else:
            decisions.append(_literal(r, syms, None))
    for s in weights:
        if s not in sig:
            raise ParseError(f"weight given for unknown symbol {s}")
    if precedence is None:
        cfg = KboConfig(list(reversed(list(sig))), weights)
    else:
        missing = [s for s in sig if s not in precedence]
        extra = [s for s in precedence if s not in sig]
        if missing or extra:
            raise ParseError(f"precedence must list exactly the signature (missing {missing}, extra {extra})")
        cfg = KboConfig(precedence, weights)
    return Problem(dict(sig), cfg, clauses, beta, decisions)


def parse_tptp_cnf(text: str) -> Problem:
    r = _Reader(text)
    syms = _Symbols(None)
    clauses: List[Clause] = []
    labels: List[str] = []
    while r.tok.kind != "eof":
        kw = r.expect("name", "cnf(")
        if kw.text != "cnf":
            raise UnsupportedFeature(f"{kw.text} statements are not supported; only cnf", kw.line, kw.col)
        r.expect("(")
        name = r.next()
        if name.kind not in ("name", "num", "quoted"):
            raise r.error("expected a formula name", name)
        r.expect(",")
        r.expect("name", "a formula role")
        r.expect(",")
        vars_: Dict[str, int] = {}
        depth = 0
        while r.accept("("):
            depth += 1
        lits: List[Literal] = []
        if r.tok.kind == "name" and r.tok.text == "$false":
            r.next()
        else:
            lits.append(_literal(r, syms, vars_))
            while r.accept("|"):
                lits.append(_literal(r, syms, vars_))
        for _ in range(depth):
            r.expect(")")
        if r.accept(","):
            raise r.error("annotations after the formula are not supported")
        r.expect(")")
        r.expect(".")
        clauses.append(Clause(tuple(lits)))
        labels.append(name.text)
    sig = syms.signature()
    if not any(n == 0 for n in sig.values()):
        sig["c0"] = 0
    return Problem(sig, KboConfig(list(reversed(list(sig)))), clauses, labels=labels)


def _print_lit(l: Literal) -> str:
    return f"{l.lhs!r} {'=' if l.positive else '!='} {l.rhs!r}"


def print_native(problem: Problem) -> str:
    cfg = problem.cfg
    lines = ["sig " + " ".join(f"{s}/{n}" for s, n in problem.sig.items()) + ";", "order kbo;"]
    ws = {s: cfg.weight(s) for s in problem.sig if cfg.weight(s) != 1}
    if ws:
        lines.append("weights {" + ", ".join(f"{s}:{w}" for s, w in ws.items()) + "};")
    lines.append("precedence " + " < ".join(cfg.precedence) + ";")
    if problem.beta is not None:
        lines.append(f"beta {problem.beta!r};")
    for d in problem.decisions:
        lines.append(f"decide {_print_lit(d)};")
    for c in problem.clauses:
        lines.append("clause " + " | ".join(_print_lit(l) for l in c) + ".")
    return "\n".join(lines) + "\n"
