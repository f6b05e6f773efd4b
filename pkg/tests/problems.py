"""The worked example problems in native syntax."""

from scleq.frontend import parse_native

INTRO = """\
sig f/1 h/1 g/1 a/0 b/0 c/0 d/0;
precedence d < c < b < a < g < h < f;
beta g(g(d));
decide h(a) = g(a);
decide f(a) = g(a);
clause h(X) = g(X) | c = d.
clause f(X) = g(X) | a = b.
clause f(X) != h(X) | f(X) != g(X).
"""

REFUTATION = """\
sig f/1 a/0 b/0;
precedence b < a < f;
beta f(f(f(a)));
clause f(X) != a | f(X) = b.
clause f(f(Y)) = Y.
clause a != b.
"""

SATURATION = """\
sig f/1 g/1 a/0 b/0 c/0 d/0 e1/0 e2/0;
precedence e2 < e1 < d < c < b < a < g < f;
beta f(f(g(a)));
decide c = d;
clause c = d | e1 = e2.
clause a = b | c != d.
clause f(a) != f(b) | g(c) != g(d).
"""

REWRITE_BELOW_VARIABLE = """\
sig f/1 h/1 g/1 a/0 b/0 c/0 d/0;
precedence d < c < b < a < g < h < f;
beta g(g(g(d)));
decide f(g(b)) != h(b);
clause f(X) = h(b) | X != g(a).
clause c = d | f(g(b)) != h(b).
clause a = b | f(g(b)) = h(b).
"""

GROUND_PAIR = """\
sig f/2 a/0 b/0 c/0 d/0;
precedence d < c < b < a < f;
beta f(d,f(d,d));
decide f(a,a) != f(b,b);
clause f(a,a) != f(b,b) | c = d.
clause a = b | f(a,a) = f(b,b).
"""

UNDEFINED_LITERALS = """\
sig b/0 c/0 d/0 a1/0 a2/0 a3/0;
precedence d < c < b < a1 < a2 < a3;
clause b = c | c = d.
clause a1 = b | a1 = c.
clause a2 = b | a2 = c.
clause a3 = b | a3 = c.
"""

SMALLER_EQUATION = """\
sig a/0 b/0 c/0 d/0;
precedence d < c < b < a;
clause c = d.
clause c != d | a = b.
clause a != b | a = c.
"""


ALL = {
    "intro": INTRO,
    "refut": REFUTATION,
    "sat": SATURATION,
    "rewvar": REWRITE_BELOW_VARIABLE,
    "faa": GROUND_PAIR,
    "ai": UNDEFINED_LITERALS,
    "propsmeq": SMALLER_EQUATION,
}


def load(name: str):
    return parse_native(ALL[name])
