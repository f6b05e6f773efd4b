from .parser import (
    ParseError,
    UnsupportedFeature,
    parse_literal,
    parse_native,
    parse_term,
    parse_tptp_cnf,
    print_native,
)
from .trace import format_trace, parse_trace, parse_trace_line, replay_trace

__all__ = [
    "ParseError",
    "UnsupportedFeature",
    "parse_literal",
    "parse_native",
    "parse_term",
    "parse_tptp_cnf",
    "print_native",
    "format_trace",
    "parse_trace",
    "parse_trace_line",
    "replay_trace",
]
