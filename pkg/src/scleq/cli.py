"""Command line interface.

Exit codes: 0 unsatisfiable, 1 bounded model, 2 resource limit, 3 bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional, TextIO

from .frontend import ParseError, format_trace, parse_native, parse_term, parse_tptp_cnf
from .search import AuditFailure, RunResult, ScriptError, SearchConfig, run

EXIT = {"Unsatisfiable": 0, "BoundedModel": 1, "ResourceOut": 2}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scleq", description="Clause learning prover for equational logic.")
    p.add_argument("file", help="problem file ('-' reads standard input)")
    p.add_argument("--format", choices=["native", "tptp-cnf"], default=None,
                   help="input format (default: tptp-cnf for .p/.tptp files, native otherwise)")
    p.add_argument("--beta", default=None, help="ground bound term (default: from the file, else automatic)")
    p.add_argument("--grow", type=int, default=0, help="how often the bound may grow (default 0)")
    p.add_argument("--max-steps", type=int, default=20000, help="rule application limit (default 20000)")
    p.add_argument("--trace", default=None, help="write the rule trace to this path")
    p.add_argument("--audit", action="store_true", help="check state soundness after every rule")
    p.add_argument("--seed", type=int, default=0, help="seed for the random decision heuristic")
    p.add_argument("--heuristic", choices=["default", "random"], default="default",
                   help="decision heuristic (scripted decisions in the file always come first)")
    return p


def emit_result(result: RunResult, out: TextIO, trace_path: Optional[str] = None) -> int:
    st = result.state
    out.write(f"status: {result.verdict}\n")
    out.write(f"beta: {st.beta!r}\n")
    out.write(f"steps: {len(result.trace)}\n")
    for rec in st.learned:
        out.write(f"learned {rec.name}: {rec.clause!r}\n")
    if result.verdict == "BoundedModel":
        out.write("trail:\n")
        for line in st.trail.dump():
            out.write(f"  {line}\n")
    if trace_path:
        text = format_trace(result.initial_beta or st.beta, result.trace,
                            [(r.name, r.clause) for r in st.learned])
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT[result.verdict]


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    fmt = args.format
    if fmt is None:
        fmt = "tptp-cnf" if args.file.endswith((".p", ".tptp")) else "native"
    try:
        problem = parse_native(text) if fmt == "native" else parse_tptp_cnf(text)
        beta = parse_term(args.beta, problem.sig) if args.beta else None
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    audit = args.audit or os.environ.get("SCLEQ_AUDIT") == "1"
    cfg = SearchConfig(beta=beta, grow_limit=args.grow, max_steps=args.max_steps,
                       heuristic=args.heuristic, seed=args.seed, audit=audit)
    try:
        result = run(problem, cfg)
    except ScriptError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except AuditFailure as e:
        print(f"audit failure: {e}", file=sys.stderr)
        return 4
    return emit_result(result, sys.stdout, args.trace)


if __name__ == "__main__":
    sys.exit(main())
