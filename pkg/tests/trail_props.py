"""Order properties of the trail-induced literal ordering on random trails."""

from __future__ import annotations

import itertools
import random
from typing import List

from scleq.ordering import EQ, GT, LT, enumerate_ground_terms_below
from scleq.terms import Literal
from scleq.trail import Trail, gamma_star_compare

from gen import SIGNATURES, config, random_trail


def literal_pool(trail: Trail, beta, sig) -> List[Literal]:
    """Every literal, in both signs, over pairs of distinct terms below beta."""
    terms = enumerate_ground_terms_below(beta, sig, trail.cfg)
    out = []
    for s, t in itertools.combinations(terms, 2):
        hi, lo = (s, t) if trail.cfg.key(s) > trail.cfg.key(t) else (t, s)
        out.append(Literal(True, hi, lo))
        out.append(Literal(False, hi, lo))
    return out


def ordering_violations(trail: Trail, beta, lits: List[Literal], rng: random.Random,
                        subsets: int = 20) -> List[str]:
    out = []

    def cmp(k, h):
        return gamma_star_compare(trail, beta, k, h)

    for k in lits:
        if cmp(k, k) is not EQ:
            out.append(f"not irreflexive on {k!r}")
    for k, h in itertools.combinations(lits, 2):
        r, back = cmp(k, h), cmp(h, k)
        if r is EQ:
            out.append(f"not total on {k!r}, {h!r}")
        if not ((r is LT and back is GT) or (r is GT and back is LT)):
            out.append(f"not antisymmetric on {k!r}, {h!r}")
    sample = lits if len(lits) <= 14 else rng.sample(lits, 14)
    for k, h, m in itertools.permutations(sample, 3):
        if cmp(k, h) is LT and cmp(h, m) is LT and cmp(k, m) is not LT:
            out.append(f"not transitive on {k!r} < {h!r} < {m!r}")
    for _ in range(subsets):
        sub = rng.sample(lits, min(len(lits), rng.randint(1, 8)))
        minima = [k for k in sub if all(k is h or cmp(k, h) is LT for h in sub)]
        if len(minima) != 1:
            out.append(f"subset without a unique minimum: {sub!r}")
    return out


def random_cases(count: int, seed: int = 0):
    """(trail, beta, literals) triples spread over the test signatures."""
    rng = random.Random(seed)
    for n in range(count):
        sig, beta = SIGNATURES[n % len(SIGNATURES)]
        cfg = config(sig)
        terms = enumerate_ground_terms_below(beta, sig, cfg)
        trail = random_trail(rng, cfg, terms, rng.randint(0, 6))
        yield rng, trail, beta, literal_pool(trail, beta, sig)
