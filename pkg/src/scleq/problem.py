"""Parsed input problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .ordering import KboConfig
from .terms import Clause, Literal, Term


@dataclass
class Problem:
    sig: Dict[str, int]
    cfg: KboConfig
    clauses: List[Clause]
    beta: Optional[Term] = None
    decisions: List[Literal] = field(default_factory=list)
    labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"N{i}" for i in range(len(self.clauses))]
