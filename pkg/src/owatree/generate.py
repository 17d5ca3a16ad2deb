"""Seeded random clique instances with costs drawn uniformly from 1..100."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from owatree.exceptions import InputError
from owatree.model import MultiGraphInstance

COST_LOW, COST_HIGH = 1, 100


def generate(n: int, p: int, seed: int, density: str = "clique") -> MultiGraphInstance:
    """Clique on ``n`` vertices; identical ``seed`` gives an identical instance."""
    if n < 2 or p < 2:
        raise InputError(f"need n >= 2 and p >= 2, got n={n} p={p}")
    if density != "clique":
        raise InputError(f"unsupported density {density!r}; only 'clique' is available")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(1, n + 1), 2))
    costs = rng.integers(COST_LOW, COST_HIGH, size=(len(pairs), p), endpoint=True)
    return MultiGraphInstance.from_edges(n, [(u, v, row.tolist()) for (u, v), row in zip(pairs, costs)])
