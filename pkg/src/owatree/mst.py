"""Colored minimum spanning trees and k-best spanning tree ranking."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from owatree.exceptions import InfeasibleError, InputError
from owatree.model import MultiGraphInstance, to_fraction


class Color(enum.IntEnum):
    UNCOLORED = 0
    BLUE = 1
    RED = 2


@dataclass(frozen=True)
class EdgeColoring:
    """Per-edge Blue (mandatory) / Red (forbidden) / Uncolored marks."""

    states: tuple[Color, ...]

    def __post_init__(self):
        if not all(type(c) is Color for c in self.states):
            try:
                object.__setattr__(self, "states", tuple(Color(c) for c in self.states))
            except ValueError:
                raise InputError("edge states must be 0 (uncolored), 1 (blue) or 2 (red)") from None

    @classmethod
    def empty(cls, m: int) -> "EdgeColoring":
        return cls((Color.UNCOLORED,) * m)

    @classmethod
    def from_sets(cls, m: int, blue: Iterable[int] = (), red: Iterable[int] = ()) -> "EdgeColoring":
        states = [Color.UNCOLORED] * m
        for e in blue:
            states[e] = Color.BLUE
        for e in red:
            if states[e] is Color.BLUE:
                raise InputError(f"edge {e} cannot be both blue and red")
            states[e] = Color.RED
        return cls(tuple(states))

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, e: int) -> Color:
        return self.states[e]

    def with_color(self, e: int, color: Color) -> "EdgeColoring":
        s = list(self.states)
        s[e] = Color(color)
        return EdgeColoring(tuple(s))

    def blue(self) -> list[int]:
        return [e for e, c in enumerate(self.states) if c is Color.BLUE]

    def red(self) -> list[int]:
        return [e for e, c in enumerate(self.states) if c is Color.RED]

    def uncolored(self) -> list[int]:
        return [e for e, c in enumerate(self.states) if c is Color.UNCOLORED]

    def admits(self, edge_ids: Iterable[int]) -> bool:
        """True if the tree ``edge_ids`` contains every Blue edge and no Red edge."""
        ids = set(edge_ids)
        return all(
            (c is not Color.BLUE or e in ids) and (c is not Color.RED or e not in ids)
            for e, c in enumerate(self.states)
        )


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def validate_coloring(inst: MultiGraphInstance, coloring: EdgeColoring) -> Optional[str]:
    """Return ``None`` if some spanning tree respects ``coloring``, else the reason."""
    if len(coloring) != inst.m:
        raise InputError(f"coloring has {len(coloring)} entries for {inst.m} edges")
    uf = UnionFind(inst.n + 1)
    for e in coloring.blue():
        ed = inst.edges[e]
        if not uf.union(ed.u, ed.v):
            return f"blue edges contain a cycle through edge {e}"
    uf = UnionFind(inst.n + 1)
    components = inst.n
    for e, c in enumerate(coloring.states):
        if c is not Color.RED:
            ed = inst.edges[e]
            if uf.union(ed.u, ed.v):
                components -= 1
    if components > 1:
        return "removing red edges disconnects the graph"
    return None


def scalarize(inst: MultiGraphInstance, lam: Sequence) -> list[Fraction]:
    """Per-edge weight ``sum_i lam_i * v_i^e`` in exact arithmetic."""
    if len(lam) != inst.p:
        raise InputError(f"lambda has {len(lam)} components, instance has p={inst.p}")
    ls = [to_fraction(x) for x in lam]
    return [sum((a * c for a, c in zip(ls, e.cost)), Fraction(0)) for e in inst.edges]


def scalarize_int(inst: MultiGraphInstance, lam: Sequence[int]) -> np.ndarray:
    """Integer variant of :func:`scalarize` for integer-scaled multipliers.

    Falls back to Python integers when int64 could overflow.
    """
    top = max((abs(x) for x in lam), default=0)
    if top * inst.max_abs_row_sum < 2**63:
        return inst.cost_matrix @ np.asarray(lam, dtype=np.int64)
    return inst.cost_matrix.astype(object) @ np.asarray(lam, dtype=object)


def edge_order(weights: Sequence) -> list[int]:
    """Edge ids by increasing weight, lower id first among ties."""
    if isinstance(weights, np.ndarray):
        return np.argsort(weights, kind="stable").tolist()
    return sorted(range(len(weights)), key=lambda e: (weights[e], e))


def kruskal(n: int, endpoints: Sequence[tuple[int, int]], order: Sequence[int],
            states: Sequence[int]) -> Optional[list[int]]:
    """Kruskal scan honouring blue/red states; ``None`` when infeasible.

    Blue edges are inserted first (in id order), red ones skipped, the rest
    taken greedily in ``order``.
    """
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for e, c in enumerate(states):
        if c == 1:  # BLUE
            u, v = endpoints[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                return None
            parent[ru] = rv
            tree.append(e)
    need = n - 1
    if len(tree) < need:
        for e in order:
            if states[e] == 0:  # UNCOLORED
                u, v = endpoints[e]
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
                    tree.append(e)
                    if len(tree) == need:
                        break
    if len(tree) != need:
        return None
    tree.sort()
    return tree


def mst(inst: MultiGraphInstance, weights: Sequence, coloring: Optional[EdgeColoring] = None,
        order: Optional[Sequence[int]] = None) -> tuple[tuple[int, ...], Fraction]:
    """Minimum-weight spanning tree among trees respecting ``coloring``.

    Returns the sorted edge ids and the total weight. Raises
    :class:`InfeasibleError` when no tree respects the coloring.
    """
    if len(weights) != inst.m:
        raise InputError(f"{len(weights)} weights for {inst.m} edges")
    if coloring is None:
        coloring = EdgeColoring.empty(inst.m)
    if order is None:
        order = edge_order(weights)
    tree = kruskal(inst.n, inst.endpoints(), order, coloring.states)
    if tree is None:
        raise InfeasibleError(validate_coloring(inst, coloring) or "no spanning tree respects the coloring")
    total = sum((weights[e] for e in tree), 0)
    return tuple(tree), total


def k_best(inst: MultiGraphInstance, weights: Sequence, k: int,
           coloring: Optional[EdgeColoring] = None) -> list[tuple[tuple[int, ...], object]]:
    """The ``k`` cheapest spanning trees (among those respecting ``coloring``), totals non-decreasing.

    Lawler-style partitioning: after a tree is output, its subspace is split
    by forcing the tree's free edges in one at a time while excluding the
    next one, and each part is represented by its constrained MST.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    if len(weights) != inst.m:
        raise InputError(f"{len(weights)} weights for {inst.m} edges")
    order = edge_order(weights)
    endpoints = inst.endpoints()
    n = inst.n

    def solve(forced_in: frozenset, forced_out: frozenset):
        states = [Color.UNCOLORED] * inst.m
        for e in forced_in:
            states[e] = Color.BLUE
        for e in forced_out:
            states[e] = Color.RED
        tree = kruskal(n, endpoints, order, states)
        if tree is None:
            return None
        return sum((weights[e] for e in tree), 0), tuple(tree)

    base_in = frozenset(coloring.blue()) if coloring is not None else frozenset()
    base_out = frozenset(coloring.red()) if coloring is not None else frozenset()
    first = solve(base_in, base_out)
    if first is None:
        return []
    heap = [(first[0], first[1], base_in, base_out)]
    out = []
    while heap and len(out) < k:
        total, tree, fin, fout = heapq.heappop(heap)
        out.append((tree, total))
        inc = set(fin)
        for e in tree:
            if e in fin:
                continue
            res = solve(frozenset(inc), fout | {e})
            if res is not None:
                heapq.heappush(heap, (res[0], res[1], frozenset(inc), fout | {e}))
            inc.add(e)
    return out
