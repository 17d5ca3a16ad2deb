"""Brute-force ground truth for small instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from owatree.exceptions import InfeasibleError
from owatree.model import MultiGraphInstance, OwaWeights, Solution, scaled_weights
from owatree.mst import EdgeColoring


def _is_connected(verts: set, edges: Sequence[tuple[int, int, int]]) -> bool:
    if len(verts) <= 1:
        return True
    adj: dict[int, list[int]] = {}
    for a, b, _ in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        for nb in adj.get(stack.pop(), ()):
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(verts)


def _enumerate(verts: frozenset, edges: list, chosen: tuple) -> Iterator[tuple[int, ...]]:
    if len(verts) == 1:
        yield chosen
        return
    a, b, eid = edges[0]
    rest = edges[1:]
    merged = [(a if x == b else x, a if y == b else y, k) for x, y, k in rest]
    yield from _enumerate(verts - {b}, [t for t in merged if t[0] != t[1]], chosen + (eid,))
    # deleting a bridge would disconnect the graph
    if _is_connected(verts, rest):
        yield from _enumerate(verts, rest, chosen)


def enumerate_trees(inst: MultiGraphInstance) -> Iterator[tuple[int, ...]]:
    """Every spanning tree exactly once, as sorted edge-id tuples (deletion/contraction)."""
    edges = [(e.u, e.v, k) for k, e in enumerate(inst.edges)]
    for tree in _enumerate(frozenset(range(1, inst.n + 1)), edges, ()):
        yield tuple(sorted(tree))


def _bareiss_det(M: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    A = [row[:] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def count_spanning_trees(inst: MultiGraphInstance) -> int:
    """Matrix-tree theorem: any cofactor of the graph Laplacian."""
    n = inst.n
    L = [[0] * n for _ in range(n)]
    for e in inst.edges:
        u, v = e.u - 1, e.v - 1
        L[u][u] += 1
        L[v][v] += 1
        L[u][v] -= 1
        L[v][u] -= 1
    return _bareiss_det([row[1:] for row in L[1:]])


@lru_cache(maxsize=16)
def _tree_table(n: int, endpoints: tuple) -> tuple[np.ndarray, np.ndarray]:
    inst = MultiGraphInstance.from_edges(n, [(u, v, (0, 0)) for u, v in endpoints])
    rows = sorted(enumerate_trees(inst))
    trees = np.array(rows, dtype=np.int64).reshape(len(rows), max(n - 1, 0))
    member = np.zeros((len(rows), len(endpoints)), dtype=bool)
    if n > 1:
        member[np.arange(len(rows))[:, None], trees] = True
    return trees, member


def tree_table(inst: MultiGraphInstance) -> tuple[np.ndarray, np.ndarray]:
    """All spanning trees (lexicographically sorted rows of edge ids) and an edge-membership matrix.

    Cached per graph topology, so instances sharing a graph enumerate once.
    """
    return _tree_table(inst.n, tuple(inst.endpoints()))


def _images(inst: MultiGraphInstance, trees: np.ndarray) -> np.ndarray:
    """Tree images, memoized on the instance (rows follow ``tree_table``)."""
    cached = inst.__dict__.get("_oracle_images")
    if cached is None:
        cached = inst.cost_matrix[trees].sum(axis=1)
        inst.__dict__["_oracle_images"] = cached
    return cached


def _scaled_owa_values(images: np.ndarray, w) -> np.ndarray:
    wi, _ = scaled_weights(w)
    ordered = -np.sort(-images, axis=1)
    if max(abs(x) for x in wi) * np.abs(images).sum(axis=1).max(initial=0) < 2**62:
        return ordered @ np.array(wi, dtype=np.int64)
    return ordered.astype(object) @ np.array(wi, dtype=object)


def _values(inst: MultiGraphInstance, trees: np.ndarray, w: OwaWeights) -> np.ndarray:
    memo = inst.__dict__.setdefault("_oracle_values", {})
    key = tuple(w.w)
    if key not in memo:
        memo[key] = _scaled_owa_values(_images(inst, trees), w)
    return memo[key]


def _admissible(member: np.ndarray, coloring: Optional[EdgeColoring]) -> np.ndarray:
    mask = np.ones(member.shape[0], dtype=bool)
    if coloring is not None:
        for e in coloring.blue():
            mask &= member[:, e]
        for e in coloring.red():
            mask &= ~member[:, e]
    return mask


def brute_force_optimum(inst: MultiGraphInstance, w: OwaWeights,
                        coloring: Optional[EdgeColoring] = None) -> Solution:
    """Minimum OWA tree respecting ``coloring``; ties go to the lexicographically smallest edge set."""
    pos = _first_admissible(inst, w, coloring)
    if pos is None:
        raise InfeasibleError("no spanning tree respects the coloring")
    trees, _ = tree_table(inst)
    return Solution.of(inst, w, trees[_by_value(inst, w)[0][pos]].tolist())


def _by_value(inst: MultiGraphInstance, w: OwaWeights) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tree order, values and membership rows sorted by value; memoized for the last weights used.

    The sort is stable, so equal values keep the lexicographic order of ``tree_table``.
    """
    key = tuple(w.w)
    cached = inst.__dict__.get("_oracle_by_value")
    if cached is None or cached[0] != key:
        trees, member = tree_table(inst)
        vals = _values(inst, trees, w)
        order = np.argsort(vals, kind="stable")
        cached = (key, order, vals[order], member[order])
        inst.__dict__["_oracle_by_value"] = cached
    return cached[1], cached[2], cached[3]


def _first_admissible(inst: MultiGraphInstance, w: OwaWeights, coloring: Optional[EdgeColoring],
                      chunk: int = 4096) -> Optional[int]:
    """Position (in value order) of the best tree respecting ``coloring``.

    Colorings that keep a good tree stop after the first chunk.
    """
    _, vals, member = _by_value(inst, w)
    blue = coloring.blue() if coloring is not None else []
    red = coloring.red() if coloring is not None else []
    for lo in range(0, len(vals), chunk):
        rows = member[lo:lo + chunk]
        hit = np.flatnonzero(rows[:, blue].all(axis=1) & ~rows[:, red].any(axis=1))
        if hit.size:
            return lo + int(hit[0])
    return None


def optimum_value(inst: MultiGraphInstance, w: OwaWeights,
                  coloring: Optional[EdgeColoring] = None) -> Optional[Fraction]:
    """Optimal OWA value under ``coloring``, or ``None`` when no tree respects it."""
    pos = _first_admissible(inst, w, coloring)
    if pos is None:
        return None
    _, d = scaled_weights(w)
    return Fraction(int(_by_value(inst, w)[1][pos]), d)


def ranked_trees(inst: MultiGraphInstance, weights: Sequence) -> list[tuple[tuple[int, ...], object]]:
    """All trees with their scalar totals, sorted by total then edge set."""
    trees, _ = tree_table(inst)
    out = []
    for row in trees.tolist():
        out.append((tuple(row), sum((weights[e] for e in row), 0)))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def all_solutions(inst: MultiGraphInstance, w: OwaWeights,
                  coloring: Optional[EdgeColoring] = None) -> list[Solution]:
    trees, member = tree_table(inst)
    mask = _admissible(member, coloring)
    return [Solution.of(inst, w, row) for row in trees[mask].tolist()]


@dataclass
class VerifyReport:
    violations: list[str] = field(default_factory=list)
    checked_bounds: int = 0
    checked_colorings: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_run(inst: MultiGraphInstance, w: OwaWeights, solution: Optional[Solution] = None,
               bounds: Iterable[tuple[EdgeColoring, Fraction]] = (),
               colorings: Iterable[EdgeColoring] = ()) -> VerifyReport:
    """Check a run against brute force.

    * ``solution`` must reach the true optimum;
    * each ``(coloring, value)`` in ``bounds`` must not exceed the optimum of
      its colored subproblem (empty subproblems accept any bound);
    * each coloring in ``colorings`` must keep the unconstrained optimum value.
    """
    report = VerifyReport()
    opt = brute_force_optimum(inst, w)
    if solution is not None:
        recomputed = Solution.of(inst, w, solution.edge_ids)
        if recomputed.value != solution.value or recomputed.image != solution.image:
            report.violations.append(f"solution value {solution.value} does not match its tree")
        if recomputed.value != opt.value:
            report.violations.append(f"solution value {recomputed.value} != optimum {opt.value}")
    cache: dict = {}
    for coloring, value in bounds:
        report.checked_bounds += 1
        key = coloring.states
        if key not in cache:
            cache[key] = optimum_value(inst, w, coloring)
        sub = cache[key]
        if sub is not None and value > sub:
            report.violations.append(f"bound {value} exceeds subproblem optimum {sub}")
    for coloring in colorings:
        report.checked_colorings += 1
        sub = optimum_value(inst, w, coloring)
        if sub is None:
            report.violations.append("coloring admits no spanning tree")
            continue
        if sub != opt.value:
            report.violations.append(f"coloring changes optimum {opt.value} -> {sub}")
    return report
