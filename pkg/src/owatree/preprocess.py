"""Edge coloring from the cut and cycle optimality conditions.

Both tests rely on convexity of the OWA operator and are therefore only
available for non-increasing weights.
"""

from __future__ import annotations

from typing import Optional

from owatree.exceptions import UsageError
from owatree.model import MultiGraphInstance, OwaWeights, scaled_owa, scaled_weights
from owatree.mst import Color, EdgeColoring


def _require_monotone(w: OwaWeights) -> None:
    if not w.kind.is_non_increasing:
        raise UsageError("optimality conditions require non-increasing OWA weights")


def _require_uncolored(coloring: EdgeColoring, e: int) -> None:
    if coloring[e] is not Color.UNCOLORED:
        raise UsageError(f"edge {e} is already colored {coloring[e].name}")


def _diff_sign(wi, a, b) -> int:
    """Sign of OWA(a - b)."""
    s = scaled_owa(wi, [x - y for x, y in zip(a, b)])
    return (s > 0) - (s < 0)


def _dfs(n: int, adjacency: dict, start: int) -> dict[int, Optional[tuple[int, int]]]:
    """Visited vertices mapped to ``(parent, edge id)`` of the search tree."""
    parent = {start: None}
    stack = [start]
    while stack:
        u = stack.pop()
        for v, e in adjacency.get(u, ()):
            if v not in parent:
                parent[v] = (u, e)
                stack.append(v)
    return parent


def _adjacency(inst: MultiGraphInstance, keep) -> dict:
    adj: dict[int, list] = {}
    for idx, ed in enumerate(inst.edges):
        if keep(idx):
            adj.setdefault(ed.u, []).append((ed.v, idx))
            adj.setdefault(ed.v, []).append((ed.u, idx))
    return adj


def cut_condition_holds(inst: MultiGraphInstance, coloring: EdgeColoring, w: OwaWeights,
                        e: int) -> tuple[bool, list[int]]:
    """Cut test for edge ``e``; the witness is the list of crossing edge ids.

    Searches from the second endpoint of ``e`` over Blue edges and edges ``e'`` with
    ``OWA(v^e - v^e') > 0``. If the other endpoint is unreachable, the visited
    set defines a cut without Blue edges on which ``e`` is OWA-minimal among
    uncolored crossing edges, so ``e`` may be colored Blue.
    """
    _require_monotone(w)
    _require_uncolored(coloring, e)
    wi, _ = scaled_weights(w)
    ve = inst.edges[e].cost
    states = coloring.states
    adj = _adjacency(
        inst, lambda k: states[k] is Color.BLUE or _diff_sign(wi, ve, inst.edges[k].cost) > 0
    )
    start, target = inst.edges[e].v, inst.edges[e].u
    visited = _dfs(inst.n, adj, start)
    if target in visited:
        return False, []
    crossing = [k for k, ed in enumerate(inst.edges) if (ed.u in visited) != (ed.v in visited)]
    return True, crossing


def cycle_condition_holds(inst: MultiGraphInstance, coloring: EdgeColoring, w: OwaWeights,
                          e: int) -> tuple[bool, list[int]]:
    """Cycle test for edge ``e``; the witness is the cycle's edge ids (``e`` last).

    Searches over Blue edges and non-Red edges ``e' != e`` with
    ``OWA(v^e' - v^e) <= 0``. Red edges are never traversed: a cycle through a
    forbidden edge does not justify forbidding ``e``.
    """
    _require_monotone(w)
    _require_uncolored(coloring, e)
    wi, _ = scaled_weights(w)
    ve = inst.edges[e].cost
    states = coloring.states

    def keep(k):
        if k == e or states[k] is Color.RED:
            return False
        return states[k] is Color.BLUE or _diff_sign(wi, inst.edges[k].cost, ve) <= 0

    adj = _adjacency(inst, keep)
    start, target = inst.edges[e].u, inst.edges[e].v
    tree = _dfs(inst.n, adj, start)
    if target not in tree:
        return False, []
    cycle = []
    v = target
    while tree[v] is not None:
        u, k = tree[v]
        cycle.append(k)
        v = u
    cycle.append(e)
    return True, cycle


def preprocess(inst: MultiGraphInstance, w: OwaWeights,
               coloring: Optional[EdgeColoring] = None) -> EdgeColoring:
    """One sweep in edge-id order: Blue if the cut test passes, else Red if the cycle test does.

    The returned coloring keeps the optimal OWA value of the colored
    subproblem unchanged.
    """
    _require_monotone(w)
    if coloring is None:
        coloring = EdgeColoring.empty(inst.m)
    for e in range(inst.m):
        if coloring[e] is not Color.UNCOLORED:
            continue
        if cut_condition_holds(inst, coloring, w, e)[0]:
            coloring = coloring.with_color(e, Color.BLUE)
        elif cycle_condition_holds(inst, coloring, w, e)[0]:
            coloring = coloring.with_color(e, Color.RED)
    return coloring
