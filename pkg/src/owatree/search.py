"""Incumbent seeding, shaving, branch and bound, and the full solve pipeline."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from owatree.bounds import IMAGE, OBJECTIVE, SubgradientConfig, compute_bound
from owatree.exceptions import InfeasibleError, InputError
from owatree.model import MultiGraphInstance, OwaWeights, Solution, WeightClass
from owatree.mst import Color, EdgeColoring, edge_order, k_best, kruskal, validate_coloring
from owatree.preprocess import preprocess

logger = logging.getLogger(__name__)

STATS_SCHEMA_VERSION = 1


def default_k_seed(n: int) -> int:
    if n <= 40:
        return 500
    if n <= 70:
        return 2000
    return 5000


@dataclass
class SearchConfig:
    """Knobs for the pipeline.

    ``bound_method=None`` picks the objective relaxation for shaving and the
    image relaxation for branch and bound when the weights are non-increasing,
    and the image relaxation throughout otherwise.
    """

    bound_method: Optional[str] = None
    k_seed: Optional[int] = None
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    preprocess: bool = True
    shave: bool = True
    fast_paths: bool = True
    record_trace: bool = False
    subgradient: SubgradientConfig = field(default_factory=SubgradientConfig)
    branching: str = "min_sum_cost"

    def __post_init__(self):
        if self.bound_method not in (None, IMAGE, OBJECTIVE):
            raise InputError(f"unknown bound method {self.bound_method!r}")
        if self.k_seed is not None and self.k_seed < 1:
            raise InputError("k_seed must be at least 1")
        if self.branching != "min_sum_cost":
            raise InputError("only min_sum_cost branching is supported")


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    nodes_pruned: int = 0
    bounds_computed: int = 0
    preprocess_blue: int = 0
    preprocess_red: int = 0
    shave_blue: int = 0
    shave_red: int = 0
    incumbent_updates: int = 0
    wall_time: float = 0.0
    proven: bool = True
    fast_path: Optional[str] = None
    # (coloring, bound value) for every bound computed, when tracing
    bound_trace: list = field(default_factory=list, repr=False)
    # colorings of pruned branch-and-bound nodes, when tracing
    pruned: list = field(default_factory=list, repr=False)
    # incumbent values in the order they were adopted
    incumbent_history: list = field(default_factory=list, repr=False)
    # colorings after preprocessing and after shaving, when tracing
    colorings: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("bound_trace", "pruned", "incumbent_history", "colorings"):
            d.pop(key)
        d["schema_version"] = STATS_SCHEMA_VERSION
        return d


class _Incumbent:
    def __init__(self, stats: SearchStats, solution: Optional[Solution] = None):
        self.stats = stats
        self.best = solution

    @property
    def value(self):
        return self.best.value if self.best is not None else None

    def offer(self, sol: Solution) -> bool:
        if self.best is None or sol.value < self.best.value:
            self.best = sol
            self.stats.incumbent_updates += 1
            self.stats.incumbent_history.append(sol.value)
            return True
        return False


def seed_incumbent(inst: MultiGraphInstance, w: OwaWeights, k: int,
                   coloring: Optional[EdgeColoring] = None) -> Solution:
    """Best OWA tree among the ``k`` cheapest trees under summed costs."""
    sums = [sum(e.cost) for e in inst.edges]
    ranked = k_best(inst, sums, k, coloring)
    if not ranked:
        raise InfeasibleError("no spanning tree respects the coloring")
    sols = (Solution.of(inst, w, tree) for tree, _ in ranked)
    return min(sols, key=lambda s: (s.value, s.edge_ids))


def _bound(inst, coloring, w, method, cutoff, strict, stats, cache, cfg):
    """Bound value (``None`` for an infeasible subproblem) and witnesses."""
    try:
        res = compute_bound(inst, coloring, w, method, cutoff=cutoff, strict=strict,
                            cache=cache, subgradient=cfg.subgradient)
    except InfeasibleError:
        return None, []
    stats.bounds_computed += 1
    if cfg.record_trace:
        stats.bound_trace.append((coloring, res.value))
    return res.value, res.witnesses


def shave(inst: MultiGraphInstance, coloring: EdgeColoring, w: OwaWeights, incumbent: Solution,
          cfg: Optional[SearchConfig] = None, stats: Optional[SearchStats] = None,
          method: Optional[str] = None, cache: Optional[dict] = None) -> tuple[EdgeColoring, Solution]:
    """Fix uncolored edges whose forcing (resp. forbidding) provably cannot beat the incumbent.

    An edge becomes Red when the bound with the edge mandatory strictly
    exceeds the incumbent value, Blue when the bound with it forbidden does.
    Witness trees found along the way replace the incumbent when better.
    """
    cfg = cfg or SearchConfig()
    stats = stats if stats is not None else SearchStats()
    method = method or cfg.bound_method or IMAGE
    cache = {} if cache is None else cache
    inc = _Incumbent(stats, incumbent)
    for e in range(inst.m):
        if coloring[e] is not Color.UNCOLORED:
            continue
        forced = coloring.with_color(e, Color.BLUE)
        lb, wits = _bound(inst, forced, w, method, inc.value, True, stats, cache, cfg)
        for s in wits:
            inc.offer(s)
        if lb is None or lb > inc.value:
            coloring = coloring.with_color(e, Color.RED)
            continue
        banned = coloring.with_color(e, Color.RED)
        lb, wits = _bound(inst, banned, w, method, inc.value, True, stats, cache, cfg)
        for s in wits:
            inc.offer(s)
        if lb is None or lb > inc.value:
            coloring = coloring.with_color(e, Color.BLUE)
    stats.shave_blue = len(coloring.blue())
    stats.shave_red = len(coloring.red())
    return coloring, inc.best


def _branch_edge(inst: MultiGraphInstance, coloring: EdgeColoring) -> int:
    free = coloring.uncolored()
    return min(free, key=lambda e: (sum(inst.edges[e].cost), e))


def branch_and_bound(inst: MultiGraphInstance, coloring: EdgeColoring, w: OwaWeights,
                     incumbent: Optional[Solution] = None, cfg: Optional[SearchConfig] = None,
                     stats: Optional[SearchStats] = None, method: Optional[str] = None,
                     cache: Optional[dict] = None) -> tuple[Solution, SearchStats]:
    """Depth-first branch and bound over Blue/Red decisions on single edges.

    Branches on the uncolored edge of least summed cost, Blue child first.
    A node is pruned when its bound reaches the incumbent value. When a node
    or time limit interrupts the search, ``stats.proven`` is False and the
    best tree found so far is returned.
    """
    cfg = cfg or SearchConfig()
    stats = stats if stats is not None else SearchStats()
    method = method or cfg.bound_method or IMAGE
    cache = {} if cache is None else cache
    inc = _Incumbent(stats, incumbent)
    start = time.perf_counter()
    endpoints = inst.endpoints()
    sums_order = edge_order([sum(e.cost) for e in inst.edges])
    need = inst.n - 1
    stack = [coloring]
    while stack:
        if cfg.node_limit is not None and stats.nodes_expanded >= cfg.node_limit:
            stats.proven = False
            break
        if cfg.time_limit is not None and time.perf_counter() - start > cfg.time_limit:
            stats.proven = False
            break
        node = stack.pop()
        stats.nodes_expanded += 1
        if validate_coloring(inst, node) is not None:
            continue
        blue = node.blue()
        free = node.uncolored()
        if len(blue) == need or len(blue) + len(free) == need:
            # a single tree remains
            tree = kruskal(inst.n, endpoints, sums_order, node.states)
            inc.offer(Solution.of(inst, w, tree))
            continue
        lb, wits = _bound(inst, node, w, method, inc.value, False, stats, cache, cfg)
        for s in wits:
            inc.offer(s)
        if lb is None:
            continue
        if inc.value is not None and lb >= inc.value:
            stats.nodes_pruned += 1
            if cfg.record_trace:
                stats.pruned.append(node)
            continue
        e = _branch_edge(inst, node)
        stack.append(node.with_color(e, Color.RED))
        stack.append(node.with_color(e, Color.BLUE))
    if inc.best is None:
        raise InfeasibleError("no spanning tree respects the coloring")
    return inc.best, stats


def comonotonic_order(inst: MultiGraphInstance) -> Optional[list[int]]:
    """A permutation sorting every edge cost vector non-increasingly, if one exists."""
    p = inst.p
    costs = inst.costs()
    order = sorted(range(p), key=lambda i: (-costs[0][i], i))
    for a, b in zip(order, order[1:]):
        if any(c[a] < c[b] for c in costs):
            return None
    return order


def _fast_path(inst: MultiGraphInstance, w: OwaWeights) -> tuple[Optional[Solution], Optional[str]]:
    if all(x == w.w[0] for x in w.w):
        weights = [sum(e.cost) for e in inst.edges]
        tree = kruskal(inst.n, inst.endpoints(), edge_order(weights), [0] * inst.m)
        return Solution.of(inst, w, tree), "arithmetic_mean"
    order = comonotonic_order(inst)
    if order is not None:
        weights = [sum(wk * e.cost[i] for wk, i in zip(w.w, order)) for e in inst.edges]
        tree = kruskal(inst.n, inst.endpoints(), edge_order(weights), [0] * inst.m)
        return Solution.of(inst, w, tree), "comonotonic"
    return None, None


def _methods(w: OwaWeights, cfg: SearchConfig) -> tuple[str, str]:
    """Bound methods for (shaving, branch and bound)."""
    if not w.kind.is_non_increasing:
        # linear minorants of a non-monotone OWA are too weak to drive the search
        return IMAGE, IMAGE
    if cfg.bound_method is not None:
        return cfg.bound_method, cfg.bound_method
    return OBJECTIVE, IMAGE


def coloration_phase(inst: MultiGraphInstance, w: OwaWeights, cfg: Optional[SearchConfig] = None,
                     stats: Optional[SearchStats] = None,
                     cache: Optional[dict] = None) -> tuple[EdgeColoring, Solution, SearchStats]:
    """Preprocessing (non-increasing weights only), incumbent seeding, then shaving."""
    cfg = cfg or SearchConfig()
    stats = stats if stats is not None else SearchStats()
    cache = {} if cache is None else cache
    coloring = EdgeColoring.empty(inst.m)
    if cfg.preprocess and w.kind.is_non_increasing:
        coloring = preprocess(inst, w, coloring)
        stats.preprocess_blue = len(coloring.blue())
        stats.preprocess_red = len(coloring.red())
        logger.debug("preprocess: %d blue, %d red", stats.preprocess_blue, stats.preprocess_red)
        if cfg.record_trace:
            stats.colorings.append(coloring)
    k = cfg.k_seed or default_k_seed(inst.n)
    incumbent = seed_incumbent(inst, w, k, coloring)
    stats.incumbent_updates += 1
    stats.incumbent_history.append(incumbent.value)
    shave_method, _ = _methods(w, cfg)
    if cfg.shave:
        coloring, incumbent = shave(inst, coloring, w, incumbent, cfg, stats, shave_method, cache)
        logger.debug("shave: %d blue, %d red", stats.shave_blue, stats.shave_red)
        if cfg.record_trace:
            stats.colorings.append(coloring)
    else:
        stats.shave_blue = len(coloring.blue())
        stats.shave_red = len(coloring.red())
    return coloring, incumbent, stats


def solve(inst: MultiGraphInstance, w: OwaWeights, cfg: Optional[SearchConfig] = None) -> tuple[Solution, SearchStats]:
    """OWA-optimal spanning tree: coloration phase followed by branch and bound."""
    cfg = cfg or SearchConfig()
    if w.p != inst.p:
        raise InputError(f"{w.p} weights for an instance with p={inst.p}")
    start = time.perf_counter()
    stats = SearchStats()
    if cfg.fast_paths:
        sol, name = _fast_path(inst, w)
        if sol is not None:
            stats.fast_path = name
            stats.incumbent_updates = 1
            stats.incumbent_history.append(sol.value)
            stats.wall_time = time.perf_counter() - start
            return sol, stats
    if cfg.bound_method == OBJECTIVE and not w.kind.is_non_increasing:
        logger.info("objective bound requested with %s weights; using the image bound", w.kind.name)
    cache: dict = {}
    coloring, incumbent, stats = coloration_phase(inst, w, cfg, stats, cache)
    _, bb_method = _methods(w, cfg)
    sol, stats = branch_and_bound(inst, coloring, w, incumbent, cfg, stats, bb_method, cache)
    stats.wall_time = time.perf_counter() - start
    return sol, stats
