"""Lower bounds on the optimal OWA value of a colored subproblem.

Two relaxations are provided:

* image-set relaxation: the tree images are replaced by the region above the
  ideal point ``b`` (per-objective MST values) cut by ``sum(y) >= b0`` (MST of
  summed costs), and OWA is minimized there exactly with a small LP;
* objective relaxation: OWA is replaced by a linear function ``lambda . y``
  with ``lambda`` in the polytope whose k largest components never exceed the
  sum of the first k OWA weights. Every such ``lambda`` gives a valid bound
  ``z(lambda) = min_T lambda . f(T)``, maximized here by projected
  subgradient ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from owatree.exceptions import InfeasibleError, InputError
from owatree.lp import GE, solve_lp
from owatree.model import MultiGraphInstance, OwaWeights, Solution, scaled_weights, to_fraction, tree_image
from owatree.mst import EdgeColoring, edge_order, kruskal, scalarize_int, validate_coloring

IMAGE = "image"
OBJECTIVE = "objective"


@dataclass(frozen=True)
class IdealPoint:
    b: tuple[int, ...]
    b0: int
    witnesses: tuple[tuple[int, ...], ...] = ()


@dataclass
class BoundResult:
    value: Fraction
    witnesses: list[Solution] = field(default_factory=list)
    lam: Optional[tuple[Fraction, ...]] = None


def _colored_tree(inst: MultiGraphInstance, weights: Sequence[int], coloring: EdgeColoring) -> list[int]:
    tree = kruskal(inst.n, inst.endpoints(), edge_order(weights), coloring.states)
    if tree is None:
        raise InfeasibleError(validate_coloring(inst, coloring) or "infeasible coloring")
    return tree


def ideal_point(inst: MultiGraphInstance, coloring: Optional[EdgeColoring] = None,
                cache: Optional[dict] = None) -> IdealPoint:
    """Per-objective colored MST values ``b`` and the summed-cost MST value ``b0``.

    ``cache`` may be any dict shared across calls on the same instance; it is
    keyed by the coloring.
    """
    if coloring is None:
        coloring = EdgeColoring.empty(inst.m)
    if cache is not None and coloring.states in cache:
        return cache[coloring.states]
    b, trees = [], []
    orders = _objective_orders(inst)
    endpoints = inst.endpoints()
    for i in range(inst.p + 1):
        tree = kruskal(inst.n, endpoints, orders[i], coloring.states)
        if tree is None:
            raise InfeasibleError(validate_coloring(inst, coloring) or "infeasible coloring")
        if i < inst.p:
            b.append(sum(inst.edges[e].cost[i] for e in tree))
        else:
            b0 = sum(sum(inst.edges[e].cost) for e in tree)
        trees.append(tuple(tree))
    point = IdealPoint(tuple(b), b0, tuple(trees))
    if cache is not None:
        cache[coloring.states] = point
    return point


def _objective_orders(inst: MultiGraphInstance) -> list[list[int]]:
    """Kruskal orders for each objective, then for summed costs (memoized on the instance)."""
    orders = inst.__dict__.get("_objective_orders")
    if orders is None:
        cm = inst.cost_matrix
        orders = [edge_order(cm[:, i]) for i in range(inst.p)] + [edge_order(cm.sum(axis=1))]
        inst.__dict__["_objective_orders"] = orders
    return orders


def sorting_permutation(b: Sequence) -> list[int]:
    """Indices of ``b`` by decreasing value, lower index first among ties."""
    return sorted(range(len(b)), key=lambda i: (-b[i], i))


def chain_lp_value(b: Sequence, b0, w, perm: Sequence[int]) -> Fraction:
    """Optimum of min ``sum_k w_k y_perm[k]`` s.t. the chain ``y_perm[0] >= y_perm[1] >= ...``,
    ``y >= b`` and ``sum(y) >= b0``.

    Solved in the shifted variables ``s = y - b >= 0``.
    """
    ws = tuple(w)
    p = len(b)
    bs = [to_fraction(x) for x in b]
    c = [Fraction(0)] * p
    for k, i in enumerate(perm):
        c[i] = to_fraction(ws[k])
    A, rhs = [], []
    for k in range(p - 1):
        hi, lo = perm[k], perm[k + 1]
        row = [0] * p
        row[hi], row[lo] = 1, -1
        A.append(row)
        rhs.append(bs[lo] - bs[hi])
    A.append([1] * p)
    rhs.append(to_fraction(b0) - sum(bs))
    res = solve_lp(c, A, [GE] * len(A), rhs)
    if res.status != "optimal":
        raise ArithmeticError(f"chain LP unexpectedly {res.status}")
    return res.value + sum(ci * bi for ci, bi in zip(c, bs))


def bound_image_relaxation(point, w) -> Fraction:
    """Minimum OWA over the relaxed image set, via the single LP for the sorting permutation of ``b``.

    ``point`` is an :class:`IdealPoint` or a ``(b, b0)`` pair.
    """
    b, b0 = (point.b, point.b0) if isinstance(point, IdealPoint) else point
    return _image_bound(tuple(b), b0, tuple(w))


@lru_cache(maxsize=4096)
def _image_bound(b: tuple, b0, w: tuple) -> Fraction:
    if min(b) < 0:
        return chain_lp_value(b, b0, w, sorting_permutation(b))
    return image_bound_dual(b, b0, w)


def image_bound_dual(b: Sequence[int], b0: int, w) -> Fraction:
    """Closed form of :func:`chain_lp_value` at the sorting permutation, for ``b >= 0``.

    Writing the sorted point as gaps ``g_k = z_k - z_(k+1)`` turns the chain LP
    into a covering LP whose dual, for a fixed multiplier ``v`` on the sum
    row, is solved greedily. The dual objective is concave and piecewise
    linear in ``v`` with breakpoints ``(W_j' - W_j) / (j' - j)``; the best
    breakpoint is the optimum. Integer arithmetic throughout.
    """
    WL, scale, cands = _dual_breakpoints(tuple(to_fraction(x) for x in w))
    p = len(WL) - 1
    c = sorted(b, reverse=True) + [0]
    steps = [c[k - 1] - c[k] for k in range(1, p + 1)]
    best = None
    for num in cands:
        total = b0 * num
        run = None
        for k in range(p, 0, -1):
            cap = WL[k] - k * num
            if run is None or cap < run:
                run = cap
            total += steps[k - 1] * run
        if best is None or total > best:
            best = total
    return Fraction(best, scale)


@lru_cache(maxsize=256)
def _dual_breakpoints(w: tuple) -> tuple[list[int], int, list[int]]:
    """Prefix sums and candidate multipliers, all as integers over a common ``scale``."""
    wi, D = scaled_weights(w)
    p = len(wi)
    L = math.lcm(*range(1, p + 1))
    W = [0]
    for x in wi:
        W.append(W[-1] + x)
    vmax = min(Fraction(W[j], j) for j in range(1, p + 1))
    cands = {0}
    for j in range(p + 1):
        for k in range(j + 1, p + 1):
            v = Fraction(W[k] - W[j], k - j)
            if 0 <= v <= vmax:
                cands.add(v.numerator * (L // v.denominator))
    return [x * L for x in W], D * L, sorted(cands)


def image_relaxation_all_permutations(b: Sequence, b0, w) -> Fraction:
    """Same value as :func:`bound_image_relaxation`, by brute force over every permutation."""
    return min(chain_lp_value(b, b0, w, perm) for perm in permutations(range(len(b))))


def lambda_feasible(lam: Sequence, w: OwaWeights) -> bool:
    """Non-negativity plus: the k largest components sum to at most ``w_1 + ... + w_k``."""
    ls = [to_fraction(x) for x in lam]
    if len(ls) != w.p:
        raise InputError(f"lambda has {len(ls)} components for p={w.p}")
    if any(x < 0 for x in ls):
        return False
    acc = Fraction(0)
    for x, cap in zip(sorted(ls, reverse=True), w.prefix_sums()):
        acc += x
        if acc > cap:
            return False
    return True


def lambda_feasible_subsets(lam: Sequence, w: OwaWeights) -> bool:
    """Reference check over all ``2^p`` subsets of objectives."""
    ls = [to_fraction(x) for x in lam]
    if any(x < 0 for x in ls):
        return False
    caps = [Fraction(0)] + w.prefix_sums()
    p = len(ls)
    for mask in range(1, 1 << p):
        total = sum((ls[i] for i in range(p) if mask >> i & 1), Fraction(0))
        if total > caps[bin(mask).count("1")]:
            return False
    return True


def start_lambda(w: OwaWeights) -> Fraction:
    """Largest ``c`` with ``(c, ..., c)`` feasible: ``min_k (w_1 + ... + w_k) / k``."""
    return min(s / (k + 1) for k, s in enumerate(w.prefix_sums()))


def project_lambda(lam: Sequence[float], w: OwaWeights, rounds: int = 50,
                   caps: Optional[Sequence[float]] = None) -> Optional[list[float]]:
    """Approximate repair onto the lambda polytope (not a Euclidean projection).

    Returns ``None`` if ``rounds`` passes do not reach feasibility; callers
    re-check exactly anyway. ``caps`` may carry precomputed float prefix sums.
    """
    if caps is None:
        caps = [float(x) for x in w.prefix_sums()]
    x = [max(0.0, v) for v in lam]
    p = len(x)
    for _ in range(rounds):
        changed = False
        order = sorted(range(p), key=lambda i: -x[i])
        acc = 0.0
        for k in range(p):
            acc += x[order[k]]
            excess = acc - caps[k]
            if excess > 1e-15:
                for i in order[:k + 1]:
                    x[i] -= excess / (k + 1)
                changed = True
                break
        x = [max(0.0, v) for v in x]
        if not changed:
            return x
    return None


def z_at(inst: MultiGraphInstance, coloring: Optional[EdgeColoring], lam: Sequence) -> tuple[Fraction, tuple[int, ...]]:
    """``min_T lambda . f(T)`` over the colored subproblem, with the minimizing tree."""
    if coloring is None:
        coloring = EdgeColoring.empty(inst.m)
    ls = [to_fraction(x) for x in lam]
    den = math.lcm(*(x.denominator for x in ls))
    li = [int(x * den) for x in ls]
    tree = _colored_tree(inst, scalarize_int(inst, li), coloring)
    y = tree_image(inst, tree)
    return Fraction(sum(a * b for a, b in zip(li, y)), den), tuple(tree)


@dataclass
class SubgradientConfig:
    max_iter: int = 200
    stall: int = 25
    grid: int = 10**6
    # stop as soon as the bound reaches this value (exceeds it when strict)
    cutoff: Optional[Fraction] = None
    strict: bool = False


def _reached(value: Fraction, cfg: SubgradientConfig) -> bool:
    if cfg.cutoff is None:
        return False
    return value > cfg.cutoff if cfg.strict else value >= cfg.cutoff


def bound_objective_relaxation(inst: MultiGraphInstance, coloring: Optional[EdgeColoring], w: OwaWeights,
                               cfg: Optional[SubgradientConfig] = None) -> BoundResult:
    """Best ``z(lambda)`` found by projected subgradient ascent over the lambda polytope.

    Multipliers live on the grid ``k / cfg.grid`` and are accepted only after
    an exact feasibility check, so the returned value is always a valid bound.
    Each iterate also probes the weight vector rearranged to follow the
    current tree's objective ranking, which is optimal for that tree.
    """
    cfg = cfg or SubgradientConfig()
    if coloring is None:
        coloring = EdgeColoring.empty(inst.m)
    reason = validate_coloring(inst, coloring)
    if reason:
        raise InfeasibleError(reason)
    p, D = inst.p, cfg.grid
    prefix = w.prefix_sums()
    caps = [math.floor(s * D) for s in prefix]
    fcaps = [float(s) for s in prefix]
    endpoints = inst.endpoints()

    def feasible(li):
        acc = 0
        for x, cap in zip(sorted(li, reverse=True), caps):
            acc += x
            if acc > cap:
                return False
        return min(li) >= 0

    witnesses: dict[tuple[int, ...], Solution] = {}

    def evaluate(li):
        weights = scalarize_int(inst, li)
        tree = kruskal(inst.n, endpoints, edge_order(weights), coloring.states)
        key = tuple(tree)
        if key not in witnesses:
            witnesses[key] = Solution.of(inst, w, key)
        y = witnesses[key].image
        return Fraction(sum(a * b for a, b in zip(li, y)), D), y

    c = start_lambda(w)
    start = [c.numerator * D // c.denominator] * p
    lam = start
    best, best_lam = None, start
    gamma0 = 1.0 / max(max(1, sum(e.cost)) for e in inst.edges)
    scale = max(1, inst.n - 1)
    probed = set()
    stall = 0
    for t in range(1, cfg.max_iter + 1):
        z, y = evaluate(lam)
        improved = False
        if best is None or z > best:
            best, best_lam, improved = z, lam, True
        ranking = tuple(sorted(range(p), key=lambda i: (-y[i], i)))
        if ranking not in probed:
            probed.add(ranking)
            probe = [0] * p
            for k, i in enumerate(ranking):
                probe[i] = w.w[k].numerator * D // w.w[k].denominator
            if feasible(probe):
                zp, _ = evaluate(probe)
                if zp > best:
                    best, best_lam, improved = zp, probe, True
        stall = 0 if improved else stall + 1
        if _reached(best, cfg) or stall >= cfg.stall:
            break
        step = gamma0 / t
        moved = [a / D + step * yi / scale for a, yi in zip(lam, y)]
        proj = project_lambda(moved, w, caps=fcaps)
        nxt = None
        if proj is not None:
            nxt = [math.floor(x * D) for x in proj]
            if not feasible(nxt):
                nxt = None
        if nxt is None:
            # halve toward the feasible start, else restart from it
            for _ in range(30):
                cand = [(x + s / D) / 2 for x, s in zip(moved, start)]
                moved = cand
                trial = [math.floor(x * D) for x in cand]
                if feasible(trial):
                    nxt = trial
                    break
            if nxt is None:
                nxt = start
        lam = nxt
    return BoundResult(best, list(witnesses.values()), tuple(Fraction(a, D) for a in best_lam))


def compute_bound(inst: MultiGraphInstance, coloring: EdgeColoring, w: OwaWeights, method: str = IMAGE,
                  cutoff: Optional[Fraction] = None, strict: bool = False,
                  cache: Optional[dict] = None, subgradient: Optional[SubgradientConfig] = None) -> BoundResult:
    """Dispatch to either relaxation; raises :class:`InfeasibleError` on a bad coloring."""
    if method == IMAGE:
        point = ideal_point(inst, coloring, cache)
        value = bound_image_relaxation(point, w)
        wits = [Solution.of(inst, w, t) for t in dict.fromkeys(point.witnesses)]
        return BoundResult(value, wits)
    if method == OBJECTIVE:
        cfg = SubgradientConfig(**vars(subgradient)) if subgradient else SubgradientConfig()
        cfg.cutoff, cfg.strict = cutoff, strict
        return bound_objective_relaxation(inst, coloring, w, cfg)
    raise InputError(f"unknown bound method {method!r}")
