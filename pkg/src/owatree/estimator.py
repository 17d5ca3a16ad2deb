"""A scikit-learn style front end to :func:`owatree.search.solve`."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Union

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from owatree.bounds import IMAGE, OBJECTIVE
from owatree.exceptions import InputError
from owatree.model import MultiGraphInstance, OwaWeights, Solution, classify_weights, hurwicz_weights, owa
from owatree.search import SearchConfig, SearchStats, solve


def check_instance(instance) -> MultiGraphInstance:
    """Accept an instance or an ``(n, [(u, v, costs), ...])`` pair."""
    if isinstance(instance, MultiGraphInstance):
        return instance
    try:
        n, edges = instance
    except (TypeError, ValueError):
        raise InputError("expected a MultiGraphInstance or an (n, edges) pair") from None
    return MultiGraphInstance.from_edges(n, edges)


def check_weights(weights, p: Optional[int] = None) -> OwaWeights:
    if isinstance(weights, OwaWeights):
        w = weights
    else:
        w = classify_weights(weights)
    if p is not None and w.p != p:
        raise InputError(f"{w.p} weights for an instance with p={p}")
    return w


class OWASpanningTree(BaseEstimator):
    """Exact OWA-optimal spanning tree solver.

    Parameters
    ----------
    weights : sequence of rationals or OwaWeights, optional
        The OWA weight vector. Exactly one of ``weights`` and ``hurwicz``.
    hurwicz : rational, optional
        Build Hurwicz weights ``(alpha, 0, ..., 0, 1 - alpha)`` at fit time.
    bound : {"image", "objective"} or None
        Bound method; ``None`` picks per weight class.
    k_seed, node_limit, time_limit, preprocess, shave, fast_paths
        Forwarded to :class:`owatree.search.SearchConfig`.

    Attributes
    ----------
    tree_ : tuple of int
        Edge ids of the optimal tree.
    image_ : tuple of int
        Objective totals of ``tree_``.
    value_ : Fraction
        Its OWA value.
    stats_ : SearchStats
    weights_ : OwaWeights
    """

    def __init__(self, weights: Union[None, Sequence, OwaWeights] = None, hurwicz=None,
                 bound: Optional[str] = None, k_seed: Optional[int] = None,
                 node_limit: Optional[int] = None, time_limit: Optional[float] = None,
                 preprocess: bool = True, shave: bool = True, fast_paths: bool = True):
        self.weights = weights
        self.hurwicz = hurwicz
        self.bound = bound
        self.k_seed = k_seed
        self.node_limit = node_limit
        self.time_limit = time_limit
        self.preprocess = preprocess
        self.shave = shave
        self.fast_paths = fast_paths

    def _resolve_weights(self, p: int) -> OwaWeights:
        if (self.weights is None) == (self.hurwicz is None):
            raise InputError("give exactly one of weights= and hurwicz=")
        if self.hurwicz is not None:
            return hurwicz_weights(self.hurwicz, p)
        return check_weights(self.weights, p)

    def fit(self, instance, y=None) -> "OWASpanningTree":
        """Solve ``instance``; ``y`` is ignored."""
        inst = check_instance(instance)
        if self.bound not in (None, IMAGE, OBJECTIVE):
            raise InputError(f"unknown bound method {self.bound!r}")
        w = self._resolve_weights(inst.p)
        cfg = SearchConfig(bound_method=self.bound, k_seed=self.k_seed, node_limit=self.node_limit,
                           time_limit=self.time_limit, preprocess=self.preprocess, shave=self.shave,
                           fast_paths=self.fast_paths)
        sol, stats = solve(inst, w, cfg)
        self.weights_ = w
        self.solution_: Solution = sol
        self.tree_ = sol.edge_ids
        self.image_ = sol.image
        self.value_ = sol.value
        self.stats_: SearchStats = stats
        self.n_edges_in_ = inst.m
        return self

    def _check_fitted(self):
        if not hasattr(self, "solution_"):
            raise NotFittedError("call fit() first")

    def evaluate(self, image: Sequence[int]) -> Fraction:
        """OWA value of an arbitrary image under the fitted weights."""
        self._check_fitted()
        return owa(self.weights_, image)
