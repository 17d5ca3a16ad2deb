"""Exact solvers for the OWA-optimal spanning tree problem."""

from owatree.model import (Edge, MultiGraphInstance, OwaWeights, Solution, WeightClass, classify_weights,
                           hurwicz_weights, lorenz, owa)
from owatree.mst import Color, EdgeColoring
from owatree.search import SearchConfig, SearchStats, solve

__version__ = "0.1.0"

__all__ = [
    "Color", "Edge", "EdgeColoring", "MultiGraphInstance", "OwaWeights", "SearchConfig", "SearchStats",
    "Solution", "WeightClass", "classify_weights", "hurwicz_weights", "lorenz", "owa", "solve",
]
