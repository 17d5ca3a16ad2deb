"""Problem data model: instances, OWA weights, the OWA operator and Lorenz vectors."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from owatree.exceptions import InputError

INT64_MAX = 2**63 - 1


class WeightClass(enum.Enum):
    STRICTLY_DECREASING = "strictly_decreasing"
    NON_INCREASING = "non_increasing"
    ARBITRARY = "arbitrary"

    @property
    def is_non_increasing(self) -> bool:
        return self is not WeightClass.ARBITRARY


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions and decimal strings exactly.

    Floats are converted through their shortest ``repr`` so that ``0.3``
    becomes ``3/10`` and not the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise InputError(f"not a rational number: {value!r}") from exc
    raise InputError(f"cannot convert {type(value).__name__} to an exact rational")


def _weight_class_of(w: Sequence[Fraction]) -> WeightClass:
    pairs = list(zip(w, w[1:]))
    if all(a > b for a, b in pairs) and w[-1] > 0:
        return WeightClass.STRICTLY_DECREASING
    if all(a >= b for a, b in pairs):
        return WeightClass.NON_INCREASING
    return WeightClass.ARBITRARY


@dataclass(frozen=True)
class OwaWeights:
    """Normalized OWA weight vector, stored as exact rationals.

    ``kind`` may be weaker than what the numbers allow (a Hurwicz vector is
    tagged ``ARBITRARY`` even when ``alpha == 1``) but never stronger.
    """

    w: tuple[Fraction, ...]
    kind: WeightClass

    def __post_init__(self):
        if len(self.w) < 2:
            raise InputError("OWA weights need at least two components")
        if any(x < 0 for x in self.w):
            raise InputError("OWA weights must be non-negative")
        if sum(self.w) != 1:
            raise InputError(f"OWA weights must sum to 1, got {sum(self.w)}")
        actual = _weight_class_of(self.w)
        if self.kind is WeightClass.STRICTLY_DECREASING and actual is not self.kind:
            raise InputError("weights tagged strictly decreasing are not")
        if self.kind is WeightClass.NON_INCREASING and actual is WeightClass.ARBITRARY:
            raise InputError("weights tagged non-increasing are not")

    @property
    def p(self) -> int:
        return len(self.w)

    def prefix_sums(self) -> list[Fraction]:
        """``[w_1, w_1 + w_2, ..., 1]``."""
        return list(self._prefix)

    @cached_property
    def _prefix(self) -> tuple[Fraction, ...]:
        out, acc = [], Fraction(0)
        for x in self.w:
            acc += x
            out.append(acc)
        return tuple(out)

    @cached_property
    def scaled(self) -> tuple[tuple[int, ...], int]:
        """Cached :func:`scaled_weights`."""
        return scaled_weights(self.w)

    def __len__(self) -> int:
        return len(self.w)

    def __iter__(self):
        return iter(self.w)


def classify_weights(w: Iterable) -> OwaWeights:
    """Validate a weight vector and tag it with the strongest class it satisfies."""
    ws = tuple(to_fraction(x) for x in w)
    if len(ws) < 2:
        raise InputError("OWA weights need at least two components")
    return OwaWeights(ws, _weight_class_of(ws))


def hurwicz_weights(alpha, p: int) -> OwaWeights:
    """Weights of ``alpha * max + (1 - alpha) * min`` over ``p`` objectives."""
    a = to_fraction(alpha)
    if not 0 <= a <= 1:
        raise InputError(f"Hurwicz alpha must lie in [0, 1], got {a}")
    if p < 2:
        raise InputError("Hurwicz weights need p >= 2")
    w = [Fraction(0)] * p
    w[0] = a
    w[-1] += 1 - a
    kind = WeightClass.NON_INCREASING if p == 2 and a >= Fraction(1, 2) else WeightClass.ARBITRARY
    return OwaWeights(tuple(w), kind)


def _as_weight_tuple(w) -> tuple[Fraction, ...]:
    if isinstance(w, OwaWeights):
        return w.w
    return tuple(to_fraction(x) for x in w)


def owa(w, y: Sequence) -> Fraction:
    """Ordered weighted average: weights applied to ``y`` sorted non-increasingly."""
    ws = _as_weight_tuple(w)
    if len(ws) != len(y):
        raise InputError(f"length mismatch: {len(ws)} weights for {len(y)} components")
    if isinstance(w, OwaWeights) and all(type(v) is int for v in y):
        wi, d = w.scaled
        return Fraction(scaled_owa(wi, y), d)
    ys = sorted((to_fraction(v) for v in y), reverse=True)
    return sum((a * b for a, b in zip(ws, ys)), Fraction(0))


def lorenz(y: Sequence[int]) -> tuple:
    """Prefix sums of ``y`` sorted non-increasingly."""
    out, acc = [], 0
    for v in sorted(y, reverse=True):
        acc += v
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cost: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class MultiGraphInstance:
    """Connected simple graph on vertices ``1..n`` with integer cost vectors on edges.

    Edge ids are positions in ``edges``.
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError("instance needs at least one vertex")
        if not self.edges:
            if self.n != 1:
                raise InputError("graph is not connected")
            raise InputError("instance has no edges, objective count is undefined")
        p = len(self.edges[0].cost)
        if p < 2:
            raise InputError("instances need at least two objectives")
        seen = set()
        for idx, e in enumerate(self.edges):
            if len(e.cost) != p:
                raise InputError(f"edge {idx} has {len(e.cost)} costs, expected {p}")
            if not (1 <= e.u <= self.n and 1 <= e.v <= self.n):
                raise InputError(f"edge {idx} has a vertex outside 1..{self.n}")
            if e.u == e.v:
                raise InputError(f"edge {idx} is a self-loop")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise InputError(f"edge {idx} duplicates [{key[0]},{key[1]}]")
            seen.add(key)
        # every image component, summed cost and tree total then fits in int64
        if sum(abs(c) for e in self.edges for c in e.cost) > INT64_MAX:
            raise InputError("sum of absolute costs overflows signed 64-bit")
        if not _connected(self.n, [(e.u, e.v) for e in self.edges]):
            raise InputError("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple]) -> "MultiGraphInstance":
        """Build from ``(u, v, cost)`` triples."""
        return cls(n, tuple(Edge(int(u), int(v), tuple(int(c) for c in cost)) for u, v, cost in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def p(self) -> int:
        return len(self.edges[0].cost)

    def edge_id(self, u: int, v: int) -> int:
        """Id of the edge joining ``u`` and ``v`` (either orientation)."""
        for idx, e in enumerate(self.edges):
            if {e.u, e.v} == {u, v}:
                return idx
        raise InputError(f"no edge [{u},{v}]")

    def endpoints(self) -> list[tuple[int, int]]:
        return self._endpoints

    def costs(self) -> list[tuple[int, ...]]:
        return [e.cost for e in self.edges]

    @cached_property
    def _endpoints(self) -> list[tuple[int, int]]:
        return [(e.u, e.v) for e in self.edges]

    @cached_property
    def cost_matrix(self):
        """``m x p`` int64 array of edge costs."""
        import numpy as np

        return np.array(self.costs(), dtype=np.int64)

    @cached_property
    def max_abs_row_sum(self) -> int:
        """Largest ``sum_i |v_i^e|`` over edges."""
        return max((sum(abs(c) for c in e.cost) for e in self.edges), default=0)


def _connected(n: int, pairs: Sequence[tuple[int, int]]) -> bool:
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    seen = {1}
    stack = [1]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == n


def tree_image(inst: MultiGraphInstance, edge_ids: Iterable[int]) -> tuple[int, ...]:
    """Componentwise sum of the cost vectors of ``edge_ids``."""
    y = [0] * inst.p
    for idx in edge_ids:
        if not 0 <= idx < inst.m:
            raise InputError(f"unknown edge id {idx}")
        for i, c in enumerate(inst.edges[idx].cost):
            y[i] += c
    return tuple(y)


@dataclass(frozen=True)
class Solution:
    """A spanning tree with its image and exact OWA value."""

    edge_ids: tuple[int, ...]
    image: tuple[int, ...]
    value: Fraction

    @classmethod
    def of(cls, inst: MultiGraphInstance, w, edge_ids: Iterable[int]) -> "Solution":
        ids = tuple(sorted(edge_ids))
        y = tree_image(inst, ids)
        return cls(ids, y, owa(w, y))

    def endpoints(self, inst: MultiGraphInstance) -> list[tuple[int, int]]:
        return [(inst.edges[i].u, inst.edges[i].v) for i in self.edge_ids]


def is_spanning_tree(inst: MultiGraphInstance, edge_ids: Iterable[int]) -> bool:
    ids = list(edge_ids)
    if len(ids) != inst.n - 1 or len(set(ids)) != len(ids):
        return False
    parent = list(range(inst.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx in ids:
        if not 0 <= idx < inst.m:
            return False
        a, b = find(inst.edges[idx].u), find(inst.edges[idx].v)
        if a == b:
            return False
        parent[a] = b
    return True


# -- text formats ---------------------------------------------------------

def parse_instance(text: str) -> MultiGraphInstance:
    """Parse ``p n m`` followed by ``m`` lines ``u v c1 .. cp``."""
    tokens = text.split()
    if len(tokens) < 3:
        raise InputError("instance header must be 'p n m'")
    try:
        nums = [int(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"instance contains a non-integer token: {exc}") from exc
    p, n, m = nums[:3]
    body = nums[3:]
    if p < 2 or n < 1 or m < 0:
        raise InputError(f"invalid header p={p} n={n} m={m}")
    if len(body) != m * (p + 2):
        raise InputError(f"expected {m * (p + 2)} numbers after header, got {len(body)}")
    edges = []
    for k in range(m):
        row = body[k * (p + 2):(k + 1) * (p + 2)]
        edges.append((row[0], row[1], row[2:]))
    inst = MultiGraphInstance.from_edges(n, edges)
    return inst


def format_instance(inst: MultiGraphInstance) -> str:
    lines = [f"{inst.p} {inst.n} {inst.m}"]
    for e in inst.edges:
        lines.append(" ".join(str(x) for x in (e.u, e.v, *e.cost)))
    return "\n".join(lines) + "\n"


def parse_weights(text: str) -> OwaWeights:
    """One decimal per line (any whitespace separation is accepted)."""
    return classify_weights(text.split())


def load_instance(path) -> MultiGraphInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def load_weights(path) -> OwaWeights:
    with open(path, encoding="utf-8") as fh:
        return parse_weights(fh.read())


EXAMPLE_EDGES = (
    (1, 2, (3, 2, 3)),
    (1, 3, (4, 3, 1)),
    (1, 4, (1, 2, 2)),
    (2, 3, (2, 4, 1)),
    (2, 4, (2, 6, 1)),
    (3, 4, (1, 5, 1)),
)


def example_instance() -> MultiGraphInstance:
    """The 4-vertex, 3-objective clique used throughout the docs and tests."""
    return MultiGraphInstance.from_edges(4, EXAMPLE_EDGES)


def scaled_weights(w) -> tuple[tuple[int, ...], int]:
    """Integer weights ``w_i * D`` and the common denominator ``D``.

    ``owa(w, y) * D`` is then an integer for integer ``y``, which lets hot
    loops compare OWA values without building Fractions.
    """
    ws = _as_weight_tuple(w)
    d = 1
    for x in ws:
        d = d * x.denominator // _gcd(d, x.denominator)
    return tuple(int(x * d) for x in ws), d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def scaled_owa(wi: Sequence[int], y: Sequence[int]) -> int:
    """``OWA * D`` for integer weights from :func:`scaled_weights`."""
    return sum(a * b for a, b in zip(wi, sorted(y, reverse=True)))
