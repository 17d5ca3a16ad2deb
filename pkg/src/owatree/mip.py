"""Flow-based MIP for strictly decreasing OWA weights, written in LP file format.

The spanning tree is modelled as a single-commodity flow from vertex 1, and
each Lorenz component ``L_i(y)`` is linearized through its LP dual:
``L_i(y) = min i*r_i + sum_j d_i_j`` subject to ``r_i + d_i_j >= y_j`` and
``d >= 0``. Because ``OWA = sum_i (w_i - w_{i+1}) L_i`` has positive
coefficients only when the weights strictly decrease, the model is built for
that class alone.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Union

from owatree.exceptions import UsageError, ValidationError
from owatree.model import MultiGraphInstance, OwaWeights, Solution, WeightClass, is_spanning_tree, tree_image
from owatree.mst import Color, EdgeColoring

LE, GE, EQ = "<=", ">=", "="


@dataclass(frozen=True)
class Row:
    name: str
    terms: tuple[tuple[Fraction, str], ...]
    sense: str
    rhs: Fraction


@dataclass
class MipModel:
    """Variables in declaration order, objective terms, rows, and bound data."""

    name: str
    variables: list[str] = field(default_factory=list)
    objective: list[tuple[Fraction, str]] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)
    free: list[str] = field(default_factory=list)
    fixed: dict[str, int] = field(default_factory=dict)

    @property
    def n_constraints(self) -> int:
        return len(self.rows)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    def objective_value(self, assignment: dict[str, Fraction]) -> Fraction:
        return sum((c * Fraction(assignment.get(v, 0)) for c, v in self.objective), Fraction(0))

    def violations(self, assignment: dict[str, Fraction]) -> list[str]:
        """Names of rows and bounds that ``assignment`` breaks (missing variables read as 0)."""
        bad = []
        val = {v: Fraction(assignment.get(v, 0)) for v in self.variables}
        for row in self.rows:
            lhs = sum((c * val[v] for c, v in row.terms), Fraction(0))
            ok = {LE: lhs <= row.rhs, GE: lhs >= row.rhs, EQ: lhs == row.rhs}[row.sense]
            if not ok:
                bad.append(row.name)
        free = set(self.free)
        for v in self.variables:
            if v not in free and val[v] < 0:
                bad.append(f"{v}>=0")
        for v in self.binaries:
            if val[v] not in (0, 1):
                bad.append(f"{v} binary")
        for v, fx in self.fixed.items():
            if val[v] != fx:
                bad.append(f"{v}={fx}")
        return bad


def _x(e: int) -> str:
    return f"x_E{e}"


def build_mip(inst: MultiGraphInstance, coloring: Optional[EdgeColoring], w: OwaWeights) -> MipModel:
    """The OWA spanning tree MIP for ``inst`` restricted by ``coloring``.

    Rows: ``p*p`` Lorenz rows, ``n`` flow balances, ``2m`` arc capacities and
    one cardinality row ``sum x = n - 1``. Columns: ``p*p`` d's, ``p`` r's,
    ``2m`` arc flows and ``m`` edge binaries.
    """
    if w.kind is not WeightClass.STRICTLY_DECREASING:
        raise UsageError("the MIP linearization needs strictly decreasing weights")
    if w.p != inst.p:
        raise UsageError(f"{w.p} weights for an instance with p={inst.p}")
    coloring = coloring or EdgeColoring.empty(inst.m)
    n, m, p = inst.n, inst.m, inst.p
    cap = Fraction(n - 1)
    model = MipModel(name="owa_spanning_tree")

    xs = [_x(e) for e in range(m)]
    arcs = []
    for e, ed in enumerate(inst.edges):
        arcs.append((e, ed.u, ed.v))
        arcs.append((e, ed.v, ed.u))
    fs = [f"f_{u}_{v}" for _, u, v in arcs]
    rs = [f"r_{i}" for i in range(1, p + 1)]
    ds = [f"d_{i}_{j}" for i in range(1, p + 1) for j in range(1, p + 1)]
    model.variables = xs + fs + rs + ds

    ws = list(w.w) + [Fraction(0)]
    for i in range(1, p + 1):
        delta = ws[i - 1] - ws[i]
        model.objective.append((delta * i, f"r_{i}"))
        for j in range(1, p + 1):
            model.objective.append((delta, f"d_{i}_{j}"))

    for i in range(1, p + 1):
        for j in range(1, p + 1):
            terms = [(Fraction(1), f"r_{i}"), (Fraction(1), f"d_{i}_{j}")]
            terms += [(Fraction(-inst.edges[e].cost[j - 1]), xs[e]) for e in range(m)]
            model.rows.append(Row(f"lorenz_{i}_{j}", tuple(terms), GE, Fraction(0)))

    for vertex in range(1, n + 1):
        terms = []
        for (e, u, v), f in zip(arcs, fs):
            if u == vertex:
                terms.append((Fraction(1), f))
            elif v == vertex:
                terms.append((Fraction(-1), f))
        rhs = cap if vertex == 1 else Fraction(-1)
        model.rows.append(Row(f"flow_{vertex}", tuple(terms), EQ, rhs))

    for (e, u, v), f in zip(arcs, fs):
        model.rows.append(Row(f"cap_{u}_{v}", ((Fraction(1), f), (-cap, xs[e])), LE, Fraction(0)))

    model.rows.append(Row("card", tuple((Fraction(1), x) for x in xs), EQ, cap))

    model.binaries = xs
    model.free = rs
    for e, c in enumerate(coloring.states):
        if c is Color.BLUE:
            model.fixed[xs[e]] = 1
        elif c is Color.RED:
            model.fixed[xs[e]] = 0
    return model


def tree_assignment(inst: MultiGraphInstance, model: MipModel, edge_ids: Iterable[int]) -> dict[str, Fraction]:
    """A feasible point of ``model`` encoding the tree: unit flows to each vertex and the optimal duals."""
    ids = sorted(edge_ids)
    if not is_spanning_tree(inst, ids):
        raise ValidationError("edge set is not a spanning tree")
    out: dict[str, Fraction] = {v: Fraction(0) for v in model.variables}
    adj: dict[int, list[int]] = {}
    for e in ids:
        out[_x(e)] = Fraction(1)
        ed = inst.edges[e]
        adj.setdefault(ed.u, []).append(ed.v)
        adj.setdefault(ed.v, []).append(ed.u)
    # orient from vertex 1; the arc into a vertex carries its subtree size
    parent, order, stack = {1: 0}, [], [1]
    while stack:
        x = stack.pop()
        order.append(x)
        for nb in adj.get(x, ()):
            if nb not in parent:
                parent[nb] = x
                stack.append(nb)
    size = {x: 1 for x in order}
    for x in reversed(order[1:]):
        size[parent[x]] += size[x]
        out[f"f_{parent[x]}_{x}"] = Fraction(size[x])
    y = tree_image(inst, ids)
    ys = sorted(y, reverse=True)
    for i in range(1, inst.p + 1):
        r = ys[i - 1]
        out[f"r_{i}"] = Fraction(r)
        for j in range(1, inst.p + 1):
            out[f"d_{i}_{j}"] = Fraction(max(0, y[j - 1] - r))
    return out


def format_number(x: Fraction) -> str:
    """Shortest exact decimal for terminating fractions, else 30 significant digits."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    for prime in (2, 5):
        while d % prime == 0:
            d //= prime
    with localcontext() as ctx:
        ctx.prec = 60 if d == 1 else 30
        s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


def _expr(terms, lead: int, width: int = 78) -> list[str]:
    """Terms as text lines: the first fits after ``lead`` characters, the rest after the 3-space indent."""
    parts = []
    for c, v in terms:
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        parts.append(f"{sign} {v}" if mag == 1 else f"{sign} {format_number(mag)} {v}")
    if not parts:
        return ["0 " + terms[0][1]] if terms else ["0"]
    if parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    lines, cur = [], ""
    for part in parts:
        room = width - (lead if not lines else 3)
        if cur and len(cur) + 1 + len(part) > room:
            lines.append(cur)
            cur = part
        else:
            cur = f"{cur} {part}" if cur else part
    lines.append(cur)
    return lines


def write_lp(model: MipModel, sink: Union[None, str, os.PathLike, io.TextIOBase] = None) -> str:
    """Serialize to LP file format; also writes to ``sink`` (a path or text stream) when given."""
    out = [f"\\Problem name: {model.name}", "", "Minimize"]
    body = _expr(model.objective, len(" obj: "))
    out.append(f" obj: {body[0]}")
    out += [f"   {line}" for line in body[1:]]
    out.append("Subject To")
    for row in model.rows:
        body = _expr(row.terms, len(row.name) + 3)
        lines = [f" {row.name}: {body[0]}"] + [f"   {line}" for line in body[1:]]
        lines[-1] += f" {row.sense} {format_number(row.rhs)}"
        out += lines
    out.append("Bounds")
    for v in model.free:
        out.append(f" {v} free")
    for v in model.variables:
        if v in model.fixed:
            out.append(f" {v} = {model.fixed[v]}")
    out.append("Binaries")
    for v in model.binaries:
        out.append(f" {v}")
    out.append("End")
    text = "\n".join(out) + "\n"
    if sink is not None:
        if isinstance(sink, (str, os.PathLike)):
            Path(sink).write_text(text)
        else:
            sink.write(text)
    return text


def read_solution(inst: MultiGraphInstance, source: Union[str, os.PathLike], w: OwaWeights) -> Solution:
    """Rebuild a tree from ``name value`` lines, keeping ``x_E{id}`` with value at least 0.5.

    ``source`` is a path or the file text itself. The objective reported by the
    solver is ignored; image and value are recomputed from the instance.
    """
    text = source
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        text = Path(source).read_text()
    chosen = []
    for lineno, line in enumerate(str(text).splitlines(), 1):
        tokens = line.split()
        if not tokens or tokens[0].startswith(("#", "\\")):
            continue
        if len(tokens) < 2:
            raise ValidationError(f"line {lineno}: expected 'name value'")
        name, raw = tokens[0], tokens[1]
        if not name.startswith("x_E"):
            continue
        try:
            e = int(name[3:])
            value = float(raw)
        except ValueError:
            raise ValidationError(f"line {lineno}: cannot read {line.strip()!r}") from None
        if not 0 <= e < inst.m:
            raise ValidationError(f"line {lineno}: no edge {e}")
        if value >= 0.5:
            chosen.append(e)
    if not is_spanning_tree(inst, chosen):
        raise ValidationError(f"selected edges {sorted(chosen)} do not form a spanning tree")
    return Solution.of(inst, w, chosen)
