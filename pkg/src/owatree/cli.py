"""Command-line front end.

Every subcommand prints ``key: value`` lines on success. Failures print one
line ``error: <kind>: <message>`` on stderr and exit with status 2 (bad
input or usage), 3 (infeasible coloring), 4 (validation) or 1 (other).
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from owatree import __version__
from owatree.bounds import IMAGE, OBJECTIVE, compute_bound, ideal_point
from owatree.exceptions import InfeasibleError, InputError, OwaTreeError, UsageError, ValidationError
from owatree.generate import generate
from owatree.mip import build_mip, read_solution, write_lp
from owatree.model import (MultiGraphInstance, OwaWeights, Solution, classify_weights, format_instance,
                           hurwicz_weights, load_instance, load_weights)
from owatree.mst import EdgeColoring, validate_coloring
from owatree.oracle import brute_force_optimum, count_spanning_trees
from owatree.preprocess import preprocess
from owatree.search import (STATS_SCHEMA_VERSION, SearchConfig, SearchStats, coloration_phase, default_k_seed,
                            seed_incumbent, shave, solve)

PRESETS = {
    "w3a": ("0.6", "0.3", "0.1"),
    "w3b": ("0.4", "0.35", "0.25"),
    "w5": ("0.5", "0.3", "0.1", "0.06", "0.04"),
    "w10": ("0.25", "0.2", "0.15", "0.1", "0.09", "0.08", "0.06", "0.04", "0.02", "0.01"),
}

EXIT_INPUT, EXIT_INFEASIBLE, EXIT_VALIDATION = 2, 3, 4


def weight_spec(spec: str, p: int) -> OwaWeights:
    """Resolve a weight spec against ``p`` objectives.

    Accepted: a preset name, ``uniform``, ``min``, ``max``, ``hurwicz:ALPHA``,
    a comma-separated list, or a path to a weights file.
    """
    if spec in PRESETS:
        return classify_weights(PRESETS[spec])
    if spec == "uniform":
        return classify_weights([Fraction(1, p)] * p)
    if spec == "min":
        return classify_weights([0] * (p - 1) + [1])
    if spec == "max":
        return classify_weights([1] + [0] * (p - 1))
    if spec.startswith("hurwicz:"):
        return hurwicz_weights(spec.split(":", 1)[1], p)
    if "," in spec:
        return classify_weights(x for x in spec.split(",") if x.strip())
    if Path(spec).is_file():
        return load_weights(spec)
    raise InputError(f"unknown weight spec {spec!r}")


def _fmt_value(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x} ({float(x):.6g})"


def _fmt_edges(inst: MultiGraphInstance, ids) -> str:
    return " ".join(f"[{inst.edges[e].u},{inst.edges[e].v}]" for e in ids)


def _print_solution(sol: Solution, inst: MultiGraphInstance, prefix: str = "") -> None:
    print(f"{prefix}value: {_fmt_value(sol.value)}")
    print(f"{prefix}image: {' '.join(map(str, sol.image))}")
    print(f"{prefix}edges: {_fmt_edges(inst, sol.edge_ids)}")
    print(f"{prefix}edge_ids: {' '.join(map(str, sol.edge_ids))}")


def _print_coloring(inst: MultiGraphInstance, coloring: EdgeColoring) -> None:
    print(f"blue: {_fmt_edges(inst, coloring.blue())}")
    print(f"red: {_fmt_edges(inst, coloring.red())}")
    print(f"counts: {len(coloring.blue())} blue, {len(coloring.red())} red")


def _id_list(text: Optional[str]) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated edge ids, got {text!r}") from None


def _instance(args) -> MultiGraphInstance:
    if args.random:
        n, p = args.random
        return generate(n, p, args.seed)
    if not args.instance:
        raise UsageError("give an instance file or --random N P")
    return load_instance(args.instance)


def _weights(args, p: int) -> OwaWeights:
    chosen = [x for x in (args.weights, args.hurwicz, args.preset) if x is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --weights, --hurwicz, --preset")
    if args.hurwicz is not None:
        return hurwicz_weights(args.hurwicz, p)
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
        w = classify_weights(PRESETS[args.preset])
    else:
        w = weight_spec(args.weights, p)
    if w.p != p:
        raise InputError(f"{w.p} weights for an instance with p={p}")
    return w


def _coloring(args, inst: MultiGraphInstance) -> EdgeColoring:
    blue, red = _id_list(getattr(args, "blue", None)), _id_list(getattr(args, "red", None))
    for e in blue + red:
        if not 0 <= e < inst.m:
            raise InputError(f"no edge {e}; ids run from 0 to {inst.m - 1}")
    coloring = EdgeColoring.from_sets(inst.m, blue, red)
    reason = validate_coloring(inst, coloring)
    if reason:
        raise InfeasibleError(reason)
    return coloring


def _config(args) -> SearchConfig:
    return SearchConfig(bound_method=getattr(args, "bound", None), k_seed=getattr(args, "k_seed", None),
                        time_limit=getattr(args, "time_limit", None), node_limit=getattr(args, "node_limit", None),
                        preprocess=not getattr(args, "no_preprocess", False),
                        shave=not getattr(args, "no_shave", False),
                        fast_paths=not getattr(args, "no_fast_paths", False))


def _write_stats(path: Optional[str], stats: SearchStats, extra: Optional[dict] = None) -> None:
    if not path:
        return
    d = stats.to_dict()
    if extra:
        d.update(extra)
    Path(path).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")


def cmd_generate(args) -> int:
    inst = generate(args.n, args.p, args.seed, args.density)
    text = format_instance(inst)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote: {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    cfg = _config(args)
    if args.export_mip:
        # coloration phase only, then hand the reduced problem to an external solver
        start = time.perf_counter()
        coloring, incumbent, stats = coloration_phase(inst, w, cfg, SearchStats())
        stats.wall_time = time.perf_counter() - start
        write_lp(build_mip(inst, coloring, w), args.export_mip)
        print(f"exported: {args.export_mip}")
        _print_coloring(inst, coloring)
        _print_solution(incumbent, inst, prefix="incumbent_")
        _write_stats(args.stats_json, stats)
        return 0
    sol, stats = solve(inst, w, cfg)
    _print_solution(sol, inst)
    print(f"weights: {w.kind.name}")
    print(f"proven: {str(stats.proven).lower()}")
    print(f"nodes: {stats.nodes_expanded}")
    print(f"time: {stats.wall_time:.3f}")
    _write_stats(args.stats_json, stats, {"value": str(sol.value), "edge_ids": list(sol.edge_ids)})
    return 0


def cmd_preprocess(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    coloring = preprocess(inst, w, _coloring(args, inst))
    for e, state in enumerate(coloring.states):
        print(f"{e} {state.name.lower()}")
    return 0


def cmd_shave(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    coloring = _coloring(args, inst)
    k = args.k_seed or default_k_seed(inst.n)
    incumbent = seed_incumbent(inst, w, k, coloring)
    _print_solution(incumbent, inst, prefix="seed_")
    method = args.bound or (OBJECTIVE if w.kind.is_non_increasing else IMAGE)
    coloring, best = shave(inst, coloring, w, incumbent, method=method)
    _print_coloring(inst, coloring)
    _print_solution(best, inst, prefix="incumbent_")
    return 0


def cmd_bound(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    coloring = _coloring(args, inst)
    if args.method == OBJECTIVE and not w.kind.is_non_increasing:
        print("warning: objective relaxation is weak for non-monotone weights", file=sys.stderr)
    res = compute_bound(inst, coloring, w, args.method)
    if args.method == IMAGE:
        point = ideal_point(inst, coloring)
        print(f"ideal_point: {' '.join(map(str, point.b))}")
        print(f"b0: {point.b0}")
    else:
        print(f"lambda: {' '.join(str(x) for x in res.lam)}")
    print(f"bound: {_fmt_value(res.value)}")
    for s in sorted(res.witnesses, key=lambda s: (s.value, s.edge_ids)):
        print(f"witness: {_fmt_value(s.value)} image {' '.join(map(str, s.image))} edges {_fmt_edges(inst, s.edge_ids)}")
    return 0


def cmd_export_mip(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    model = build_mip(inst, _coloring(args, inst), w)
    text = write_lp(model, args.output)
    if not args.output:
        sys.stdout.write(text)
    else:
        print(f"wrote: {args.output}")
        print(f"constraints: {model.n_constraints}")
        print(f"variables: {model.n_variables}")
    return 0


def cmd_read_solution(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    _print_solution(read_solution(inst, Path(args.solution), w), inst)
    return 0


def cmd_oracle(args) -> int:
    inst = _instance(args)
    w = _weights(args, inst.p)
    if inst.n > args.max_n:
        raise UsageError(f"brute force limited to n <= {args.max_n} (raise with --max-n)")
    coloring = _coloring(args, inst)
    print(f"trees: {count_spanning_trees(inst)}")
    _print_solution(brute_force_optimum(inst, w, coloring), inst)
    return 0


def _bench_cell(n: int, p: int, spec: str, method: str, args) -> dict:
    times, pre, sh, values = [], [], [], []
    verified = unproven = 0
    for k in range(args.instances):
        inst = generate(n, p, args.seed + k)
        w = weight_spec(spec, p)
        cfg = SearchConfig(bound_method=method, time_limit=args.time_limit, preprocess=not args.no_preprocess,
                           shave=not args.no_shave, fast_paths=not args.no_fast_paths)
        sol, stats = solve(inst, w, cfg)
        times.append(stats.wall_time)
        pre.append((stats.preprocess_blue, stats.preprocess_red))
        sh.append((stats.shave_blue, stats.shave_red))
        values.append(str(sol.value))
        unproven += not stats.proven
        if n <= 8:
            verified += brute_force_optimum(inst, w).value == sol.value
    mean = statistics.fmean
    return {
        "n": n, "p": p, "weights": spec, "method": method, "instances": args.instances,
        "time_mean": mean(times), "time_min": min(times), "time_max": max(times),
        "pre_blue": mean([b for b, _ in pre]), "pre_red": mean([r for _, r in pre]),
        "shave_blue": mean([b for b, _ in sh]), "shave_red": mean([r for _, r in sh]),
        "unproven": unproven, "verified": verified if n <= 8 else None, "values": values,
    }


def cmd_bench(args) -> int:
    if args.instances < 1:
        raise UsageError("--instances must be at least 1")
    cells = []
    for n in args.n:
        for p in args.p:
            for spec in args.weights or [("w3a" if p == 3 else "w5" if p == 5 else "w10" if p == 10 else "uniform")]:
                for method in args.methods:
                    cells.append(_bench_cell(n, p, spec, method, args))
    header = f"{'n':>3} {'p':>2} {'weights':>12} {'method':>9} {'mean':>8} {'min':>8} {'max':>8} " \
             f"{'pre(b-r)':>12} {'shave(b-r)':>12} {'oracle':>7}"
    print(header)
    for c in cells:
        oracle = f"{c['verified']}/{c['instances']}" if c["verified"] is not None else "-"
        print(f"{c['n']:>3} {c['p']:>2} {c['weights']:>12} {c['method']:>9} {c['time_mean']:>8.3f} "
              f"{c['time_min']:>8.3f} {c['time_max']:>8.3f} "
              f"{c['pre_blue']:>5.1f}-{c['pre_red']:<6.1f} {c['shave_blue']:>5.1f}-{c['shave_red']:<6.1f} {oracle:>7}")
    if args.json:
        doc = {"schema_version": STATS_SCHEMA_VERSION, "seed": args.seed, "time_limit": args.time_limit,
               "cells": cells}
        Path(args.json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    bad = [c for c in cells if c["verified"] is not None and c["verified"] != c["instances"]]
    return 1 if bad else 0


def _add_problem_args(sp: argparse.ArgumentParser, coloring: bool = True) -> None:
    sp.add_argument("instance", nargs="?", help="instance file ('p n m' header, then 'u v c1..cp' lines)")
    sp.add_argument("--random", nargs=2, type=int, metavar=("N", "P"), help="use a generated clique instead")
    g = sp.add_argument_group("weights (exactly one)")
    g.add_argument("--weights", help="weights file, comma list, preset, uniform, min, max or hurwicz:ALPHA")
    g.add_argument("--hurwicz", metavar="ALPHA", help="Hurwicz weights (alpha, 0, ..., 0, 1 - alpha)")
    g.add_argument("--preset", help=f"bundled weights: {', '.join(PRESETS)}")
    if coloring:
        sp.add_argument("--blue", metavar="IDS", help="comma-separated edge ids forced in")
        sp.add_argument("--red", metavar="IDS", help="comma-separated edge ids forbidden")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INPUT, f"error: usage: {' '.join(message.split())}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="owatree", description="Exact OWA-optimal spanning trees.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="seed for generated instances (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="write a random clique instance")
    sp.add_argument("n", type=int)
    sp.add_argument("p", type=int)
    sp.add_argument("-o", "--output")
    sp.add_argument("--density", default="clique")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("solve", help="OWA-optimal spanning tree")
    _add_problem_args(sp, coloring=False)
    sp.add_argument("--bound", choices=(IMAGE, OBJECTIVE))
    sp.add_argument("--no-preprocess", action="store_true")
    sp.add_argument("--no-shave", action="store_true")
    sp.add_argument("--no-fast-paths", action="store_true")
    sp.add_argument("--k-seed", type=int)
    sp.add_argument("--time-limit", type=float)
    sp.add_argument("--node-limit", type=int)
    sp.add_argument("--stats-json", metavar="PATH")
    sp.add_argument("--export-mip", metavar="PATH", help="stop after the coloration phase and write the MIP")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("preprocess", help="color edges by the optimality conditions")
    _add_problem_args(sp)
    sp.set_defaults(func=cmd_preprocess)

    sp = sub.add_parser("shave", help="seed an incumbent and shave")
    _add_problem_args(sp)
    sp.add_argument("--bound", choices=(IMAGE, OBJECTIVE))
    sp.add_argument("--k-seed", type=int)
    sp.set_defaults(func=cmd_shave)

    sp = sub.add_parser("bound", help="lower bound for a colored subproblem")
    _add_problem_args(sp)
    sp.add_argument("--method", choices=(IMAGE, OBJECTIVE), default=IMAGE)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("export-mip", help="write the MIP in LP format")
    _add_problem_args(sp)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_export_mip)

    sp = sub.add_parser("read-solution", help="load an external solver's x values")
    _add_problem_args(sp, coloring=False)
    sp.add_argument("--solution", required=True, help="file of 'name value' lines")
    sp.set_defaults(func=cmd_read_solution)

    sp = sub.add_parser("oracle", help="brute-force optimum for small instances")
    _add_problem_args(sp)
    sp.add_argument("--max-n", type=int, default=9)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("bench", help="seeded benchmark grid")
    sp.add_argument("--n", type=int, nargs="+", default=[8])
    sp.add_argument("--p", type=int, nargs="+", default=[3])
    sp.add_argument("--weights", nargs="+", help="weight specs (default: preset matching p)")
    sp.add_argument("--methods", nargs="+", choices=(IMAGE, OBJECTIVE), default=[IMAGE])
    sp.add_argument("--instances", type=int, default=30)
    sp.add_argument("--time-limit", type=float, default=60.0)
    sp.add_argument("--no-preprocess", action="store_true")
    sp.add_argument("--no-shave", action="store_true")
    sp.add_argument("--no-fast-paths", action="store_true")
    sp.add_argument("--json", metavar="PATH")
    sp.set_defaults(func=cmd_bench)
    return parser


_EXIT_CODES = [
    (InputError, EXIT_INPUT, "input"),
    (UsageError, EXIT_INPUT, "usage"),
    (InfeasibleError, EXIT_INFEASIBLE, "infeasible"),
    (ValidationError, EXIT_VALIDATION, "validation"),
    (OwaTreeError, 1, "error"),
    (OSError, EXIT_INPUT, "io"),
]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OwaTreeError, OSError) as exc:
        code, kind = next((c, k) for cls, c, k in _EXIT_CODES if isinstance(exc, cls))
        print(f"error: {kind}: {' '.join(str(exc).split())}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
