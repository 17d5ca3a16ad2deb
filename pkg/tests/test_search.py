import itertools
import random

import pytest

from conftest import F, T1, T4
from owatree.bounds import IMAGE, OBJECTIVE
from owatree.exceptions import InfeasibleError, InputError
from owatree.generate import generate
from owatree.model import MultiGraphInstance, classify_weights, hurwicz_weights, owa
from owatree.mst import Color, EdgeColoring, mst
from owatree.oracle import brute_force_optimum, count_spanning_trees, verify_run
from owatree.search import (STATS_SCHEMA_VERSION, SearchConfig, SearchStats, branch_and_bound,
                            coloration_phase, comonotonic_order, default_k_seed, seed_incumbent,
                            shave, solve)

CONFIGS = [
    SearchConfig(),
    SearchConfig(bound_method=IMAGE),
    SearchConfig(bound_method=OBJECTIVE),
    SearchConfig(preprocess=False, shave=False),
    SearchConfig(preprocess=False, shave=False, bound_method=OBJECTIVE),
    SearchConfig(k_seed=1, fast_paths=False),
]


@pytest.mark.parametrize("cfg", CONFIGS, ids=range(len(CONFIGS)))
def test_example_solve(ex, w_ex, cfg):
    sol, stats = solve(ex, w_ex, cfg)
    assert sol.value == 7
    assert sol.edge_ids == T4
    assert sol.image == (6, 8, 6)
    assert stats.proven


def test_seed_incumbent(ex, w_ex):
    assert seed_incumbent(ex, w_ex, 1).edge_ids == T1
    assert seed_incumbent(ex, w_ex, 1).value == F(15, 2)
    assert seed_incumbent(ex, w_ex, 2).edge_ids == T4
    assert seed_incumbent(ex, w_ex, 1000).value == 7


def test_seed_incumbent_respects_coloring(ex, w_ex):
    col = EdgeColoring.empty(6).with_color(0, Color.RED)
    sol = seed_incumbent(ex, w_ex, 50, col)
    assert 0 not in sol.edge_ids
    assert sol.value == F(37, 5)


def test_default_k_seed():
    assert default_k_seed(10) == 500
    assert default_k_seed(60) == 2000
    assert default_k_seed(100) == 5000


def test_shave_example_objective(ex, w_ex):
    inc = seed_incumbent(ex, w_ex, 2)
    stats = SearchStats()
    col, best = shave(ex, EdgeColoring.empty(6), w_ex, inc, SearchConfig(record_trace=True), stats, OBJECTIVE)
    assert col.blue() == [0, 2, 3]
    assert 1 in col.red()
    assert best.edge_ids == T4
    trace = {c.states: v for c, v in stats.bound_trace}
    B, R, U = Color.BLUE, Color.RED, Color.UNCOLORED
    assert trace[(R, U, U, U, U, U)] == F(37, 5)
    assert trace[(B, B, U, U, U, U)] == F(73, 10)
    assert trace[(B, R, R, U, U, U)] == F(83, 10)
    assert trace[(B, R, B, R, U, U)] == F(73, 10)


def test_shave_image_is_sound(ex, w_ex):
    inc = seed_incumbent(ex, w_ex, 2)
    col, best = shave(ex, EdgeColoring.empty(6), w_ex, inc, method=IMAGE)
    assert verify_run(ex, w_ex, best, colorings=[col]).ok


def test_shave_does_not_recolor(ex, w_ex):
    start = EdgeColoring.empty(6).with_color(5, Color.RED)
    col, _ = shave(ex, start, w_ex, seed_incumbent(ex, w_ex, 2), method=OBJECTIVE)
    assert col[5] is Color.RED


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("method", [IMAGE, OBJECTIVE])
def test_shave_soundness_random(seed, method):
    inst = generate(6, 3, seed)
    w = classify_weights(["0.5", "0.3", "0.2"])
    inc = seed_incumbent(inst, w, 3)
    col, best = shave(inst, EdgeColoring.empty(inst.m), w, inc, method=method)
    assert verify_run(inst, w, colorings=[col]).ok
    assert best.value <= inc.value


def test_branch_and_bound_from_scratch(ex, w_ex):
    sol, stats = branch_and_bound(ex, EdgeColoring.empty(6), w_ex)
    assert sol.value == 7
    assert stats.nodes_expanded >= 1


def test_branch_and_bound_infeasible(ex, w_ex):
    col = EdgeColoring.empty(6)
    for e in (0, 1, 2):
        col = col.with_color(e, Color.RED)
    with pytest.raises(InfeasibleError):
        branch_and_bound(ex, col, w_ex)


def test_hurwicz_frozen():
    inst = generate(6, 3, 0)
    sol, _ = solve(inst, hurwicz_weights(F(1, 2), 3))
    assert sol.value == F(189, 2)
    assert sol.edge_ids == (1, 2, 7, 13, 14)


def test_max_criterion_frozen():
    inst = generate(6, 3, 0)
    w = classify_weights([1, 0, 0])
    for m in (IMAGE, OBJECTIVE):
        sol, _ = solve(inst, w, SearchConfig(bound_method=m))
        assert sol.value == 140


@pytest.mark.parametrize("seed", range(5))
def test_uniform_weights_match_sum_mst(seed):
    inst = generate(6, 4, seed)
    w = classify_weights([F(1, 4)] * 4)
    sol, stats = solve(inst, w)
    assert stats.fast_path == "arithmetic_mean"
    assert sol.value == brute_force_optimum(inst, w).value
    slow, _ = solve(inst, w, SearchConfig(fast_paths=False))
    assert slow.value == sol.value


@pytest.mark.parametrize("seed", range(5))
def test_min_criterion_is_best_single_objective_mst(seed):
    inst = generate(6, 3, seed)
    w = classify_weights([0, 0, 1])
    sol, _ = solve(inst, w)
    best = min(mst(inst, [e.cost[k] for e in inst.edges])[1] for k in range(3))
    assert sol.value == best


def test_comonotonic_fast_path():
    rng = random.Random(3)
    edges = []
    for u, v in itertools.combinations(range(1, 6), 2):
        c = sorted((rng.randint(1, 50) for _ in range(3)), reverse=True)
        edges.append((u, v, [c[1], c[0], c[2]]))
    inst = MultiGraphInstance.from_edges(5, edges)
    assert comonotonic_order(inst) == [1, 0, 2]
    w = classify_weights(["0.6", "0.3", "0.1"])
    sol, stats = solve(inst, w)
    assert stats.fast_path == "comonotonic"
    assert sol.value == brute_force_optimum(inst, w).value


def test_comonotonic_order_absent(ex):
    assert comonotonic_order(ex) is None


def test_comonotonic_not_used_for_arbitrary_weights():
    inst = MultiGraphInstance.from_edges(3, [(1, 2, [5, 1]), (2, 3, [4, 2]), (1, 3, [9, 0])])
    w = classify_weights([F(1, 4), F(3, 4)])
    sol, _ = solve(inst, w)
    assert sol.value == brute_force_optimum(inst, w).value


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("method", [IMAGE, OBJECTIVE])
def test_pruned_nodes_are_dominated(seed, method):
    inst = generate(6, 3, seed)
    w = classify_weights(["0.5", "0.3", "0.2"])
    cfg = SearchConfig(bound_method=method, record_trace=True, preprocess=False, shave=False, k_seed=1)
    sol, stats = solve(inst, w, cfg)
    for node in stats.pruned:
        try:
            sub = brute_force_optimum(inst, w, node).value
        except InfeasibleError:
            continue
        assert sub >= sol.value
    assert verify_run(inst, w, sol, bounds=stats.bound_trace).ok


@pytest.mark.parametrize("seed", range(4))
def test_incumbent_history_decreases(seed):
    inst = generate(7, 3, seed)
    w = classify_weights(["0.5", "0.3", "0.2"])
    _, stats = solve(inst, w, SearchConfig(k_seed=1, shave=False, preprocess=False))
    hist = stats.incumbent_history
    assert hist
    assert all(a > b for a, b in zip(hist, hist[1:]))


def test_node_limit_not_proven():
    inst = generate(8, 3, 1)
    w = classify_weights(["0.5", "0.3", "0.2"])
    sol, stats = solve(inst, w, SearchConfig(node_limit=1, preprocess=False, shave=False, k_seed=1))
    assert not stats.proven
    assert sol.value == owa(w, sol.image)
    assert sol.value >= brute_force_optimum(inst, w).value


def test_time_limit_not_proven():
    inst = generate(8, 5, 2)
    w = classify_weights(["0.3", "0.25", "0.2", "0.15", "0.1"])
    _, stats = solve(inst, w, SearchConfig(time_limit=0.0, preprocess=False, shave=False, k_seed=1))
    assert not stats.proven


def test_stats_dict(ex, w_ex):
    _, stats = solve(ex, w_ex)
    d = stats.to_dict()
    assert d["schema_version"] == STATS_SCHEMA_VERSION
    assert "bound_trace" not in d
    assert d["proven"] is True


def test_coloration_phase_example(ex, w_ex):
    col, inc, stats = coloration_phase(ex, w_ex, SearchConfig(k_seed=2))
    assert inc.edge_ids == T4
    assert stats.preprocess_blue == 1 and stats.preprocess_red == 1
    assert set(col.blue()) == set(T4)


def test_config_validation():
    with pytest.raises(InputError):
        SearchConfig(bound_method="nope")
    with pytest.raises(InputError):
        SearchConfig(k_seed=0)
    with pytest.raises(InputError):
        SearchConfig(branching="random")


def test_weight_length_mismatch(ex):
    with pytest.raises(InputError):
        solve(ex, classify_weights(["0.5", "0.5"]))


def test_single_tree_graph():
    inst = MultiGraphInstance.from_edges(4, [(1, 2, [1, 2]), (2, 3, [3, 1]), (3, 4, [2, 2])])
    assert count_spanning_trees(inst) == 1
    sol, _ = solve(inst, classify_weights(["0.7", "0.3"]))
    assert sol.edge_ids == (0, 1, 2)


def test_deterministic():
    inst = generate(7, 3, 11)
    w = classify_weights(["0.5", "0.3", "0.2"])
    a, sa = solve(inst, w)
    b, sb = solve(inst, w)
    assert a == b
    assert sa.nodes_expanded == sb.nodes_expanded
