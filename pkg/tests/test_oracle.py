import itertools
import random

import pytest

from conftest import F, T4
from owatree.exceptions import InfeasibleError
from owatree.model import MultiGraphInstance, Solution, classify_weights, is_spanning_tree
from owatree.mst import Color, EdgeColoring
from owatree.oracle import (all_solutions, brute_force_optimum, count_spanning_trees, enumerate_trees,
                            ranked_trees, tree_table, verify_run)


def clique(n):
    return MultiGraphInstance.from_edges(n, [(u, v, [1, 1]) for u, v in itertools.combinations(range(1, n + 1), 2)])


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cayley(n):
    inst = clique(n)
    trees = list(enumerate_trees(inst))
    assert len(trees) == n ** (n - 2)
    assert count_spanning_trees(inst) == n ** (n - 2)
    assert len(set(trees)) == len(trees)
    assert all(is_spanning_tree(inst, t) for t in trees)


def test_tree_input_has_one_tree():
    inst = MultiGraphInstance.from_edges(4, [(1, 2, [1, 1]), (1, 3, [1, 1]), (3, 4, [1, 1])])
    assert list(enumerate_trees(inst)) == [(0, 1, 2)]


def test_cycle_graph():
    inst = MultiGraphInstance.from_edges(5, [(u, u % 5 + 1, [1, 1]) for u in range(1, 6)])
    assert count_spanning_trees(inst) == 5
    assert len(list(enumerate_trees(inst))) == 5


@pytest.mark.parametrize("seed", range(5))
def test_kirchhoff_matches_enumeration_sparse(seed):
    rng = random.Random(seed)
    pairs = [(u, u + 1) for u in range(1, 7)]
    pairs += rng.sample([q for q in itertools.combinations(range(1, 8), 2) if q not in pairs], 6)
    inst = MultiGraphInstance.from_edges(7, [(u, v, [1, 1]) for u, v in pairs])
    assert count_spanning_trees(inst) == len(list(enumerate_trees(inst)))
    trees, member = tree_table(inst)
    assert trees.shape == (count_spanning_trees(inst), inst.n - 1)
    assert (member.sum(axis=1) == inst.n - 1).all()


def test_example_brute_force(ex, w_ex):
    sol = brute_force_optimum(ex, w_ex)
    assert sol.value == 7
    assert sol.edge_ids == T4
    values = sorted(s.value for s in all_solutions(ex, w_ex))
    assert values[0] == 7 and len(values) == 16


def test_example_brute_force_colored(ex, w_ex):
    col = EdgeColoring.empty(6).with_color(0, Color.RED)
    sol = brute_force_optimum(ex, w_ex, col)
    assert sol.value == F(37, 5)
    assert sol.image == (7, 9, 4)


def test_brute_force_infeasible(ex, w_ex):
    col = EdgeColoring.empty(6)
    for e in (0, 3, 4):
        col = col.with_color(e, Color.RED)
    with pytest.raises(InfeasibleError):
        brute_force_optimum(ex, w_ex, col)


def test_ranked_trees_sorted(ex):
    sums = [sum(e.cost) for e in ex.edges]
    ranked = ranked_trees(ex, sums)
    assert len(ranked) == 16
    totals = [t for _, t in ranked]
    assert totals == sorted(totals)
    assert ranked[0][1] == 19


def test_verify_run_accepts_truth(ex, w_ex):
    sol = brute_force_optimum(ex, w_ex)
    col = EdgeColoring.empty(6).with_color(1, Color.RED)
    report = verify_run(ex, w_ex, sol, bounds=[(EdgeColoring.empty(6), F(13, 2))], colorings=[col])
    assert report.ok
    assert report.checked_bounds == 1 and report.checked_colorings == 1


def test_verify_run_flags_inflated_bound(ex, w_ex):
    report = verify_run(ex, w_ex, bounds=[(EdgeColoring.empty(6), F(71, 10))])
    assert not report.ok


def test_verify_run_subproblem_bound(ex, w_ex):
    red12 = EdgeColoring.empty(6).with_color(0, Color.RED)
    assert verify_run(ex, w_ex, bounds=[(red12, F(37, 5))]).ok
    assert not verify_run(ex, w_ex, bounds=[(red12, F(38, 5))]).ok


def test_verify_run_flags_bad_coloring(ex, w_ex):
    col = EdgeColoring.empty(6).with_color(0, Color.RED)
    assert not verify_run(ex, w_ex, colorings=[col]).ok


def test_verify_run_flags_suboptimal_solution(ex, w_ex):
    sol = Solution.of(ex, w_ex, (2, 3, 5))
    assert not verify_run(ex, w_ex, sol).ok


def test_verify_run_flags_mislabelled_solution(ex, w_ex):
    sol = Solution(edge_ids=T4, image=(6, 8, 6), value=F(6))
    assert not verify_run(ex, w_ex, sol).ok


def test_arbitrary_weights_oracle(ex):
    w = classify_weights([F(1, 2), 0, F(1, 2)])
    sol = brute_force_optimum(ex, w)
    assert sol.value == min(s.value for s in all_solutions(ex, w))


@pytest.mark.parametrize("seed", range(3))
def test_optimum_value_matches_exhaustive_min(seed):
    from owatree.generate import generate
    from owatree.oracle import optimum_value

    rng = random.Random(seed)
    inst = generate(6, 3, seed)
    w = classify_weights(["0.5", "0.3", "0.2"])
    for _ in range(40):
        col = EdgeColoring.empty(inst.m)
        for e in rng.sample(range(inst.m), rng.randint(0, 8)):
            col = col.with_color(e, rng.choice([Color.BLUE, Color.RED]))
        sols = all_solutions(inst, w, col)
        expect = min(sols, key=lambda s: (s.value, s.edge_ids)) if sols else None
        assert optimum_value(inst, w, col) == (expect.value if expect else None)
        if expect:
            assert brute_force_optimum(inst, w, col) == expect
