from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from owatree.exceptions import InputError
from owatree.model import (MultiGraphInstance, OwaWeights, Solution, WeightClass, classify_weights, format_instance,
                           hurwicz_weights, is_spanning_tree, lorenz, owa, parse_instance, parse_weights, to_fraction,
                           tree_image)

from conftest import T1, T2, T3, T4

W = classify_weights(["0.5", "0.3", "0.2"])


@pytest.mark.parametrize("y, expected", [
    ((6, 8, 6), F(7)),
    ((7, 12, 3), F(87, 10)),
    ((-1, -4, 1), F(-3, 5)),
])
def test_owa_worked_values(y, expected):
    assert owa(W, y) == expected


def test_owa_constant_vector():
    for w in (W, hurwicz_weights("0.4", 3), classify_weights([F(1, 3)] * 3)):
        assert owa(w, (5, 5, 5)) == 5


def test_owa_length_mismatch():
    with pytest.raises(InputError):
        owa(W, (1, 2))


@pytest.mark.parametrize("y, L", [((4, 11, 4), (11, 15, 19)), ((0, 0, 0), (0, 0, 0)), ((8, 7, 6), (8, 15, 21))])
def test_lorenz(y, L):
    assert lorenz(y) == L


def test_tree_images(ex):
    assert tree_image(ex, T4) == (6, 8, 6)
    assert tree_image(ex, T2) == (8, 7, 6)
    assert tree_image(ex, ()) == (0, 0, 0)


def test_tree_image_unknown_edge(ex):
    with pytest.raises(InputError):
        tree_image(ex, (0, 9))


def test_example_ranking(ex):
    values = [owa(W, tree_image(ex, t)) for t in (T1, T2, T3, T4)]
    assert values == [F(15, 2), F(73, 10), F(87, 10), F(7)]


def test_hurwicz():
    assert hurwicz_weights("0.4", 3).w == (F(2, 5), 0, F(3, 5))
    assert hurwicz_weights(1, 3).w == (1, 0, 0)
    assert hurwicz_weights("0.5", 4).w == (F(1, 2), 0, 0, F(1, 2))
    assert hurwicz_weights("0.4", 3).kind is WeightClass.ARBITRARY
    assert hurwicz_weights("0.6", 2).kind is WeightClass.NON_INCREASING
    assert hurwicz_weights("0.4", 2).kind is WeightClass.ARBITRARY
    with pytest.raises(InputError):
        hurwicz_weights("1.5", 3)


def test_classify():
    assert classify_weights(["0.5", "0.3", "0.2"]).kind is WeightClass.STRICTLY_DECREASING
    assert classify_weights([F(1, 3)] * 3).kind is WeightClass.NON_INCREASING
    assert classify_weights(["0.4", "0", "0.6"]).kind is WeightClass.ARBITRARY
    with pytest.raises(InputError):
        classify_weights(["0.5", "0.4"])
    with pytest.raises(InputError):
        classify_weights(["1.2", "-0.2"])


def test_weight_tag_cannot_overclaim():
    with pytest.raises(InputError):
        OwaWeights((F(1, 2), F(1, 2)), WeightClass.STRICTLY_DECREASING)
    with pytest.raises(InputError):
        OwaWeights((F(1, 4), F(3, 4)), WeightClass.NON_INCREASING)


def test_decimal_parsing_is_exact():
    assert to_fraction("0.1") == F(1, 10)
    assert to_fraction(0.1) == F(1, 10)
    assert sum(parse_weights("0.1\n0.2\n0.7\n").w[::-1]) == 1


def test_instance_validation():
    with pytest.raises(InputError):
        MultiGraphInstance.from_edges(3, [(1, 1, (1, 2)), (1, 2, (1, 1)), (2, 3, (1, 1))])
    with pytest.raises(InputError):
        MultiGraphInstance.from_edges(3, [(1, 2, (1, 2)), (2, 1, (1, 1)), (2, 3, (1, 1))])
    with pytest.raises(InputError):
        MultiGraphInstance.from_edges(4, [(1, 2, (1, 2)), (3, 4, (1, 1))])
    with pytest.raises(InputError):
        MultiGraphInstance.from_edges(3, [(1, 2, (1, 2)), (2, 5, (1, 1))])
    with pytest.raises(InputError):
        MultiGraphInstance.from_edges(3, [(1, 2, (1, 2)), (2, 3, (1,))])
    with pytest.raises(InputError):
        MultiGraphInstance.from_edges(2, [(1, 2, (2**62, 2**62))])


def test_instance_text_round_trip(ex):
    text = format_instance(ex)
    assert text.splitlines()[0] == "3 4 6"
    again = parse_instance(text)
    assert again.edges == ex.edges and again.n == ex.n
    with pytest.raises(InputError):
        parse_instance("3 4 6\n1 2 3")
    with pytest.raises(InputError):
        parse_instance("3 2 1\n1 2 a b c")


def test_solution_and_tree_check(ex):
    s = Solution.of(ex, W, (3, 0, 2))
    assert s.edge_ids == T4 and s.value == 7
    assert is_spanning_tree(ex, T4)
    assert not is_spanning_tree(ex, (0, 1, 3))  # triangle 1-2-3
    assert not is_spanning_tree(ex, (0, 2))


weights_st = st.lists(st.integers(0, 9), min_size=2, max_size=6).filter(lambda xs: sum(xs) > 0)


def _norm(xs):
    return classify_weights([F(x, sum(xs)) for x in xs])


@settings(max_examples=200, deadline=None)
@given(weights_st, st.data())
def test_lorenz_identity(raw, data):
    w = _norm(raw)
    y = data.draw(st.lists(st.integers(-50, 100), min_size=w.p, max_size=w.p))
    ws = list(w.w) + [0]
    assert owa(w, y) == sum((ws[i] - ws[i + 1]) * L for i, L in enumerate(lorenz(y)))


@settings(max_examples=200, deadline=None)
@given(weights_st, st.data())
def test_monotone_and_homogeneous(raw, data):
    w = _norm(raw)
    y = data.draw(st.lists(st.integers(0, 50), min_size=w.p, max_size=w.p))
    bump = data.draw(st.lists(st.integers(0, 5), min_size=w.p, max_size=w.p))
    assert owa(w, y) <= owa(w, [a + b for a, b in zip(y, bump)])
    c = data.draw(st.fractions(min_value=0, max_value=10))
    assert owa(w, [c * v for v in y]) == c * owa(w, y)


@settings(max_examples=200, deadline=None)
@given(weights_st, st.data())
def test_convexity_for_non_increasing(raw, data):
    w = _norm(sorted(raw, reverse=True))
    y = data.draw(st.lists(st.integers(-30, 30), min_size=w.p, max_size=w.p))
    z = data.draw(st.lists(st.integers(-30, 30), min_size=w.p, max_size=w.p))
    assert owa(w, [a - b for a, b in zip(y, z)]) >= owa(w, y) - owa(w, z)
    from itertools import permutations
    if w.p <= 5:
        assert owa(w, y) == max(sum(a * y[i] for a, i in zip(w.w, perm)) for perm in permutations(range(w.p)))
