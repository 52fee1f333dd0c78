"""
Tests for finite bipartite graphs: matching, Hall witnesses, bottleneck.
"""
import itertools
from fractions import Fraction

import pytest

from core.bigraph import (
    FiniteBigraph, HallWitness, Matching, Side, bottleneck_matching, deficiency, hall_check,
    is_perfect, max_matching, neighborhood, validate_matching,
)
from core.errors import InputError
from oracles import graph_from_mask, max_deficiency, max_matching_size, neighborhood_size


def random_graph(rng, max_left, max_right):
    left, right = rng.randint(0, max_left), rng.randint(0, max_right)
    density = rng.random()
    edges = [(i, j) for i in range(left) for j in range(right) if rng.random() < density]
    return FiniteBigraph.build(left, right, edges)


# =============================================================================
# CONSTRUCTION
# =============================================================================

def test_rejects_out_of_bounds_edge():
    with pytest.raises(InputError):
        FiniteBigraph(2, 2, ((0, 2),))


def test_rejects_duplicate_edge():
    with pytest.raises(InputError):
        FiniteBigraph(2, 2, ((0, 1), (0, 1)))


def test_rejects_negative_or_infinite_weight():
    with pytest.raises(InputError):
        FiniteBigraph(1, 1, ((0, 0),), (-1,))
    with pytest.raises(InputError):
        FiniteBigraph(1, 1, ((0, 0),), (float("inf"),))


def test_build_sorts_edges_with_weights():
    g = FiniteBigraph.build(2, 2, [(1, 0), (0, 1)], [7, 3])
    assert g.edges == ((0, 1), (1, 0))
    assert g.weights == (3, 7)
    assert g.weight_of((1, 0)) == 7


def test_transpose_and_subgraph():
    g = FiniteBigraph.build(2, 3, [(0, 2), (1, 0)], [1, 5])
    t = g.transpose()
    assert (t.left_count, t.right_count) == (3, 2)
    assert t.edges == ((0, 1), (2, 0))
    assert g.subgraph(1).edges == ((0, 2),)


# =============================================================================
# NEIGHBORHOOD
# =============================================================================

def test_neighborhood_empty_subset(k33):
    assert neighborhood(k33, Side.LEFT, []) == frozenset()


def test_neighborhood_complete(k33):
    assert neighborhood(k33, Side.LEFT, [0]) == {0, 1, 2}


def test_neighborhood_path():
    g = FiniteBigraph(2, 1, ((0, 0), (1, 0)))
    assert neighborhood(g, Side.LEFT, [0, 1]) == {0}
    assert neighborhood(g, "right", [0]) == {0, 1}


def test_neighborhood_out_of_bounds(k33):
    with pytest.raises(InputError):
        neighborhood(k33, Side.LEFT, [3])


# =============================================================================
# MAXIMUM MATCHING
# =============================================================================

def test_empty_graph():
    g = FiniteBigraph(0, 0, ())
    m = max_matching(g)
    assert len(m) == 0
    assert is_perfect(g, m)


def test_k33_perfect(k33):
    m = max_matching(k33)
    assert len(m) == 3
    assert is_perfect(k33, m)


def test_k36_not_perfect(k36):
    m = max_matching(k36)
    assert len(m) == 3
    assert not is_perfect(k36, m)


def test_matching_is_deterministic(rng):
    g = random_graph(rng, 7, 7)
    assert max_matching(g) == max_matching(g)


def test_is_perfect_rejects_invalid_matching(k33):
    with pytest.raises(InputError):
        is_perfect(k33, Matching(((0, 0), (1, 0))))
    with pytest.raises(InputError):
        validate_matching(FiniteBigraph(1, 1, ()), Matching(((0, 0),)))


@pytest.mark.timeout(300)
def test_exhaustive_small_graphs_match_oracle():
    """Every graph up to 4+4 vertices: size and finite Hall theorem."""
    for left, right in itertools.product(range(5), repeat=2):
        for mask in range(1 << (left * right)):
            g = graph_from_mask(left, right, mask)
            m = max_matching(g)
            validate_matching(g, m)
            assert len(m) == max_matching_size(g), (left, right, mask)
            assert (hall_check(g, Side.LEFT) is None) == (len(m) == left)


@pytest.mark.timeout(60)
def test_random_graphs_match_oracle(rng):
    for _ in range(500):
        g = random_graph(rng, 7, 7)
        m = max_matching(g)
        validate_matching(g, m)
        assert len(m) == max_matching_size(g)
        assert (hall_check(g, Side.RIGHT) is None) == (len(m) == g.right_count)


@pytest.mark.timeout(60)
def test_koenig_deficiency_identity(rng):
    for _ in range(60):
        g = random_graph(rng, 10, 8)
        assert deficiency(g) == max_deficiency(g)
        assert len(max_matching(g)) == g.left_count - max_deficiency(g)


# =============================================================================
# HALL WITNESSES
# =============================================================================

def test_hall_single_edge_ok():
    assert hall_check(FiniteBigraph(1, 1, ((0, 0),)), Side.LEFT) is None


def test_hall_right_pigeonhole():
    g = FiniteBigraph.complete(1, 2)
    w = hall_check(g, Side.RIGHT)
    assert w == HallWitness(Side.RIGHT, (0, 1), 1)


def test_hall_k36_right(k36):
    w = hall_check(k36, Side.RIGHT)
    assert len(w.subset) == 6
    assert w.neighborhood_size == 3
    assert w.deficiency == 3
    assert hall_check(k36, Side.LEFT) is None


def test_witnesses_really_violate_hall(rng):
    for _ in range(300):
        g = random_graph(rng, 7, 7)
        for side in (Side.LEFT, Side.RIGHT):
            w = hall_check(g, side)
            if w is None:
                continue
            actual = neighborhood_size(g, w.subset, left=side is Side.LEFT)
            assert actual == w.neighborhood_size
            assert len(w.subset) > actual


# =============================================================================
# BOTTLENECK
# =============================================================================

def test_bottleneck_two_by_two():
    g = FiniteBigraph.build(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)], [1, 2, 2, 3])
    result = bottleneck_matching(g)
    assert result.threshold == 2
    assert result.matching.pairs == ((0, 1), (1, 0))


def test_bottleneck_single_edge():
    assert bottleneck_matching(FiniteBigraph(1, 1, ((0, 0),), (5,))).threshold == 5


def test_bottleneck_forced_diagonal():
    g = FiniteBigraph(2, 2, ((0, 0), (1, 1)), (0, 0))
    assert bottleneck_matching(g).threshold == 0


def test_bottleneck_infeasible_and_unweighted(k36):
    assert bottleneck_matching(FiniteBigraph(2, 2, ((0, 0), (1, 0)), (1, 1))) is None
    unweighted = FiniteBigraph.complete(2, 2)
    assert not unweighted.weighted
    assert FiniteBigraph(2, 2, ((0, 0), (1, 0)), (1, 1)).weighted
    with pytest.raises(InputError):
        bottleneck_matching(unweighted)
    with pytest.raises(InputError):
        unweighted.subgraph(1)


def test_bottleneck_exact_rationals():
    g = FiniteBigraph.build(2, 2, [(0, 0), (1, 1), (0, 1), (1, 0)],
                            [Fraction(1, 3), Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    assert bottleneck_matching(g).threshold == Fraction(1, 4)


def test_bottleneck_is_tight(rng):
    for _ in range(150):
        n = rng.randint(1, 5)
        edges = [(i, j) for i in range(n) for j in range(n) if rng.random() < 0.7]
        weights = [rng.randint(0, 9) for _ in edges]
        g = FiniteBigraph.build(n, n, edges, weights)
        result = bottleneck_matching(g)
        if result is None:
            assert len(max_matching(g)) < n
            continue
        assert is_perfect(g, result.matching)
        assert max(g.weight_of(e) for e in result.matching) == result.threshold
        smaller = [w for w in set(weights) if w < result.threshold]
        if smaller:
            assert len(max_matching(g.subgraph(max(smaller)))) < n
