"""
Tests for the twin-lattice quotient, bottleneck bounds and window estimates.
"""
import math
import re
from fractions import Fraction

import pytest

from core.bigraph import max_matching
from core.errors import InfeasibleError, InputError
from core.groups import box
from core.symmetry import factor, interior_coverage, materialize, materialize_matching
from core.twinlattice import (
    RationalRotation, angle_sweep, bottleneck_bound, common_sublattice, default_rcap, emit_pairs,
    irrational_window_estimate, quotient_graph, wraparound_distance2,
)
from oracles import bottleneck_oracle, point_pairs

HALF = (Fraction(1, 2), Fraction(1, 2))
PAIR_LINE = re.compile(r"^-?\d+\.\d{6} -?\d+\.\d{6} -> -?\d+\.\d{6} -?\d+\.\d{6}$")


def wraparound_weights(q, cap_squared):
    """Least squared distance from each A-rep to any L-translate of each B-rep."""
    (a, b), (c, d) = q.lattice.basis
    n = len(q.a_reps)
    weights = []
    for ax, ay in q.a_reps:
        row = []
        for bx, by in q.b_reps:
            best = min((bx + s * a + u * c - ax) ** 2 + (by + s * b + u * d - ay) ** 2
                       for s in range(-3, 4) for u in range(-3, 4))
            row.append(best if best <= cap_squared else None)
        weights.append(row)
    assert len(weights) == n
    return weights


# =============================================================================
# ROTATIONS AND LATTICES
# =============================================================================

def test_rotation_validation_and_normalization():
    rot = RationalRotation(6, 8, 10)
    assert (rot.p, rot.q, rot.c) == (3, 4, 5)
    with pytest.raises(InputError):
        RationalRotation(1, 1, 1)
    with pytest.raises(InputError):
        RationalRotation(0, 0, 0)


def test_rotation_maps_lattice_points():
    rot = RationalRotation(3, 4, 5)
    assert rot.rotate((5, 0)) == (3, 4)
    assert rot.image((0, 0)) == (0, 0)
    assert math.isclose(rot.angle, math.atan2(4, 3))


@pytest.mark.parametrize("pqc,index", [((1, 0, 1), 1), ((3, 4, 5), 25), ((5, 12, 13), 169)])
def test_common_sublattice_index(pqc, index):
    lattice = common_sublattice(RationalRotation(*pqc))
    assert lattice.index == index
    assert lattice.reduce(lattice.point((2, -3))) == (0, 0)


# =============================================================================
# QUOTIENT GRAPH
# =============================================================================

def test_identity_quotient():
    q = quotient_graph(RationalRotation(1, 0, 1), 0)
    assert (q.sym_graph.a_orbits, q.sym_graph.b_orbits) == (1, 1)
    assert len(q.sym_graph.triples) == 1
    assert list(q.weights.values()) == [0]


def test_shifted_identity_quotient():
    q = quotient_graph(RationalRotation(1, 0, 1, HALF), Fraction(71, 100))
    assert len(q.sym_graph.triples) == 4
    assert set(q.weights.values()) == {Fraction(1, 2)}
    assert quotient_graph(RationalRotation(1, 0, 1, HALF), Fraction(1, 2)).sym_graph.triples == ()


def test_quotient_weights_agree_with_torus_distance():
    q = quotient_graph(RationalRotation(3, 4, 5, HALF), 2)
    nearest = {}
    for (i, _, j), w in q.weights.items():
        nearest[(i, j)] = min(w, nearest.get((i, j), w))
    for i in range(len(q.a_reps)):
        for j in range(len(q.b_reps)):
            d = wraparound_distance2(q, i, j)
            if (i, j) in nearest:
                assert d == nearest[(i, j)]
            else:
                assert d > q.threshold_squared
    shifted = quotient_graph(RationalRotation(1, 0, 1, HALF), Fraction(9, 10))
    assert wraparound_distance2(shifted, 0, 0) == Fraction(1, 2)


def test_quotient_representative_counts():
    q = quotient_graph(RationalRotation(3, 4, 5), 1)
    assert len(q.a_reps) == len(q.b_reps) == 25
    assert len(set(q.b_reps)) == 25


def test_threshold_must_stay_below_period():
    with pytest.raises(InputError):
        quotient_graph(RationalRotation(3, 4, 5), 5)
    with pytest.raises(InputError):
        quotient_graph(RationalRotation(1, 0, 1), -1)


# =============================================================================
# BOTTLENECK BOUND
# =============================================================================

def test_identity_bound_is_zero():
    bound = bottleneck_bound(RationalRotation(1, 0, 1), default_rcap(RationalRotation(1, 0, 1)))
    assert bound.r_squared == 0
    assert len(bound.matching) == 1


def test_shifted_identity_bound():
    rot = RationalRotation(1, 0, 1, HALF)
    bound = bottleneck_bound(rot, default_rcap(rot))
    assert bound.r_squared == Fraction(1, 2)
    assert math.isclose(bound.r, math.sqrt(2) / 2)


@pytest.mark.timeout(120)
@pytest.mark.parametrize("t", [(0, 0), HALF, (Fraction(1, 3), Fraction(0))])
def test_bound_matches_wraparound_oracle(t):
    rot = RationalRotation(3, 4, 5, t)
    rcap = default_rcap(rot)
    bound = bottleneck_bound(rot, rcap)
    weights = wraparound_weights(bound.quotient, rcap * rcap)
    assert bound.r_squared == bottleneck_oracle(25, weights)


def test_pythagorean_bound_values():
    rot = RationalRotation(3, 4, 5)
    assert bottleneck_bound(rot, default_rcap(rot)).r_squared == Fraction(1, 5)


@pytest.mark.timeout(300)
def test_larger_rotation_matches_wraparound_oracle():
    rot = RationalRotation(5, 12, 13)
    rcap = Fraction(3, 2)
    bound = bottleneck_bound(rot, rcap)
    assert bound.r_squared == Fraction(4, 13)
    weights = wraparound_weights(bound.quotient, rcap * rcap)
    assert bottleneck_oracle(169, weights) == Fraction(4, 13)


@pytest.mark.timeout(300)
def test_larger_rotation_bound_is_tight():
    rot = RationalRotation(5, 12, 13)
    bound = bottleneck_bound(rot, Fraction(3, 2))
    weighted = quotient_graph(rot, Fraction(3, 2)).factor_weights()
    fg = factor(bound.quotient.sym_graph).underlying
    assert len(max_matching(fg)) == 169
    smaller = [w for w in set(weighted.weights) if w < bound.r_squared]
    if smaller:
        assert len(max_matching(weighted.subgraph(max(smaller)))) < 169


def test_infeasible_cap_raises():
    rot = RationalRotation(1, 0, 1, HALF)
    with pytest.raises(InfeasibleError) as err:
        bottleneck_bound(rot, Fraction(1, 2))
    assert err.value.largest_tested == Fraction(1, 2)


@pytest.mark.timeout(60)
def test_lifted_matching_covers_interior():
    rot = RationalRotation(3, 4, 5)
    bound = bottleneck_bound(rot, default_rcap(rot))
    sg = bound.quotient.sym_graph
    wg = materialize(sg, box(sg.group, 6))
    m = materialize_matching(sg, bound.matching, wg)
    assert wg.interior_left
    assert interior_coverage(wg, m) == (frozenset(), frozenset())


# =============================================================================
# PAIR EMISSION
# =============================================================================

def test_emit_pairs_format():
    rot = RationalRotation(1, 0, 1, HALF)
    bound = bottleneck_bound(rot, default_rcap(rot))
    lines = emit_pairs(bound.quotient, bound.matching, periods=2)
    assert len(lines) == 4
    assert all(PAIR_LINE.match(line) for line in lines)
    for (x, y), (x2, y2) in point_pairs(lines):
        assert math.isclose((x - x2) ** 2 + (y - y2) ** 2, 0.5)


@pytest.mark.timeout(60)
def test_emitted_pairs_are_a_bounded_matching():
    rot = RationalRotation(3, 4, 5)
    bound = bottleneck_bound(rot, default_rcap(rot))
    pairs = point_pairs(emit_pairs(bound.quotient, bound.matching))
    assert len(pairs) == 25
    assert len({a for a, _ in pairs}) == len({b for _, b in pairs}) == 25
    for (x, y), (x2, y2) in pairs:
        assert math.hypot(x - x2, y - y2) <= bound.r + 1e-6


# =============================================================================
# IRRATIONAL MODE
# =============================================================================

def test_zero_angle_has_no_violation():
    est = irrational_window_estimate(0.0, (0.0, 0.0), 4, step=0.01)
    assert est.lower_bound == 0
    assert not est.violation_found
    assert est.upper_indication == 0
    assert est.to_json()["upper_is_heuristic"] is True


def test_estimate_rejects_bad_parameters():
    with pytest.raises(InputError):
        irrational_window_estimate(0.5, (0.0, 0.0), 0)
    with pytest.raises(InputError):
        irrational_window_estimate(0.5, (0.0, 0.0), 3, step=0)


@pytest.mark.timeout(120)
def test_diagonal_lower_bounds_are_monotone():
    lowers = [irrational_window_estimate(math.pi / 4, (0.0, 0.0), n, step=0.01).lower_bound
              for n in (3, 6, 10)]
    assert lowers == sorted(lowers)
    assert all(value <= 0.8558 for value in lowers)


@pytest.mark.timeout(600)
def test_diagonal_lower_bound_at_radius_thirty():
    est = irrational_window_estimate(math.pi / 4, (0.0, 0.0), 30, step=0.01)
    assert est.violation_found
    assert 0.70 <= est.lower_bound <= 0.8558


def test_sweep_is_sorted_by_angle():
    results = angle_sweep([0.9, 0.1, 0.5], (0.0, 0.0), 3, step=0.05)
    assert [e.angle for e in results] == [0.1, 0.5, 0.9]
