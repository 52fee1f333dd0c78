"""
Tests for Folner ratios and the paradoxical decomposition of F_2.
"""
from fractions import Fraction

import pytest

from core.amenability import (
    ParadoxCertificate, ParadoxDecomp, ParadoxViolation, ball_family, box_family,
    classification_table, folner_ratio, folner_witness_translate, preimage,
    standard_f2_paradox, verify_paradox,
)
from core.errors import InputError
from core.groups import FiniteSubset, ball, box


def cross(z2):
    return FiniteSubset.of(z2, [z2.elem(v) for v in ((0, 0), (1, 0), (0, 1))])


# =============================================================================
# FOLNER RATIOS
# =============================================================================

def test_identity_u_gives_ratio_one(f2, z2):
    for desc, windows in ((f2, ball_family(f2, [0, 1, 2])), (z2, box_family(z2, [1, 3, 5]))):
        report = folner_ratio(desc, windows, FiniteSubset.of(desc, [desc.identity()]))
        assert all(row.ratio == 1 for row in report.rows)
        assert report.infimum_so_far == 1


def test_integer_ratio_renders_like_infimum(z2):
    report = folner_ratio(z2, box_family(z2, [2]), FiniteSubset.of(z2, [z2.identity()]))
    assert report.rows[0].to_json()["ratio"] == "1"
    row = folner_ratio(z2, [("box(10)", box(z2, 10))], cross(z2)).rows[0]
    assert row.to_json() == {"window": "box(10)", "F": 100, "FU": 120, "ratio": "6/5"}


def test_box_ten_ratio(z2):
    report = folner_ratio(z2, [("box(10)", box(z2, 10))], cross(z2))
    row = report.rows[0]
    assert (row.f_size, row.fu_size, row.ratio) == (100, 120, Fraction(6, 5))


def test_free_ball_one_ratio(f2):
    gens = FiniteSubset.of(f2, f2.generators())
    row = folner_ratio(f2, ball_family(f2, [1]), gens).rows[0]
    assert (row.fu_size, row.ratio) == (17, Fraction(17, 5))


@pytest.mark.timeout(30)
def test_box_ratios_decrease_towards_one(z2):
    sides = [2, 4, 8, 16, 32, 64]
    report = folner_ratio(z2, box_family(z2, sides), cross(z2))
    ratios = [row.ratio for row in report.rows]
    for n, ratio in zip(sides, ratios):
        # independent count: n^2 box plus one new column and one new row
        assert ratio == Fraction(n * n + 2 * n, n * n)
    assert ratios == sorted(ratios, reverse=True)
    assert ratios[-1] < Fraction(104, 100)
    assert report.infimum_so_far == ratios[-1]


@pytest.mark.timeout(30)
def test_free_ball_ratios_stay_away_from_one(f2):
    gens = FiniteSubset.of(f2, [f2.identity(), *f2.generators()])
    report = folner_ratio(f2, ball_family(f2, range(1, 7)), gens)
    for r, row in zip(range(1, 7), report.rows):
        assert row.ratio == Fraction(2 * 3 ** (r + 1) - 1, 2 * 3 ** r - 1)
        assert row.ratio >= 3
    assert report.rows[0].ratio == Fraction(17, 5)


def test_folner_rejects_bad_input(z2, f2):
    with pytest.raises(InputError):
        folner_ratio(z2, [("b", ball(f2, 1))], cross(z2))
    with pytest.raises(InputError):
        folner_ratio(z2, [("b", box(z2, 2))], FiniteSubset(z2, ()))
    with pytest.raises(InputError):
        folner_ratio(z2, [], cross(z2))


def test_translate_formulation(z1, f2):
    window = FiniteSubset.of(z1, [z1.elem((n,)) for n in range(7)])
    assert folner_witness_translate(z1, window, FiniteSubset.of(z1, [z1.identity()])) == 0
    assert folner_witness_translate(z1, window, FiniteSubset.of(z1, [z1.elem((1,))])) == Fraction(1, 7)
    value = folner_witness_translate(f2, ball(f2, 2), FiniteSubset.of(f2, [f2.elem("a")]))
    assert value == Fraction(9, 17)
    assert value > Fraction(1, 3)


def test_two_formulations_are_consistent(z2, z1):
    for desc, windows, u in (
        (z2, box_family(z2, [2, 5, 9, 20]), cross(z2)),
        (z1, box_family(z1, [3, 10, 50]), FiniteSubset.of(z1, [z1.elem((v,)) for v in (-1, 0, 2)])),
    ):
        for label, window in windows:
            eps = folner_witness_translate(desc, window, u) * len(u)
            ratio = folner_ratio(desc, [(label, window)], u).rows[0].ratio
            assert ratio <= 1 + eps


# =============================================================================
# PARADOXICAL DECOMPOSITION
# =============================================================================

def test_classification_examples(f2):
    p = standard_f2_paradox()
    e, a_inv, b_inv = f2.identity(), f2.elem("A"), f2.elem("B")
    assert (p.classify_a(e), p.classify_b(e)) == (a_inv, b_inv)
    assert (p.classify_a(f2.elem("a")), p.classify_b(f2.elem("a"))) == (a_inv, b_inv)
    assert (p.classify_a(f2.elem("ab")), p.classify_b(f2.elem("ab"))) == (a_inv, e)
    assert p.classify_a(f2.elem("ba")) == e


@pytest.mark.timeout(30)
def test_standard_decomposition_verifies():
    p = standard_f2_paradox()
    for radius in range(0, 9):
        cert = verify_paradox(p, radius)
        assert isinstance(cert, ParadoxCertificate), cert
        assert cert.words_checked == 2 * 3 ** radius - 1


def test_radius_zero_covers_identity(f2):
    p = standard_f2_paradox()
    assert isinstance(verify_paradox(p, 0), ParadoxCertificate)
    assert preimage(p, f2.identity()) == [("A", f2.elem("a"))]


def test_unshifted_decomposition_leaves_identity_uncovered(f2):
    violation = verify_paradox(standard_f2_paradox(shift_powers=False), 3)
    assert isinstance(violation, ParadoxViolation)
    assert violation.word == f2.identity()
    assert violation.kind == "uncovered"


def test_overlapping_pieces_are_detected(f2):
    std = standard_f2_paradox()
    broken = ParadoxDecomp(std.index_set, std.classify_a, lambda g: f2.identity(), "overlap")
    violation = verify_paradox(broken, 2)
    assert isinstance(violation, ParadoxViolation)
    assert violation.kind == "overlap"


def test_classifier_outside_index_set(f2):
    std = standard_f2_paradox()
    broken = ParadoxDecomp(std.index_set, lambda g: f2.elem("b"), std.classify_b, "outside")
    violation = verify_paradox(broken, 1)
    assert violation.kind == "unclassified"


def test_pieces_partition_the_ball(f2):
    p = standard_f2_paradox()
    words = list(ball(f2, 5))
    for word in words:
        assert p.classify_a(word) in p.index_set
        assert p.classify_b(word) in p.index_set
    images = [w * p.classify_a(w) for w in words] + [w * p.classify_b(w) for w in words]
    counts = {}
    for image in images:
        counts[image] = counts.get(image, 0) + 1
    assert all(counts[w] == 1 for w in ball(f2, 4))


def test_classification_table_is_canonical():
    rows = classification_table(standard_f2_paradox(), 1)
    assert [row["word"] for row in rows] == ["A", "B", "a", "b", "e"]
    assert rows[-1] == {"word": "e", "A": "A", "B": "B"}
    assert rows[3] == {"word": "b", "A": "A", "B": "e"}


def test_rejecting_classifier_counts_as_unclassified(f2):
    std = standard_f2_paradox()

    def reject(g):
        raise InputError(f"no piece for {g}")

    violation = verify_paradox(ParadoxDecomp(std.index_set, reject, std.classify_b, "rejecting"), 1)
    assert isinstance(violation, ParadoxViolation)
    assert violation.kind == "unclassified"


def test_crashing_classifier_propagates(f2):
    std = standard_f2_paradox()

    def crash(g):
        raise ZeroDivisionError("bug in classifier")

    with pytest.raises(ZeroDivisionError):
        verify_paradox(ParadoxDecomp(std.index_set, std.classify_a, crash, "crashing"), 1)
    with pytest.raises(ZeroDivisionError):
        classification_table(ParadoxDecomp(std.index_set, crash, std.classify_b, "crashing"), 1)
