"""Dominance labels, tilt tallies, inversions, span, and codes."""

import random
from fractions import Fraction

import pytest

from antidice import core, dominance
from antidice.core import LatticeDistribution
from antidice.dominance import RelationLabel
from antidice.errors import SingletonSupportError

from oracles import dict_power, dict_tally, label_per_roll

DAVID = core.parse_die("1,1,4,4,5,6")
GOLIATH = core.parse_die("0,1,2,6,6,6")


def test_label_char_digit_round_trip():
    for lb in RelationLabel:
        assert RelationLabel.from_char(lb.char) is lb
        assert lb.digit in (0, 1, 2)
    assert RelationLabel.WIN.opposite() is RelationLabel.LOSS
    assert RelationLabel.TIE.opposite() is RelationLabel.TIE


def test_tilt_counts_small_die():
    d = LatticeDistribution.from_weight_map({-1: 2, 2: 1})
    tc = dominance.tilt_counts(d, Fraction(0))
    assert (tc.above, tc.equal, tc.below) == (1, 0, 2)
    assert tc.tilt == Fraction(-1, 3)
    assert tc.label is RelationLabel.LOSS


def test_tilt_counts_default_center_is_mean():
    d = LatticeDistribution.from_weight_map({0: 1, 4: 1, 5: 1})
    assert dominance.tilt_counts(d) == dominance.tilt_counts(d, Fraction(3))


def test_tilt_counts_fractional_center_has_no_equal_mass():
    d = LatticeDistribution.from_weight_map({0: 5, 1: 7})
    tc = dominance.tilt_counts(d, Fraction(1, 2))
    assert (tc.above, tc.equal, tc.below) == (7, 0, 5)


def test_tilt_counts_match_dict_oracle_on_random_dists():
    rng = random.Random(0x7117)
    for _ in range(40):
        vals = {rng.randint(-12, 12): rng.randint(1, 8) for _ in range(rng.randint(2, 9))}
        d = LatticeDistribution.from_weight_map(vals)
        center = Fraction(rng.randint(-25, 25), rng.randint(1, 4))
        assert tuple(dominance.tilt_counts(d, center))[:3] == dict_tally(vals, center)


def test_goliath_minus_david_tally():
    lat = core.to_lattice(core.difference_die(GOLIATH, DAVID))
    tc = dominance.tilt_counts(lat.dist, Fraction(0))
    assert (tc.above, tc.equal, tc.below) == (17, 5, 14)
    assert tc.tilt == Fraction(3, 36)


def test_compare_single_rolls():
    assert dominance.compare(DAVID, GOLIATH, 1) is RelationLabel.LOSS
    assert dominance.compare(DAVID, GOLIATH, 4) is RelationLabel.WIN
    assert dominance.compare(core.parse_die("0"), core.parse_die("0"), 1) is RelationLabel.TIE


def test_dominance_sequence_first_six():
    assert str(dominance.dominance_sequence(DAVID, GOLIATH, 6)) == "LLLWLL"
    assert str(dominance.dominance_sequence(GOLIATH, DAVID, 6)) == "WWWLWW"


def test_trinary_code_of_goliath_view():
    seq = dominance.dominance_sequence(GOLIATH, DAVID, 6)
    code = dominance.trinary_code(seq)
    assert code.digits == "222022"
    assert code.value == 710


def test_trinary_prefix_property():
    seq = dominance.dominance_sequence(GOLIATH, DAVID, 9)
    full = dominance.trinary_code(seq)
    for cut in range(1, 9):
        prefix = dominance.trinary_code(seq.labels[:cut])
        assert prefix.value == full.value // 3 ** (9 - cut)


def test_sequence_machine_path_equals_generic():
    rng = random.Random(0xFA57)
    for _ in range(12):
        vals = {rng.randint(-6, 6): rng.randint(1, 3) for _ in range(rng.randint(2, 5))}
        d = LatticeDistribution.from_weight_map(vals)
        fast = dominance.sequence_from_lattice(d, 10, "auto")
        slow = dominance.sequence_from_lattice(d, 10, "schoolbook")
        assert fast == slow


def test_sequence_against_dict_oracle():
    got = str(dominance.dominance_sequence(core.parse_die("-1,-1,2"), core.parse_die("0"), 12))
    want = label_per_roll([-1, -1, 2], [0], 12)
    assert got == want == "LWLLWLLWLLWL"


def test_period_three_die_structure():
    seq = dominance.dominance_sequence(core.parse_die("-1,-1,2"), core.parse_die("0"), 24)
    for k in range(1, 25):
        want = RelationLabel.WIN if k % 3 == 2 else RelationLabel.LOSS
        assert seq.label(k) is want
    assert dominance.period_hint(seq, 6) == 3


def test_first_inversion_of_label_runs():
    L, T, W = RelationLabel.LOSS, RelationLabel.TIE, RelationLabel.WIN
    assert dominance.first_inversion_of([L, L, L, W]) == 4
    assert dominance.first_inversion_of([W, W, L]) == 3
    assert dominance.first_inversion_of([W, W, W]) is None
    assert dominance.first_inversion_of([W, T, L]) is None
    assert dominance.first_inversion_of([T, W, L]) is None
    assert dominance.first_inversion_of([L]) is None


def test_first_inversion_of_dice():
    assert dominance.first_inversion(GOLIATH, DAVID, 10) == 4
    assert dominance.first_inversion(DAVID, GOLIATH, 10) == 4
    sym = core.parse_die("-1,0,1")
    assert dominance.first_inversion(sym, core.parse_die("0"), 8) is None


def test_intransitive_cycle_at_one_roll():
    dice = [core.parse_die(t) for t in ("2,6,7", "1,5,9", "3,4,8")]
    assert dominance.is_intransitive_cycle(dice, 1)
    assert not dominance.is_intransitive_cycle(list(reversed(dice)), 1)
    with pytest.raises(ValueError):
        dominance.is_intransitive_cycle(dice[:2], 1)


def test_span_shift_cases():
    lat = core.to_lattice(core.difference_die(GOLIATH, DAVID))
    assert dominance.span_shift(lat.dist) == (0, 1)
    assert dominance.span_shift(LatticeDistribution.from_weight_map({0: 1, 3: 1, 6: 1})) == (0, 3)
    assert dominance.span_shift(LatticeDistribution.from_weight_map({1: 1, 4: 1, 7: 1})) == (1, 3)
    with pytest.raises(SingletonSupportError):
        dominance.span_shift(LatticeDistribution.delta(5))


def test_span_scales_with_face_scaling():
    rng = random.Random(3)
    for _ in range(10):
        vals = sorted(rng.sample(range(-9, 10), rng.randint(2, 5)))
        d = LatticeDistribution.from_weight_map({v: 1 for v in vals})
        base = dominance.span_shift(d)
        m = rng.randint(2, 5)
        scaled = LatticeDistribution.from_weight_map({v * m: 1 for v in vals})
        assert dominance.span_shift(scaled).span == m * base.span


def test_labels_invariant_under_shift_and_positive_scale():
    rng = random.Random(0x5CA1E)
    for _ in range(8):
        fa = [rng.randint(-5, 5) for _ in range(rng.randint(2, 4))]
        fb = [rng.randint(-5, 5) for _ in range(rng.randint(2, 4))]
        a, b = core.die(fa), core.die(fb)
        base = dominance.dominance_sequence(a, b, 6)
        c = Fraction(rng.randint(1, 7), rng.randint(1, 3))
        shifted = dominance.dominance_sequence(
            core.shift(a, c), core.shift(b, c), 6
        )
        assert shifted == base
        scaled = dominance.dominance_sequence(
            core.scale(a, c), core.scale(b, c), 6
        )
        assert scaled == base
        flipped = dominance.dominance_sequence(
            core.scale(a, -c), core.scale(b, -c), 6
        )
        for k in range(1, 7):
            assert flipped.label(k) is base.label(k).opposite()
