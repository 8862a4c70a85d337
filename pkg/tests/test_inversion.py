"""The five-face late-inversion family and its scan machinery."""

import math
import os
import random
from fractions import Fraction

import pytest

from antidice import core, inversion
from antidice.errors import DegenerateFitError

from oracles import brute_force_labels, family_conditional_brute

# frozen by a full exact scan: (x, first inversion roll count)
SMALL_GRID_INVERSIONS = {
    10: 8, 12: 3, 14: 3, 16: 3, 18: 3, 20: 4, 22: 4, 24: 4, 26: 4,
    28: 8, 30: 8, 32: 8, 34: 8, 36: 10, 38: 13, 40: 13,
}


def test_family_die_shape_and_balance():
    d = inversion.family_die(10)
    assert sorted(d.faces) == [-9, -9, 3, 5, 10]
    assert core.mean(d) == 0
    rng = random.Random(5)
    for _ in range(10):
        x = Fraction(rng.randint(-300, 300), rng.randint(1, 9))
        assert sum(inversion.family_die(x).faces) == 0
    half = inversion.family_die(Fraction(1, 2))
    assert sorted(half.faces).count(Fraction(1, 2)) == 2


def test_family_third_moment_sign_threshold():
    # mu3(x) > 0 exactly when 5x^2 - 5x - 960 > 0, i.e. x >= 15 on integers
    for x in (10, 12, 14):
        assert core.raw_moment(inversion.family_die(x), 3) < 0
    for x in (15, 16, 50, 200):
        assert core.raw_moment(inversion.family_die(x), 3) > 0


def test_conditional_distribution_against_symbolic_brute_force():
    for k in (1, 2, 3, 4, 5):
        want = family_conditional_brute(k)
        got = dict(inversion.conditional_pair_distribution(k).items())
        assert got == want, k


def test_conditional_distribution_totals():
    for k in (1, 2, 3, 6, 9):
        cond = inversion.conditional_pair_distribution(k)
        want = sum(
            math.factorial(k)
            // (math.factorial(a) ** 2 * math.factorial(k - 2 * a))
            * 3 ** (k - 2 * a)
            for a in range(k // 2 + 1)
        )
        assert cond.total == want
    with pytest.raises(ValueError):
        inversion.conditional_pair_distribution(0)


def test_tilt_invariance_in_the_constant_region():
    res = inversion.tilt_invariance_check(28, 100, 3)
    assert res
    assert res.counts1 == res.counts2
    assert (res.counts1.above - res.counts1.below) == res.conditional_net
    same = inversion.tilt_invariance_check(40, 40, 4)
    assert same
    assert same.counts1 == same.counts2


def test_tilt_invariance_guard_is_strict():
    with pytest.raises(ValueError):
        inversion.tilt_invariance_check(27, 100, 3)
    with pytest.raises(ValueError):
        inversion.tilt_invariance_check(100, 27, 3)
    with pytest.raises(ValueError):
        inversion.tilt_invariance_check(28, 100, 0)


def test_scan_matches_brute_force_for_tiny_x():
    # x = 10 inverts at k = 8; brute force up to 5 rolls sees pure wins
    labels = brute_force_labels([10, 5, 3, -9, -9], 5)
    assert labels == "WWWWW"
    pts = inversion.first_inversion_scan([10], kmax=8)
    assert pts[0].first_inversion == 8


def test_scan_reproduces_frozen_small_grid():
    xs = sorted(SMALL_GRID_INVERSIONS)
    pts = inversion.first_inversion_scan(xs, kmax=16)
    assert [p.x for p in pts] == xs
    for p in pts:
        assert p.first_inversion == SMALL_GRID_INVERSIONS[int(p.x)], p.x
        assert p.tie_at is None
        assert p.span_one
        assert p.third_moment_positive == (int(p.x) >= 15)
        assert p.kmax_searched == 16


def test_scan_inversion_time_nondecreasing_where_guaranteed():
    xs = [x for x in sorted(SMALL_GRID_INVERSIONS) if x >= 16]
    pts = inversion.first_inversion_scan(xs, kmax=16)
    ks = [p.first_inversion for p in pts]
    assert all(a <= b for a, b in zip(ks, ks[1:]))


def test_scan_reports_none_within_short_budget():
    pts = inversion.first_inversion_scan([100], kmax=4)
    assert pts[0].first_inversion is None
    assert pts[0].tie_at is None
    assert pts[0].kmax_searched == 4


def test_scan_validation_and_ordering():
    with pytest.raises(ValueError):
        inversion.first_inversion_scan([10], kmax=0)
    pts = inversion.first_inversion_scan([14, 10, 12], kmax=8)
    assert [p.x for p in pts] == [10, 12, 14]


def test_scan_checkpoints_are_reused(tmp_path):
    cpd = str(tmp_path / "cp")
    first = inversion.first_inversion_scan([10, 12], kmax=8, checkpoint_dir=cpd)
    files = sorted(os.listdir(cpd))
    assert len(files) == 2
    assert all(f.startswith("family-") for f in files)
    stamps = [os.path.getmtime(os.path.join(cpd, f)) for f in files]
    again = inversion.first_inversion_scan([10, 12], kmax=8, checkpoint_dir=cpd)
    assert again == first
    # walks resumed from their saved end state; files were only rewritten
    # with identical content, never re-walked from scratch
    assert [p.first_inversion for p in again] == [8, 3]
    assert len(os.listdir(cpd)) == 2
    del stamps


def test_default_grid_shape():
    grid = inversion.default_family_grid()
    assert grid[0] == 10
    assert grid[-1] == 200
    assert len(grid) == 96
    assert all(b - a == 2 for a, b in zip(grid, grid[1:]))


def test_quadratic_fit_recovers_exact_parabola():
    pts = [(x, 2 * x * x + 3 * x + 7) for x in range(1, 9)]
    fit = inversion.quadratic_fit(pts)
    assert abs(fit.c2 - 2) < 1e-9
    assert abs(fit.c1 - 3) < 1e-9
    assert abs(fit.c0 - 7) < 1e-9
    assert fit.residual < 1e-9


def test_quadratic_fit_needs_three_distinct_abscissas():
    with pytest.raises(DegenerateFitError):
        inversion.quadratic_fit([(1, 1), (1, 2), (1, 3)])
    with pytest.raises(DegenerateFitError):
        inversion.quadratic_fit([(1, 1), (2, 2)])


def test_quadratic_fit_on_frozen_scan_data():
    fit = inversion.quadratic_fit(sorted(SMALL_GRID_INVERSIONS.items()))
    assert fit.c2 > 0
    assert fit.residual < 6.0
