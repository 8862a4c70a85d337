"""Expansion constants, tail bounds, and the certified crossover."""

from fractions import Fraction

import pytest
from mpmath import mp

from antidice import core, dominance, edgeworth
from antidice.core import LatticeDistribution
from antidice.dominance import RelationLabel
from antidice.errors import (
    CertificateUnavailableError,
    NoLeadingTermError,
    SingletonSupportError,
    UnbalancedDistributionError,
)

DAVID = core.parse_die("1,1,4,4,5,6")
GOLIATH = core.parse_die("0,1,2,6,6,6")


def _gd_params():
    lat = core.to_lattice(core.difference_die(GOLIATH, DAVID))
    return edgeworth.compute_params(lat.dist)


def _gd_moment(k):
    total = Fraction(0)
    for g in GOLIATH.faces:
        for d in DAVID.faces:
            total += (g - d) ** k
    return total / 36


def test_compute_params_rejects_degenerate_input():
    with pytest.raises(SingletonSupportError):
        edgeworth.compute_params(LatticeDistribution.delta(0))
    with pytest.raises(UnbalancedDistributionError):
        edgeworth.compute_params(LatticeDistribution.from_weight_map({0: 1, 3: 1}))
    with pytest.raises(ValueError):
        edgeworth.compute_params(
            LatticeDistribution.from_weight_map({-1: 1, 1: 1}), C=0
        )


def test_exact_moments_match_direct_sum():
    p = _gd_params()
    assert p.mu1 == 0
    assert p.mu2 == _gd_moment(2) == Fraction(61, 6)
    assert p.mu3 == _gd_moment(3) == Fraction(-1, 2)
    assert p.mu4 == _gd_moment(4) == Fraction(1283, 6)
    assert (p.a, p.b) == (0, 1)
    assert p.m_min == Fraction(1, 36)
    assert p.C == 2


def test_derived_constants_truncate_to_known_digits():
    p = _gd_params()
    t = edgeworth.truncate_decimal
    assert t(p.sigma, 6) == "3.188521"
    assert t(p.nu3, 6) == "-0.015424"
    assert t(p.nu4, 6) == "2.068798"
    assert t(p.beta, 6) == "0.156812"
    assert t(p.p0, 6) == "1.718281"
    assert t(p.p1, 6) == "0.013699"
    assert t(p.q1, 6) == "0.286199"
    assert t(p.q2, 6) == "0.247233"
    assert t(p.q3, 6) == "0.156812"
    assert t(p.q4, 6) == "0.002570"
    assert t(p.q5, 6) == "0.000745"
    assert t(p.r, 6) == "0.001107"
    assert t(p.n_min, 6) == "3.494060"


def test_truncate_decimal_edge_cases():
    t = edgeworth.truncate_decimal
    assert t(Fraction(7698, 3721), 6) == "2.068798"
    assert t(Fraction(-1, 2), 3) == "-0.500"
    assert t(Fraction(-1, 2000), 3) == "0.000"
    assert t(Fraction(-1, 2), 0) == "0"
    assert t(Fraction(5, 2), 0) == "2"
    assert t(7, 2) == "7.00"
    with pytest.raises(ValueError):
        t(Fraction(1), -1)


def test_c_override_changes_r_only_quadratically():
    lat = core.to_lattice(core.difference_die(GOLIATH, DAVID))
    p2 = edgeworth.compute_params(lat.dist)
    p4 = edgeworth.compute_params(lat.dist, C=4)
    assert p4.C == 4
    with mp.workdps(p2.dps):
        assert abs(p4.r - p2.r / 4) < mp.mpf("1e-40")
    assert p4.q1 == p2.q1


def test_beta_at_is_constant_when_shift_is_zero():
    p = _gd_params()
    for n in (1, 2, 17, 58117):
        assert edgeworth.beta_at(p, n) == p.beta


def test_l_function_at_zero_is_minus_nu3():
    p = _gd_params()
    with mp.workdps(p.dps):
        assert edgeworth.L_function(p, 0) == -p.nu3
        assert edgeworth.L_function(p, 7) == -p.nu3


def test_leading_term_sign_and_decay():
    p = _gd_params()
    assert edgeworth.truncate_decimal(edgeworth.leading_coefficient(p), 6) == "0.002051"
    l100 = edgeworth.leading_term(p, 100)
    l400 = edgeworth.leading_term(p, 400)
    assert l100 > l400 > 0
    with mp.workdps(p.dps):
        assert abs(l100 / l400 - 2) < mp.mpf("1e-30")
    with pytest.raises(ValueError):
        edgeworth.leading_term(p, 0)


def test_error_bound_floor_and_decomposition():
    p = _gd_params()
    for n in (1, 2, 3):
        with pytest.raises(ValueError):
            edgeworth.error_bound(p, n)
    for n in (4, 10, 1000, 58117):
        parts = edgeworth.bound_terms(p, n)
        assert len(parts) == 4
        assert all(t > 0 for t in parts)
        with mp.workdps(p.dps):
            assert edgeworth.error_bound(p, n) == sum(parts)


def test_error_bound_decreases_on_sampled_grid():
    p = _gd_params()
    samples = [4, 8, 40, 200, 1000, 5000, 58117, 300000]
    bounds = [edgeworth.error_bound(p, n) for n in samples]
    assert all(x > y for x, y in zip(bounds, bounds[1:]))


def test_expanded_coefficients_values():
    p = _gd_params()
    t = edgeworth.truncate_decimal
    c = edgeworth.expanded_coefficients(p)
    want = {
        "inv_n": "0.494467",
        "exp_n_amp": "903.068802",
        "exp_n_rate": "0.000553",
        "inv_n32": "0.000594",
        "exp_sqrt_rate": "3.738481",
        "sqrt_amp": "0.727108",
        "inv_n_amp": "1.967088",
        "quarter_amp": "0.435193",
        "quarter_sqrt": "0.042633",
        "quarter_const": "0.005141",
    }
    assert set(c) == set(want)
    for key, digits in want.items():
        assert t(c[key], 6) == digits, key


def test_certified_threshold_for_the_flagship_pair():
    p = _gd_params()
    cert = edgeworth.certified_threshold(p)
    assert int(cert) == 58117
    assert cert.threshold == 58117
    assert cert.checked_to == 20 * 58117
    assert cert.monotone_from == cert.checked_to
    assert cert.limit_sign == 1
    # the crossover brackets: bound still wins one step earlier
    assert edgeworth.leading_term(p, 58116) <= edgeworth.error_bound(p, 58116)
    assert edgeworth.leading_term(p, 58117) > edgeworth.error_bound(p, 58117)


def test_certified_threshold_rejections():
    sym = edgeworth.compute_params(
        LatticeDistribution.from_weight_map({-1: 1, 1: 1})
    )
    with pytest.raises(NoLeadingTermError):
        edgeworth.certified_threshold(sym)
    skew = edgeworth.compute_params(
        LatticeDistribution.from_weight_map({-3: 1, 1: 3})
    )
    assert skew.mu3 != 0
    with pytest.raises(CertificateUnavailableError):
        edgeworth.certified_threshold(skew)
    with pytest.raises(ValueError):
        edgeworth.certified_threshold(_gd_params(), check_factor=1)


def test_exhaustive_verify_flags_exact_mismatches():
    expect = edgeworth.uniform_expectation(
        RelationLabel.LOSS, {4: RelationLabel.WIN}
    )
    assert edgeworth.exhaustive_verify(DAVID, GOLIATH, (1, 16), expect) == []
    bare = edgeworth.uniform_expectation(RelationLabel.LOSS)
    assert edgeworth.exhaustive_verify(DAVID, GOLIATH, (1, 16), bare) == [4]


def test_exhaustive_verify_sharded_matches_serial():
    d = core.parse_die("-1,-1,2")
    z = core.parse_die("0")
    bare = edgeworth.uniform_expectation(RelationLabel.LOSS)
    serial = edgeworth.exhaustive_verify(d, z, (1, 30), bare, jobs=1)
    sharded = edgeworth.exhaustive_verify(d, z, (1, 30), bare, jobs=2)
    assert serial == sharded == [k for k in range(1, 31) if k % 3 == 2]


def test_exhaustive_verify_range_validation():
    with pytest.raises(ValueError):
        edgeworth.exhaustive_verify(
            DAVID, GOLIATH, (0, 4), edgeworth.uniform_expectation(RelationLabel.LOSS)
        )
    with pytest.raises(ValueError):
        edgeworth.exhaustive_verify(
            DAVID, GOLIATH, (5, 4), edgeworth.uniform_expectation(RelationLabel.LOSS)
        )


def test_uniform_expectation_lookup():
    f = edgeworth.uniform_expectation(
        RelationLabel.WIN, {3: RelationLabel.TIE}
    )
    assert f(1) is RelationLabel.WIN
    assert f(3) is RelationLabel.TIE
    assert f(10 ** 9) is RelationLabel.WIN
