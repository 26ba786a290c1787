"""Synthesized rotation numbers, the special point and the heaviness test."""
import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rotsub.cf import PartialQuotients, convergents, is_heavy
from rotsub.exact import Certified, Surd, to_exact
from rotsub.oracle import code_orbit
from rotsub.stats import closed_form_zero, zero_trajectory
from rotsub.synth import (
    DigitTracker,
    GrowthTarget,
    RatioTarget,
    SequenceSpec,
    UnboundedIncrementError,
    growth_theta,
    heaviness_witness,
    oscillator,
    ratio_theta,
    special_point_side,
    x_of_theta,
)
from rotsub.word import Renormalization, limit_prefix

digit = st.integers(min_value=1, max_value=7)
periodic_theta = st.builds(
    PartialQuotients.periodic,
    st.lists(digit, min_size=1, max_size=3),
    st.lists(digit, max_size=2),
)


@given(st.integers(1, 10**6), st.integers(1, 3), st.integers(1, 4))
def test_ceil_pow_is_the_least_root(n, num, den):
    v = SequenceSpec.of("ceil_pow", num=num, den=den)(n)
    assert v**den >= n**num
    assert (v - 1) ** den < n**num


def test_sequence_json_round_trip():
    seq = SequenceSpec.of("ceil_log2", scale=3)
    assert SequenceSpec.from_json(seq.to_json()) == seq
    assert seq(1024) == 30
    assert SequenceSpec.from_json({"name": "const"})(5) == 1
    with pytest.raises(KeyError):
        SequenceSpec.of("nope")


@given(periodic_theta)
def test_digit_tracker_follows_the_trajectory(theta):
    tr = DigitTracker()
    for d in theta.digits(30):
        tr.feed(d)
    r = Renormalization(theta)
    assert tr.lens == r.lengths(tr.states)
    credited = tr.states + (tr.open_even is not None)
    rows = zero_trajectory(theta, credited)
    M = rows[credited - 1][2]
    m = 1 - sum(k for p, k, _, _ in rows[:credited] if p == 1)
    assert (tr.M, tr.m) == (M, m)


def test_golden_special_point_is_exact():
    golden = PartialQuotients.periodic((1,))
    x = x_of_theta(golden)
    assert isinstance(x, Surd)
    assert x == 1 / (2 * to_exact(golden))
    assert special_point_side(golden) == 1


@given(periodic_theta)
def test_heavy_theta_have_special_point_zero(theta):
    x = x_of_theta(theta)
    if is_heavy(theta):
        assert x == 0
    assert 0 <= x <= 1


def test_generated_theta_gets_certified_point():
    theta = PartialQuotients.generated("arithmetic")
    x = x_of_theta(theta, Fraction(1, 10**15))
    assert isinstance(x, Certified)
    assert x.eps <= Fraction(1, 10**15)
    # the limit word is the coding of any point close enough to x
    n = 400
    word = limit_prefix(theta, n)
    assert code_orbit(x.approx, theta, n).word == word


def test_heaviness_witness():
    assert heaviness_witness(PartialQuotients.periodic((2,)), 10**4).heavy_consistent
    res = heaviness_witness(PartialQuotients.periodic((1,)), 100)
    assert not res.heavy_consistent
    assert res.to_json() == {"result": "counterexample", "n": 1, "S_n": -1}
    with pytest.raises(ValueError):
        heaviness_witness(PartialQuotients.periodic((2,)), 0)


@given(periodic_theta)
def test_heaviness_matches_digit_test(theta):
    n = len(theta.prefix) + 2 * len(theta.period)
    j = next((i for i in range(1, n + 1, 2) if theta.digit(i) % 2), None)
    if j is None:
        assert heaviness_witness(theta, 5000).heavy_consistent
        return
    # the first odd digit at an odd index j forces a negative sum by time q_j
    q_j = list(itertools.islice(convergents(theta), j))[-1][1]
    res = heaviness_witness(theta, q_j)
    assert not res.heavy_consistent
    assert res.S_n < 0 and res.n <= q_j


def test_growth_target_validation():
    sq = SequenceSpec.of("ceil_pow", num=1, den=2)
    with pytest.raises(ValueError):
        GrowthTarget(sq, sq, c_bounded=True, d_bounded=True)
    with pytest.raises(ValueError):
        GrowthTarget(None, sq)
    with pytest.raises(ValueError):
        GrowthTarget(sq, sq, prefix=(0,))


def test_growth_theta_is_reproducible_from_json():
    sq = SequenceSpec.of("ceil_pow", num=1, den=2)
    theta = growth_theta(GrowthTarget(sq, sq))
    again = PartialQuotients.from_json(theta.to_json())
    assert again.digits(8) == theta.digits(8)


def test_growth_with_bounded_minimum():
    sq = SequenceSpec.of("ceil_pow", num=1, den=2)
    theta = growth_theta(GrowthTarget(sq, None, d_bounded=True))
    r = Renormalization(theta)
    mins = {closed_form_zero(r, n)[2] for n in range(2, 14)}
    assert len(mins) == 1
    assert closed_form_zero(r, 13)[1] > closed_form_zero(r, 2)[1]


def test_growth_rejects_fast_targets():
    fast = SequenceSpec.of("ceil_pow", num=2, den=1)
    theta = growth_theta(GrowthTarget(fast, fast))
    with pytest.raises(UnboundedIncrementError):
        theta.digits(6)


def test_ratio_target_parsing():
    t = RatioTarget("1/2", "inf")
    assert t.r1 == Fraction(1, 2) and t.r2 == math.inf
    with pytest.raises(ValueError):
        RatioTarget(3, 2)


@pytest.mark.parametrize(
    "r1, r2",
    [(Fraction(1), Fraction(3)), (Fraction(2), Fraction(2)), (Fraction(0), Fraction(1, 2)), (Fraction(1), math.inf)],
)
def test_oscillator_visits_both_ends(r1, r2):
    # phase 0 heads for r2 and stops within a relative tenth of it;
    # phase 1 heads back to within a twentieth of r1 (absolutely, when r1 = 0)
    top = r2 * Fraction(9, 10) if r2 != math.inf else r1 + 10
    bottom = r1 * Fraction(21, 20) if r1 else Fraction(1, 20)
    gen = oscillator(r1, r2, 40, 32, 16)
    prev = next(gen)
    seen_top = seen_bottom = False
    inside = False
    for _ in range(20_000):
        c, d = next(gen)
        assert c > prev[0] and d > prev[1]
        # only a jump toward 0 or infinity may exceed the bound
        bounded = 1 <= c - prev[0] <= 16 and 1 <= d - prev[1] <= 16
        assert bounded or (r1 == 0 and c - prev[0] == 1) or (r2 == math.inf and d - prev[1] == 1)
        prev = (c, d)
        r = Fraction(c, d)
        inside = inside or r1 <= r <= r2
        if inside:
            assert r1 <= r <= r2
        seen_top = seen_top or r >= top
        if seen_top and r <= bottom:
            seen_bottom = True
            break
    assert seen_top and seen_bottom


def test_ratio_theta_two():
    theta = ratio_theta(RatioTarget(2, 2))
    r = Renormalization(theta)
    _, M, m = closed_form_zero(r, 120)
    assert abs(Fraction(M, -m) - 2) < Fraction(1, 10)


@pytest.mark.parametrize("r1, r2", [("0", "1/2"), ("1", "inf")])
def test_ratio_theta_degenerate_end_is_reached(r1, r2):
    theta = ratio_theta(RatioTarget(r1, r2))
    rows = zero_trajectory(theta, 400)
    ratios = [Fraction(M, m) if m else math.inf for _, _, M, m in rows[50:]]
    target = RatioTarget(r1, r2)
    if target.r1 == 0:
        assert min(ratios) <= Fraction(1, 10)
        assert max(ratios) >= target.r2 * Fraction(9, 10)
    else:
        assert max(ratios) >= 10
        assert min(ratios) <= target.r1 * Fraction(11, 10)


def test_ratio_theta_infinite_keeps_minimum():
    theta = ratio_theta(RatioTarget("inf", "inf"))
    r = Renormalization(theta)
    assert {closed_form_zero(r, n)[2] for n in range(3, 30)} == {1}
