"""Continued fractions and the renormalization map, checked against direct computations."""
import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rotsub.cf import (
    EVEN_A3EQ1,
    EVEN_A3NE1,
    ODD_GT1,
    ONE,
    DigitsExhaustedError,
    PartialQuotients,
    UnsupportedRepresentationError,
    convergents,
    g_orbit_period,
    g_step,
    is_heavy,
    renorm_trajectory,
)

digit = st.integers(min_value=1, max_value=9)
periodic_theta = st.builds(
    PartialQuotients.periodic,
    st.lists(digit, min_size=1, max_size=4),
    st.lists(digit, max_size=3),
)


def sqrt_digits(d, n):
    """Digits of sqrt(d) - floor(sqrt(d)) by the classical integer recurrence."""
    a0 = math.isqrt(d)
    m, q, a = 0, 1, a0
    out = []
    for _ in range(n):
        m = q * a - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        out.append(a)
    return out


def g_reference(digits):
    """The parity-aware map on a plain digit list."""
    a1 = digits[0]
    if a1 == 1:
        return [digits[1] + 1] + digits[2:]
    if a1 % 2:
        return [1] + digits[1:]
    return digits[2:]


@pytest.mark.parametrize("d", [2, 3, 5, 7, 13, 19, 31])
def test_periodic_digits_match_integer_sqrt_expansion(d):
    ref = sqrt_digits(d, 30)
    # sqrt(d) mod 1 has a purely periodic tail after a0; find the period from the reference
    for p in range(1, 15):
        if ref[p : 2 * p] == ref[:p] and ref[:30 - p] == ref[p:30]:
            break
    theta = PartialQuotients.periodic(ref[:p])
    assert theta.digits(30) == ref


def test_convergents_of_sqrt2_solve_pell():
    theta = PartialQuotients.periodic((2,))
    for p, q in itertools.islice(convergents(theta), 25):
        # p/q approximates sqrt2 - 1, so (p+q)/q approximates sqrt2
        assert abs((p + q) ** 2 - 2 * q * q) == 1


def test_canonical_form_makes_equal_numbers_equal():
    assert PartialQuotients.periodic((2, 2)) == PartialQuotients.periodic((2,))
    assert PartialQuotients.periodic((2,), (2, 2)) == PartialQuotients.periodic((2,))
    assert PartialQuotients.periodic((1, 2), (2,)) == PartialQuotients.periodic((2, 1))


def test_str_and_json_forms():
    theta = PartialQuotients.periodic((2,), (3,))
    assert str(theta) == "[3,(2)*]"
    assert PartialQuotients.from_json(theta.to_json()) == theta
    gen = PartialQuotients.generated("arithmetic")
    assert gen.digits(6) == [1, 2, 3, 4, 5, 6]
    assert PartialQuotients.from_json(gen.to_json()).digits(6) == [1, 2, 3, 4, 5, 6]


def test_extreme_generator_head():
    assert PartialQuotients.generated("extreme").digits(4) == [2, 4, 2, 16]


def test_finite_expansion_is_rational():
    theta = PartialQuotients.finite((2, 3))
    assert theta.to_fraction(2) == Fraction(3, 7)
    with pytest.raises(DigitsExhaustedError):
        theta.digit(3)
    with pytest.raises(UnsupportedRepresentationError):
        g_step(theta)


@given(periodic_theta)
def test_json_round_trip(theta):
    assert PartialQuotients.from_json(theta.to_json()) == theta


@given(periodic_theta)
def test_g_step_matches_digit_rewrite(theta):
    nxt, tag = g_step(theta)
    ref = g_reference(theta.digits(12))
    assert nxt.digits(8) == ref[:8]
    a1 = theta.digit(1)
    expected = ONE if a1 == 1 else ODD_GT1 if a1 % 2 else EVEN_A3EQ1 if theta.digit(3) == 1 else EVEN_A3NE1
    assert tag == expected


@given(periodic_theta)
def test_greater_than_half_iff_first_digit_is_one(theta):
    value = theta.to_fraction(20)
    assert theta.is_greater_than_half() == (value > Fraction(1, 2))
    assert theta.is_greater_than_half() == (theta.digit(1) == 1)


@given(periodic_theta, st.integers(min_value=0, max_value=12))
def test_trajectory_parity_counts_one_states(theta, depth):
    states = renorm_trajectory(theta, depth)
    assert len(states) == depth + 1
    parity = 0
    for i, state in enumerate(states):
        assert state.index == i
        assert state.parity == parity
        assert state.k == state.a1 // 2 == state.increment
        parity ^= state.case_tag == ONE
    # the state after a case-one state never has a1 == 1
    for a, b in zip(states, states[1:]):
        if a.case_tag == ONE:
            assert b.a1 >= 2


@given(periodic_theta)
def test_g_orbit_is_eventually_periodic(theta):
    pre, per = g_orbit_period(theta)
    states = renorm_trajectory(theta, pre + 2 * per)
    assert states[pre].theta == states[pre + per].theta
    assert per >= 1


@given(periodic_theta)
def test_heaviness_reads_odd_indexed_digits(theta):
    n = len(theta.prefix) + 2 * len(theta.period)
    assert is_heavy(theta) == all(theta.digit(i) % 2 == 0 for i in range(1, n + 1, 2))


def test_heavy_examples():
    assert is_heavy(PartialQuotients.periodic((2,)))
    assert not is_heavy(PartialQuotients.periodic((1,)))
    assert is_heavy(PartialQuotients.periodic((4, 3)))
    assert not is_heavy(PartialQuotients.periodic((2, 3, 2)))
