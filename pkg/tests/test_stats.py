"""Sum statistics: linear scans, one-step rules and closed forms, each against a direct count."""
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from rotsub.cf import ONE, PartialQuotients, g_orbit_period, renorm_trajectory
from rotsub.oracle import code_orbit, sums
from rotsub.stats import (
    BudgetExceededError,
    PreconditionError,
    apply_to_stats,
    case_formula,
    closed_form_special,
    closed_form_zero,
    length_pair,
    ratio_limit,
    scan,
    special_stats,
    stats_at,
    step_stats,
    zero_length,
    zero_stats,
    zero_trajectory,
)
from rotsub.word import PSI, Renormalization, is_orbit_valid, limit_prefix, sigma_of, zero_orbit_prefix

digit = st.integers(min_value=1, max_value=7)
periodic_theta = st.builds(
    PartialQuotients.periodic,
    st.lists(digit, min_size=1, max_size=3),
    st.lists(digit, max_size=2),
)
orbit_words = st.text(alphabet="ABC", min_size=1, max_size=60).filter(is_orbit_valid)

# one representative theta per substitution case, with varied digits
CASE_THETAS = {
    "even_a3ne1": st.builds(lambda a, b, c: PartialQuotients.periodic((2,), (2 * a, b, c + 1)), st.integers(1, 4), digit, digit),
    "even_a3eq1": st.builds(lambda a, b: PartialQuotients.periodic((2,), (2 * a, b, 1)), st.integers(1, 4), digit),
    "odd_gt1": st.builds(lambda a: PartialQuotients.periodic((2,), (2 * a + 1,)), st.integers(1, 4)),
    "one": st.builds(lambda b: PartialQuotients.periodic((2,), (1, b)), digit),
}


def naive(word, sign=1):
    """(S, M, m) over all prefixes, by a plain loop."""
    s, hi, lo = 0, -math.inf, math.inf
    for ch in word:
        s += sign if ch == "A" else -sign
        hi, lo = max(hi, s), min(lo, s)
    return s, hi, lo


@given(st.text(alphabet="ABC", min_size=1, max_size=80), st.sampled_from([1, -1]))
def test_scan_matches_loop(word, sign):
    assert scan(word, sign).triple() == naive(word, sign)


def test_scan_rejects_empty():
    with pytest.raises(ValueError):
        scan("")


@given(st.text(alphabet="ABC", min_size=1, max_size=40), st.sampled_from(list(CASE_THETAS)), st.data())
def test_apply_to_stats_is_exact_for_any_word(word, case, data):
    theta = data.draw(CASE_THETAS[case])
    sub = sigma_of(theta)
    got = apply_to_stats(scan(word), sub)
    assert got.triple() == scan(sub(word)).triple()
    assert got.ext == scan(sub(word)).ext


@given(st.text(alphabet="ABC", min_size=1, max_size=40))
def test_apply_psi(word):
    got = apply_to_stats(scan(word), PSI)
    ref = scan("C" + word[1:])
    assert got.triple() == ref.triple()


@given(orbit_words, st.sampled_from(list(CASE_THETAS)), st.data())
def test_case_rules_match_scan(word, case, data):
    s = scan(word)
    assume(s.M >= 0 and word != "C")
    theta = data.draw(CASE_THETAS[case])
    state = renorm_trajectory(theta, 0)[0]
    assert state.case_tag == case
    image = sigma_of(state)(word)
    assert case_formula(s, state) == scan(image).triple()
    assert step_stats(s, state).triple() == scan(image).triple()


def test_odd_case_correction_is_needed():
    # ends with C, minimum reached only at the end
    word = "AAC"
    s = scan(word)
    assert s.ends_with_C and s.min_only_at_end is False
    state = renorm_trajectory(PartialQuotients.periodic((2,), (3,)), 0)[0]
    word = "ABC"
    s = scan(word)
    assert s.min_only_at_end
    S, M, m = case_formula(s, state)
    assert (S, M, m) == scan(sigma_of(state)(word)).triple()
    assert M == max(-s.m + state.k - 1, state.k)


def test_preconditions():
    state = renorm_trajectory(PartialQuotients.periodic((2,)), 0)[0]
    with pytest.raises(PreconditionError):
        step_stats(scan("C"), state)
    with pytest.raises(PreconditionError):
        case_formula(scan("BB"), state)


@given(periodic_theta, st.integers(0, 12))
def test_closed_form_zero_matches_oracle(theta, n):
    r = Renormalization(theta)
    L = zero_length(r, n)
    assume(L <= 200_000)
    sign = -1 if theta.is_greater_than_half() else 1
    word = code_orbit(0, theta, L).word
    assert closed_form_zero(r, n) == naive(word, sign)
    assert len(zero_orbit_prefix(theta, L)) == L


@given(periodic_theta, st.integers(0, 10))
def test_zero_stats_by_chaining(theta, n):
    r = Renormalization(theta)
    assert zero_stats(r, n).triple() == closed_form_zero(r, n)


@given(periodic_theta, st.integers(0, 10))
def test_closed_form_special_brackets_scan(theta, n):
    r = Renormalization(theta)
    L = r.lengths(n)[0]
    assume(L <= 200_000)
    sign = -1 if theta.is_greater_than_half() else 1
    S, M, m = naive(limit_prefix(theta, L), sign)
    cS, (Mlo, Mhi), (mlo, mhi) = closed_form_special(r, n)
    assert cS == S
    assert Mlo <= M <= Mhi
    assert mlo <= m <= mhi
    assert special_stats(r, n).triple() == (S, M, m)


def test_sqrt2_values():
    theta = PartialQuotients.periodic((2,))
    # Omega'_n has M = n + 2: one unit per level on top of the initial (1, 1)
    assert [closed_form_zero(theta, n) for n in range(4)] == [(1, 2, 1), (1, 3, 1), (1, 4, 1), (1, 5, 1)]
    assert [zero_length(theta, n) for n in range(4)] == [3, 17, 99, 577]
    assert (length_pair(theta, 1).len_AB, length_pair(theta, 1).len_C) == (5, 7)


def test_golden_series():
    theta = PartialQuotients.periodic((1,))
    res = sums(0, theta, 6)
    # theta > 1/2: A counts -1, B and C count +1
    assert list(res.series) == [1, 0, 1, 0, 1, 2]


def test_ratio_two_rows():
    theta = PartialQuotients.generated("arithmetic")
    rows = zero_trajectory(theta, 6)
    assert rows == [(0, 0, 1, 1), (1, 1, 1, 0), (1, 0, 1, 0), (0, 2, 3, 0), (0, 2, 5, 0), (0, 0, 5, 0), (1, 3, 5, 3)]


@pytest.mark.parametrize(
    "theta, expected",
    [
        (PartialQuotients.periodic((2,)), math.inf),
        (PartialQuotients.periodic((1,)), Fraction(1)),
        # period of g: [2,1,1,1] [1,1,2,..] [2,2,1,..] [1,1,1,2,..] [2,1,2,..]; M gains 1+1, m loses 1
        (PartialQuotients.periodic((2, 1, 1, 1)), Fraction(2, 1)),
        (PartialQuotients.periodic((2,), (1, 1)), 0),
    ],
    ids=str,
)
def test_ratio_limit(theta, expected):
    assert ratio_limit(theta) == expected


@given(periodic_theta)
def test_ratio_limit_against_closed_forms(theta):
    r = Renormalization(theta)
    limit = ratio_limit(theta)
    pre, per = g_orbit_period(theta)
    # same phase at both ends of a window of whole double periods
    n1 = pre + 2 * per
    n2 = n1 + 2 * per * 100
    _, M, m = closed_form_zero(r, n1)
    _, M2, m2 = closed_form_zero(r, n2)
    if limit == math.inf:
        assert m == m2
        assert M2 > M
    elif limit == 0:
        assert M == M2
    else:
        # increments over a long stretch settle to the limiting ratio
        assert Fraction(M2 - M, m - m2) == limit


def test_stats_at_uses_closed_form_and_scan():
    theta = PartialQuotients.periodic((2,))
    assert stats_at(theta, "zero", 577) == (1, 5, 1, 5)
    res = sums(0, theta, 1000)
    assert stats_at(theta, "zero", 1000) == (int(res.series[-1]), res.M, res.m, res.rho)
    with pytest.raises(BudgetExceededError):
        stats_at(theta, "zero", 10**6, budget=10**5)
    special = stats_at(theta, "special", 500)
    assert special == stats_at(theta, "zero", 500)


def test_first_step_sign_convention():
    theta = PartialQuotients.periodic((1,))
    assert renorm_trajectory(theta, 0)[0].case_tag == ONE
    assert closed_form_zero(theta, 0) == naive(code_orbit(0, theta, zero_length(theta, 0)).word, -1)
