"""Substitutions and the orbit codings they generate, against the rotation oracle."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rotsub.cf import PartialQuotients, renorm_trajectory
from rotsub.oracle import code_orbit, compare_upto_errors
from rotsub.synth import special_point_side, x_of_theta
from rotsub.word import (
    FORBIDDEN_FACTORS,
    IDENTITY,
    PSI,
    PrefixStream,
    Renormalization,
    Substitution,
    arbitrary_prefix,
    capped_image,
    encode_arbitrary,
    image_pieces,
    is_orbit_valid,
    limit_prefix,
    omega_prime,
    psi,
    sigma_of,
    substitution_for,
    zero_orbit_prefix,
)

digit = st.integers(min_value=1, max_value=7)
periodic_theta = st.builds(
    PartialQuotients.periodic,
    st.lists(digit, min_size=1, max_size=3),
    st.lists(digit, max_size=2),
)
orbit_words = st.text(alphabet="ABC", min_size=1, max_size=40).filter(is_orbit_valid)


def test_sqrt2_substitution():
    s = sigma_of(PartialQuotients.periodic((2,)))
    assert (s.a, s.b, s.c) == ("AACAC", "ABCAC", "ABCACAC")


def test_golden_substitution_after_first_step():
    states = renorm_trajectory(PartialQuotients.periodic((1,)), 1)
    assert sigma_of(states[0]) is IDENTITY or sigma_of(states[0]).is_identity
    s = sigma_of(states[1])
    assert (s.a, s.b, s.c) == ("ABCAC", "AACAC", "AAC")


def test_psi():
    assert psi("AAC") == "CAC"
    assert PSI("BCA") == "CCA"
    with pytest.raises(ValueError):
        psi("")


def test_bad_image_rejected():
    with pytest.raises(ValueError):
        Substitution("A", "", "C")


@given(st.integers(1, 12), st.integers(1, 6), st.integers(1, 6))
def test_images_are_orbit_valid_with_equal_ab_lengths(a1, a2, a3):
    s = substitution_for(a1, a2, a3)
    assert all(is_orbit_valid(img) for img in s.images.values())
    assert len(s.a) == len(s.b)
    assert s.a.count("C") == s.b.count("C")


@given(st.integers(2, 12), st.integers(1, 6), st.integers(1, 6), st.sampled_from("ABC"), st.integers(0, 200))
def test_capped_image_is_a_prefix(a1, a2, a3, letter, cap):
    full = substitution_for(a1, a2, a3).image(letter)
    assert capped_image(a1, a2, a3, letter, cap) == full[:cap]
    pieces = image_pieces(a1, a2, a3, letter)
    built = "".join("".join(ch * c for ch, c in runs) * rep for runs, rep in pieces)
    assert built == full


@given(orbit_words, st.integers(2, 10), st.integers(1, 5), st.integers(1, 5))
def test_substitutions_preserve_orbit_validity(word, a1, a2, a3):
    assert is_orbit_valid(substitution_for(a1, a2, a3)(word))


def test_forbidden_factors():
    assert set(FORBIDDEN_FACTORS) == {"CC", "CB", "BA"}
    assert not is_orbit_valid("ACCA")
    assert is_orbit_valid("AACABC")


@given(periodic_theta, st.integers(0, 6))
def test_lengths_from_count_matrices(theta, n):
    r = Renormalization(theta)
    ab, c = r.lengths(n)
    if max(ab, c) > 200_000:
        return
    assert len(r.expand("A", n)) == len(r.expand("B", n)) == ab
    assert len(r.expand("C", n)) == c
    for j in range(n):
        assert r.count_matrix(j) == r.sigma(j).counts()


@pytest.mark.parametrize(
    "theta",
    [PartialQuotients.periodic((2,)), PartialQuotients.periodic((4, 3)), PartialQuotients.periodic((2, 5, 6, 1))],
    ids=str,
)
def test_limit_word_codes_zero_for_heavy_theta(theta):
    assert limit_prefix(theta, 20_000) == code_orbit(0, theta, 20_000).word


@given(periodic_theta)
def test_zero_orbit_prefix_matches_oracle(theta):
    n = 3000
    assert zero_orbit_prefix(theta, n) == code_orbit(0, theta, n).word


@given(periodic_theta)
def test_limit_word_codes_the_special_point(theta):
    n = 3000
    x, side = x_of_theta(theta), special_point_side(theta)
    assert limit_prefix(theta, n) == code_orbit(x, theta, n, side).word


def test_limit_word_can_code_a_left_limit():
    # x + theta lands exactly on 1 - theta; the limit word takes the left side
    theta = PartialQuotients.periodic((2,), (3, 1))
    x = x_of_theta(theta)
    assert special_point_side(theta) == -1
    assert code_orbit(x, theta, 3).word == "ACA"
    assert code_orbit(x, theta, 3, side=-1).word == "ABC"
    assert limit_prefix(theta, 3) == "ABC"


def test_golden_prefixes():
    golden = PartialQuotients.periodic((1,))
    assert zero_orbit_prefix(golden, 21) == "CACABCACAACABCACAACAC"
    assert limit_prefix(golden, 21) == "ABCACAACACAACABCACAAC"


def test_omega_prime_case_one_needs_next_state():
    states = renorm_trajectory(PartialQuotients.periodic((1,)), 1)
    with pytest.raises(ValueError):
        omega_prime(states[0])
    assert omega_prime(states[0], states[1]) == "CAC"


@given(periodic_theta)
def test_prefix_stream_matches_limit_prefix(theta):
    stream = PrefixStream(theta)
    assert stream.take(1500) == limit_prefix(theta, 1500)


def test_prefix_stream_chunks():
    theta = PartialQuotients.periodic((2,))
    chunks = PrefixStream(theta).chunks(29)
    assert next(chunks) == "AACACAACACABCACACAACACABCACAC"


@given(periodic_theta, st.integers(1, 200), st.integers(2, 211))
def test_arbitrary_point_coding(theta, num, den):
    x = Fraction(num % den, den)
    n = 4000
    got = arbitrary_prefix(x, theta, n)
    errors, _ = compare_upto_errors(got, code_orbit(x, theta, n).word)
    assert errors <= 2


def test_encode_arbitrary_records_words():
    theta = PartialQuotients.periodic((2,))
    enc = encode_arbitrary(Fraction(1, 3), theta, 4)
    assert len(enc.words) == 5
    assert len(enc.points) == 6
    assert enc.prefix.startswith(code_orbit(Fraction(1, 3), theta, 50).word[:40])


def test_encode_zero_uses_primed_scheme():
    theta = PartialQuotients.periodic((1,))
    enc = encode_arbitrary(0, theta, 3)
    assert enc.tail_letter == "0+"
    assert enc.prefix.startswith("CACABCACAAC")
