"""Sum statistics of words and their evolution under the renormalization substitutions.

Prefix sums use ``A -> +1`` and ``B, C -> -1`` (multiplied by ``sign``, which
is ``-1`` when ``theta > 1/2``).  ``M`` and ``m`` range over nonempty prefixes.

:class:`SumStats` also keeps, for each letter, the extreme prefix sums at
positions holding that letter (the first position excluded).  That data is
closed under substitution and under ``PSI``, so :func:`step_stats` is exact
for every word.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .cf import ONE, PartialQuotients, RenormState, g_orbit_period
from .word import PSI, Renormalization, Substitution, sigma_of

__all__ = [
    "SumStats",
    "LengthPair",
    "BudgetExceededError",
    "PreconditionError",
    "scan",
    "prefix_sums",
    "apply_to_stats",
    "step_stats",
    "case_formula",
    "closed_form_zero",
    "zero_trajectory",
    "closed_form_special",
    "special_stats",
    "length_pair",
    "ratio_limit",
    "stats_at",
    "DEFAULT_SCAN_BUDGET",
]

DEFAULT_SCAN_BUDGET = 10**7

_VAL = {"A": 1, "B": -1, "C": -1}
_IDX = {"A": 0, "B": 1, "C": 2}


class BudgetExceededError(RuntimeError):
    """A linear scan longer than the allowed budget was requested."""


class PreconditionError(ValueError):
    """The arithmetic rule was applied outside its hypotheses."""


Ext = tuple  # ((maxA, minA), (maxB, minB), (maxC, minC)), entries None when absent


def _merge(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]))


@dataclass(frozen=True)
class SumStats:
    """Summary of a nonempty word.

    ``base_*`` fields use ``A -> +1``; the signed ``S``, ``M``, ``m`` apply
    ``sign``.  ``ext`` holds per-letter (max, min) prefix sums in the base
    convention, over positions 2..n.
    """

    base_S: int
    base_M: int
    base_m: int
    first_letter: str
    last_letter: str
    ext: Ext
    length: int
    sign: int = 1
    min_only_at_end: Optional[bool] = None

    @property
    def S(self) -> int:
        return self.sign * self.base_S

    @property
    def M(self) -> int:
        return self.base_M if self.sign > 0 else -self.base_m

    @property
    def m(self) -> int:
        return self.base_m if self.sign > 0 else -self.base_M

    @property
    def rho(self) -> int:
        return self.M - self.m + 1

    @property
    def ends_with_C(self) -> bool:
        return self.last_letter == "C"

    def triple(self) -> tuple[int, int, int]:
        return self.S, self.M, self.m

    def to_json(self, n: Optional[int] = None) -> dict:
        return {"n": self.length if n is None else n, "S": self.S, "M": self.M, "m": self.m, "rho": self.rho}


@dataclass(frozen=True)
class LengthPair:
    len_AB: int
    len_C: int


def prefix_sums(word: str, sign: int = 1) -> np.ndarray:
    codes = np.frombuffer(word.encode("ascii"), dtype=np.uint8)
    return np.cumsum(np.where(codes == ord("A"), sign, -sign).astype(np.int64))


def scan(word: str, sign: int = 1) -> SumStats:
    """Exact statistics by a linear pass."""
    if not word:
        raise ValueError("statistics need a nonempty word")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    sums = prefix_sums(word)
    codes = np.frombuffer(word.encode("ascii"), dtype=np.uint8)
    ext = []
    for ch in "ABC":
        sel = sums[1:][codes[1:] == ord(ch)]
        ext.append((int(sel.max()), int(sel.min())) if sel.size else None)
    signed = sums * sign
    mn = signed.min()
    only_end = bool(signed[-1] == mn and (signed[:-1] > mn).all())
    return SumStats(
        int(sums[-1]), int(sums.max()), int(sums.min()), word[0], word[-1], tuple(ext), len(word), sign, only_end
    )


@lru_cache(maxsize=4096)
def _image_profile(img: str):
    """Per-image constants: total, peak, trough, per-letter extremes (all / excluding first)."""
    sums = np.cumsum(np.array([_VAL[c] for c in img], dtype=np.int64))
    codes = np.frombuffer(img.encode("ascii"), dtype=np.uint8)
    per_all, per_rest = [], []
    for ch in "ABC":
        mask = codes == ord(ch)
        sel = sums[mask]
        per_all.append((int(sel.max()), int(sel.min())) if sel.size else None)
        sel = sums[1:][mask[1:]]
        per_rest.append((int(sel.max()), int(sel.min())) if sel.size else None)
    return int(sums[-1]), int(sums.max()), int(sums.min()), tuple(per_all), tuple(per_rest)


def _shift(pair, o_max, o_min):
    if pair is None:
        return None
    return (pair[0] + o_max, pair[1] + o_min)


def apply_to_stats(s: SumStats, sub: Union[Substitution, object]) -> SumStats:
    """Statistics of ``sub(w)`` from those of ``w`` (``sub`` may be ``PSI``)."""
    if sub is PSI:
        delta = -1 - _VAL[s.first_letter]
        ext = tuple(None if p is None else (p[0] + delta, p[1] + delta) for p in s.ext)
        hi = [-1] + [p[0] for p in ext if p is not None]
        lo = [-1] + [p[1] for p in ext if p is not None]
        last = "C" if s.length == 1 else s.last_letter
        return SumStats(s.base_S + delta, max(hi), min(lo), "C", last, ext, s.length, s.sign)
    if sub.is_identity:
        return replace(s, min_only_at_end=None)
    profiles = {L: _image_profile(sub.image(L)) for L in "ABC"}
    eps = profiles["A"][0]
    if any(profiles[L][0] != eps * _VAL[L] for L in "ABC"):
        raise ValueError("substitution does not act on sums by a uniform sign")
    new_ext = [None, None, None]
    # block of the first letter: offset 0
    f_total, f_peak, f_trough, f_all, f_rest = profiles[s.first_letter]
    hi, lo = f_peak, f_trough
    for X in range(3):
        new_ext[X] = _merge(new_ext[X], f_rest[X])
    new_length = len(sub.image(s.first_letter))
    # remaining blocks: offset eps * s_{j-1} with s_{j-1} = s_j - val(L)
    for L in "ABC":
        pair = s.ext[_IDX[L]]
        if pair is None:
            continue
        mx, mn = pair
        v = _VAL[L]
        if eps > 0:
            o_max, o_min = mx - v, mn - v
        else:
            o_max, o_min = -mn + v, -mx + v
        _, peak, trough, per_all, _ = profiles[L]
        hi = max(hi, o_max + peak)
        lo = min(lo, o_min + trough)
        for X in range(3):
            new_ext[X] = _merge(new_ext[X], _shift(per_all[X], o_max, o_min))
    # length is only tracked for short words
    if s.length > 1:
        new_length = -1
    first = sub.image(s.first_letter)[0]
    last = sub.image(s.last_letter)[-1]
    return SumStats(eps * s.base_S, hi, lo, first, last, tuple(new_ext), new_length, s.sign)


def _check_orbit_stats(s: SumStats) -> None:
    if s.M < 0:
        raise PreconditionError("the one-step rule needs M >= 0")
    if s.length == 1 and s.first_letter == "C":
        raise PreconditionError("the one-step rule excludes the word C")


def step_stats(s: SumStats, state: RenormState) -> SumStats:
    """Statistics of ``sigma_n(w)`` given those of ``w``.

    Requires ``M(w) >= 0`` and ``w != C``; the result is exact (see
    :func:`case_formula` for the closed case rules it agrees with).
    """
    _check_orbit_stats(s)
    return apply_to_stats(s, sigma_of(state))


def case_formula(s: SumStats, state: RenormState, min_only_at_end: Optional[bool] = None) -> tuple[int, int, int]:
    """Case rule for ``(S, M, m)`` after one substitution, with ``k = floor(a1/2)``.

    * ``a1`` even with ``a3 != 1``, or ``a1 == 1``: ``(S, M + k, m)``;
    * ``a1`` even with ``a3 == 1``: ``(-S, -m + k, -M)``;
    * ``a1`` odd, ``> 1``: ``(-S, -m + k, -M)``, with ``-1`` on the maximum when
      the word ends in ``C`` and its minimum is reached only there.

    In the two flipping cases the new maximum is at least ``k`` (the first
    block alone climbs that high).  Valid for orbit-valid words with
    ``M >= 0``, ``w != C``, sign ``+1``.
    """
    _check_orbit_stats(s)
    S, M, m = s.S, s.M, s.m
    k = state.k
    if state.case_tag == ONE:
        return S, M, m
    if state.case_tag == "even_a3ne1":
        return S, M + k, m
    if state.case_tag == "even_a3eq1":
        return -S, max(-m + k, k), -M
    only_end = s.min_only_at_end if min_only_at_end is None else min_only_at_end
    if only_end is None:
        raise PreconditionError("odd case needs to know whether the minimum is reached only at the end")
    correction = 1 if (s.ends_with_C and only_end) else 0
    top = -m + k - correction
    return -S, max(top, k), -M


# --------------------------------------------------------------------------
# closed forms at renormalization times


def _renorm(theta) -> Renormalization:
    return theta if isinstance(theta, Renormalization) else Renormalization(theta)


def _sign0(r: Renormalization) -> int:
    return -1 if r.state(0).case_tag == ONE else 1


def zero_trajectory(theta, depth: int) -> list[tuple[int, int, int, int]]:
    """Running rows ``(p_n, floor(a1/2), M, |m|)`` for ``n = 0..depth``.

    ``M = 1 + sum_{i<=n, p_i=0} floor(a1(theta_i)/2)`` and
    ``m = 1 - sum_{i<=n, p_i=1} floor(a1(theta_i)/2)``.
    """
    r = _renorm(theta)
    rows = []
    M = m = 1
    for n in range(depth + 1):
        st = r.state(n)
        if st.parity == 0:
            M += st.increment
        else:
            m -= st.increment
        rows.append((st.parity, st.increment, M, abs(m)))
    return rows


def closed_form_zero(theta, n: int) -> tuple[int, int, int]:
    """``(S, M, m)`` of ``Omega'_n``, the n-th renormalized coding of ``0``.

    When ``theta_n > 1/2`` the word coincides with ``Omega'_{n+1}``, so the
    sums run one level further.  Valid for either side of 1/2 (for
    ``theta > 1/2`` the sums use the flipped sign convention).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    r = _renorm(theta)
    upto = n + 1 if r.state(n).case_tag == ONE else n
    M = m = 1
    for i in range(upto + 1):
        st = r.state(i)
        if st.parity == 0:
            M += st.increment
        else:
            m -= st.increment
    return 1, M, m


def zero_length(theta, n: int) -> int:
    """``|Omega'_n|`` from letter counts (no expansion)."""
    r = _renorm(theta)
    runs = r.omega_prime_runs(n)
    head, first_count = runs[0]
    rest = sum(r.letter_length(n, letter) * count for letter, count in runs[1:])
    rest += r.letter_length(n, head) * (first_count - 1)
    return _prime_letter_length(r, head, n) + rest


def _prime_letter_length(r: Renormalization, head: str, level: int) -> int:
    # sigma'^(level)(X) = sigma'^(level-1)(first letter) . sigma^(level-1)(rest of sigma'_(level-1)(X))
    total = 0
    for i in range(level - 1, -1, -1):
        if r.state(i).case_tag == ONE:
            head = "C"
            continue
        # every nonidentity image starts with A; count the rest from the matrix
        n_ab, n_c = r.count_matrix(i)[1 if head == "C" else 0]
        ab, c = r.lengths(i)
        total += (n_ab - 1) * ab + n_c * c
        head = "A"
    return 1 + total


def closed_form_special(theta, n: int):
    """``(S, (M_lo, M_hi), (m_lo, m_hi))`` bracketing the statistics of ``Omega_n = sigma^(n)(A)``.

    With ``T+ = sum_{i<n, p_i=0} k_i`` and ``T- = sum_{i<n, p_i=1} k_i``:
    ``M`` lies in ``[T+, 1+T+]`` and ``m`` in ``[-1-T-, 1-T-]``; ``S`` is exact.
    For ``theta > 1/2`` the bracket of the shifted word is mirrored.
    """
    r = _renorm(theta)
    if n == 0:
        v = _sign0(r)
        return v, (v, v), (v, v)
    if r.state(0).case_tag == ONE:
        # sigma_0 is the identity; flip the sign convention on the word of theta_1
        S, (Mlo, Mhi), (mlo, mhi) = _special_low(r, 1, n)
        return -S, (-mhi, -mlo), (-Mhi, -Mlo)
    return _special_low(r, 0, n)


def _special_low(r: Renormalization, start: int, n: int):
    tp = tm = 0
    flips = 0
    for i in range(start, n):
        st = r.state(i)
        rel = (st.parity - r.state(start).parity) % 2
        if rel == 0:
            tp += st.increment
        else:
            tm += st.increment
    for i in range(start + 1, n + 1):
        if r.state(i).case_tag == ONE:
            flips += 1
    S = -1 if flips % 2 else 1
    return S, (tp, 1 + tp), (-1 - tm, 1 - tm)


def special_stats(theta, n: int) -> SumStats:
    """Exact statistics of ``Omega_n`` by chaining :func:`apply_to_stats` outward from ``A``."""
    r = _renorm(theta)
    s = scan("A", _sign0(r))
    for i in range(n - 1, -1, -1):
        s = apply_to_stats(s, r.sigma(i))
    return s


def zero_stats(theta, n: int) -> SumStats:
    """Exact statistics of ``Omega'_n`` by chaining from ``omega'_n``."""
    r = _renorm(theta)
    s = scan(r.omega_prime(n), _sign0(r))
    for i in range(n - 1, -1, -1):
        s = apply_to_stats(s, r.sigma_prime(i))
    return s


def length_pair(theta, n: int) -> LengthPair:
    """``(|sigma^(n)(A)|, |sigma^(n)(C)|)`` via the product of count matrices."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    ab, c = _renorm(theta).lengths(n)
    return LengthPair(ab, c)


def ratio_limit(theta: PartialQuotients) -> Union[Fraction, float]:
    """``lim M_n(0) / |m_n(0)|`` for quadratic ``theta`` (``math.inf`` when ``m`` stays bounded)."""
    if theta.period is None:
        raise ValueError("ratio_limit needs an eventually periodic expansion")
    pre, per = g_orbit_period(theta)
    r = Renormalization(theta)
    start = pre + 1  # parities are settled one step after the preperiod
    flips = sum(r.state(i).case_tag == ONE for i in range(start, start + per))
    span = per if flips % 2 == 0 else 2 * per
    dM = sum(r.state(i).increment for i in range(start, start + span) if r.state(i).parity == 0)
    dm = sum(r.state(i).increment for i in range(start, start + span) if r.state(i).parity == 1)
    if dm == 0:
        return math.inf
    return Fraction(dM, dm)


# --------------------------------------------------------------------------
# statistics at arbitrary times


def _zero_lengths_upto(r: Renormalization, n: int) -> Optional[int]:
    k = 0
    while True:
        L = zero_length(r, k)
        if L == n:
            return k
        if L > n and r.lengths(k)[0] > n:
            return None
        k += 1


def stats_at(theta, x_selector: str, n: int, budget: int = DEFAULT_SCAN_BUDGET) -> tuple[int, int, int, int]:
    """``(S_n, M_n, m_n, rho_n)`` at the point ``0`` or ``x(theta)``.

    For ``x = 0`` and ``n = |Omega'_k|`` the closed form is used; otherwise the
    first ``n`` letters are generated and scanned, which must fit in ``budget``.
    """
    from .word import limit_prefix, zero_orbit_prefix

    if n < 1:
        raise ValueError("n must be positive")
    r = _renorm(theta)
    if x_selector not in ("zero", "special"):
        raise ValueError("x_selector must be 'zero' or 'special'")
    if x_selector == "zero" and n > 1:
        k = _zero_lengths_upto(r, n)
        if k is not None:
            S, M, m = closed_form_zero(r, k)
            return S, M, m, M - m + 1
    if n > budget:
        raise BudgetExceededError(f"n={n} exceeds the scan budget {budget}")
    make = zero_orbit_prefix if x_selector == "zero" else limit_prefix
    word = make(r.theta, n, renorm=r)
    sums = prefix_sums(word, _sign0(r))
    head = sums[: max(n - 1, 1)]
    M, m = int(head.max()), int(head.min())
    return int(sums[-1]), M, m, M - m + 1
