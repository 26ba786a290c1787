"""Ground truth: orbit codings and discrepancy sums by direct rotation.

Nothing here uses substitutions.  Quadratic ``theta`` is handled in exact
integer arithmetic (``floor(v*sqrt(d))`` via ``isqrt``); other ``theta`` use a
rational approximation whose error bound is checked against every letter
decision and refined until all decisions are certain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cf import PartialQuotients
from .exact import Certified, ExactPoint, Surd, as_point, to_exact

__all__ = [
    "CONVENTION",
    "UndecidableComparisonError",
    "CodingResult",
    "SumsResult",
    "code_orbit",
    "sums",
    "series_stats",
    "compare_upto_errors",
    "denjoy_bound_check",
    "VARIATION",
]

CONVENTION = "right-closed: each partition endpoint belongs to the interval on its right"

# total variation of f = chi[0,1/2) - chi[1/2,1): two jumps of size 2
VARIATION = 4


class UndecidableComparisonError(ArithmeticError):
    """Refinement limit reached before a letter could be certified."""


@dataclass
class CodingResult:
    word: str
    endpoint_hits: list[tuple[int, str]] = field(default_factory=list)
    convention: str = CONVENTION

    def sidecar(self) -> dict:
        return {
            "convention": self.convention,
            "endpoint_hits": [{"index": i, "endpoint": e, "side": "right"} for i, e in self.endpoint_hits],
        }


@dataclass
class SumsResult:
    series: np.ndarray  # S_1..S_n
    M: int
    m: int

    @property
    def rho(self) -> int:
        return self.M - self.m + 1


def _exact_theta(theta) -> ExactPoint:
    if isinstance(theta, PartialQuotients):
        return to_exact(theta)
    return as_point(theta)


def _common_form(x: Surd, th: Surd):
    """Integers ``(U, V, P, Q, D, d)`` with ``x = (U+V√d)/D``, ``theta = (P+Q√d)/D``."""
    d = th.d if th.b else x.d
    if x.b and th.b and x.d != th.d:
        raise ValueError("x and theta lie in different quadratic fields")
    D = x.c * th.c // math.gcd(x.c, th.c)
    return x.a * (D // x.c), x.b * (D // x.c), th.a * (D // th.c), th.b * (D // th.c), D, d


def _code_quadratic(x: Surd, th: Surd, n: int, side: int = 1) -> CodingResult:
    U, V, P, Q, D, d = _common_form(x, th)
    if Q == 0:
        raise ValueError("theta must be irrational")
    low = th < Fraction(1, 2)
    out = bytearray(n)
    hits: list[tuple[int, str]] = []
    iA, iB, iC = ord("A"), ord("B"), ord("C")
    isqrt = math.isqrt

    def right_floors(u, v):
        if v == 0:
            return u // D, (2 * u) // D
        if v > 0:
            r1 = isqrt(v * v * d)
            r2 = isqrt(4 * v * v * d)
        else:
            r1 = -isqrt(v * v * d) - 1
            r2 = -isqrt(4 * v * v * d) - 1
        return (u + r1) // D, (2 * u + r2) // D

    def left_floors(u, v):
        # floor of t- is ceil(t) - 1 = -floor(-t) - 1
        f, h = right_floors(-u, -v)
        return -f - 1, -h - 1

    floors = right_floors if side > 0 else left_floors

    u, v = U, V
    f0, h0 = floors(u, v)
    for j in range(n):
        un, vn = u + P, v + Q
        f1, h1 = floors(un, vn)
        upper = h0 - 2 * f0  # 0 if frac < 1/2 else 1
        jump = f1 - f0  # 1 iff frac + theta >= 1
        if v == 0 and (2 * u) % D == 0:
            hits.append((j, "0" if u % D == 0 else "1/2"))
        if vn == 0 and un % D == 0:
            hits.append((j, "1-theta"))
        if low:
            out[j] = iA if not upper else (iC if jump else iB)
        else:
            out[j] = iA if upper else (iB if jump else iC)
        u, v, f0, h0 = un, vn, f1, h1
    return CodingResult(out.decode("ascii"), hits)


def _code_certified(x: Fraction, th: Certified, n: int, side: int = 1, max_refine: int = 40) -> CodingResult:
    u, w = x.numerator, x.denominator
    for _ in range(max_refine):
        result = _try_certified(u, w, th, n, side)
        if result is not None:
            return result
        if th.refine is None:
            break
        th = th.tighter()
    raise UndecidableComparisonError("could not certify every letter of the orbit")


def _try_certified(u: int, w: int, th: Certified, n: int, side: int = 1) -> Optional[CodingResult]:
    p, q = th.approx.numerator, th.approx.denominator
    eps = th.eps
    # v_j = (u q + j p w) / (w q); error of v_j is at most j * eps
    D = w * q
    step = p * w
    R = (u * q) % D
    if side < 0 and R == 0:
        R = D  # residues of a left limit live in (0, D]
    low = th.approx < Fraction(1, 2)
    if (th.approx - eps) < Fraction(1, 2) < (th.approx + eps) and not th.rational:
        return None
    en, ed = eps.numerator, eps.denominator
    out = bytearray(n)
    hits: list[tuple[int, str]] = []
    iA, iB, iC = ord("A"), ord("B"), ord("C")
    for j in range(n + 1):
        # margin check: distance of R/D from {0, 1/2, 1} must exceed j*eps (j=0 is exact)
        if j:
            tol = j * en * D  # compare X/D > j*en/ed  <=>  X*ed > j*en*D
            if R * ed <= tol or (D - R) * ed <= tol or abs(2 * R - D) * ed <= 2 * tol:
                return None
        elif R % D == 0 or 2 * R == D:
            hits.append((0, "0" if R % D == 0 else "1/2"))
        if j == n:
            break
        if side > 0:
            upper = 2 * R >= D
            nxt = R + step
            jump = nxt >= D
        else:
            upper = 2 * R > D
            nxt = R + step
            jump = nxt > D
        if jump:
            nxt -= D
        if low:
            out[j] = iA if not upper else (iC if jump else iB)
        else:
            out[j] = iA if upper else (iB if jump else iC)
        R = nxt
    return CodingResult(out.decode("ascii"), hits)


def code_orbit(x, theta, n: int, side: int = 1) -> CodingResult:
    """Letters of ``x, x+theta, ..., x+(n-1)theta mod 1`` against the partition.

    ``theta < 1/2``: ``A=[0,1/2)``, ``B=[1/2,1-theta)``, ``C=[1-theta,1)``;
    ``theta > 1/2``: ``C=[0,1-theta)``, ``B=[1-theta,1/2)``, ``A=[1/2,1)``.
    ``side=-1`` codes the left limit ``x-`` instead (``x`` may then be 1).
    """
    if side not in (1, -1):
        raise ValueError("side must be 1 or -1")
    if n < 1:
        raise ValueError("n must be positive")
    th = _exact_theta(theta)
    x = as_point(x)
    if isinstance(x, Certified):
        raise ValueError("starting point must be exact")
    if not (0 <= x < 1 if side > 0 else 0 < x <= 1):
        raise ValueError("x must lie in [0, 1)" if side > 0 else "a left limit needs x in (0, 1]")
    if isinstance(th, Surd):
        if th.is_rational:
            raise ValueError("theta must be irrational")
        return _code_quadratic(x, th, n, side)
    if th.rational:
        raise ValueError("theta must be irrational")
    if not x.is_rational:
        raise ValueError("quadratic x needs a quadratic theta")
    return _code_certified(x.rational, th, n, side)


def _sign_for(theta) -> int:
    th = _exact_theta(theta)
    value = th.approx if isinstance(th, Certified) else th
    return 1 if value < Fraction(1, 2) else -1


def series_stats(series: np.ndarray, n: Optional[int] = None) -> tuple[int, int]:
    """``(M_n, m_n)`` over ``S_1..S_{n-1}``; ``n = 1`` uses ``S_1``."""
    n = len(series) + 1 if n is None else n
    upto = max(n - 1, 1)
    head = series[:upto]
    return int(head.max()), int(head.min())


def sums(x, theta, n: int, side: int = 1) -> SumsResult:
    """Discrepancy sums ``S_1..S_n`` with ``M_n``, ``m_n`` over ``i = 1..n-1``."""
    word = code_orbit(x, theta, n, side).word
    values = np.frombuffer(word.encode("ascii"), dtype=np.uint8)
    steps = np.where(values == ord("A"), 1, -1).astype(np.int64) * _sign_for(theta)
    series = np.cumsum(steps)
    M, m = series_stats(series, n)
    return SumsResult(series, M, m)


def compare_upto_errors(w1: str, w2: str, budget: Optional[int] = None) -> tuple[int, list[int]]:
    """Hamming mismatches between equal-length words, stopping once ``budget`` is exceeded."""
    if len(w1) != len(w2):
        raise ValueError("words must have equal length")
    a = np.frombuffer(w1.encode("ascii"), dtype=np.uint8)
    b = np.frombuffer(w2.encode("ascii"), dtype=np.uint8)
    pos = np.flatnonzero(a != b)
    if budget is not None and len(pos) > budget:
        pos = pos[: budget + 1]
    return len(pos), [int(i) for i in pos]


def _rho(x, theta, n: int) -> int:
    res = sums(x, theta, n)
    return res.M - res.m


def denjoy_bound_check(x, y, theta: PartialQuotients, N: int) -> bool:
    """``rho_N(y) <= rho_{q_{n+2}}(x) + a_{n+1} * V(f)`` where ``q_n <= N < q_{n+1}``.

    Ranges here are ``M - m`` (no ``+1``), matching the real-valued setting.
    """
    q = [1, theta.digit(1)]  # q_0, q_1
    while q[-1] <= N or len(q) < 3:
        q.append(theta.digit(len(q)) * q[-1] + q[-2])
    n = max(i for i, qi in enumerate(q) if qi <= N)
    while len(q) <= n + 2:
        q.append(theta.digit(len(q)) * q[-1] + q[-2])
    a_next = theta.digit(n + 1)
    return _rho(y, theta, N) <= _rho(x, theta, q[n + 2]) + a_next * VARIATION
