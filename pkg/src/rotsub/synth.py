"""Rotation numbers with prescribed discrepancy behaviour, ``x(theta)``, heaviness.

Synthesized ``theta`` are digit streams produced by registered generators, so
their JSON description (generator name plus parameters) reproduces them.

The designers below work on ``g``-states rather than raw digits.  A state with
odd ``a1 = 2k+1`` adds ``k`` to the running maximum (parity 0) or subtracts it
from the running minimum (parity 1), and is followed by a ``theta > 1/2`` state
that flips the parity.  An even state ``[2k, b, ...]`` adds ``k`` without a
flip (unless the digit after ``b`` is 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .cf import ONE, PartialQuotients, even_floor, g_orbit_period, iter_states, register_generator, renorm_trajectory
from .exact import Certified, ExactPoint, Surd, to_exact
from .stats import prefix_sums
from .word import zero_orbit_prefix

__all__ = [
    "SequenceSpec",
    "GrowthTarget",
    "RatioTarget",
    "UnboundedIncrementError",
    "growth_theta",
    "ratio_theta",
    "x_of_theta",
    "special_point_side",
    "HeavinessResult",
    "heaviness_witness",
    "DigitTracker",
    "oscillator",
]


class UnboundedIncrementError(ValueError):
    """A target sequence grew by more than its declared bound."""


# --------------------------------------------------------------------------
# target sequences, described by name so they serialize


def _iroot(x: int, k: int) -> int:
    """``floor(x ** (1/k))`` for ``x >= 0`` by integer Newton iteration."""
    if x < 2:
        return x
    if k == 2:
        return math.isqrt(x)
    y = 1 << -(-x.bit_length() // k)
    while True:
        z = ((k - 1) * y + x // y ** (k - 1)) // k
        if z >= y:
            return y
        y = z


def _ceil_root_pow(n: int, num: int, den: int) -> int:
    # smallest t >= 0 with t**den >= n**num
    target = n**num
    t = _iroot(target, den)
    return t if t**den >= target else t + 1


_SEQUENCES = {
    "ceil_pow": lambda n, num=1, den=2, scale=1: scale * _ceil_root_pow(n, num, den),
    "const": lambda n, value=1: value,
    "ceil_log2": lambda n, scale=1: scale * max(1, (n - 1).bit_length()),
}


@dataclass(frozen=True)
class SequenceSpec:
    """Integer sequence ``n -> value`` picked by name: ``ceil_pow`` (``scale*ceil(n^(num/den))``), ``const``, ``ceil_log2``."""

    name: str
    params: tuple = ()

    @classmethod
    def of(cls, name: str, **params) -> "SequenceSpec":
        if name not in _SEQUENCES:
            raise KeyError(f"unknown sequence {name!r}; known: {sorted(_SEQUENCES)}")
        return cls(name, tuple(sorted(params.items())))

    def __call__(self, n: int) -> int:
        return _SEQUENCES[self.name](max(int(n), 1), **dict(self.params))

    def to_json(self) -> dict:
        return {"name": self.name, "params": dict(self.params)}

    @classmethod
    def from_json(cls, doc: dict) -> "SequenceSpec":
        return cls.of(doc["name"], **dict(doc.get("params") or {}))


@dataclass(frozen=True)
class GrowthTarget:
    """Targets ``c`` for ``M_n(0)`` and ``d`` for ``|m_n(0)|``; a bounded flag pins that side."""

    c: Optional[SequenceSpec]
    d: Optional[SequenceSpec]
    c_bounded: bool = False
    d_bounded: bool = False
    prefix: tuple = (2,)
    max_increment: int = 1

    def __post_init__(self):
        if self.c_bounded and self.d_bounded:
            raise ValueError("at least one of the targets must diverge")
        if (not self.c_bounded and self.c is None) or (not self.d_bounded and self.d is None):
            raise ValueError("a divergent side needs a target sequence")
        if any(int(a) < 1 for a in self.prefix):
            raise ValueError("prefix digits must be positive")

    def to_params(self) -> dict:
        return {
            "c": None if self.c is None else self.c.to_json(),
            "d": None if self.d is None else self.d.to_json(),
            "c_bounded": self.c_bounded,
            "d_bounded": self.d_bounded,
            "lead": [int(a) for a in self.prefix],
            "max_increment": self.max_increment,
        }


Extended = Union[Fraction, float]


def _parse_ratio(value) -> Extended:
    if isinstance(value, float) and math.isinf(value):
        return math.inf
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    return Fraction(value)


def _ratio_str(value: Extended) -> str:
    return "inf" if value == math.inf else str(value)


@dataclass(frozen=True)
class RatioTarget:
    """Desired ``liminf`` and ``limsup`` of ``M_n(0) / |m_n(0)|``."""

    r1: Extended
    r2: Extended
    prefix: tuple = (2,)

    def __post_init__(self):
        object.__setattr__(self, "r1", _parse_ratio(self.r1))
        object.__setattr__(self, "r2", _parse_ratio(self.r2))
        if not (0 <= self.r1 <= self.r2):
            raise ValueError("need 0 <= r1 <= r2 <= inf")
        if any(int(a) < 1 for a in self.prefix):
            raise ValueError("prefix digits must be positive")


# --------------------------------------------------------------------------
# digit-level model of the g-orbit


@dataclass
class DigitTracker:
    """Consumes digits one at a time and follows the ``g``-states they fix.

    ``M`` and ``m`` are the running sums ``1 + sum k`` and ``1 - sum k`` split by
    parity; ``lens`` is ``(|sigma^(n)(A)|, |sigma^(n)(C)|)`` over the states
    whose substitution is already determined.
    """

    parity: int = 0
    M: int = 1
    m: int = 1
    carry: bool = False  # next digit is increased by one (after a theta > 1/2 state)
    open_even: Optional[list] = None  # [a1, a2 or None] of an even state awaiting digits
    lens: tuple = (1, 1)
    states: int = 0
    digits: list = field(default_factory=list)

    @property
    def needs_a2(self) -> bool:
        return self.open_even is not None and self.open_even[1] is None

    @property
    def fresh(self) -> bool:
        return not self.carry and self.open_even is None

    def _credit(self, k: int) -> None:
        if self.parity == 0:
            self.M += k
        else:
            self.m -= k

    def _apply(self, rows) -> None:
        (ra, rc), (sa, sc) = rows
        ab, c = self.lens
        self.lens = (ra * ab + rc * c, sa * ab + sc * c)
        self.states += 1

    def _one_state(self) -> None:
        self.states += 1
        self.parity ^= 1
        self.carry = True

    def feed(self, digit: int) -> None:
        self.digits.append(digit)
        if self.open_even is not None:
            a1, a2 = self.open_even
            if a2 is None:
                self.open_even[1] = digit
                return
            # digit is a3: it fixes the case of the open state and starts the next one
            row_a, row_c = ((a1 - 1) * a2 + 1, a2), ((a1 - 1) * a2 + a1, a2 + 1)
            self._apply((row_a, row_c) if digit != 1 else (row_c, row_a))
            self.open_even = None
        if self.carry:
            digit += 1
            self.carry = False
        if digit == 1:
            self._one_state()
        elif digit % 2:
            self._credit(digit // 2)
            self._apply(((digit - 1, 1), (1, 0)))
            self._one_state()
        else:
            self._credit(digit // 2)
            self.open_even = [digit, None]

    def head_digit(self, a1: int) -> int:
        """Digit to emit so that the next state has first partial quotient ``a1``."""
        if self.needs_a2:
            raise RuntimeError("an even state still needs its second digit")
        d = a1 - 1 if self.carry else a1
        if d < 1:
            raise ValueError(f"cannot start a state with a1={a1} here")
        return d

    @property
    def value(self) -> int:
        """Current quantity being steered: ``M`` at parity 0, ``-m`` at parity 1."""
        return self.M if self.parity == 0 else -self.m


def _emit(tr: DigitTracker, digits) -> Iterator[int]:
    for d in digits:
        tr.feed(d)
        yield d


def _settle(tr: DigitTracker, parity: int) -> Iterator[int]:
    """Close any open even state and reach a state boundary with the given parity."""
    if tr.needs_a2:
        yield from _emit(tr, [2])
    if tr.parity != parity:
        # an odd state (or a single 1) flips the parity
        yield from _emit(tr, [tr.head_digit(3 if tr.carry else 1)])


# --------------------------------------------------------------------------
# growth synthesis


def _check_increment(seq: SequenceSpec, n: int, bound: int) -> None:
    if seq(n + 1) - seq(n) > bound:
        raise UnboundedIncrementError(f"{seq.name} grows by more than {bound} at n={n}")


@register_generator("growth")
def _growth_digits(c=None, d=None, c_bounded=False, d_bounded=False, lead=(2,), max_increment=1) -> Iterator[int]:
    cs = None if c is None else SequenceSpec.from_json(c)
    ds = None if d is None else SequenceSpec.from_json(d)
    tr = DigitTracker()
    yield from _emit(tr, [int(a) for a in lead])
    if c_bounded or d_bounded:
        lock = 1 if c_bounded else 0
        target = ds if c_bounded else cs
        yield from _settle(tr, lock)
        yield from _heavy_phase(tr, target, max_increment)
        return
    yield from _settle(tr, 0)
    while True:
        target = cs if tr.parity == 0 else ds
        yield from _alternating_step(tr, target, max_increment)


def _time(tr: DigitTracker) -> int:
    return tr.lens[0]


def _minimal_k(ok) -> int:
    """Least ``k >= 1`` with ``ok(k)``, assuming ``ok`` is monotone (galloping, then bisection)."""
    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _alternating_step(tr: DigitTracker, target: SequenceSpec, bound: int) -> Iterator[int]:
    if tr.needs_a2:
        yield from _emit(tr, [2])
    A = _time(tr)
    _check_increment(target, A, bound)
    val = tr.value
    if val < target(A):
        # raise the steered extreme by k, reached after about k blocks
        k = _minimal_k(lambda k: val + k >= target((k + 1) * A))
        yield from _emit(tr, [tr.head_digit(2 * k + 1)])
    else:
        # [2, k, 1, ...]: lengthen by about 2k blocks while adding only one
        k = _minimal_k(lambda k: val + 1 <= target((2 * k + 1) * A))
        yield from _emit(tr, [tr.head_digit(2), k, 1])


def _heavy_phase(tr: DigitTracker, target: SequenceSpec, bound: int) -> Iterator[int]:
    # even states [2k, b] with next digit >= 2 keep the parity fixed
    while True:
        A = _time(tr)
        _check_increment(target, A, bound)
        val = tr.value
        if val < target(A):
            k = _minimal_k(lambda k: val + k >= target((k + 1) * A))
            b = 1
        else:
            k = 1
            b = _minimal_k(lambda b: val + 1 <= target((2 * b + 1) * A))
        yield from _emit(tr, [tr.head_digit(2 * k), b])


def growth_theta(target: GrowthTarget) -> PartialQuotients:
    """``theta`` whose ``M_n(0)`` and ``|m_n(0)|`` track the targets, starting with ``target.prefix``."""
    return PartialQuotients.generated("growth", **target.to_params())


# --------------------------------------------------------------------------
# ratio synthesis


def _best_step(c: int, d: int, goal: Extended, lo: Extended, hi: Extended, bound: int, slack: Fraction) -> tuple[int, int]:
    """Increments ``(dc, dd)`` in ``[1, bound]^2`` moving ``c/d`` closest to ``goal``.

    The new ratio must stay in ``[lo, hi]``; the intermediate ratio
    ``(c+dc)/d`` (the maximum moves before the minimum) is kept below
    ``hi * (1 + slack)`` whenever some increment allows it.
    """
    best = None
    for dc in range(1, bound + 1):
        mid = Fraction(c + dc, d)
        over = 0 if hi == math.inf else max(Fraction(0), mid - hi * (1 + slack))
        for dd in range(1, bound + 1):
            r = Fraction(c + dc, d + dd)
            if r < lo or (hi != math.inf and r > hi):
                continue
            score = -r if goal == math.inf else abs(r - goal)
            key = (over, score, dd, dc)
            if best is None or key < best[0]:
                best = (key, (dc, dd))
    if best is None:
        raise RuntimeError("no admissible increment; bound too small for the target ratios")
    return best[1]


def oscillator(r1: Extended, r2: Extended, c1: int, d1: int, bound: int) -> Iterator[tuple[int, int]]:
    """Strictly increasing ``(c_j, d_j)`` with ``c/d`` swinging between ``r1`` and ``r2``.

    Phase ``i`` heads for one end and stops once within a relative
    ``1/(10(i+1))`` of it, so both ends are accumulation points and ``c/d``
    stays in ``[r1, r2]`` once it has entered.  Steps toward a finite end have
    increments in ``[1, bound]``.  Bounded increments cannot push ``c/d`` past
    ``bound`` or below ``1/bound``, so a phase heading for ``inf`` (or ``0``) is
    a single step ``(+L, +1)`` (or ``(+1, +L)``) reaching ``r1 + 10(i+1)`` (or
    ``1/(10(i+1))``); the digit emitter spreads it over heavy blocks.
    """
    c, d = c1, d1
    yield c, d
    phase = 0
    while True:
        goal = r1 if phase % 2 else r2
        tol = Fraction(1, 10 * (phase + 1))
        if goal == math.inf:
            d += 1
            c = max(c + 1, math.ceil((r1 + 10 * (phase + 1)) * d))
            yield c, d
            phase += 1
            continue
        if goal == 0:
            c += 1
            d = max(d + 1, math.ceil(c / tol))
            yield c, d
            phase += 1
            continue
        while True:
            r = Fraction(c, d)
            lo = r1 if r >= r1 else 0
            hi = r2 if (r2 == math.inf or r <= r2) else math.inf
            dc, dd = _best_step(c, d, goal, lo, hi, bound, tol)
            c, d = c + dc, d + dd
            yield c, d
            r = Fraction(c, d)
            if goal == math.inf:
                done = r >= r1 + 10 * (phase + 1)
            elif goal == 0:
                done = r <= tol
            else:
                done = abs(r - goal) <= goal * tol
            if done:
                break
        if r1 != r2:
            phase += 1


def _ratio_bound(r1: Extended, r2: Extended) -> int:
    parts = [2]
    for r in (r1, r2):
        if r not in (0, math.inf):
            parts += [r.numerator, r.denominator]
    return 4 * max(parts)


@register_generator("ratio")
def _ratio_digits(r1="1", r2="1", lead=(2,), scale=32) -> Iterator[int]:
    r1, r2 = _parse_ratio(r1), _parse_ratio(r2)
    tr = DigitTracker()
    yield from _emit(tr, [int(a) for a in lead])
    if r1 == r2 == math.inf or r1 == r2 == 0:
        # heavy tail: one side is frozen, the other grows by one per state
        yield from _settle(tr, 0 if r1 == math.inf else 1)
        while True:
            yield from _emit(tr, [tr.head_digit(2), 2])
    yield from _settle(tr, 0)
    M, mag = tr.M, -tr.m
    bound = _ratio_bound(r1, r2)
    # first targets: c1 > M, d1 > |m|, ratio inside [r1, r2] when possible
    d1 = max(mag + 1, scale)
    start = r1 if r1 != 0 else (r2 if r2 != math.inf else Fraction(1))
    if start == math.inf:
        start = Fraction(1)
    c1 = max(M + 1, math.ceil(start * d1))
    for c, d in oscillator(r1, r2, c1, d1, bound):
        yield from _climb(tr, c - tr.M, bound)
        yield from _climb(tr, d + tr.m, bound)


def _climb(tr: DigitTracker, step: int, bound: int) -> Iterator[int]:
    """Add ``step`` to the current side and flip the parity.

    A bounded step is one odd state ``2*step + 1``.  A longer one first runs
    ``step - 1`` heavy blocks ``[2, 2]`` (each adds 1 and keeps the parity),
    then closes with the odd state ``3``.
    """
    if step > bound:
        for _ in range(step - 1):
            yield from _emit(tr, [tr.head_digit(2), 2])
        step = 1
    yield from _emit(tr, [tr.head_digit(2 * step + 1)])


def ratio_theta(target: RatioTarget, scale: int = 32) -> PartialQuotients:
    """``theta`` with ``liminf / limsup`` of ``M_n(0)/|m_n(0)|`` equal to ``r1 / r2``.

    After the prefix, digits follow ``[2(c1-M)+1, 2(d1-|m|), 2(c2-c1), 2(d2-d1), ...]``
    with ``(c_j, d_j)`` from :func:`oscillator`; ``scale`` is the least ``d1``.
    """
    return PartialQuotients.generated(
        "ratio",
        r1=_ratio_str(target.r1),
        r2=_ratio_str(target.r2),
        lead=[int(a) for a in target.prefix],
        scale=scale,
    )


# --------------------------------------------------------------------------
# x(theta)


def _affine_fixed_point(states, exact):
    """Compose ``y -> delta*y`` / ``y -> 1-y`` maps; return ``(a, b)`` of ``y -> a + b*y``."""
    a, b = 0, 1
    for st in states:
        if st.case_tag == ONE:
            a, b = a + b, -b
        else:
            b = b * (1 - even_floor(st.a1) * exact(st.theta))
    return a, b


def x_of_theta(theta: PartialQuotients, tolerance: Fraction = Fraction(1, 10**12)) -> ExactPoint:
    """The point whose coding is the substitution limit word.

    Exact (a :class:`Surd`) when the ``g``-orbit is periodic; otherwise the
    nested pull-back intervals are shrunk below ``tolerance`` and the midpoint
    is returned as a :class:`Certified` value.  The result may equal ``1``: that
    is the left limit ``0-``, whose coding starts with the letter just below 1.
    """
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    period = g_orbit_period(theta) if theta.period is not None else None
    if period is not None:
        pre, per = period
        states = renorm_trajectory(theta, pre + per)
        a0, b0 = _affine_fixed_point(states[:pre], to_exact)
        a1, b1 = _affine_fixed_point(states[pre : pre + per], to_exact)
        y = Surd(0) + a1 if b1 == 1 else (Surd(0) + a1) / (1 - b1)
        return Surd(0) + a0 + b0 * y
    return _x_certified(theta, tolerance)


def special_point_side(theta: PartialQuotients) -> int:
    """``1`` if the limit word codes ``x(theta)`` itself, ``-1`` if it codes ``x(theta)-``.

    The two differ only when the nested intervals shrink onto an endpoint:
    the fixed point of the periodic part sits at 0 or 1 of the induced
    interval, and the point is approached from inside.
    """
    period = g_orbit_period(theta) if theta.period is not None else None
    if period is None:
        return 1
    pre, per = period
    states = renorm_trajectory(theta, pre + per)
    _, b0 = _affine_fixed_point(states[:pre], to_exact)
    a1, b1 = _affine_fixed_point(states[pre : pre + per], to_exact)
    y = Surd(0) + a1 if b1 == 1 else (Surd(0) + a1) / (1 - b1)
    if y == 0:
        inward = 1
    elif y == 1:
        inward = -1
    else:
        return 1
    return inward if (Surd(0) + b0) > 0 else -inward


def _rational_theta(theta: PartialQuotients, err: Fraction) -> Fraction:
    n = 8
    while True:
        approx = theta.to_fraction(n)
        if Fraction(1, approx.denominator**2) < err:
            return approx
        n *= 2


def _x_certified(theta: PartialQuotients, tolerance: Fraction) -> Certified:
    err = tolerance / 1000
    a, b = Fraction(0), Fraction(1)
    depth = 0
    slack = Fraction(0)
    states = iter_states(theta)
    while abs(b) + slack > tolerance:
        depth += 1
        st = next(states)
        if st.case_tag == ONE:
            a, b = a + b, -b
        else:
            th = _rational_theta(st.theta, err / depth**2)
            b = b * (1 - even_floor(st.a1) * th)
            slack += even_floor(st.a1) * err / depth**2
    ends = sorted([a, a + b])
    mid = (ends[0] + ends[1]) / 2
    return Certified(mid, abs(b) / 2 + slack, None, depth)


# --------------------------------------------------------------------------
# heaviness


@dataclass(frozen=True)
class HeavinessResult:
    heavy_consistent: bool
    n: Optional[int] = None
    S_n: Optional[int] = None

    def to_json(self) -> dict:
        if self.heavy_consistent:
            return {"result": "heavy_consistent"}
        return {"result": "counterexample", "n": self.n, "S_n": self.S_n}


def heaviness_witness(theta: PartialQuotients, N: int) -> HeavinessResult:
    """Check ``S_n(theta) >= 0`` for ``n <= N`` using ``S_n(theta) = S_{n+1}(0) - 1``."""
    if N < 1:
        raise ValueError("N must be positive")
    sign = -1 if theta.is_greater_than_half() else 1
    word = zero_orbit_prefix(theta, N + 1)
    at_theta = prefix_sums(word, sign)[1:] - 1  # S_1(theta) .. S_N(theta)
    bad = (at_theta < 0).nonzero()[0]
    if bad.size:
        i = int(bad[0])
        return HeavinessResult(False, i + 1, int(at_theta[i]))
    return HeavinessResult(True)
