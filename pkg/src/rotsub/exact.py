"""Exact points of the circle: rationals, quadratic surds, certified approximations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .cf import PartialQuotients, convergents

__all__ = ["Surd", "Certified", "ExactPoint", "to_exact", "as_point", "squarefree_part"]


def squarefree_part(d: int) -> tuple[int, int]:
    """Write ``d = s*s*r`` with ``r`` squarefree; return ``(s, r)``."""
    if d <= 0:
        raise ValueError("radicand must be positive")
    s, r = 1, d
    f = 2
    while f * f <= r:
        while r % (f * f) == 0:
            r //= f * f
            s *= f
        f += 1
    return s, r


def _floor_sqrt_times(v: int, d: int) -> int:
    """``floor(v * sqrt(d))`` for nonsquare ``d``."""
    if v >= 0:
        return math.isqrt(v * v * d)
    return -math.isqrt(v * v * d) - 1


class Surd:
    """The number ``(a + b*sqrt(d)) / c`` with integers, ``c > 0``, ``d`` squarefree.

    Rationals are surds with ``b == 0`` (and ``d == 1``).  Arithmetic between
    surds is only defined inside a single field ``Q(sqrt(d))``.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int = 0, c: int = 1, d: int = 1):
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if d < 1:
            raise ValueError("radicand must be positive")
        s, d = squarefree_part(d)
        b *= s
        if d == 1:
            a, b = a + b, 0
        if b == 0:
            d = 1
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def from_parts(cls, r, s=0, d: int = 1) -> "Surd":
        """``r + s*sqrt(d)`` with rational ``r`` and ``s``."""
        r, s = Fraction(r), Fraction(s)
        c = r.denominator * s.denominator // math.gcd(r.denominator, s.denominator)
        return cls(int(r * c), int(s * c), c, d)

    @property
    def rational(self) -> Fraction:
        return Fraction(self.a, self.c)

    @property
    def irrational(self) -> Fraction:
        return Fraction(self.b, self.c)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _coerce(self, other) -> Optional["Surd"]:
        if isinstance(other, Surd):
            if self.d != other.d and self.b and other.b:
                raise ValueError("surds from different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return Surd(other.numerator, 0, other.denominator)
        return None

    def _field(self, other: "Surd") -> int:
        return self.d if self.b else other.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Surd(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._field(o)
        return Surd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, self.c * o.c, d)

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.c, self.d)

    def reciprocal(self) -> "Surd":
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return Surd(self.a * self.c, -self.b * self.c, norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with b^2 d
        if a > 0:
            return 1 if a * a > b * b * self.d else -1
        return 1 if b * b * self.d > a * a else -1

    def __floor__(self) -> int:
        return (self.a + _floor_sqrt_times(self.b, self.d)) // self.c if self.b else self.a // self.c

    def frac(self) -> "Surd":
        return self - math.floor(self)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        return (self - o).sign()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a, self.b, self.c) == (o.a, o.b, o.c) and (self.b == 0 or self.d == o.d)

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def __repr__(self):
        if self.b == 0:
            return f"Surd({self.a}/{self.c})" if self.c != 1 else f"Surd({self.a})"
        return f"Surd(({self.a} + {self.b}*sqrt({self.d}))/{self.c})"

    def __str__(self):
        if self.b == 0:
            return str(Fraction(self.a, self.c))
        return f"({self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*sqrt({self.d}))/{self.c}"


@dataclass(frozen=True)
class Certified:
    """A real number known to lie within ``eps`` of the rational ``approx``.

    ``refine(k)`` returns a tighter ``Certified`` (larger ``k`` means tighter);
    it is ``None`` for values that cannot be refined.
    """

    approx: Fraction
    eps: Fraction
    refine: Optional[Callable[[int], "Certified"]] = None
    level: int = 0
    rational: bool = False

    def tighter(self) -> "Certified":
        if self.refine is None:
            raise ValueError("this approximation cannot be refined")
        return self.refine(self.level + 1)

    def __float__(self):
        return float(self.approx)


ExactPoint = Union[Surd, Certified]


def as_point(value) -> ExactPoint:
    """Coerce ints, Fractions and strings like ``"1/3"`` into points."""
    if isinstance(value, (Surd, Certified)):
        return value
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, (int, Fraction)):
        value = Fraction(value)
        return Surd(value.numerator, 0, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact point")


def _mobius_apply(digits, y: Surd) -> Surd:
    # [d1, ..., dk + y]
    for a in reversed(digits):
        y = (y + a).reciprocal()
    return y


def _certified_from_digits(theta: PartialQuotients, level: int) -> Certified:
    # convergent index grows with the refinement level
    n = 8 * (level + 1)
    convs = []
    for i, (p, q) in enumerate(convergents(theta)):
        convs.append((p, q))
        if i + 1 >= n + 1:
            break
    if len(convs) <= n:
        p, q = convs[-1]
        return Certified(Fraction(p, q), Fraction(0), None, level, rational=True)
    (p, q), (_, q_next) = convs[n - 1], convs[n]
    return Certified(Fraction(p, q), Fraction(1, q * q_next), lambda k: _certified_from_digits(theta, k), level)


def to_exact(theta: PartialQuotients) -> ExactPoint:
    """Exact value of ``theta``: a surd for periodic tails, otherwise certified."""
    if theta.period is not None:
        period = theta.period
        # purely periodic y satisfies y = [period..., y]: r y^2 + (s - p) y - q = 0
        p, q, r, s = 1, 0, 0, 1
        for a in period:
            # multiply by [[0, 1], [1, a]]
            p, q, r, s = q, p + a * q, s, r + a * s
        # y = (p y + q) / (r y + s)
        disc = (s - p) ** 2 + 4 * r * q
        y = Surd(-(s - p), 1, 2 * r, disc)
        return _mobius_apply(theta.prefix, y)
    return _certified_from_digits(theta, 0)
