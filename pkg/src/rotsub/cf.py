"""Continued-fraction digits of rotation numbers and the parity-aware renormalization map.

A rotation number ``theta`` in (0, 1) is stored as its sequence of partial
quotients ``[a1, a2, a3, ...]`` (``a0 = 0`` is implicit).  Three kinds of tail
are supported:

* ``period`` -- an eventually periodic expansion, i.e. a quadratic surd;
* ``generator`` -- a named, restartable digit stream (see :func:`register_generator`);
* neither -- a finite prefix, which represents a rational number and is only
  useful for approximation work.

The renormalization map ``g`` differs from the Gauss shift in that it keeps
track of whether ``theta > 1/2``:

    a1 even        -> [a3, a4, ...]
    a1 odd, a1 > 1 -> [1, a2, a3, ...]
    a1 == 1        -> [a2 + 1, a3, ...]
"""
from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

__all__ = [
    "DigitsExhaustedError",
    "UnsupportedRepresentationError",
    "PartialQuotients",
    "RenormState",
    "EVEN_A3NE1",
    "EVEN_A3EQ1",
    "ODD_GT1",
    "ONE",
    "register_generator",
    "generator_names",
    "gauss",
    "g_step",
    "case_of",
    "even_floor",
    "renorm_trajectory",
    "iter_states",
    "convergents",
    "is_heavy",
    "g_orbit_period",
]


class DigitsExhaustedError(LookupError):
    """A partial quotient was requested beyond the digits available."""


class UnsupportedRepresentationError(ValueError):
    """The operation needs an irrational ``theta`` but got a finite expansion."""


EVEN_A3NE1 = "even_a3ne1"
EVEN_A3EQ1 = "even_a3eq1"
ODD_GT1 = "odd_gt1"
ONE = "one"


# --------------------------------------------------------------------------
# named digit generators

_GENERATORS: dict[str, Callable[..., Iterator[int]]] = {}


def register_generator(name: str):
    """Register ``func(**params) -> Iterator[int]`` as a named digit stream.

    Registered streams must be deterministic functions of their parameters so
    that a ``theta`` can be reproduced from its JSON description.
    """

    def deco(func):
        _GENERATORS[name] = func
        return func

    return deco


def generator_names() -> list[str]:
    return sorted(_GENERATORS)


@register_generator("arithmetic")
def _arithmetic(start: int = 1, step: int = 1) -> Iterator[int]:
    # [start, start+step, ...]; start=1, step=1 gives [1, 2, 3, 4, ...]
    return itertools.count(start, step)


@register_generator("extreme")
def _extreme() -> Iterator[int]:
    # [2, 2^2, 2, 2^(2^2), 2, 2^(2^(2^2)), ...]
    tower = 2
    while True:
        tower = 2**tower
        yield 2
        yield tower


@register_generator("random")
def _random_digits(seed: int = 0, low: int = 1, high: int = 4) -> Iterator[int]:
    rng = random.Random(seed)
    while True:
        yield rng.randint(low, high)


@register_generator("random_heavy")
def _random_heavy(seed: int = 0, high: int = 4) -> Iterator[int]:
    # odd-indexed digits even, even-indexed digits arbitrary
    rng = random.Random(seed)
    while True:
        yield 2 * rng.randint(1, max(1, high // 2))
        yield rng.randint(1, high)


def _freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    return value


def _thaw(value):
    if isinstance(value, tuple):
        if value and all(isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], str) for v in value):
            return {k: _thaw(v) for k, v in value}
        return [_thaw(v) for v in value]
    return value


class _StreamCache:
    """Shared, lazily filled digit list for one generator instance."""

    def __init__(self, name: str, params: tuple):
        if name not in _GENERATORS:
            raise KeyError(f"unknown digit generator {name!r}")
        self._factory = lambda: _GENERATORS[name](**_thaw(params) if params else {})
        self._it = None
        self._digits: list[int] = []
        self._lock = threading.Lock()

    def get(self, i: int) -> int:
        if i < len(self._digits):
            return self._digits[i]
        with self._lock:
            if self._it is None:
                self._it = iter(self._factory())
            while len(self._digits) <= i:
                d = next(self._it)
                if not isinstance(d, int) or d < 1:
                    raise ValueError(f"generator produced invalid digit {d!r}")
                self._digits.append(d)
        return self._digits[i]


_CACHES: dict[tuple, _StreamCache] = {}
_CACHES_LOCK = threading.Lock()


def _cache_for(name: str, params: tuple) -> _StreamCache:
    key = (name, params)
    with _CACHES_LOCK:
        cache = _CACHES.get(key)
        if cache is None:
            cache = _CACHES[key] = _StreamCache(name, params)
    return cache


# --------------------------------------------------------------------------
# PartialQuotients


def _minimal_period(period: tuple[int, ...]) -> tuple[int, ...]:
    n = len(period)
    for p in range(1, n + 1):
        if n % p == 0 and period == period[:p] * (n // p):
            return period[:p]
    return period


@dataclass(frozen=True)
class PartialQuotients:
    """Digits ``[a1, a2, ...]`` of ``theta``: a finite prefix plus an optional tail.

    ``skip`` drops the first digits of a generator tail, so shifted copies of a
    generated ``theta`` share one digit cache.  Periodic expansions are kept in
    a canonical form (minimal period, shortest prefix), which makes equality of
    two instances equivalent to equality of the numbers they represent.
    """

    prefix: tuple[int, ...] = ()
    period: Optional[tuple[int, ...]] = None
    generator: Optional[str] = None
    params: tuple = ()
    skip: int = 0
    _cache: Optional[_StreamCache] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        prefix = tuple(int(a) for a in self.prefix)
        if any(a < 1 for a in prefix):
            raise ValueError("partial quotients must be >= 1")
        if self.period is not None and self.generator is not None:
            raise ValueError("a tail is either periodic or generated, not both")
        object.__setattr__(self, "params", _freeze(self.params))
        if self.period is not None:
            period = tuple(int(a) for a in self.period)
            if not period:
                raise ValueError("period must be nonempty")
            if any(a < 1 for a in period):
                raise ValueError("partial quotients must be >= 1")
            period = _minimal_period(period)
            while prefix and prefix[-1] == period[-1]:
                prefix = prefix[:-1]
                period = period[-1:] + period[:-1]
            object.__setattr__(self, "period", period)
        if self.generator is not None:
            object.__setattr__(self, "_cache", _cache_for(self.generator, self.params))
        object.__setattr__(self, "prefix", prefix)

    # -- constructors -------------------------------------------------------

    @classmethod
    def periodic(cls, period, prefix=()) -> "PartialQuotients":
        return cls(tuple(prefix), tuple(period))

    @classmethod
    def generated(cls, name: str, prefix=(), **params) -> "PartialQuotients":
        return cls(tuple(prefix), None, name, _freeze(params))

    @classmethod
    def finite(cls, digits) -> "PartialQuotients":
        return cls(tuple(digits))

    # -- queries ------------------------------------------------------------

    @property
    def tail_kind(self) -> str:
        if self.period is not None:
            return "periodic"
        if self.generator is not None:
            return "generator"
        return "none"

    @property
    def is_rational(self) -> bool:
        return self.tail_kind == "none"

    def digit(self, i: int) -> int:
        """Partial quotient ``a_i`` (1-based)."""
        if i < 1:
            raise IndexError("partial quotients are indexed from 1")
        j = i - 1
        if j < len(self.prefix):
            return self.prefix[j]
        j -= len(self.prefix)
        if self.period is not None:
            return self.period[j % len(self.period)]
        if self._cache is not None:
            return self._cache.get(j + self.skip)
        raise DigitsExhaustedError(f"digit a_{i} unavailable: only {len(self.prefix)} digits given")

    def has_digit(self, i: int) -> bool:
        return self.tail_kind != "none" or i <= len(self.prefix)

    def digits(self, n: int) -> list[int]:
        return [self.digit(i) for i in range(1, n + 1)]

    def __iter__(self) -> Iterator[int]:
        i = 1
        while self.has_digit(i):
            yield self.digit(i)
            i += 1

    def shift(self, k: int = 1) -> "PartialQuotients":
        """Drop the first ``k`` digits."""
        if k <= len(self.prefix):
            return self._replace_prefix(self.prefix[k:])
        k -= len(self.prefix)
        if self.period is not None:
            r = k % len(self.period)
            return PartialQuotients((), self.period[r:] + self.period[:r])
        if self.generator is not None:
            return PartialQuotients((), None, self.generator, self.params, self.skip + k)
        raise DigitsExhaustedError("cannot shift past the end of a finite expansion")

    def with_head(self, head) -> "PartialQuotients":
        """Prepend digits."""
        return self._replace_prefix(tuple(head) + self.prefix)

    def _replace_prefix(self, prefix) -> "PartialQuotients":
        return PartialQuotients(tuple(prefix), self.period, self.generator, self.params, self.skip)

    def is_greater_than_half(self) -> bool:
        return self.digit(1) == 1

    def to_fraction(self, n_digits: int) -> Fraction:
        """Value of the truncation ``[a1, ..., a_n]``."""
        p, q = 0, 1
        for a in reversed(self.digits(n_digits)):
            p, q = q, a * q + p
        return Fraction(p, q)

    def __str__(self) -> str:
        head = ",".join(map(str, self.prefix))
        if self.period is not None:
            tail = "(" + ",".join(map(str, self.period)) + ")*"
        elif self.generator is not None:
            tail = f"<{self.generator}{'+' + str(self.skip) if self.skip else ''}>"
        else:
            tail = ""
        return "[" + ",".join(s for s in (head, tail) if s) + "]"

    # -- theta JSON documents ------------------------------------------------

    def to_json(self) -> dict:
        doc: dict = {"prefix": list(self.prefix)}
        if self.period is not None:
            doc["period"] = list(self.period)
        if self.generator is not None:
            gen: dict = {"name": self.generator, "params": _thaw(self.params) if self.params else {}}
            if self.skip:
                gen["skip"] = self.skip
            doc["generator"] = gen
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PartialQuotients":
        if not isinstance(doc, dict):
            raise ValueError("theta JSON must be a JSON object")
        unknown = set(doc) - {"prefix", "period", "generator"}
        if unknown:
            raise ValueError(f"unknown theta JSON keys: {sorted(unknown)}")
        if "period" in doc and "generator" in doc:
            raise ValueError("theta JSON may carry a period or a generator, not both")
        prefix = tuple(doc.get("prefix", ()))
        if "period" in doc:
            return cls(prefix, tuple(doc["period"]))
        if "generator" in doc:
            gen = doc["generator"]
            if isinstance(gen, str):
                gen = {"name": gen}
            return cls(prefix, None, gen["name"], _freeze(gen.get("params", {})), int(gen.get("skip", 0)))
        return cls(prefix)


# --------------------------------------------------------------------------
# maps on digits


def _require_irrational(theta: PartialQuotients) -> None:
    if theta.is_rational:
        raise UnsupportedRepresentationError("renormalization needs an infinite expansion")


def gauss(theta: PartialQuotients) -> PartialQuotients:
    """Gauss map ``1/theta mod 1``: shift the digits left by one."""
    _require_irrational(theta)
    return theta.shift(1)


def even_floor(n: int) -> int:
    """Largest even integer ``<= n``."""
    return n - (n % 2)


def case_of(theta: PartialQuotients) -> str:
    a1 = theta.digit(1)
    if a1 == 1:
        return ONE
    if a1 % 2:
        return ODD_GT1
    return EVEN_A3EQ1 if theta.digit(3) == 1 else EVEN_A3NE1


def g_step(theta: PartialQuotients) -> tuple[PartialQuotients, str]:
    """One step of the renormalization map, with the case that fired."""
    _require_irrational(theta)
    tag = case_of(theta)
    if tag == ONE:
        return theta.shift(2).with_head((theta.digit(2) + 1,)), tag
    if tag == ODD_GT1:
        return theta.shift(1).with_head((1,)), tag
    return theta.shift(2), tag


@dataclass(frozen=True)
class RenormState:
    """Snapshot of ``theta_n = g^n(theta)``.

    ``parity`` counts the indices ``0 <= i < n`` with ``theta_i > 1/2``, mod 2.
    ``increment`` is ``floor(a1/2)``: how far one renormalization step moves the
    running maximum or minimum of the sums.
    """

    theta: PartialQuotients
    index: int
    case_tag: str
    e_value: int
    parity: int

    @property
    def a1(self) -> int:
        return self.theta.digit(1)

    @property
    def a2(self) -> int:
        return self.theta.digit(2)

    @property
    def k(self) -> int:
        return self.a1 // 2

    @property
    def increment(self) -> int:
        return self.e_value // 2

    @property
    def is_one(self) -> bool:
        return self.case_tag == ONE


def iter_states(theta: PartialQuotients) -> Iterator[RenormState]:
    """Unbounded stream of renormalization states ``n = 0, 1, 2, ...``."""
    _require_irrational(theta)
    parity = 0
    n = 0
    while True:
        tag = case_of(theta)
        a1 = theta.digit(1)
        yield RenormState(theta, n, tag, even_floor(a1), parity)
        if tag == ONE:
            parity ^= 1
        theta, _ = g_step(theta)
        n += 1


def renorm_trajectory(theta: PartialQuotients, depth: int) -> list[RenormState]:
    """States for ``n = 0..depth``."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return list(itertools.islice(iter_states(theta), depth + 1))


def convergents(theta: PartialQuotients) -> Iterator[tuple[int, int]]:
    """Convergents ``p_i / q_i`` for ``i = 1, 2, ...``; finite for finite expansions."""
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    for a in theta:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield p, q


def is_heavy(theta: PartialQuotients, depth: int = 0) -> Optional[bool]:
    """Whether every odd-indexed partial quotient is even.

    Exact for periodic tails.  Otherwise only the first ``depth`` digits (or the
    finite prefix) are inspected and ``None`` means no violation was found.
    """
    if theta.period is not None:
        n = len(theta.prefix) + 2 * len(theta.period)
        return all(theta.digit(i) % 2 == 0 for i in range(1, n + 1, 2))
    n = depth if theta.generator is not None else len(theta.prefix)
    for i in range(1, n + 1, 2):
        if theta.digit(i) % 2:
            return False
    return None


def g_orbit_period(theta: PartialQuotients, max_steps: int = 10_000) -> Optional[tuple[int, int]]:
    """``(preperiod, period)`` of the g-orbit, or ``None`` if undecided.

    Only periodic tails can be decided; canonical digit forms make the states
    directly hashable.
    """
    _require_irrational(theta)
    if theta.period is None:
        return None
    seen: dict[PartialQuotients, int] = {}
    for n in range(max_steps):
        if theta in seen:
            return seen[theta], n - seen[theta]
        seen[theta] = n
        theta, _ = g_step(theta)
    return None
