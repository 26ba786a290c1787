"""Words over {A, B, C}, the renormalization substitutions, and orbit codings built from them.

Words are plain ``str`` objects.  Infinite limit words are produced either as
finite prefixes (:func:`limit_prefix`, :func:`zero_orbit_prefix`) or lazily
through :class:`PrefixStream`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from .cf import (
    EVEN_A3NE1,
    ODD_GT1,
    ONE,
    PartialQuotients,
    RenormState,
    iter_states,
)
from .exact import Surd, as_point, to_exact

__all__ = [
    "LETTERS",
    "FORBIDDEN_FACTORS",
    "Substitution",
    "IDENTITY",
    "PSI",
    "PointNotRepresentableError",
    "sigma_of",
    "sigma_prime_of",
    "psi",
    "omega_prime",
    "omega_prime_runs",
    "image_pieces",
    "capped_image",
    "iterate",
    "is_orbit_valid",
    "Renormalization",
    "limit_prefix",
    "zero_orbit_prefix",
    "PrefixStream",
    "ArbitraryEncoding",
    "encode_arbitrary",
    "arbitrary_prefix",
]

LETTERS = "ABC"
FORBIDDEN_FACTORS = ("CC", "CB", "BA")


class PointNotRepresentableError(ValueError):
    """The starting point cannot be tracked exactly through the induced systems."""


@dataclass(frozen=True)
class Substitution:
    """Letter-to-word homomorphism on {A, B, C}."""

    a: str
    b: str
    c: str

    def __post_init__(self):
        for img in (self.a, self.b, self.c):
            if not img or set(img) - set(LETTERS):
                raise ValueError(f"bad substitution image {img!r}")

    @property
    def images(self) -> dict[str, str]:
        return {"A": self.a, "B": self.b, "C": self.c}

    @property
    def is_identity(self) -> bool:
        return (self.a, self.b, self.c) == ("A", "B", "C")

    def image(self, letter: str) -> str:
        return self.images[letter]

    def __call__(self, word: str) -> str:
        if self.is_identity:
            return word
        return word.translate(_table(self))

    def counts(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Row ``(#AB, #C)`` for the images of A (same as B) and of C."""
        return (
            (len(self.a) - self.a.count("C"), self.a.count("C")),
            (len(self.c) - self.c.count("C"), self.c.count("C")),
        )


def _table(s: Substitution) -> dict:
    return {ord("A"): s.a, ord("B"): s.b, ord("C"): s.c}


IDENTITY = Substitution("A", "B", "C")


class _Psi:
    """Replace the first letter by C; identity elsewhere."""

    is_identity = False

    def __call__(self, word: str) -> str:
        return psi(word)

    def __repr__(self):
        return "PSI"


PSI = _Psi()


def psi(word: str) -> str:
    if not word:
        raise ValueError("psi is undefined on the empty word")
    return "C" + word[1:]


def _blocks(k: int):
    long_a = "A" * (k + 1) + "B" * (k - 1) + "C"
    bal = "A" * k + "B" * k + "C"
    short = "A" * k + "B" * (k - 1) + "C"
    return long_a, bal, short


def _block_runs(k: int):
    long_a = [("A", k + 1), ("B", k - 1), ("C", 1)]
    bal = [("A", k), ("B", k), ("C", 1)]
    short = [("A", k), ("B", k - 1), ("C", 1)]
    return long_a, bal, short


def image_pieces(a1: int, a2: Optional[int], a3: Optional[int], letter: str) -> list:
    """Image of ``letter`` as ``[(runs, repeat), ...]`` without building the string."""
    if a1 == 1:
        return [([(letter, 1)], 1)]
    long_a, bal, short = _block_runs(a1 // 2)
    if a1 % 2:
        return [({"A": bal, "B": long_a, "C": [("A", 1)]}[letter], 1)]
    if a3 != 1:
        head = {"A": long_a, "B": bal, "C": bal}[letter]
        reps = a2 if letter == "C" else a2 - 1
    else:
        head = {"A": bal, "B": long_a, "C": long_a}[letter]
        reps = a2 - 1 if letter == "C" else a2
    return [(head, 1), (short, reps)]


def capped_image(a1: int, a2: Optional[int], a3: Optional[int], letter: str, cap: int) -> str:
    """The first ``cap`` letters of the image of ``letter``."""
    out: list[str] = []
    left = cap
    for runs, repeat in image_pieces(a1, a2, a3, letter):
        for _ in range(repeat):
            for ch, count in runs:
                take = min(count, left)
                if take > 0:
                    out.append(ch * take)
                    left -= take
                if left == 0:
                    return "".join(out)
    return "".join(out)


def substitution_for(a1: int, a2: Optional[int] = None, a3: Optional[int] = None) -> Substitution:
    """Substitution from the first partial quotients (``a2``/``a3`` only for even ``a1``)."""
    if a1 == 1:
        return IDENTITY
    k = a1 // 2
    long_a, bal, short = _blocks(k)
    if a1 % 2:
        return Substitution(bal, long_a, "A")
    if a2 is None or a3 is None:
        raise ValueError("even a1 needs a2 and a3")
    if a3 != 1:
        return Substitution(long_a + short * (a2 - 1), bal + short * (a2 - 1), bal + short * a2)
    return Substitution(bal + short * a2, long_a + short * a2, long_a + short * (a2 - 1))


def sigma_of(state: Union[RenormState, PartialQuotients]) -> Substitution:
    """Renormalization substitution for ``theta_n``."""
    theta = state.theta if isinstance(state, RenormState) else state
    a1 = theta.digit(1)
    if a1 == 1:
        return IDENTITY
    if a1 % 2:
        return substitution_for(a1)
    return substitution_for(a1, theta.digit(2), theta.digit(3))


def sigma_prime_of(state: RenormState):
    """``PSI`` when ``theta_n > 1/2``, otherwise the substitution itself."""
    return PSI if state.case_tag == ONE else sigma_of(state)


def omega_prime_runs(state: RenormState, next_state: Optional[RenormState] = None) -> list[tuple[str, int]]:
    """Run-length form ``[(letter, count), ...]`` of :func:`omega_prime`."""
    a1 = state.a1
    k = a1 // 2
    if a1 == 1:
        if next_state is None:
            raise ValueError("a1 == 1 needs the next renormalization state")
        runs = omega_prime_runs(next_state)
        letter, count = runs[0]
        head = [("C", 1)] + ([(letter, count - 1)] if count > 1 else []) + runs[1:]
        return _merge_runs(head)
    if a1 % 2:
        return [("A", k + 1), ("B", k)]
    return _merge_runs([("A", k + 1), ("B", k - 1), ("C", 1)])


def _merge_runs(runs):
    out: list[tuple[str, int]] = []
    for letter, count in runs:
        if count <= 0:
            continue
        if out and out[-1][0] == letter:
            out[-1] = (letter, out[-1][1] + count)
        else:
            out.append((letter, count))
    return out


def omega_prime(state: RenormState, next_state: Optional[RenormState] = None, cap: Optional[int] = None) -> str:
    """Initial coding of ``0+`` in the system of ``theta_n``.

    ``next_state`` is needed only when ``a1 == 1``.  With ``cap`` every run of
    equal letters is cut to at most ``cap`` letters, which keeps the prefixes
    needed for expansion small when the digits are huge.
    """
    runs = omega_prime_runs(state, next_state)
    return "".join(letter * (count if cap is None else min(count, cap)) for letter, count in runs)


def iterate(subs: Sequence, word: str) -> str:
    """Apply ``subs[0] o subs[1] o ... o subs[-1]`` to ``word`` (innermost last)."""
    for s in reversed(subs):
        word = s(word)
    return word


def is_orbit_valid(word: str) -> bool:
    return not any(f in word for f in FORBIDDEN_FACTORS)


# --------------------------------------------------------------------------
# renormalization data: substitutions and image lengths, computed on demand


_CAP_THRESHOLD = 1 << 16


class Renormalization:
    """Lazily extended table of states, substitutions and image lengths for one ``theta``.

    ``lengths(n)`` is ``(|sigma^(n)(A)|, |sigma^(n)(C)|)`` computed from letter
    counts, without materializing images.
    """

    def __init__(self, theta: PartialQuotients):
        self.theta = theta
        self._states_it = iter_states(theta)
        self.states: list[RenormState] = []
        self._subs: list[Substitution] = []
        self._lens: list[tuple[int, int]] = [(1, 1)]

    def state(self, n: int) -> RenormState:
        while len(self.states) <= n:
            self.states.append(next(self._states_it))
        return self.states[n]

    def sigma(self, n: int) -> Substitution:
        while len(self._subs) <= n:
            self._subs.append(sigma_of(self.state(len(self._subs))))
        return self._subs[n]

    def count_matrix(self, n: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """Rows ``(#AB, #C)`` of the images of A and C under ``sigma_n``."""
        st = self.state(n)
        a1 = st.a1
        if st.case_tag == ONE:
            return (1, 0), (0, 1)
        if st.case_tag == ODD_GT1:
            return (a1 - 1, 1), (1, 0)
        a2 = st.a2
        rows = ((a1 - 1) * a2 + 1, a2), ((a1 - 1) * a2 + a1, a2 + 1)
        return rows if st.case_tag == EVEN_A3NE1 else (rows[1], rows[0])

    def lengths(self, n: int) -> tuple[int, int]:
        while len(self._lens) <= n:
            j = len(self._lens) - 1
            ab, c = self._lens[j]
            (ra, rc), (sa, sc) = self.count_matrix(j)
            self._lens.append((ra * ab + rc * c, sa * ab + sc * c))
        return self._lens[n]

    def letter_length(self, n: int, letter: str) -> int:
        ab, c = self.lengths(n)
        return c if letter == "C" else ab

    def depth_for(self, n_letters: int) -> int:
        m = 0
        while self.lengths(m)[0] < n_letters:
            m += 1
        return m

    def sigma_prime(self, n: int):
        return PSI if self.state(n).case_tag == ONE else self.sigma(n)

    def omega_prime_runs(self, n: int) -> list[tuple[str, int]]:
        st = self.state(n)
        return omega_prime_runs(st, self.state(n + 1) if st.case_tag == ONE else None)

    def omega_prime(self, n: int, cap: Optional[int] = None) -> str:
        st = self.state(n)
        return omega_prime(st, self.state(n + 1) if st.case_tag == ONE else None, cap)

    def expand(
        self, word: str, level: int, n_letters: Optional[int] = None, prime: bool = False, prime_from: int = 0
    ) -> str:
        """First ``n_letters`` of ``sigma^(level)(word)`` (or ``sigma'^(level)`` if ``prime``).

        Works innermost-first and trims the word at every level to what the
        outer substitutions need, so the cost stays linear in ``n_letters``.
        ``n_letters=None`` expands in full.  With ``prime`` only the levels
        ``>= prime_from`` use the primed maps.
        """
        if n_letters is None:
            n_letters = max(self.lengths(level)) * len(word)
        word = self._trim(word, level, n_letters)
        for j in range(level - 1, -1, -1):
            if prime and j >= prime_from and self.state(j).case_tag == ONE:
                word = psi(word)
            elif self.image_length(j) > _CAP_THRESHOLD:
                word = self._apply_capped(j, word, n_letters)
            else:
                word = self.sigma(j)(word)
            word = self._trim(word, j, n_letters)
        return word[:n_letters]

    def image_length(self, n: int) -> int:
        """Longest image length of ``sigma_n``."""
        (ra, rc), (sa, sc) = self.count_matrix(n)
        return max(ra + rc, sa + sc)

    def _apply_capped(self, j: int, word: str, n_letters: int) -> str:
        # every letter of an image expands to at least one letter, so
        # n_letters + 1 letters of images always suffice
        st = self.state(j)
        a2 = st.theta.digit(2) if st.a1 % 2 == 0 else None
        a3 = st.theta.digit(3) if st.a1 % 2 == 0 else None
        out: list[str] = []
        total = 0
        for ch in word:
            img = capped_image(st.a1, a2, a3, ch, n_letters + 1 - total)
            out.append(img)
            total += len(img)
            if total > n_letters:
                break
        return "".join(out)

    def _trim(self, word: str, level: int, n_letters: int) -> str:
        ab, c = self.lengths(level)
        if min(ab, c) * (len(word) - 1) < n_letters:
            return word
        total = 0
        # the first letter is kept even when its expansion length differs (PSI)
        for i, ch in enumerate(word[1:], start=1):
            total += c if ch == "C" else ab
            if total >= n_letters:
                return word[: i + 1]
        return word


def limit_prefix(theta: PartialQuotients, n_letters: int, renorm: Optional[Renormalization] = None) -> str:
    """First ``n_letters`` of ``lim sigma_0 o ... o sigma_{m-1}(A)``: the coding of ``x(theta)``."""
    if n_letters < 1:
        raise ValueError("n_letters must be positive")
    r = renorm or Renormalization(theta)
    m = r.depth_for(n_letters)
    return r.expand("A", m, n_letters)


def zero_orbit_prefix(theta: PartialQuotients, n_letters: int, renorm: Optional[Renormalization] = None) -> str:
    """First ``n_letters`` of the coding of ``0+``, from ``sigma'^(m)(omega'_m)``."""
    if n_letters < 1:
        raise ValueError("n_letters must be positive")
    r = renorm or Renormalization(theta)
    # |Omega'_m| >= |Omega_m| >= n_letters
    m = r.depth_for(n_letters)
    # a run longer than n_letters + 1 letters is never reached in full
    return r.expand(r.omega_prime(m, cap=n_letters + 1), m, n_letters, prime=True)


class PrefixStream:
    """Lazy letter-by-letter stream of ``lim sigma^(m)(A)``.

    Keeps one frame per renormalization level, so memory is logarithmic in the
    number of letters pulled for digit-bounded ``theta``.
    """

    def __init__(self, theta: PartialQuotients, renorm: Optional[Renormalization] = None):
        self._r = renorm or Renormalization(theta)
        self._stack: list[list] = []
        self._level = 0
        self._started = False
        self.pulled = 0

    def __iter__(self):
        return self

    def __next__(self) -> str:
        if not self._started:
            self._started = True
            self.pulled += 1
            return "A"
        r = self._r
        while True:
            if not self._stack:
                # Omega_{m+1} = Omega_m . sigma^(m)(sigma_m(A)[1:])
                m = self._level
                self._level += 1
                img = r.sigma(m).a
                if len(img) > 1:
                    self._stack.append([m, img, 1])
                continue
            frame = self._stack[-1]
            j, w, pos = frame
            if pos >= len(w):
                self._stack.pop()
                continue
            frame[2] += 1
            letter = w[pos]
            # descend until level 0, skipping identity levels
            while j > 0:
                img = r.sigma(j - 1).image(letter)
                j -= 1
                if len(img) > 1:
                    self._stack.append([j, img, 1])
                letter = img[0]
            self.pulled += 1
            return letter

    def take(self, n: int) -> str:
        return "".join(itertools.islice(self, n))

    def chunks(self, size: int) -> Iterator[str]:
        while True:
            yield self.take(size)


# --------------------------------------------------------------------------
# coding of an arbitrary starting point


@dataclass
class ArbitraryEncoding:
    """Words ``omega_0..omega_depth`` and the assembled prefix for one starting point."""

    words: list[str]
    prefix: str
    points: list = field(default_factory=list)
    endpoint_events: list[tuple[int, str]] = field(default_factory=list)
    tail_letter: str = "A"  # "0+" when the point reached 0 exactly


def _letter(y, theta) -> str:
    # half-open partition: each endpoint belongs to the interval on its right
    half = as_point("1/2")
    if theta < half:
        if y < half:
            return "A"
        return "C" if y >= 1 - theta else "B"
    if y >= half:
        return "A"
    return "B" if y >= 1 - theta else "C"


def _next_theta(theta, tag: str, a1: int):
    if tag == ONE:
        return 1 - theta
    gamma = theta.reciprocal() - a1
    if tag == ODD_GT1:
        return (1 + gamma).reciprocal()
    gamma2 = gamma.reciprocal()
    return gamma2 - math.floor(gamma2)


def encode_arbitrary(x, theta: PartialQuotients, depth: int, renorm: Optional[Renormalization] = None) -> ArbitraryEncoding:
    """Track ``x`` through the induced systems and record the connecting words.

    At level ``n`` the point ``x_n`` of the system of ``theta_n`` is rotated
    until it enters ``[0, delta_n)``; the letters passed on the way form
    ``omega_n`` (empty when ``x_n`` is already there).  The entry point is then
    rescaled (or reflected when ``theta_n > 1/2``) to give ``x_{n+1}``.  The
    assembled prefix is ``omega_0 sigma^(1)(omega_1) ... sigma^(depth)(omega_depth)``
    followed by ``sigma^(depth+1)`` of the letter of ``x_{depth+1}``.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    th = to_exact(theta)
    if not isinstance(th, Surd):
        raise PointNotRepresentableError("arbitrary points need a periodic (quadratic) theta")
    x = as_point(x)
    if not isinstance(x, Surd) or (x.b and x.d != th.d):
        raise PointNotRepresentableError("x must be rational or lie in the field of theta")
    if not (0 <= x < 1):
        raise PointNotRepresentableError("x must lie in [0, 1)")
    r = renorm or Renormalization(theta)
    words: list[str] = []
    points = [x]
    events: list[tuple[int, str]] = []
    theta_n = th
    zero_level = 0 if x == 0 else None
    for n in range(depth + 1):
        if zero_level is not None:
            break
        st = r.state(n)
        if st.case_tag == ONE:
            words.append("")
            x = 1 - x
        else:
            delta = 1 - st.e_value * theta_n
            letters = []
            bound = max(len(img) for img in r.sigma(n).images.values())
            y = x
            while not (y < delta):
                letters.append(_letter(y, theta_n))
                y = y + theta_n
                if y >= 1:
                    y = y - 1
                if len(letters) > bound:
                    raise RuntimeError("return to the induced interval not found")
            words.append("".join(letters))
            x = y / delta
            if x == 0:
                zero_level = n + 1
                events.append((n + 1, "hit-zero"))
        theta_n = _next_theta(theta_n, st.case_tag, st.a1)
        points.append(x)
    parts = [r.expand(w, n) if w else "" for n, w in enumerate(words)]
    if zero_level is not None:
        # from here on the orbit is that of 0+ in the induced system: primed scheme
        top = depth + 1
        tail = "0+"
        last = r.expand(r.omega_prime(top), top, prime=True, prime_from=zero_level)
    else:
        tail = _letter(x, theta_n)
        last = r.expand(tail, depth + 1)
    return ArbitraryEncoding(words, "".join(parts) + last, points, events, tail)


def arbitrary_prefix(x, theta: PartialQuotients, n_letters: int) -> str:
    """First ``n_letters`` of the coding of ``x`` assembled from :func:`encode_arbitrary`."""
    r = Renormalization(theta)
    depth = max(0, r.depth_for(n_letters) - 1)
    while True:
        enc = encode_arbitrary(x, theta, depth, r)
        if len(enc.prefix) >= n_letters:
            return enc.prefix[:n_letters]
        depth += 1
