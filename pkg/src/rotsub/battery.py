"""Named rotation numbers and the seeded test battery."""
from __future__ import annotations

import json
import random
import re
from pathlib import Path

from .cf import PartialQuotients

__all__ = ["NAMED", "named_theta", "parse_theta", "random_heavy", "random_nonheavy", "default_battery"]

NAMED = {
    "sqrt2": lambda: PartialQuotients.periodic((2,)),
    "golden": lambda: PartialQuotients.periodic((1,)),
    "ratio2": lambda: PartialQuotients.generated("arithmetic"),
    "extreme": lambda: PartialQuotients.generated("extreme"),
}


def named_theta(name: str) -> PartialQuotients:
    try:
        return NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown theta name {name!r}; known: {sorted(NAMED)}") from None


_BRACKET = re.compile(r"^\[\s*([0-9,\s]*?)\s*(?:,?\s*\(([0-9,\s]+)\)\*)?\s*\]$")


def parse_theta(text: str) -> PartialQuotients:
    """Accept a name, inline theta JSON JSON, ``@path`` to a JSON file, or ``[3,(2)*]`` notation."""
    text = text.strip()
    if text in NAMED:
        return named_theta(text)
    if text.startswith("@"):
        return PartialQuotients.from_json(json.loads(Path(text[1:]).read_text()))
    if text.startswith("{"):
        return PartialQuotients.from_json(json.loads(text))
    match = _BRACKET.match(text)
    if match:
        head = tuple(int(a) for a in match.group(1).replace(" ", "").split(",") if a)
        if match.group(2):
            return PartialQuotients.periodic(tuple(int(a) for a in match.group(2).split(",")), head)
        return PartialQuotients.finite(head)
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        return PartialQuotients.from_json(json.loads(path.read_text()))
    raise ValueError(f"cannot parse theta {text!r}")


def random_heavy(rng: random.Random, max_digit: int = 6) -> PartialQuotients:
    """Periodic ``theta`` whose odd-indexed partial quotients are all even."""
    half = max(1, max_digit // 2)
    prefix = []
    for i in range(2 * rng.randint(0, 1)):
        prefix.append(2 * rng.randint(1, half) if i % 2 == 0 else rng.randint(1, max_digit))
    period = []
    for i in range(2 * rng.randint(1, 2)):
        period.append(2 * rng.randint(1, half) if i % 2 == 0 else rng.randint(1, max_digit))
    return PartialQuotients.periodic(tuple(period), tuple(prefix))


def random_nonheavy(rng: random.Random, max_digit: int = 6) -> PartialQuotients:
    """Periodic ``theta`` with an odd partial quotient at index 1 or 3.

    A negative sum ``S_n(theta)`` then shows up by ``n = q_3``, well inside
    any test horizon.
    """
    while True:
        period = tuple(rng.randint(1, max_digit) for _ in range(rng.randint(1, 3)))
        prefix = tuple(rng.randint(1, max_digit) for _ in range(rng.randint(0, 2)))
        theta = PartialQuotients.periodic(period, prefix)
        if theta.digit(1) % 2 or theta.digit(3) % 2:
            return theta


def default_battery(seed: int = 0) -> list[tuple[str, PartialQuotients]]:
    """Fixed named cases plus seeded random heavy and non-heavy quadratic ``theta``."""
    cases = [
        ("sqrt2", PartialQuotients.periodic((2,))),
        ("golden", PartialQuotients.periodic((1,))),
        ("[(3,1,2)*]", PartialQuotients.periodic((3, 1, 2))),
        ("[3,(2)*]", PartialQuotients.periodic((2,), (3,))),
        ("[(1,2,3)*]", PartialQuotients.periodic((1, 2, 3))),
        ("[(4,1,1)*]", PartialQuotients.periodic((4, 1, 1))),
    ]
    rng = random.Random(seed)
    for i in range(4):
        theta = random_heavy(rng)
        cases.append((f"heavy-{i}:{theta}", theta))
    for i in range(4):
        theta = random_nonheavy(rng)
        cases.append((f"nonheavy-{i}:{theta}", theta))
    return cases
