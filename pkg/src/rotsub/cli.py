"""Command-line entry point.

Data goes to stdout (or ``--output``) and is byte-identical across runs with
the same arguments; timings from ``bench`` go to stderr.  Exit status is 0 on
success, 1 when an invariant check fails (a JSON diagnostic is printed), and
2 on a usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .battery import default_battery, parse_theta
from .cf import PartialQuotients, is_heavy
from .exact import Certified, Surd, as_point
from .oracle import code_orbit, sums as oracle_sums, series_stats
from .stats import closed_form_zero, prefix_sums, zero_length
from .synth import (
    GrowthTarget,
    RatioTarget,
    SequenceSpec,
    growth_theta,
    heaviness_witness,
    ratio_theta,
    special_point_side,
    x_of_theta,
)
from .word import Renormalization, arbitrary_prefix, limit_prefix, zero_orbit_prefix

__all__ = ["main", "build_parser"]

EXAMPLES = ("sqrt2-fig", "golden-mean-fig", "ratio-two-fig")


class UsageError(Exception):
    pass


class InvariantBreach(Exception):
    def __init__(self, diagnostic: dict):
        super().__init__(diagnostic.get("check", "invariant breach"))
        self.diagnostic = diagnostic


# --------------------------------------------------------------------------
# argument helpers


def _theta(text: Optional[str]) -> PartialQuotients:
    if text is None:
        raise UsageError("--theta is required")
    try:
        return parse_theta(text)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        raise UsageError(str(exc)) from None


def _point(text: str, theta: PartialQuotients):
    """``(x, side)`` from ``0``, ``1/3``, ``1/3-`` (left limit) or ``xtheta``."""
    if text in ("xtheta", "x(theta)"):
        return x_of_theta(theta), special_point_side(theta)
    side = -1 if text.endswith("-") else 1
    try:
        x = as_point(text.rstrip("-"))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse point {text!r}") from None
    if not (0 <= x < 1 if side > 0 else 0 < x <= 1):
        raise UsageError("x must lie in [0, 1), or in (0, 1] for a left limit")
    return x, side


def _sequence(text: Optional[str]) -> Optional[SequenceSpec]:
    """``name`` or ``name:key=value,key=value`` or a JSON object."""
    if text is None:
        return None
    try:
        if text.lstrip().startswith("{"):
            return SequenceSpec.from_json(json.loads(text))
        name, _, rest = text.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            key, _, value = item.partition("=")
            params[key.strip()] = int(value)
        return SequenceSpec.of(name.strip(), **params)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad sequence {text!r}: {exc}") from None


def _digits(text: str) -> tuple:
    try:
        return tuple(int(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise UsageError(f"bad digit list {text!r}") from None


def _sign(theta: PartialQuotients) -> int:
    return -1 if theta.is_greater_than_half() else 1


def _series_csv(series) -> str:
    out = io.StringIO()
    out.write("i,S_i\n")
    for i, s in enumerate(series, start=1):
        out.write(f"{i},{int(s)}\n")
    return out.getvalue()


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True) + "\n"


def _point_json(x) -> dict:
    if isinstance(x, Certified):
        return {"kind": "certified", "approx": str(x.approx), "eps": str(x.eps), "float": float(x)}
    return {"kind": "exact", "value": str(x), "float": float(x)}


def _word(theta: PartialQuotients, point, n: int, method: str, special: bool = False) -> tuple[str, Optional[dict]]:
    x, side = point
    if method == "oracle":
        if isinstance(x, Certified):
            raise UsageError("the oracle needs an exact point; use --method symbolic")
        res = code_orbit(x, theta, n, side)
        return res.word, res.sidecar()
    if special:
        return limit_prefix(theta, n), None
    if side < 0:
        raise UsageError("left limits are only coded by the oracle")
    if x == 0:
        return zero_orbit_prefix(theta, n), None
    return arbitrary_prefix(x, theta, n), None


# --------------------------------------------------------------------------
# commands


def cmd_code(args) -> str:
    theta = _theta(args.theta)
    point = _point(args.x, theta)
    word, sidecar = _word(theta, point, args.n, args.method, args.x in ("xtheta", "x(theta)"))
    fmt = args.format or "ascii-word"
    if fmt == "ascii-word":
        return word + "\n"
    if fmt == "json":
        return _dump({"word": word, "sidecar": sidecar})
    raise UsageError("code emits ascii-word or json")


def cmd_sums(args) -> str:
    theta = _theta(args.theta)
    point = _point(args.x, theta)
    word, _ = _word(theta, point, args.n, args.method, args.x in ("xtheta", "x(theta)"))
    series = prefix_sums(word, _sign(theta))
    fmt = args.format or "csv"
    if fmt == "csv":
        return _series_csv(series)
    if fmt == "json":
        M, m = series_stats(series, args.n)
        return _dump({"n": args.n, "S": int(series[-1]), "M": M, "m": m, "rho": M - m + 1})
    raise UsageError("sums emits csv or json")


def _check_case(job) -> dict:
    """All invariants for one battery entry; returns a JSON-able record."""
    index, name, theta_doc, n = job
    theta = PartialQuotients.from_json(theta_doc)
    r = Renormalization(theta)
    failures = []

    zero_sym = zero_orbit_prefix(theta, n, renorm=r)
    zero_ref = code_orbit(0, theta, n).word
    if zero_sym != zero_ref:
        at = next(i for i, (a, b) in enumerate(zip(zero_sym, zero_ref)) if a != b)
        failures.append({"check": "zero_orbit_coding", "first_mismatch": at})

    x = x_of_theta(theta)
    if isinstance(x, Surd):
        lim_sym = limit_prefix(theta, n, renorm=r)
        lim_ref = code_orbit(x, theta, n, special_point_side(theta)).word
        if lim_sym != lim_ref:
            at = next(i for i, (a, b) in enumerate(zip(lim_sym, lim_ref)) if a != b)
            failures.append({"check": "limit_word_coding", "x": str(x), "first_mismatch": at})

    # closed form at every renormalization time that fits in n
    series = prefix_sums(zero_ref, _sign(theta))
    checked = 0
    level = 0
    while True:
        L = zero_length(r, level)
        if L > n:
            break
        if L > 1:
            M, m = series_stats(series[:L], L)
            expected = (int(series[L - 1]), M, m)
            got = closed_form_zero(r, level)
            if tuple(got) != expected:
                failures.append({"check": "closed_form_zero", "level": level, "got": list(got), "scan": list(expected)})
            checked += 1
        level += 1

    heavy = is_heavy(theta)
    if heavy:
        witness = heaviness_witness(theta, n - 1)
        if not witness.heavy_consistent:
            failures.append({"check": "heaviness", **witness.to_json()})

    return {
        "index": index,
        "case": name,
        "theta": theta_doc,
        "n": n,
        "renormalization_times_checked": checked,
        "heavy": heavy,
        "ok": not failures,
        "failures": failures,
    }


def cmd_verify(args) -> str:
    if args.battery != "default":
        raise UsageError("only the 'default' battery is shipped")
    jobs = [(i, name, theta.to_json(), args.n) for i, (name, theta) in enumerate(default_battery(args.seed))]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            records = list(pool.map(_check_case, jobs))
    else:
        records = [_check_case(job) for job in jobs]
    records.sort(key=lambda r: r["index"])
    text = "".join(_dump(r) for r in records)
    bad = [r for r in records if not r["ok"]]
    if bad:
        raise InvariantBreach({"check": "verify", "failed_cases": bad, "report": text})
    return text


def _parse_growth(args) -> GrowthTarget:
    try:
        return GrowthTarget(
            c=_sequence(args.c),
            d=_sequence(args.d),
            c_bounded=args.c_bounded,
            d_bounded=args.d_bounded,
            prefix=_digits(args.prefix),
            max_increment=args.max_increment,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _theta_output(theta: PartialQuotients, args) -> str:
    doc = theta.to_json()
    if args.digits:
        doc = dict(doc, first_digits=theta.digits(args.digits))
    return _dump(doc)


def cmd_synth_growth(args) -> str:
    return _theta_output(growth_theta(_parse_growth(args)), args)


def cmd_synth_ratio(args) -> str:
    try:
        target = RatioTarget(args.r1, args.r2, _digits(args.prefix))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None
    return _theta_output(ratio_theta(target), args)


def cmd_xtheta(args) -> str:
    theta = _theta(args.theta)
    doc = {"theta": theta.to_json(), "x": _point_json(x_of_theta(theta)), "side": special_point_side(theta)}
    return _dump(doc)


def cmd_heavy(args) -> str:
    theta = _theta(args.theta)
    return _dump(heaviness_witness(theta, args.n).to_json())


def cmd_bench(args) -> str:
    theta = _theta(args.theta)
    depth = args.depth
    t0 = time.perf_counter()
    r = Renormalization(theta)
    closed = [closed_form_zero(r, k) for k in range(depth + 1)]
    t_closed = time.perf_counter() - t0

    n = args.n
    t0 = time.perf_counter()
    series = oracle_sums(0, theta, n).series
    t_scan = time.perf_counter() - t0

    overlap, mismatches = 0, []
    for k in range(depth + 1):
        L = zero_length(r, k)
        if L > n:
            break
        if L < 2:
            continue
        M, m = series_stats(series[:L], L)
        scan = (int(series[L - 1]), M, m)
        overlap += 1
        if tuple(closed[k]) != scan:
            mismatches.append({"level": k, "closed_form": list(closed[k]), "scan": list(scan)})
    print(f"closed_form_zero depth 0..{depth}: {t_closed:.6f} s", file=sys.stderr)
    print(f"oracle scan n={n}: {t_scan:.6f} s", file=sys.stderr)
    record = {
        "theta": theta.to_json(),
        "depth": depth,
        "n": n,
        "final": {"S": closed[-1][0], "M": closed[-1][1], "m": closed[-1][2]},
        "overlap_levels": overlap,
        "agree": not mismatches,
    }
    if mismatches:
        raise InvariantBreach({"check": "bench_agreement", "mismatches": mismatches, **record})
    return _dump(record)


def example_sqrt2(n: int) -> str:
    theta = parse_theta("sqrt2")
    return _series_csv(prefix_sums(zero_orbit_prefix(theta, n), 1))


def example_golden(n: int) -> str:
    theta = parse_theta("golden")
    x = x_of_theta(theta)
    parts = []
    for label, word in (("0", zero_orbit_prefix(theta, n)), (str(x), limit_prefix(theta, n))):
        parts.append(f"# x={label}\n" + _series_csv(prefix_sums(word, -1)))
    return "\n".join(parts)


def example_ratio_two(depth: int) -> str:
    r = Renormalization(parse_theta("ratio2"))
    out = io.StringIO()
    out.write("k,n,M,m,ratio\n")
    for k in range(1, depth + 1):
        _, M, m = closed_form_zero(r, k)
        n = zero_length(r, k)
        ratio = "inf" if m == 0 else f"{M / abs(m):.6f}"
        out.write(f"{k},{n},{M},{m},{ratio}\n")
    return out.getvalue()


def cmd_example(args) -> str:
    if args.name == "sqrt2-fig":
        return example_sqrt2(args.n or 33461)
    if args.name == "golden-mean-fig":
        return example_golden(args.n or 100)
    return example_ratio_two(args.n or 40)


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rotsub", description="Discrepancy sums of irrational rotations via substitutions.")
    parser.add_argument("--output", help="write data here instead of stdout")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized batteries")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, need_n=True, n_default=None):
        p.add_argument("--theta", help="name (sqrt2, golden, ratio2, extreme), JSON, @file.json, or [a,(b,c)*]")
        if need_n:
            p.add_argument("--n", type=_positive, default=n_default)
        p.add_argument("--format", choices=("csv", "json", "ascii-word"))
        p.add_argument("--output", default=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("code", help="orbit coding as letters A/B/C")
    common(p)
    p.add_argument("--x", default="0", help="0, p/q, or xtheta")
    p.add_argument("--method", choices=("oracle", "symbolic"), default="oracle")
    p.set_defaults(func=cmd_code, required=("theta", "n"))

    p = sub.add_parser("sums", help="discrepancy sums S_1..S_n")
    common(p)
    p.add_argument("--x", default="0")
    p.add_argument("--method", choices=("oracle", "symbolic"), default="oracle")
    p.set_defaults(func=cmd_sums, required=("theta", "n"))

    p = sub.add_parser("verify", help="check symbolic results against the oracle")
    common(p, n_default=100_000)
    p.add_argument("--battery", default="default")
    p.add_argument("--workers", type=_positive, default=1)
    p.set_defaults(func=cmd_verify, required=())

    p = sub.add_parser("synth-growth", help="theta with prescribed growth of M_n(0) and |m_n(0)|")
    common(p, need_n=False)
    p.add_argument("--c", help="target for M: name[:k=v,...] or JSON, e.g. ceil_pow:num=1,den=2,scale=1")
    p.add_argument("--d", help="target for |m|")
    p.add_argument("--c-bounded", action="store_true")
    p.add_argument("--d-bounded", action="store_true")
    p.add_argument("--prefix", default="2")
    p.add_argument("--max-increment", type=_positive, default=1)
    p.add_argument("--digits", type=int, default=0, help="also list this many partial quotients")
    p.set_defaults(func=cmd_synth_growth, required=())

    p = sub.add_parser("synth-ratio", help="theta with prescribed liminf/limsup of M_n(0)/|m_n(0)|")
    common(p, need_n=False)
    p.add_argument("--r1", required=True)
    p.add_argument("--r2", required=True)
    p.add_argument("--prefix", default="2")
    p.add_argument("--digits", type=int, default=0)
    p.set_defaults(func=cmd_synth_ratio, required=())

    p = sub.add_parser("xtheta", help="the point whose coding is the limit word")
    common(p, need_n=False)
    p.set_defaults(func=cmd_xtheta, required=("theta",))

    p = sub.add_parser("heavy", help="test S_n(theta) >= 0 for n <= N")
    common(p)
    p.set_defaults(func=cmd_heavy, required=("theta", "n"))

    p = sub.add_parser("bench", help="closed form at depth vs oracle scan")
    common(p, n_default=1_000_000)
    p.add_argument("--depth", type=int, default=60)
    p.set_defaults(func=cmd_bench, required=("theta",))

    p = sub.add_parser("example", help="print the data table of a worked example")
    p.add_argument("name", choices=EXAMPLES)
    p.add_argument("--n", type=_positive)
    p.add_argument("--output", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_example, required=())
    return parser


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[list] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for field in args.required:
            if getattr(args, field, None) is None:
                raise UsageError(f"--{field} is required for {args.command}")
        text = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except InvariantBreach as exc:
        print(_dump(exc.diagnostic), end="")
        return 1
    _write(text, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
