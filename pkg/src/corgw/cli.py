"""Command-line front end.

Subcommands mirror the library surface: `local` prints a refined local
count, `oracle-verify` cross-checks the closed form against the sublattice
oracle over a grid, `diagrams` lists/counts/sums floor diagrams, `series`
emits invariant generating series as CSV (optionally verifying the
quasi-modularity factorization), and `polyfit` runs the exact polynomial
fit for a diagram template.

Exit codes: 0 success, 2 usage or precondition violation, 3 verification
failure, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import diagrams as fd
from . import lattice, polyfit, qseries, refined
from .torsion import GroupAlgebraElement, TorsionPoint

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3


class VerificationFailure(Exception):
    """A requested self-check did not pass."""


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("CORGW_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"bad CORGW_THREADS value {env!r}") from exc
    return os.cpu_count() or 1


def _pmap(fn, items, threads: int):
    """Order-preserving map; results are identical for every thread count."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _want_json(args) -> bool:
    if getattr(args, "json", False):
        return True
    if getattr(args, "table", False):
        return False
    return not sys.stdout.isatty()


def _parse_profile(text: str) -> fd.TangencyProfile:
    try:
        weights = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad profile {text!r}") from exc
    return fd.TangencyProfile(weights)


def _emit_element(x: GroupAlgebraElement, args, extra: dict | None = None):
    if _want_json(args):
        payload = x.to_json_dict()
        mass = x.total_mass
        payload["mass"] = f"{mass.numerator}/{mass.denominator}"
        if extra:
            payload.update(extra)
        print(json.dumps(payload))
        return
    print(f"ambient torsion level delta = {x.delta}")
    print(f"{'u':>4} {'v':>4} {'order':>6}  coefficient")
    for u, v in x.support:
        pt = TorsionPoint(x.delta, u, v)
        print(f"{u:>4} {v:>4} {pt.order:>6}  {x.coefficient(u, v)}")
    print(f"mass {x.total_mass}")


# -- subcommands -------------------------------------------------------------


def cmd_local(args) -> int:
    shift = None
    if args.shift:
        try:
            u, v = (int(t) for t in args.shift.split(","))
        except ValueError as exc:
            raise ValueError(f"bad shift {args.shift!r}") from exc
        shift = TorsionPoint(args.delta, u, v)
    x = refined.local_invariant(args.a, args.w1, args.n, args.delta, shift)
    _emit_element(x, args)
    return EXIT_OK


def cmd_oracle_verify(args) -> int:
    grid = [
        (a, delta, w1, n)
        for a in range(1, args.a_max + 1)
        for delta in range(1, args.delta_max + 1)
        for w1 in (delta, 2 * delta)
        for n in (2, 3)
    ]

    def check(cell):
        a, delta, w1, n = cell
        lhs = refined.local_invariant(a, w1, n, delta)
        rhs = lattice.oracle_local_invariant(a, w1, n, delta)
        return cell, lhs == rhs

    bad = [cell for cell, ok in _pmap(check, grid, _threads(args)) if not ok]
    if bad:
        for a, delta, w1, n in bad:
            print(
                f"MISMATCH a={a} delta={delta} w1={w1} n={n}", file=sys.stderr
            )
        raise VerificationFailure(f"{len(bad)} grid cells disagree")
    print(f"oracle-verify: {len(grid)} cells agree exactly")
    return EXIT_OK


def cmd_diagrams(args) -> int:
    profile = _parse_profile(args.profile)
    found = fd.enumerate_diagrams(args.g, args.a, profile)
    if args.count:
        print(len(found))
        return EXIT_OK
    if args.sum:
        delta = args.delta if args.delta else 1
        total = fd.invariant(args.g, args.a, profile, delta)
        _emit_element(total, args)
        return EXIT_OK
    for diagram in found:
        print(diagram.to_json())
    return EXIT_OK


def cmd_series(args) -> int:
    profile = _parse_profile(args.profile)
    if args.check_factorization:
        report = qseries.factorization_check(
            args.g, profile, args.delta, args.n_trunc
        )
        for t in report.templates:
            print(
                f"template W={t.weight_monomial} delta_gcd={t.delta_gcd} "
                f"{json.dumps(t.template)}",
                file=sys.stderr,
            )
        if not report.ok:
            raise VerificationFailure(
                f"factorization mismatch at q^{report.mismatch_at}"
            )
        print(
            f"factorization: {len(report.templates)} templates, "
            f"exact match to q^{report.truncation}",
            file=sys.stderr,
        )
    threads = _threads(args)
    coeffs = _pmap(
        lambda a: fd.invariant(args.g, a, profile, args.delta),
        range(1, args.n_trunc + 1),
        threads,
    )
    series = qseries.GASeries(args.delta, tuple(coeffs))
    qseries.write_series_csv(series, sys.stdout)
    return EXIT_OK


def cmd_polyfit(args) -> int:
    try:
        with open(args.template) as fh:
            template = polyfit.DiagramTemplate.from_json(fh.read())
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot load template: {exc}") from exc
    chamber = None
    if args.chamber:
        try:
            mod, res = (int(t) for t in args.chamber.split(":"))
        except ValueError as exc:
            raise ValueError(f"bad chamber {args.chamber!r}") from exc
        chamber = (mod, res)
    samples = [int(t) for t in args.samples.split(",")]
    k = args.holdout
    if len(samples) <= k:
        raise ValueError("need more samples than holdout points")
    report = polyfit.polynomial_fit(
        template, args.delta, samples[:-k], samples[-k:], chamber
    )
    print(json.dumps(report.to_json_dict()))
    if not report.ok:
        raise VerificationFailure("polynomial fit failed holdout validation")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corgw",
        description="Exact correlated curve counts in P1-bundles over an "
        "elliptic curve.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap (env CORGW_THREADS; results do not "
                        "depend on this)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("local", help="refined local invariant")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--w1", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--shift", type=str, default=None, help="u,v correlator shift")
    p.add_argument("--json", action="store_true")
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("oracle-verify", help="closed form vs sublattice oracle")
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--delta-max", type=int, required=True)
    p.set_defaults(func=cmd_oracle_verify)

    p = sub.add_parser("diagrams", help="floor diagram enumeration")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--profile", type=str, required=True)
    p.add_argument("--delta", type=int, default=None)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--list", action="store_true")
    mode.add_argument("--count", action="store_true")
    mode.add_argument("--sum", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_diagrams)

    p = sub.add_parser("series", help="invariant series CSV")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--profile", type=str, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--n-trunc", "--N", dest="n_trunc", type=int, required=True)
    p.add_argument("--check-factorization", action="store_true")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("polyfit", help="exact per-template polynomial fit")
    p.add_argument("--template", type=str, required=True, help="template JSON file")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--chamber", type=str, default=None, help="modulus:residue")
    p.add_argument("--samples", type=str, required=True, help="comma-separated w")
    p.add_argument("--holdout", type=int, default=2)
    p.set_defaults(func=cmd_polyfit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
