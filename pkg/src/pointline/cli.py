"""Command line interface.

Exit codes: 0 success, 1 verification failure (or retries exhausted),
2 precondition failure, 3 I/O or malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from pointline import fileio, svg
from pointline.analysis import format_table, level_table
from pointline.geometry import (
    Configuration,
    ConfigurationError,
    SanityBoundExceeded,
    TOL_ABS,
    trivial_configuration,
    verify_claim,
)
from pointline.lemma1 import DeltaTooLarge, RetriesExhausted, build_lemma1, derive_params
from pointline.recursive import (
    EXPLORATORY,
    GUARANTEED,
    VERIFY_CAP,
    ComposeParams,
    PreconditionError,
    RecursionPlan,
    compose,
    iterate_theorem,
    search_base,
)

EXIT_OK, EXIT_VERIFY, EXIT_PRECONDITION, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def rational(text: str) -> float:
    """``"1/64"`` or ``"0.015625"`` parsed exactly, rounded to float once."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or p/q fraction: {text!r}") from None


def _report_path(out: Path, given) -> Path:
    return Path(given) if given else out.with_name(out.stem + ".report.json")


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _write_report(path: Path, report: dict):
    _write(path, json.dumps(report, indent=2, sort_keys=True) + "\n")


def _load(path) -> Configuration:
    try:
        return fileio.load(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None
    except fileio.FileFormatError as exc:
        raise CliError(f"malformed file {path}: {exc}", EXIT_IO) from None
    except ConfigurationError as exc:
        raise CliError(f"invalid configuration in {path}: {exc}", EXIT_PRECONDITION) from None


def cmd_build_random(args) -> int:
    try:
        params = derive_params(args.delta, seed=args.seed, max_retries=args.max_retries)
    except DeltaTooLarge as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None
    code = EXIT_OK
    try:
        cfg, report = build_lemma1(params)
    except RetriesExhausted as exc:
        cfg, report, code = exc.configuration, exc.report, EXIT_VERIFY
    out = Path(args.out)
    _write(out, fileio.dumps(cfg))
    _write_report(_report_path(out, args.report), report.to_dict())
    print(f"kept {len(cfg)} of N = {params.N} points (target {params.size_target}); "
          f"verified d = {report.measured_delta!r}")
    if code:
        print("retries exhausted", file=sys.stderr)
    return code


def cmd_compose(args) -> int:
    base = _load(args.base)
    inner = _load(args.inner) if args.inner else Configuration(np.zeros((1, 3)),
                                                               provenance="singleton")
    if len(inner) >= 2:
        v = verify_claim(inner, claimed_delta=inner.claimed_delta or 0.0)
        if not v.passed:
            raise CliError(f"inner configuration fails its claim: {v.to_dict()}", EXIT_VERIFY)
    try:
        params = ComposeParams(args.w, args.C)
        if args.depth == 1 and args.no_iterate:
            cfg, report = compose(base, inner, params, mode=args.mode)
        else:
            plan = RecursionPlan(args.depth, base, params, inner_seed=inner, mode=args.mode,
                                 verify_cap=args.verify_cap, seed=args.seed)
            cfg, report = iterate_theorem(plan)
    except (PreconditionError, ConfigurationError, ValueError) as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None
    except AssertionError as exc:
        raise CliError(str(exc), EXIT_VERIFY) from None
    out = Path(args.out)
    _write(out, fileio.dumps(cfg, include_labels=args.labels))
    doc = report.to_dict()
    if report.levels:
        doc["level_table"] = level_table(report.levels)
        print(format_table(doc["level_table"]))
    _write_report(_report_path(out, args.report), doc)
    print(f"n = {len(cfg)}, claimed d = {cfg.claimed_delta!r}")
    return EXIT_OK if report.success else EXIT_VERIFY


def cmd_verify(args) -> int:
    X = _load(args.file)
    claim = X.claimed_delta
    if args.sampled:
        if len(X) <= VERIFY_CAP:
            raise CliError(f"--sampled is only allowed above {VERIFY_CAP} elements; use --exact",
                           EXIT_PRECONDITION)
        rng = np.random.Generator(np.random.Philox(args.seed))
        n = len(X)
        a = rng.integers(0, n, args.pairs)
        b = rng.integers(0, n - 1, args.pairs)
        b = b + (b >= a)
        c = X.coords
        d = np.abs(c[a, 1] - c[b, 1] - c[b, 2] * (c[a, 0] - c[b, 0]))
        k = int(np.argmin(d))
        result = {"n": n, "claimed_delta": claim, "sampled_min": float(d[k]),
                  "witness": [int(a[k]), int(b[k]), float(d[k])], "pairs": args.pairs,
                  "passed": claim is None or float(d[k]) >= claim - TOL_ABS,
                  "note": "sampled check, not a certificate"}
    else:
        try:
            v = verify_claim(X, method="brute" if args.exact else "auto",
                             claimed_delta=0.0 if claim is None else None)
        except SanityBoundExceeded as exc:
            raise CliError(str(exc), EXIT_VERIFY) from None
        result = v.to_dict()
        result["claimed_delta"] = claim
    if args.json:
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        if result.get("degenerate"):
            print(f"n = {result['n']}: degenerate (no pairs), pass")
        else:
            d = result.get("measured_delta", result.get("sampled_min"))
            a, b, _ = result["witness"]
            print(f"n = {result['n']}  d(X) = {d!r}  witness: point {a} -> line {b}")
            print(f"claimed {claim!r}: {'PASS' if result['passed'] else 'FAIL'}")
    return EXIT_OK if result["passed"] else EXIT_VERIFY


def cmd_export(args) -> int:
    X = _load(args.file)
    if args.svg:
        _write(Path(args.svg), svg.render(X, strip_width=args.strip_width))
    if args.csv:
        _write(Path(args.csv), fileio.to_csv(X))
    return EXIT_OK


def cmd_trivial(args) -> int:
    if args.n < 1:
        raise CliError("n must be positive", EXIT_PRECONDITION)
    _write(Path(args.out), fileio.dumps(trivial_configuration(args.n)))
    return EXIT_OK


def cmd_search_base(args) -> int:
    try:
        cfg, report = search_base(args.k, args.target, args.budget, seed=args.seed,
                                  restarts=args.restarts)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None
    out = Path(args.out)
    _write(out, fileio.dumps(cfg))
    _write_report(_report_path(out, args.report), report.to_dict())
    print(f"k = {len(cfg)}, d = {cfg.claimed_delta!r}, target met: {report.success}")
    return EXIT_OK if report.success else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pointline", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help="threads for the brute-force scan (output does not depend on it)")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-random", help="randomized base construction")
    b.add_argument("--delta", type=rational, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--max-retries", type=int, default=20)
    b.add_argument("--out", required=True)
    b.add_argument("--report")
    b.set_defaults(func=cmd_build_random)

    c = sub.add_parser("compose", help="self-affine amplification of a base configuration")
    c.add_argument("--base", required=True)
    c.add_argument("--inner", help="inner seed file (default: singleton at the origin)")
    c.add_argument("--w", type=rational, required=True)
    c.add_argument("--C", type=rational, default=5.0)
    c.add_argument("--depth", type=int, default=1)
    c.add_argument("--mode", choices=[GUARANTEED, EXPLORATORY], default=GUARANTEED)
    c.add_argument("--verify-cap", type=int, default=VERIFY_CAP)
    c.add_argument("--seed", type=int, default=0, help="seed for sampled verification")
    c.add_argument("--labels", action="store_true", help="keep (i, j, inner) labels in the file")
    c.add_argument("--no-iterate", action="store_true",
                   help="depth 1 only: plain compose, exploratory claim from measurement")
    c.add_argument("--out", required=True)
    c.add_argument("--report")
    c.set_defaults(func=cmd_compose)

    v = sub.add_parser("verify", help="recompute d(X) and check the claim")
    v.add_argument("file")
    g = v.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="full brute force")
    g.add_argument("--sampled", action="store_true", help="random pairs (large files only)")
    v.add_argument("--pairs", type=int, default=10**6)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="SVG or CSV")
    e.add_argument("file")
    e.add_argument("--svg")
    e.add_argument("--csv")
    e.add_argument("--strip-width", type=rational, default=0.0)
    e.set_defaults(func=cmd_export)

    t = sub.add_parser("trivial", help="stacked-lines baseline with d = 2/n")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_trivial)

    s = sub.add_parser("search-base", help="local search for a small base configuration")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--target", type=rational, default=0.0)
    s.add_argument("--budget", type=int, default=20000)
    s.add_argument("--restarts", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_search_base)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "export" and not (args.svg or args.csv):
        parser.error("export needs --svg or --csv")
    if args.threads is not None:
        os.environ["POINTLINE_NUM_THREADS"] = str(max(1, args.threads))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
