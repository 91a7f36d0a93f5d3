"""Command line front end.

Exit status: 0 when everything asked for is certified, 1 on a certification
failure, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .pipeline import Config, PipelineError, load_certificate, run_all, verify_certificate
from .reduction import ConditionFailedError, phase1, phase2, phase3
from .realball import InconclusiveError
from .sequences import ThueInstance
from .solver import solve

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _delta(text: str) -> Fraction:
    try:
        d = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if not Fraction(1, 4) < d <= 1:
        raise argparse.ArgumentTypeError("delta must lie in (1/4, 1]")
    return d


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=_positive, default=128, help="base working precision")
    common.add_argument("--lll-delta", type=_delta, default=Fraction(3, 4), help="LLL parameter (default 3/4)")
    common.add_argument("--out", help="write JSON output here")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for per-n work")
    common.add_argument("--max-n", type=_positive, help="only solve n <= MAX_N directly; skip the reductions")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fibthue", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    sub.add_parser("prove", parents=[common], help="run the whole proof and write a certificate")

    s = sub.add_parser("solve", parents=[common], help="solve one equation")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--box", type=_positive, default=20, help="bound on |b1|, |b2| (default 20)")

    r = sub.add_parser("reduce", parents=[common], help="run one reduction phase")
    r.add_argument("--phase", type=int, choices=(1, 2, 3), required=True)
    r.add_argument("--n-min", type=_positive)
    r.add_argument("--n-max", type=_positive)

    v = sub.add_parser("verify-cert", parents=[common], help="re-check a certificate file")
    v.add_argument("file")
    return p


def _emit(args, payload: dict, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")
    print(text)


def _prove(args) -> int:
    cfg = Config(precision_bits=args.precision_bits, lll_delta=args.lll_delta, jobs=args.jobs, max_n=args.max_n)
    cert = run_all(cfg)
    text = cert.dumps()
    problems = verify_certificate(json.loads(text))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = (
        f"initial bound {cert.initial_bound}, phase 1 {cert.phase1_chain}, "
        f"phase 2 threshold {cert.phase2_threshold}, phase 3 threshold {cert.phase3_threshold}, "
        f"solved 1..{max(cert.solved)}, exceptions {cert.exceptions()}"
    )
    if cert.partial:
        summary = f"partial: solved 1..{max(cert.solved)}, exceptions {cert.exceptions()}"
    print(summary, file=sys.stderr)
    for msg in problems:
        print("FAIL", msg, file=sys.stderr)
    return EXIT_FAIL if problems else EXIT_OK


def _solve(args) -> int:
    inst = ThueInstance(args.n)
    sols = solve(inst, args.box)
    lines = [f"n={args.n} box={args.box}: {len(sols)} solutions"]
    lines += [f"  ({s.x}, {s.y}) -> {s.value}" for s in sols.solutions]
    payload = {
        "n": str(args.n),
        "box": str(args.box),
        "solutions": [[str(s.x), str(s.y), str(s.value)] for s in sols.solutions],
    }
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _reduce(args) -> int:
    if args.phase == 1:
        start = args.n_max
        res = phase1(start, delta=args.lll_delta)
        payload = {"start": str(res.start), "chain": [str(v) for v in res.chain]}
        _emit(args, payload, f"phase 1: {res.start} -> " + " -> ".join(map(str, res.chain)))
        return EXIT_OK
    lo = args.n_min or (10 if args.phase == 2 else 49)
    hi = args.n_max or (425 if args.phase == 2 else 132)
    if lo < 10 or hi < lo:
        print("need 10 <= n-min <= n-max", file=sys.stderr)
        return EXIT_INPUT
    run = phase2 if args.phase == 2 else phase3
    res = run(lo, hi, delta=args.lll_delta, jobs=args.jobs, min_prec=args.precision_bits)
    lines = [f"  n={r.n}: bound {r.n_bound} {'eliminated' if r.eliminated else 'kept'}" for r in res.per_n]
    lines.append(f"phase {args.phase} threshold on [{lo}, {hi}]: {res.threshold}")
    payload = {
        "phase": args.phase,
        "n_min": str(lo),
        "n_max": str(hi),
        "threshold": str(res.threshold),
        "bounds": {str(r.n): str(r.n_bound) for r in res.per_n},
    }
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _verify(args) -> int:
    try:
        doc = load_certificate(args.file)
    except (OSError, ValueError) as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        problems = verify_certificate(doc)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"malformed certificate: {exc!r}", file=sys.stderr)
        return EXIT_INPUT
    for msg in problems:
        print("FAIL", msg)
    print("certificate verified" if not problems else f"{len(problems)} problems")
    return EXIT_FAIL if problems else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"prove": _prove, "solve": _solve, "reduce": _reduce, "verify-cert": _verify}[args.cmd]
    try:
        return handler(args)
    except PipelineError as exc:
        print(f"certification failed in {exc.phase}" + (f" at n={exc.n}" if exc.n else "") + f": {exc.message}",
              file=sys.stderr)
        return EXIT_FAIL
    except (ConditionFailedError, InconclusiveError) as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
