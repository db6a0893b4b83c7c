"""Command-line driver.

Exit codes: 0 on success (claims verified where applicable), 1 when a
verified inequality fails (a certificate or error report is emitted),
2 on usage errors and guard refusals.  All randomness flows from the
single --seed through per-module counter-based substreams, so reports
are byte-identical across runs and thread counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .decompose import DecompositionError, find_regular_subspace
from .fourier import FunctionTable, check_subspace_regularity, wht_full
from .gf2 import DEFAULT_DENSE_LIMIT, DenseLimitError, F2Vector, Subspace
from .instance import (
    Instance,
    RetryLimitError,
    TowerOverflowError,
    eval_count,
    generate_spanning_family,
    manifest,
    verify_spanning_family,
    verify_spanning_family_sampled,
)
from .reports import emit_report, spanning_check_dict
from .rng import Stream
from .rounding import deviation_report, round_to_binary, sample_pairs
from .tableio import TableFormatError, read_table, write_table
from .witness import ClaimViolationError, exhaustive_lowerbound_check

THREADS_ENV = "F2REGLAB_THREADS"


def parse_epsilon(text: str) -> Fraction:
    """Accept a decimal ("0.03125") or an exact rational ("1/32")."""
    value = Fraction(text)
    if value <= 0:
        raise ValueError(f"epsilon must be positive, got {text}")
    return value


def _resolve_epsilon(args: argparse.Namespace) -> Fraction:
    if getattr(args, "eps", None) is not None:
        return parse_epsilon(args.eps)
    if getattr(args, "s", None) is not None:
        return Fraction(1, 16 * args.s)
    raise ValueError("pass --eps, or --s to use the largest level 1/(16 s)")


def _parse_basis(text: str, n: int) -> Subspace:
    rows = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    return Subspace.from_vectors(n, rows)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _check_threads_env() -> None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return
    if not raw.isdigit() or int(raw) < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    # kernels are vectorized and deterministic; the cap needs no action


def cmd_gen(args: argparse.Namespace) -> int:
    inst = Instance.generate(
        args.s,
        args.seed,
        dense_limit=args.dense_limit,
        max_retries=args.retries,
        sampled_samples=args.samples,
    )
    if args.out is not None:
        if inst.table is None:
            raise DenseLimitError(
                f"s={args.s} has n too large for a dense table; omit --out"
            )
        write_table(args.out, inst.table)
    _write(emit_report(manifest(inst)), args.manifest)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    inst = Instance.generate(
        args.s,
        args.seed,
        dense_limit=args.dense_limit,
        max_retries=args.retries,
        sampled_samples=args.samples,
    )
    if args.x_bits is not None:
        x = F2Vector.from_string(args.x_bits).bits
    else:
        x = int(args.x)
    if not 0 <= x < (1 << inst.n):
        raise ValueError(f"point {x} outside the 2^{inst.n} domain")
    count = eval_count(inst.xi, x)
    record = {
        "schema": "f2reglab/eval",
        "schema_version": 1,
        "s": inst.s,
        "n": inst.n,
        "seed": args.seed,
        "x": x if x < 2**53 else str(x),
        "satisfied_blocks": count,
        "value": str(Fraction(count, inst.s)),
        "value_float": count / inst.s,
    }
    _write(emit_report(record), args.out)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    table = read_table(args.in_path, dense_limit=args.dense_limit)
    h = _parse_basis(args.basis, table.n)
    eps = parse_epsilon(args.eps)
    report = check_subspace_regularity(table, h, eps, dense_limit=args.dense_limit)
    _write(emit_report(report), args.out)
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    table = read_table(args.in_path, dense_limit=args.dense_limit)
    eps = parse_epsilon(args.eps)
    trace = find_regular_subspace(
        table,
        eps,
        max_index_log2=args.max_index_log2,
        max_iterations=args.max_iterations,
        single_witness=args.single_witness,
        dense_limit=args.dense_limit,
    )
    _write(emit_report(trace), args.out)
    if args.csv is not None:
        Path(args.csv).write_text(trace.csv())
    return 0 if trace.succeeded else 2


def cmd_verify_lowerbound(args: argparse.Namespace) -> int:
    inst = Instance.generate(
        args.s,
        args.seed,
        dense_limit=args.dense_limit,
        max_retries=args.retries,
        sampled_samples=args.samples,
    )
    eps = _resolve_epsilon(args)
    report = exhaustive_lowerbound_check(
        inst,
        eps,
        mode=args.mode,
        random_per_dim=args.random_per_dim,
        seed=args.seed,
        strict=args.strict,
        max_enumerated_codim=args.max_codim,
        dense_limit=args.dense_limit,
    )
    _write(emit_report(report), args.out)
    return 0 if report.ok else 1


def cmd_spanning(args: argparse.Namespace) -> int:
    count = args.count if args.count is not None else 8 * args.d
    rho = Fraction(args.rho)
    family = generate_spanning_family(
        args.d,
        count,
        rho,
        args.seed,
        max_retries=args.retries,
        sampled_samples=args.samples,
        dense_limit=args.dense_limit,
    )
    if args.d <= args.dense_limit:
        check = verify_spanning_family(family, rho, d=args.d, dense_limit=args.dense_limit)
    else:
        check = verify_spanning_family_sampled(
            family, rho, d=args.d, samples=args.samples, seed=args.seed
        )
    record = {
        "schema": "f2reglab/spanning-family",
        "schema_version": 1,
        "d": args.d,
        "count": count,
        "seed": args.seed,
        "check": spanning_check_dict(check),
        "vectors": [v.bits if v.bits < 2**53 else str(v.bits) for v in family[:65536]],
    }
    _write(emit_report(record), args.out)
    return 0 if check.ok else 1


def cmd_round(args: argparse.Namespace) -> int:
    table = read_table(args.in_path, dense_limit=args.dense_limit)
    rounded = round_to_binary(table, args.seed)
    if args.out is not None:
        write_table(args.out, rounded)
    pairs = sample_pairs(table.n, args.pairs, args.seed, args.max_codim)
    report = deviation_report(
        table, rounded, args.tau, pairs, seed=args.seed, dense_limit=args.dense_limit
    )
    _write(emit_report(report), args.report)
    return 0


def cmd_bench_wht(args: argparse.Namespace) -> int:
    results = []
    for n in range(args.min_n, args.max_n + 1):
        stream = Stream(args.seed, f"bench/{n}")
        table = FunctionTable(n, stream.uniform_block(1 << n))
        best = float("inf")
        for _ in range(args.reps):
            start = time.perf_counter()
            wht_full(table, dense_limit=max(n, args.dense_limit))
            best = min(best, time.perf_counter() - start)
        results.append({"n": n, "seconds": best})
    verify_n = min(args.verify_n, args.max_n)
    stream = Stream(args.seed, f"bench/{verify_n}")
    table = FunctionTable(verify_n, stream.uniform_block(1 << verify_n))
    spectrum = wht_full(table)
    points = np.arange(1 << verify_n, dtype=np.int64)
    signs = 1.0 - 2.0 * ((np.bitwise_count(points[:, None] & points[None, :]) & 1).astype(np.float64))
    naive = (signs.T @ table.values) / float(1 << verify_n)
    max_error = float(np.max(np.abs(spectrum - naive)))
    record = {
        "schema": "f2reglab/bench-wht",
        "schema_version": 1,
        "timings": results,
        "verify_n": verify_n,
        "max_error_vs_defining_sum": max_error,
    }
    sys.stdout.write(json.dumps(record, sort_keys=True, indent=2) + "\n")
    return 0 if max_error <= 1e-12 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="f2reglab",
        description="Fourier regularity laboratory over F2^n",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(
        p: argparse.ArgumentParser,
        seed: bool = True,
        out_help: str = "report path (default stdout)",
    ) -> None:
        p.add_argument("--dense-limit", type=int, default=DEFAULT_DENSE_LIMIT,
                       help="refuse dense work above 2^LIMIT objects")
        p.add_argument("--out", default=None, help=out_help)
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def instance_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--s", type=int, required=True, help="number of blocks")
        p.add_argument("--retries", type=int, default=100,
                       help="rejection-sampling retry cap")
        p.add_argument("--samples", type=int, default=10**6,
                       help="sampled hyperplane checks for blocks too wide to enumerate")

    p = sub.add_parser("gen", help="generate an instance (table + manifest)")
    instance_opts(p)
    p.add_argument("--manifest", default=None, help="manifest path (default stdout)")
    common(p, out_help="write the dense table here (.f2fn)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", help="evaluate the instance function at a point")
    instance_opts(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--x", help="integer encoding of the point")
    group.add_argument("--x-bits", help="coordinate string x1x2...xn")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", help="eps-regularity report of a subspace for a table")
    p.add_argument("--in", dest="in_path", required=True, help="table file")
    p.add_argument("--basis", required=True,
                   help="comma-separated integer encodings of basis vectors (0 for the zero subspace)")
    p.add_argument("--eps", required=True)
    common(p, seed=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decompose", help="find an eps-regular subspace by energy increment")
    p.add_argument("--in", dest="in_path", required=True, help="table file")
    p.add_argument("--eps", required=True)
    p.add_argument("--csv", default=None, help="write per-iteration CSV here")
    p.add_argument("--single-witness", action="store_true",
                   help="refine by one character per round")
    p.add_argument("--max-index-log2", type=int, default=DEFAULT_DENSE_LIMIT)
    p.add_argument("--max-iterations", type=int, default=None)
    common(p, seed=False)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify-lowerbound",
                       help="verify that only the zero subspace is eps-regular")
    instance_opts(p)
    p.add_argument("--eps", default=None, help="defaults to 1/(16 s)")
    p.add_argument("--mode", choices=["auto", "exhaustive", "structured", "sampled"],
                   default="auto")
    p.add_argument("--random-per-dim", type=int, default=10**4)
    p.add_argument("--max-codim", type=int, default=1,
                   help="enumerate all subspaces up to this codimension in structured mode")
    p.add_argument("--no-strict", dest="strict", action="store_false",
                   help="collect failures in the report instead of raising")
    common(p)
    p.set_defaults(func=cmd_verify_lowerbound)

    p = sub.add_parser("spanning", help="generate and verify a spanning family")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--count", type=int, default=None, help="default 8*d")
    p.add_argument("--rho", default="3/4")
    p.add_argument("--retries", type=int, default=100)
    p.add_argument("--samples", type=int, default=10**6)
    common(p)
    p.set_defaults(func=cmd_spanning)

    p = sub.add_parser("round", help="randomized rounding to a binary table")
    p.add_argument("--in", dest="in_path", required=True, help="table file")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--max-codim", type=int, default=4)
    p.add_argument("--report", default=None, help="deviation report path (default stdout)")
    common(p)
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("bench-wht", help="time the transform and check it at small n")
    p.add_argument("--min-n", type=int, default=8)
    p.add_argument("--max-n", type=int, default=20)
    p.add_argument("--verify-n", type=int, default=10)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--dense-limit", type=int, default=DEFAULT_DENSE_LIMIT)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench_wht)

    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _check_threads_env()
    return args.func(args)


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except (ClaimViolationError, RetryLimitError, DecompositionError) as exc:
        sys.stdout.write(
            json.dumps(
                {
                    "schema": "f2reglab/claim-failure",
                    "schema_version": 1,
                    "error": type(exc).__name__,
                    "message": str(exc),
                },
                sort_keys=True,
                indent=2,
            )
            + "\n"
        )
        return 1
    except (DenseLimitError, TableFormatError, TowerOverflowError, ValueError, OSError) as exc:
        sys.stderr.write(f"f2reglab: error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
