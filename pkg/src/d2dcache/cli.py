"""Command line entry point: ``d2dcache {simulate,analyze,curve,verify}``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import analysis, converse
from .combinatorics import float12, frac_str
from .demand import check_demand, parse_demand, worst_case_demand
from .scheme import DecodeMismatch, SchemeError, SystemParams, simulate
from .verify import CHECKS, run_checks, worker_count

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_DECODE = 3
EXIT_VERIFY = 4
EXIT_IO = 5


class ConfigError(Exception):
    pass


def _exact(x: Fraction) -> dict:
    return {"exact": frac_str(x), "float": float12(x)}


def _resolve_t(args) -> Fraction:
    if (args.t is None) == (args.m is None):
        raise ConfigError("give exactly one of --t or --m")
    if args.t is not None:
        return Fraction(args.t)
    try:
        M = Fraction(args.m)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad memory value {args.m!r}") from None
    return M * args.k / args.n


def _demand_arg(args, N, K):
    if args.demand in (None, "worst"):
        return worst_case_demand(N, K)
    try:
        return check_demand(parse_demand(args.demand), N, K)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_simulate(args) -> tuple[str, int]:
    t = _resolve_t(args)
    if t.denominator != 1:
        raise ConfigError(f"simulate needs an integer t, got {frac_str(t)}")
    N, K = args.n, args.k
    try:
        params = SystemParams.from_subpiece_bytes(N, K, int(t), args.subpiece_bytes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.samples is None:
        jobs = [(_demand_arg(args, N, K), args.seed)]
    else:
        if args.demand is not None:
            raise ConfigError("--samples draws demands; do not combine with --demand")
        rng = np.random.Generator(np.random.PCG64(args.seed))
        jobs = []
        for _ in range(args.samples):
            d = tuple(int(x) for x in rng.integers(1, N + 1, size=K))
            jobs.append((d, int(rng.integers(0, 2**63))))
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(lambda job: simulate(params, job[0], seed=job[1]), jobs))
    transcripts = [r.transcript() for r in results]
    payload = transcripts[0] if args.samples is None else transcripts
    return json.dumps(payload, indent=2) + "\n", EXIT_OK


def cmd_analyze(args) -> tuple[str, int]:
    N, K = args.n, args.k
    t = _resolve_t(args)
    M = t * N / K
    if not Fraction(N, K) <= M <= N:
        raise ConfigError(f"memory {frac_str(M)} outside [N/K, N]")
    out = {"params": {"N": N, "K": K, "M": frac_str(M), "t": frac_str(t)}, "loads": {}}
    loads = out["loads"]
    for scheme in analysis.SCHEMES:
        for mode in analysis.DEMAND_MODES:
            loads[f"{scheme}_{mode}"] = _exact(analysis.load_at_memory(N, K, M, scheme, mode))
    loads["average_converse"] = _exact(converse.average_converse(N, K, M))
    loads["worst_case_converse"] = _exact(converse.worst_case_converse(N, K, M))
    if args.demand not in (None, "worst", "average"):
        d = _demand_arg(args, N, K)
        out["demand"] = list(d)
        if t.denominator == 1:
            loads["per_demand"] = _exact(analysis.per_demand_load(N, K, int(t), d))
    if args.format == "csv":
        lines = ["quantity,exact,float"] + [f"{k},{v['exact']},{v['float']!r}" for k, v in loads.items()]
        return "\n".join(lines) + "\n", EXIT_OK
    return json.dumps(out, indent=2) + "\n", EXIT_OK


def cmd_curve(args) -> tuple[str, int]:
    N, K = args.n, args.k
    mode = args.demand or "worst"
    if mode not in analysis.DEMAND_MODES:
        raise ConfigError("curve --demand must be 'worst' or 'average'")
    try:
        grid = analysis.memory_grid(N, K, args.grid_points)
        rows = []
        for scheme in analysis.SCHEMES:
            rows += analysis.curve_rows(N, K, mode, analysis.memory_load_curve(N, K, scheme, mode, grid))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.format == "json":
        return json.dumps(rows, indent=2) + "\n", EXIT_OK
    return analysis.rows_to_csv(rows), EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    try:
        n_cap, k_cap = (int(x) for x in args.caps.split(","))
    except ValueError:
        raise ConfigError(f"--caps expects 'N,K', got {args.caps!r}") from None
    try:
        report = run_checks(n_cap, k_cap, skip=args.skip, corrupt_user=args.inject_corruption)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ok = all(c["pass"] for c in report["checks"])
    return json.dumps(report, indent=2) + "\n", EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="d2dcache", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--n", type=int, required=True, help="number of files N")
        p.add_argument("--k", type=int, required=True, help="number of users K")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=default_format)

    p = sub.add_parser("simulate", help="bit-exact placement, delivery and decoding")
    common(p, "json")
    p.add_argument("--t", type=int)
    p.add_argument("--m", help="memory per user, e.g. 1 or 3/2")
    p.add_argument("--demand", help="'worst' or a list such as 1,2,1,1")
    p.add_argument("--samples", type=int, help="number of random demands to simulate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subpiece-bytes", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="closed-form loads at one memory point")
    common(p, "json")
    p.add_argument("--t", type=int)
    p.add_argument("--m")
    p.add_argument("--demand", help="'worst', 'average' or an explicit vector")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("curve", help="memory-load curves of all schemes")
    common(p, "csv")
    p.add_argument("--demand", choices=analysis.DEMAND_MODES, default="worst")
    p.add_argument("--grid-points", type=int)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="exhaustive oracle checks at small N, K")
    p.add_argument("--caps", default="3,5", help="N,K caps (default 3,5)")
    p.add_argument("--skip", action="append", default=[], choices=sorted(CHECKS))
    p.add_argument("--inject-corruption", type=int, metavar="USER",
                   help="flip a cached bit of USER before delivery (negative test)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = args.func(args)
    except ConfigError as exc:
        print(f"d2dcache: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except DecodeMismatch as exc:
        print(f"d2dcache: decode failure: {exc}", file=sys.stderr)
        print(json.dumps(exc.witness), file=sys.stderr)
        return EXIT_DECODE
    except SchemeError as exc:
        print(f"d2dcache: decode failure: {exc}", file=sys.stderr)
        return EXIT_DECODE
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"d2dcache: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
