"""Command-line front end.

Subcommands:
    solve      solve a single point and print D, <n>, v and classification
    sweep      run a configured parameter sweep to a CSV file
    dist       write the photon distribution P_n of a configured point
    validate   cross-check a configured point against the Monte-Carlo oracle

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from .lindblad import IntegrationFailure, TruncationLeak
from .params import SingleAtomRegimeViolation, from_dimensionless
from .steady_state import ContinuedFractionSingular, TruncationNotConverged, solve
from .sweep import (
    CapacityError,
    ParseError,
    ValidationError,
    emit_csv,
    emit_distribution,
    parse_config,
    parse_point_config,
    run_sweep,
    validate_point,
)

CONFIG_ERRORS = (ParseError, ValidationError, SingleAtomRegimeViolation,
                 CapacityError, ValueError, OSError)
NUMERICAL_ERRORS = (TruncationNotConverged, ContinuedFractionSingular,
                    IntegrationFailure, TruncationLeak, FloatingPointError)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="microlaser",
        description="Steady-state photon statistics of a single-atom microlaser.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one parameter point")
    sp.add_argument("--N", type=float, required=True,
                    help="atoms per photon lifetime, R/(2 kappa)")
    sp.add_argument("--kappa-over-g", type=float, required=True)
    sp.add_argument("--gamma-over-g", type=float, required=True)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--D", type=float, help="pump parameter sqrt(N) g tau")
    group.add_argument("--g-tau", type=float, help="flight time in units of 1/g")
    sp.add_argument("--rel-tol", type=float, default=1e-10)

    sw = sub.add_parser("sweep", help="run a configured sweep to CSV")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--rel-tol", type=float, default=1e-10)
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--validate", action="store_true",
                    help="also cross-check each desk-scale grid point against "
                         "the Monte-Carlo oracle (slow)")
    sw.add_argument("--seed", type=int, default=None,
                    help="override the oracle seed from the config")

    dp = sub.add_parser("dist", help="write P_n of a configured point to CSV")
    dp.add_argument("--config", required=True)
    dp.add_argument("--out", required=True)
    dp.add_argument("--rel-tol", type=float, default=1e-10)

    vp = sub.add_parser("validate",
                        help="cross-check a configured point against the oracle")
    vp.add_argument("--config", required=True)
    vp.add_argument("--seed", type=int, default=None,
                    help="override the oracle seed from the config")
    return ap


def _cmd_solve(args) -> int:
    g_tau = args.g_tau if args.g_tau is not None else args.D / math.sqrt(args.N)
    p = from_dimensionless(args.N, args.kappa_over_g, args.gamma_over_g, g_tau)
    result = solve(p, args.rel_tol)
    m = result.moments
    print(f"D = {result.D:.12g}")
    print(f"mean_n = {m.mean_n:.12g}")
    print(f"v = {m.variance_ratio_v:.12g}")
    print(f"classification = {m.classification}")
    print(f"n_max = {result.distribution.n_max}")
    print(f"tail_mass_bound = {result.distribution.tail_mass_bound:.3e}")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as f:
        spec = parse_config(f.read())
    rows = run_sweep(spec, rel_tol=args.rel_tol, workers=args.workers)
    count = emit_csv(rows, args.out)
    print(f"wrote {count} bytes ({len(rows)} rows) to {args.out}")
    if args.validate:
        oracle = spec.oracle if args.seed is None else replace(spec.oracle,
                                                               seed=args.seed)
        for row in rows:
            if row.skipped:
                continue
            vals = dict(spec.fixed)
            vals[spec.axis] = row.axis_value
            g_tau = vals.get("g_tau", row.D / math.sqrt(vals["N"]))
            p = from_dimensionless(vals["N"], vals["kappa_over_g"],
                                   vals["gamma_over_g"], g_tau)
            try:
                report = validate_point(p, oracle)
            except CapacityError as e:
                print(f"{spec.axis} = {row.axis_value:.6g}: {e}")
                continue
            status = "PASS" if report.passed else "FAIL"
            print(f"{spec.axis} = {row.axis_value:.6g}: {status} "
                  f"TV = {report.tv_distance:.4f} "
                  f"(threshold {report.threshold:.4f})")
    return 0


def _cmd_dist(args) -> int:
    with open(args.config, encoding="utf-8") as f:
        p, _ = parse_point_config(f.read())
    count = emit_distribution(p, args.out, rel_tol=args.rel_tol)
    print(f"wrote {count} bytes to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    with open(args.config, encoding="utf-8") as f:
        p, oracle = parse_point_config(f.read())
    if args.seed is not None:
        oracle = replace(oracle, seed=args.seed)
    report = validate_point(p, oracle)
    print(f"point: {p}")
    print(f"oracle: {report.oracle}")
    print(f"TV distance = {report.tv_distance:.6f}")
    print(f"threshold   = {report.threshold:.6f} (0.02 + 3 * {report.stderr_sum:.6f})")
    print(f"max |z|     = {max(abs(z) for z in report.z_scores):.3f}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 3


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"solve": _cmd_solve, "sweep": _cmd_sweep,
               "dist": _cmd_dist, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except NUMERICAL_ERRORS as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except CONFIG_ERRORS as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
