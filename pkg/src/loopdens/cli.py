"""Command-line surface: density tables, verification suites, oracles,
Monte Carlo runs and asymptotic residual streams.

Exit-code contract: 0 = success / all checks pass, 1 = a verification or
statistical gate failed, 2 = usage or validation error.  All exact rationals
are emitted as separate numerator/denominator fields so they round-trip
losslessly; every command is deterministic given its flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .closed_form import (
    density_record,
    nu_c_exact,
    nu_nc_exact,
    asymptotic_residual,
    residual_scale_power,
)
from .fsz import kummer_contiguous, kummer_contiguous_numeric, hyp2f1_at_minus_one, kummer_parameter_sweep
from .montecarlo import MCConfig, run as mc_run, stats_json
from .tq_identities import FSZ_IDENTITIES, TQ_IDENTITIES, VerifyResult, verify_suite
from .transfer_oracle import matrix_json, oracle_densities

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _parse_l_values(args) -> list[int]:
    if args.l is not None:
        return [args.l]
    lo, _, hi = args.l_range.partition(":")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise SystemExit2(f"bad --l-range {args.l_range!r}, expected LO:HI")
    if lo > hi:
        raise SystemExit2(f"empty --l-range {args.l_range!r}")
    return [l for l in range(lo, hi + 1) if l % 2 == 0]


class SystemExit2(Exception):
    """Usage error carrying an exit-2 message."""


def cmd_density(args, out) -> int:
    ls = _parse_l_values(args)
    for l in ls:
        if l % 2 or l < 2:
            raise SystemExit2(f"circumference must be even and >= 2, got {l}")
    records = [density_record(l // 2) for l in ls]
    if args.format == "text":
        for r in records:
            if args.mode == "exact":
                out.write(f"L={r.L}  nu_c={r.nu_c}  nu_nc={r.nu_nc}\n")
            else:
                out.write(f"L={r.L}  nu_c={r.nu_c_float!r}  nu_nc={r.nu_nc_float!r}\n")
    elif args.format == "csv":
        w = csv.writer(out)
        w.writerow(["L", "nu_c_num", "nu_c_den", "nu_nc_num", "nu_nc_den", "nu_c_float", "nu_nc_float"])
        for r in records:
            w.writerow(
                [
                    r.L,
                    r.nu_c.numerator,
                    r.nu_c.denominator,
                    r.nu_nc.numerator,
                    r.nu_nc.denominator,
                    repr(r.nu_c_float),
                    repr(r.nu_nc_float),
                ]
            )
    else:
        payload = [
            {
                "L": r.L,
                "N": r.N,
                "nu_c": {"num": r.nu_c.numerator, "den": r.nu_c.denominator},
                "nu_nc": {"num": r.nu_nc.numerator, "den": r.nu_nc.denominator},
                "nu_c_float": r.nu_c_float,
                "nu_nc_float": r.nu_nc_float,
                "method": r.method,
            }
            for r in records
        ]
        out.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _kummer_rows(n_max: int) -> list[VerifyResult]:
    rows = []
    for n in range(1, n_max + 1):
        pairs = [(a, b) for (nn, a, b) in kummer_parameter_sweep(n_max) if nn == n]
        ok_plus = ok_minus = True
        for a, b in pairs:
            for shift in (0, 1, 2):
                series = hyp2f1_at_minus_one(a, b, 1 + a - b + shift)
                if kummer_contiguous(a, b, shift) != series:
                    ok_plus = False
                if abs(kummer_contiguous_numeric(a, b, shift) - float(series)) > 1e-12 * max(
                    1.0, abs(float(series))
                ):
                    ok_plus = False
            for shift in (0, -1, -2):
                series = hyp2f1_at_minus_one(a, b, 1 + a - b + shift)
                if kummer_contiguous(a, b, shift) != series:
                    ok_minus = False
                if abs(kummer_contiguous_numeric(a, b, shift) - float(series)) > 1e-12 * max(
                    1.0, abs(float(series))
                ):
                    ok_minus = False
        rows.append(VerifyResult("kummer_shift_plus", n, ok_plus))
        rows.append(VerifyResult("kummer_shift_minus", n, ok_minus))
    return rows


def cmd_verify(args, out) -> int:
    if args.n_max < 1:
        raise SystemExit2(f"--n-max must be >= 1, got {args.n_max}")
    rows: list[VerifyResult] = []
    if args.suite in ("tq", "all"):
        rows += [r for r in verify_suite(args.n_max, include_fsz=False)]
    if args.suite in ("fsz", "all"):
        rows += [
            r
            for r in verify_suite(args.n_max, include_fsz=True)
            if r.identity in FSZ_IDENTITIES
        ]
    if args.suite in ("kummer", "all"):
        rows += _kummer_rows(args.n_max)
    failures = [r for r in rows if not r.ok]
    if args.format == "json":
        payload = [
            {"identity": r.identity, "N": r.n, "status": "pass" if r.ok else "fail", "detail": r.detail}
            for r in rows
        ]
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_FAIL if failures else EXIT_OK
    for r in rows:
        status = "pass" if r.ok else "FAIL"
        detail = f"  ({r.detail})" if r.detail else ""
        out.write(f"{r.identity:<22} N={r.n:<3} {status}{detail}\n")
    if failures:
        f = failures[0]
        out.write(f"FAILED: {f.identity} at N={f.n} {f.detail}\n")
        return EXIT_FAIL
    out.write(f"all {len(rows)} checks passed\n")
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    l = args.l
    if l not in (2, 4, 6, 8):
        raise SystemExit2(f"oracle supports L in {{2, 4, 6, 8}}, got {l}")
    rec = oracle_densities(l)
    exact_c, exact_nc = nu_c_exact(l // 2), nu_nc_exact(l // 2)
    if args.dump_matrix:
        with open(args.dump_matrix, "w", encoding="utf-8") as fh:
            json.dump(matrix_json(l), fh, indent=2)
    match = rec.nu_c == exact_c and rec.nu_nc == exact_nc
    out.write(f"L={l}\n")
    out.write(f"oracle:      nu_c={rec.nu_c}  nu_nc={rec.nu_nc}\n")
    out.write(f"closed form: nu_c={exact_c}  nu_nc={exact_nc}\n")
    out.write("EXACT-MATCH\n" if match else "MISMATCH\n")
    return EXIT_OK if match else EXIT_FAIL


def cmd_simulate(args, out) -> int:
    try:
        cfg = MCConfig(L=args.l, H=args.height, seed=args.seed, replicas=args.replicas)
        cfg.validate()
    except ValueError as exc:
        raise SystemExit2(str(exc))
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("LOOPDENS_THREADS", "1"))
    stats = mc_run(cfg, workers=workers)
    target_c = float(nu_c_exact(cfg.L // 2))
    target_nc = float(nu_nc_exact(cfg.L // 2))
    out.write(stats_json(stats, target_c, target_nc) + "\n")
    z_c = abs(stats.mean_nu_c - target_c) / stats.stderr_nu_c
    z_nc = abs(stats.mean_nu_nc - target_nc) / stats.stderr_nu_nc
    return EXIT_OK if max(z_c, z_nc) < 4.0 else EXIT_FAIL


def cmd_asymptote(args, out) -> int:
    ls = _parse_l_values(args)
    for l in ls:
        if l % 2 or l < 2:
            raise SystemExit2(f"circumference must be even and >= 2, got {l}")
    w = csv.writer(out)
    w.writerow(["L", "quantity", "exact", "series", "residual", "residual_scaled"])
    for l in ls:
        n = l // 2
        for kind in ("nu_c", "nu_nc"):
            exact, series, residual = asymptotic_residual(kind, n, args.order)
            scaled = abs(residual) * (2 * n) ** residual_scale_power(kind, args.order)
            w.writerow([l, kind, repr(exact), repr(series), repr(residual), repr(scaled)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="loopdens",
        description="Exact loop densities of the O(1) dense loop model on a cylinder, "
        "with transfer-matrix, six-vertex and Monte Carlo cross-checks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", help="print exact/float density records")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--l", type=int, help="even circumference")
    g.add_argument("--l-range", help="inclusive range LO:HI, even L only")
    d.add_argument("--format", choices=["text", "csv", "json"], default="text")
    d.add_argument("--mode", choices=["exact", "float"], default="exact")
    d.set_defaults(func=cmd_density)

    v = sub.add_parser("verify", help="run identity verification suites")
    v.add_argument("suite", choices=["fsz", "tq", "kummer", "all"])
    v.add_argument("--n-max", type=int, default=8)
    v.add_argument("--format", choices=["text", "json"], default="text")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="compare transfer-matrix oracle to closed forms")
    o.add_argument("--l", type=int, required=True)
    o.add_argument("--dump-matrix", metavar="PATH", help="write the transfer operator as JSON")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("simulate", help="Monte Carlo estimate with z-scores vs exact")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--height", type=int, required=True)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--replicas", type=int, default=16)
    s.add_argument("--workers", type=int, default=None, help="process count (default: $LOOPDENS_THREADS or 1)")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("asymptote", help="exact-vs-series residual CSV stream")
    ga = a.add_mutually_exclusive_group(required=True)
    ga.add_argument("--l", type=int)
    ga.add_argument("--l-range", help="inclusive range LO:HI, even L only")
    a.add_argument("--order", type=int, choices=[0, 1, 2], default=0)
    a.set_defaults(func=cmd_asymptote)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args, sys.stdout)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
