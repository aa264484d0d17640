"""Command-line front end.

Exit codes: 0 success (and audit pass), 1 audit failure, 2 usage error,
3 numerical failure (including unresolved points).  Configuration
precedence: flags, then CAPTIVEEQ_* environment variables, then
defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import expint
from .errors import CaptiveqError
from .expint import QuadTolerance, ei, ei_delta
from .mapper import GridConfig, emit_cdf, emit_map, scan_grid, solve_point
from .mixed import MixedContext, eval_g, eval_g0, eval_gpi, eval_h, density_g, density_h
from .verify import audit_mixed, audit_pure

_FIGURE_POINTS = (
    (0.4, 0.7, 1),
    (0.25, 0.85, 2),
    (0.7, 0.8, 3),
    (0.84, 0.9, 4),
    (0.48, 0.6, 17),
    (0.52, 0.65, 18),
    (0.57, 0.67, 19),
)


@dataclass
class CliConfig:
    quad_tol: float
    audit_tol: float
    out_dir: str
    verbose: bool

    def __post_init__(self) -> None:
        if self.quad_tol <= 0.0 or self.audit_tol <= 0.0:
            raise ValueError("tolerances must be positive")


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise CaptiveqError(f"{name} must be a number, got {raw!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="captiveq",
        description="Price-equilibrium solver and auditor for the captive-buyer market",
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--quad-tol", type=float, default=None, help="Ei relative accuracy")
    ap.add_argument("--audit-tol", type=float, default=None, help="audit pass tolerance")
    sub = ap.add_subparsers(dest="command", required=True)

    def point_args(p):
        p.add_argument("--z1", type=float, required=True)
        p.add_argument("--z2", type=float, required=True)

    point_args(sub.add_parser("classify", help="print one map-format row"))
    point_args(sub.add_parser("solve", help="print equilibrium details"))
    p = sub.add_parser("verify", help="run the full audit at one point")
    point_args(p)
    p.add_argument("--price-step", type=float, default=0.001)
    p = sub.add_parser("map", help="emit map data files for the plane sweep")
    p.add_argument("--spacing", type=float, default=0.002)
    p.add_argument("--fine", action="store_true", help="also emit the blow-up window")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p = sub.add_parser("cdf", help="emit a four-column CDF file for a mixed point")
    point_args(p)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--p-step", type=float, default=0.001)
    sub.add_parser("selftest", help="run the built-in identity suite")
    return ap


def _resolve_config(args: argparse.Namespace) -> CliConfig:
    quad = args.quad_tol if args.quad_tol is not None else _env_float(
        "CAPTIVEEQ_QUAD_TOL", 1e-12
    )
    audit = args.audit_tol if args.audit_tol is not None else _env_float(
        "CAPTIVEEQ_AUDIT_TOL", 1e-9
    )
    out = getattr(args, "out", None) or os.environ.get("CAPTIVEEQ_OUT_DIR") or "."
    return CliConfig(quad_tol=quad, audit_tol=audit, out_dir=out, verbose=args.verbose)


def _record_row(rec) -> str:
    return (
        f"{rec.z1:.16f} {rec.z2:.16f} {rec.region} "
        f"{rec.w:.16f} {rec.pi1:.16f} {rec.pi2:.16f}"
    )


def _cmd_classify(args, cfg: CliConfig) -> int:
    res = solve_point(args.z1, args.z2, audit_tol=cfg.audit_tol)
    print(_record_row(res.record()))
    return 0


def _cmd_solve(args, cfg: CliConfig) -> int:
    res = solve_point(args.z1, args.z2, audit_tol=cfg.audit_tol)
    if res.region == -1:
        print(f"point ({args.z1}, {args.z2}) is unresolved (region -1)", file=sys.stderr)
        return 3
    pi1, pi2 = res.profits
    print(f"point ({args.z1}, {args.z2})  kind {res.kind}  region {res.region}")
    if res.swapped:
        print("note: firm labels swapped relative to the canonical computation")
    if res.pure is not None:
        pr = res.pure.prices
        p1, p2 = (pr.p2, pr.p1) if res.swapped else (pr.p1, pr.p2)
        print(f"prices  p1* = {p1:.16f}  p2* = {p2:.16f}")
    else:
        eq = res.mixed
        print(f"width   w = {eq.w:.16f}")
        for name, spec in (("F1", eq.F1), ("F2", eq.F2)):
            label = name if not res.swapped else ("F2" if name == "F1" else "F1")
            for seg in spec.segments:
                print(f"{label} segment [{seg.lo:.16f}, {seg.hi:.16f}] {type(seg.piece).__name__}")
            for loc, mass in spec.atoms:
                print(f"{label} atom at {loc:.16f} mass {mass:.16f}")
    print(f"profits pi1* = {pi1:.16f}  pi2* = {pi2:.16f}")
    return 0


def _cmd_verify(args, cfg: CliConfig) -> int:
    t0 = time.perf_counter()
    res = solve_point(args.z1, args.z2, audit_tol=cfg.audit_tol)
    if res.region == -1:
        print(f"point ({args.z1}, {args.z2}) is unresolved (region -1)", file=sys.stderr)
        return 3
    if res.mixed is not None:
        report = audit_mixed(
            res.mixed,
            price_step=args.price_step,
            tol_on=cfg.audit_tol,
            tol_off=cfg.audit_tol,
        )
    else:
        from .market import LocationPair

        report = audit_pure(
            res.pure,
            LocationPair(*res.canonical),
            price_step=args.price_step,
            tol_off=cfg.audit_tol,
        )
    dt = time.perf_counter() - t0
    print(f"kind {res.kind}  scanned {report.scanned_points} prices in {dt:.2f}s")
    print(f"max on-support |E - profit*|   = {report.max_on_support_deviation:.3e}")
    print(f"max off-support E - profit*    = {report.max_off_support_excess:.3e}")
    print(f"worst off-support price        = {report.worst_price}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def _cmd_map(args, cfg: CliConfig) -> int:
    os.makedirs(cfg.out_dir, exist_ok=True)
    t0 = time.perf_counter()
    base = GridConfig(spacing=args.spacing)
    records = scan_grid(base, jobs=args.jobs, audit_tol=cfg.audit_tol)
    path = os.path.join(cfg.out_dir, "map.dat")
    emit_map(records, path)
    if cfg.verbose:
        print(f"wrote {path} ({len(records)} rows)", file=sys.stderr)
    if args.fine:
        fine = GridConfig.fine_window()
        records = scan_grid(fine, jobs=args.jobs, audit_tol=cfg.audit_tol)
        path = os.path.join(cfg.out_dir, "map_mixed.dat")
        emit_map(records, path)
        if cfg.verbose:
            print(f"wrote {path} ({len(records)} rows)", file=sys.stderr)
    if cfg.verbose:
        print(f"scan finished in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0


def _cmd_cdf(args, cfg: CliConfig) -> int:
    res = solve_point(args.z1, args.z2, audit_tol=cfg.audit_tol)
    if res.mixed is None:
        print(
            f"point ({args.z1}, {args.z2}) has no mixed equilibrium (region {res.region})",
            file=sys.stderr,
        )
        return 3
    grid = np.arange(0, int(round(args.p_max / args.p_step)) + 1) * args.p_step
    emit_cdf(res.mixed, grid, args.out, swapped=res.swapped)
    if cfg.verbose:
        print(f"wrote {args.out} ({grid.size} rows)", file=sys.stderr)
    return 0


def _cmd_selftest(args, cfg: CliConfig) -> int:
    checks: list[tuple[str, bool]] = []

    val = ei(1.0)
    checks.append(("ei(1) matches reference", abs(val - 1.8951178163559368) < 1e-12))
    val = ei(-1.0)
    checks.append(("ei(-1) matches reference", abs(val + 0.21938393439552026) < 1e-12))
    lhs = ei_delta(-3.0, -1.5) + ei_delta(-1.5, -0.4)
    checks.append(("ei_delta additivity", abs(lhs - ei_delta(-3.0, -0.4)) < 1e-11))

    for z1, z2 in ((0.48, 0.6), (0.52, 0.65), (0.57, 0.67)):
        ctx = MixedContext.from_pair(z1, z2)
        b = z1 if z1 <= 0.5 else 1.0 - z1
        a = b + 0.3 * ctx.delta + ctx.delta  # safely above the h-domain floor
        checks.append((f"h(a;a)=0 at ({z1},{z2})", abs(eval_h(ctx, a, a)) < 1e-12))
        pi2 = 0.7
        d = 3.0 - z1 - 2.0 * z2 - b
        gbb = ((5.0 - z1 - 2.0 * z2 - b) - 2.0 * pi2 / (b + ctx.delta)) / d
        checks.append(
            (f"g(b;b) closed form at ({z1},{z2})", abs(eval_g(ctx, b, b, pi2) - gbb) < 1e-10)
        )
        p = b - 0.05
        eps = 1e-6
        dg = (eval_g(ctx, p + eps, b, pi2) - eval_g(ctx, p - eps, b, pi2)) / (2 * eps)
        checks.append(
            (
                f"g slope identity at ({z1},{z2})",
                abs(dg - density_g(ctx, p, b, pi2)) < 1e-6 * max(1.0, abs(dg)),
            )
        )
        ph = a + 0.05
        dh = (eval_h(ctx, ph + eps, a) - eval_h(ctx, ph - eps, a)) / (2 * eps)
        checks.append(
            (
                f"h slope identity at ({z1},{z2})",
                abs(dh - density_h(ctx, ph, a)) < 1e-6 * max(1.0, abs(dh)),
            )
        )

    for z1, z2, code in _FIGURE_POINTS:
        res = solve_point(z1, z2, audit_tol=cfg.audit_tol)
        checks.append((f"({z1}, {z2}) classifies as region {code}", res.region == code))

    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok &= passed
    return 0 if ok else 1


_COMMANDS = {
    "classify": _cmd_classify,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "map": _cmd_map,
    "cdf": _cmd_cdf,
    "selftest": _cmd_selftest,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _resolve_config(args)
        expint.DEFAULT_TOL = QuadTolerance(relative_error_target=cfg.quad_tol)
        return _COMMANDS[args.command](args, cfg)
    except (CaptiveqError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
