"""Classification of location pairs and the grid sweep that maps them.

Every query point is first routed to its canonical representative:
firm indices are swapped when ``z1 > z2`` (the model pins firm 1's loyal
buyer to the left endpoint), and the pair is reflected through the
anti-diagonal (``(z1, z2) -> (1 - z2, 1 - z1)``, which also exchanges
firm roles) when ``z1 + z2 < 1``.  All region logic then runs on the
canonical point, and profits are swapped back as needed.  Both members
of a mirror pair therefore go through literally the same arithmetic,
which makes the symmetry exact at the bit level.

Region codes: 1-4 for the pure kinds, 17-19 for the mixed kinds, -1 for
points the theory does not resolve (including the degenerate diagonal).
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CaptiveqError, ConstructionError, NoRootError
from .market import LocationPair
from .mixed import (
    MIN_WIDTH,
    MIXED_KINDS,
    MixedContext,
    MixedEquilibrium,
    MultipleRootsWarning,
    bracket_w,
    build_mixed,
    refine_w,
    region_gates,
    side_conditions,
)
from .pure import PURE_KINDS, PureEquilibrium, build_pure, check_p1, check_p2, check_p3, check_p4
from .verify import audit_mixed

REGION_CODES = {"P1": 1, "P2": 2, "P3": 3, "P4": 4, "M1": 17, "M2": 18, "M3": 19}
UNRESOLVED = -1

_PURE_CHECKS = {"P1": check_p1, "P2": check_p2, "P3": check_p3, "P4": check_p4}


@dataclass(frozen=True)
class RegionRecord:
    """One map row: point, region code, width and equilibrium profits."""

    z1: float
    z2: float
    region: int
    w: float
    pi1: float
    pi2: float


@dataclass(frozen=True)
class SolveResult:
    """Full classification outcome, keeping the constructed equilibrium.

    ``swapped`` records whether the canonical firm labels are exchanged
    relative to the queried orientation; the stored equilibrium always
    lives at the canonical point.
    """

    z1: float
    z2: float
    region: int
    swapped: bool
    canonical: tuple[float, float]
    pure: PureEquilibrium | None = None
    mixed: MixedEquilibrium | None = None

    @property
    def kind(self) -> str | None:
        if self.pure is not None:
            return self.pure.kind
        if self.mixed is not None:
            return self.mixed.kind
        return None

    @property
    def w(self) -> float:
        return self.mixed.w if self.mixed is not None else 0.0

    @property
    def profits(self) -> tuple[float, float]:
        if self.pure is not None:
            p1, p2 = self.pure.profits
        elif self.mixed is not None:
            p1, p2 = self.mixed.profits
        else:
            return (0.0, 0.0)
        return (p2, p1) if self.swapped else (p1, p2)

    def record(self) -> RegionRecord:
        pi1, pi2 = self.profits
        return RegionRecord(self.z1, self.z2, self.region, self.w, pi1, pi2)


def canonicalize(z1: float, z2: float) -> tuple[float, float, bool]:
    """Canonical representative of a location pair plus the swap flag."""
    swapped = False
    if z1 > z2:
        z1, z2 = z2, z1
        swapped = True
    if z1 + z2 < 1.0:
        z1, z2 = 1.0 - z2, 1.0 - z1
        swapped = not swapped
    return z1, z2, swapped


def solve_point(
    z1: float,
    z2: float,
    quick_audit: bool = True,
    audit_step: float = 0.01,
    audit_tol: float = 1e-9,
    quiet: bool = False,
) -> SolveResult:
    """Classify one location pair and construct its equilibrium."""
    if not (0.0 < z1 < 1.0 and 0.0 < z2 < 1.0):
        raise ValueError(f"locations must lie strictly inside (0, 1), got ({z1}, {z2})")
    if z1 == z2:
        # co-located firms cannot split the informed market
        return SolveResult(z1, z2, UNRESOLVED, False, (z1, z2))
    c1, c2, swapped = canonicalize(z1, z2)
    z = LocationPair(c1, c2)

    for kind in PURE_KINDS:
        if _PURE_CHECKS[kind](z):
            return SolveResult(
                z1, z2, REGION_CODES[kind], swapped, (c1, c2), pure=build_pure(z, kind)
            )

    ctx = MixedContext.from_pair(c1, c2)
    for kind in MIXED_KINDS:
        if not region_gates(c1, c2, kind):
            continue
        try:
            brackets = bracket_w(ctx, kind)
            if len(brackets) > 1 and not quiet:
                warnings.warn(
                    f"{kind} width equation has {len(brackets)} candidate roots "
                    f"at ({c1}, {c2}); using the smallest",
                    MultipleRootsWarning,
                    stacklevel=2,
                )
            w = None
            for lo, hi in brackets:
                if hi <= MIN_WIDTH:
                    continue
                # cheap screen: if the side conditions fail on both ends of
                # the (already narrow) bracket, the refined root fails them
                # too except within a boundary sliver thinner than the grid
                if not (
                    side_conditions(ctx, kind, max(lo, MIN_WIDTH))
                    or side_conditions(ctx, kind, hi)
                ):
                    break
                cand = refine_w(ctx, kind, (lo, hi))
                if cand > MIN_WIDTH:
                    w = cand
                    break
            if w is None or not side_conditions(ctx, kind, w):
                continue
            eq = build_mixed(ctx, kind, w)
            if quick_audit:
                report = audit_mixed(
                    eq, price_step=audit_step, tol_on=audit_tol, tol_off=audit_tol
                )
                if not report.passed:
                    continue
        except (NoRootError, ConstructionError):
            continue
        except CaptiveqError:
            continue
        return SolveResult(z1, z2, REGION_CODES[kind], swapped, (c1, c2), mixed=eq)
    return SolveResult(z1, z2, UNRESOLVED, swapped, (c1, c2))


def classify_point(z1: float, z2: float, **kwargs) -> RegionRecord:
    """Region record for one location pair (see :func:`solve_point`)."""
    return solve_point(z1, z2, **kwargs).record()


# ---------------------------------------------------------------------------
# grid sweep


@dataclass(frozen=True)
class GridConfig:
    """Sampling layout for the location-plane sweep.

    Points are placed at cell midpoints, so a range of length L with
    spacing s yields exactly L/s points strictly inside the open range.
    ``z1_spacing`` optionally refines the z1 axis only (the blow-up
    window keeps the z2 spacing).
    """

    z1_range: tuple[float, float] = (0.0, 1.0)
    z2_range: tuple[float, float] = (0.5, 1.0)
    spacing: float = 0.002
    z1_spacing: float | None = None

    def __post_init__(self) -> None:
        if self.spacing <= 0.0 or (self.z1_spacing is not None and self.z1_spacing <= 0.0):
            raise ValueError("grid spacing must be positive")
        for lo, hi in (self.z1_range, self.z2_range):
            if not (0.0 <= lo < hi <= 1.0):
                raise ValueError("grid ranges must be ordered and within [0, 1]")

    @classmethod
    def fine_window(cls) -> "GridConfig":
        """Blow-up of the mixed-strategy band with a finer z1 axis."""
        return cls(z1_range=(0.42, 0.6), z1_spacing=0.0005)

    def _axis(self, rng: tuple[float, float], step: float) -> np.ndarray:
        n = int(round((rng[1] - rng[0]) / step))
        return rng[0] + (np.arange(n) + 0.5) * step

    def z1_points(self) -> np.ndarray:
        return self._axis(self.z1_range, self.z1_spacing or self.spacing)

    def z2_points(self) -> np.ndarray:
        return self._axis(self.z2_range, self.spacing)


def _scan_row(args: tuple) -> list[RegionRecord]:
    z1s, z2, audit_step, audit_tol = args
    return [
        classify_point(z1, z2, audit_step=audit_step, audit_tol=audit_tol, quiet=True)
        for z1 in z1s
    ]


def scan_grid(
    cfg: GridConfig,
    jobs: int | None = None,
    audit_step: float = 0.01,
    audit_tol: float = 1e-9,
) -> list[RegionRecord]:
    """Classify every grid point; row-major order with z1 varying fastest.

    Rows are independent, so they may be classified by a process pool;
    the output order (and content) is identical for any job count.
    """
    z1s = [float(v) for v in cfg.z1_points()]
    z2s = [float(v) for v in cfg.z2_points()]
    tasks = [(z1s, z2, audit_step, audit_tol) for z2 in z2s]
    if jobs is None:
        jobs = os.cpu_count() or 1
    records: list[RegionRecord] = []
    if jobs <= 1 or len(tasks) <= 1:
        for task in tasks:
            records.extend(_scan_row(task))
        return records
    import multiprocessing as mp

    with mp.Pool(processes=jobs) as pool:
        for row in pool.imap(_scan_row, tasks, chunksize=2):
            records.extend(row)
    return records


# ---------------------------------------------------------------------------
# file emission


def _fmt(v: float) -> str:
    return f"{v:.16f}"


MAP_HEADER = (
    "# z1 z2 region w profit1 profit2 | region codes: 1=P1 2=P2 3=P3 4=P4 "
    "(code 4 extends the base 1/2/3 scheme) 17=M1 18=M2 19=M3 -1=unresolved\n"
)


def emit_map(records: list[RegionRecord], path: str) -> str:
    """Write the six-column map file; one row per grid point."""
    if not records:
        raise ValueError("no records to emit")
    try:
        with open(path, "w") as fh:
            fh.write(MAP_HEADER)
            for r in records:
                fh.write(
                    f"{_fmt(r.z1)} {_fmt(r.z2)} {r.region} "
                    f"{_fmt(r.w)} {_fmt(r.pi1)} {_fmt(r.pi2)}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write map file {path!r}: {exc}") from exc
    return path


def emit_cdf(
    eq: MixedEquilibrium,
    price_grid: np.ndarray,
    path: str,
    swapped: bool = False,
) -> str:
    """Write the four-column CDF file on a shared price grid."""
    grid = np.asarray(price_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty price grid")
    f1 = eq.F1.value_many(grid)
    f2 = eq.F2.value_many(grid)
    if swapped:
        f1, f2 = f2, f1
    try:
        with open(path, "w") as fh:
            for p, a, b in zip(grid, f1, f2):
                fh.write(f"{_fmt(p)} {_fmt(a)} {_fmt(p)} {_fmt(b)}\n")
    except OSError as exc:
        raise OSError(f"cannot write CDF file {path!r}: {exc}") from exc
    return path
