"""Mixed-strategy equilibria M1-M3: kernels, width solver, CDF builders.

The equilibrium price distributions are built from two families of
functions of a price ``p``:

* the g-family (``eval_g0``, ``eval_gpi``, ``eval_g``) describes the low
  firm's distribution on its continuous support island;
* the h-family (``eval_h``) describes the high firm's distribution.

Both families combine elementary terms with an exponential-integral
difference, which is always evaluated as a single quadrature over the
argument interval (see :mod:`captiveq.expint`) so that no cancellation
or overflow occurs even for extreme rate parameters.

Each equilibrium kind has one unknown, the common support width ``w``,
pinned by a scalar equation solved here by a dense sign-change pre-scan
followed by bisection.  Side conditions then decide whether the
constructed distributions are actually an equilibrium.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import expint
from .errors import (
    ConditionError,
    ConstructionError,
    NoRootError,
    SingularityError,
)
from .expint import QuadTolerance
from .market import LocationPair

MIXED_KINDS = ("M1", "M2", "M3")

# roots below this are grid-scale boundary noise, not usable widths
MIN_WIDTH = 1e-10

# beyond this exponent magnitude the unscaled batch path would overflow;
# fall back to the scaled scalar route (never reached on the paper grid)
_BATCH_EXP_LIMIT = 600.0

_PRESCAN_TOL = QuadTolerance(relative_error_target=1e-9, max_refinements=40)


class MultipleRootsWarning(RuntimeWarning):
    """Width equation showed more than one sign bracket."""


@dataclass(frozen=True)
class MixedContext:
    """Location pair plus the derived constants used by every kernel."""

    z: LocationPair
    delta: float
    lambda2: float

    def __post_init__(self) -> None:
        if not self.delta > 0.0:
            raise ValueError("mixed context requires z1 < z2")
        if not self.z.z2 < 1.0:
            raise ValueError("mixed context requires z2 < 1")
        if self.delta != self.z.z2 - self.z.z1:
            raise ValueError("delta must equal z2 - z1 exactly")
        if self.lambda2 != 1.0 / (2.0 * (1.0 - self.z.z2)):
            raise ValueError("lambda2 must equal 1/(2(1-z2)) exactly")

    @classmethod
    def from_pair(cls, z1: float, z2: float) -> "MixedContext":
        z = LocationPair(z1, z2)
        if not z2 < 1.0:
            raise ValueError("mixed context requires z2 < 1")
        return cls(z=z, delta=z2 - z1, lambda2=1.0 / (2.0 * (1.0 - z2)))


# ---------------------------------------------------------------------------
# kernel evaluation


def _g_denom(ctx: MixedContext, b: float) -> float:
    d = 3.0 - ctx.z.z1 - 2.0 * ctx.z.z2 - b
    if abs(d) < 1e-12:
        raise SingularityError("g-kernel denominator vanishes")
    return d


def eval_g0(ctx: MixedContext, p: float, b: float) -> float:
    d = _g_denom(ctx, b)
    return 1.0 + (2.0 / d) * math.exp(-ctx.lambda2 * (b - p))


def eval_gpi(
    ctx: MixedContext, p: float, b: float, tol: QuadTolerance | None = None
) -> float:
    z1 = ctx.z.z1
    lam, delta = ctx.lambda2, ctx.delta
    if p + delta <= 0.0 or b + delta <= 0.0:
        raise SingularityError("g-kernel requires positive shifted prices")
    d = _g_denom(ctx, b)
    xb = -lam * (b + delta)
    xp = -lam * (p + delta)
    # e^{-xp} * (Ei(xp) - Ei(xb)), kept scaled to dodge overflow
    scaled = expint._integrate(xb, xp, xp, tol or expint.DEFAULT_TOL)
    t1 = 2.0 * lam / (p + delta)
    t2 = (2.0 * lam / (b + delta)) * ((1.0 - z1 - b) / d) * math.exp(-lam * (b - p))
    return t1 - t2 + 2.0 * lam * lam * scaled


def eval_g(
    ctx: MixedContext,
    p: float,
    b: float,
    pi2: float,
    tol: QuadTolerance | None = None,
) -> float:
    return eval_g0(ctx, p, b) - pi2 * eval_gpi(ctx, p, b, tol)


def eval_h(
    ctx: MixedContext, p: float, a: float, tol: QuadTolerance | None = None
) -> float:
    lam, delta = ctx.lambda2, ctx.delta
    if p - delta <= 0.0 or a - delta <= 0.0:
        raise SingularityError("h-kernel requires prices above the location gap")
    ya = lam * (a - delta)
    yp = lam * (p - delta)
    # e^{-yp} * (Ei(yp) - Ei(ya))
    scaled = expint._integrate(ya, yp, yp, tol or expint.DEFAULT_TOL)
    t1 = 4.0 * lam * math.exp(-lam * (p - a))
    t2 = 4.0 * lam * (a - delta) / (p - delta)
    return t1 - t2 + 4.0 * lam * lam * (a - delta) * scaled


def density_g(
    ctx: MixedContext,
    p: float,
    b: float,
    pi2: float,
    tol: QuadTolerance | None = None,
) -> float:
    """Slope of the g-piece, via its first-order identity (no Ei needed)."""
    g = eval_g(ctx, p, b, pi2, tol)
    return ctx.lambda2 * (g - 1.0 + 2.0 * pi2 / (p + ctx.delta) ** 2)


def density_h(
    ctx: MixedContext, p: float, a: float, tol: QuadTolerance | None = None
) -> float:
    """Slope of the h-piece, via its first-order identity."""
    h = eval_h(ctx, p, a, tol)
    return ctx.lambda2 * (4.0 * (a - ctx.delta) / (p - ctx.delta) ** 2 - h)


# ---------------------------------------------------------------------------
# batch kernel evaluation (hot paths: width pre-scan, CDF sampling)


def h_values(
    ctx: MixedContext,
    ps: np.ndarray,
    a: float,
    tol: QuadTolerance | None = None,
) -> np.ndarray:
    """h(p; a) over an array of prices with one shared parameter."""
    ps = np.asarray(ps, dtype=float)
    lam, delta = ctx.lambda2, ctx.delta
    ya = lam * (a - delta)
    yps = lam * (ps - delta)
    if yps.size and max(abs(float(yps.max())), abs(ya)) > _BATCH_EXP_LIMIT:
        return np.array([eval_h(ctx, float(p), a, tol) for p in ps])
    diffs = expint._ei_diff_many(ya, yps, tol)  # Ei(yp_i) - Ei(ya)
    t3 = 4.0 * lam * lam * (a - delta) * np.exp(-yps) * diffs
    return 4.0 * lam * np.exp(-lam * (ps - a)) - 4.0 * lam * (a - delta) / (
        ps - delta
    ) + t3


def _h_varying_anchor(
    ctx: MixedContext,
    p: float,
    anchors: np.ndarray,
    tol: QuadTolerance | None = None,
) -> np.ndarray:
    """h(p; a_i) over an array of anchors with the price fixed."""
    anchors = np.asarray(anchors, dtype=float)
    lam, delta = ctx.lambda2, ctx.delta
    yp = lam * (p - delta)
    yas = lam * (anchors - delta)
    if anchors.size and max(abs(float(yas.max())), abs(yp)) > _BATCH_EXP_LIMIT:
        return np.array([eval_h(ctx, p, float(a), tol) for a in anchors])
    diffs = expint._ei_diff_many(yp, yas, tol)  # Ei(ya_i) - Ei(yp)
    t3 = 4.0 * lam * lam * (anchors - delta) * np.exp(-yp) * (-diffs)
    return 4.0 * lam * np.exp(-lam * (p - anchors)) - 4.0 * lam * (
        anchors - delta
    ) / (p - delta) + t3


def g0_gpi_values(
    ctx: MixedContext,
    ps: np.ndarray,
    b: float,
    tol: QuadTolerance | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(g0, gpi) over an array of prices with the anchor fixed."""
    ps = np.asarray(ps, dtype=float)
    z1 = ctx.z.z1
    lam, delta = ctx.lambda2, ctx.delta
    d = _g_denom(ctx, b)
    xb = -lam * (b + delta)
    xps = -lam * (ps + delta)
    if ps.size and max(abs(xb), abs(float(xps.min()))) > _BATCH_EXP_LIMIT:
        g0s = np.array([eval_g0(ctx, float(p), b) for p in ps])
        gps = np.array([eval_gpi(ctx, float(p), b, tol) for p in ps])
        return g0s, gps
    expo = np.exp(-lam * (b - ps))
    g0s = 1.0 + (2.0 / d) * expo
    diffs = expint._ei_diff_many(xb, xps, tol)  # Ei(xp_i) - Ei(xb)
    t3 = 2.0 * lam * lam * np.exp(-xps) * diffs
    gps = 2.0 * lam / (ps + delta) - (2.0 * lam / (b + delta)) * (
        (1.0 - z1 - b) / d
    ) * expo + t3
    return g0s, gps


def g_values(
    ctx: MixedContext,
    ps: np.ndarray,
    b: float,
    pi2: float,
    tol: QuadTolerance | None = None,
) -> np.ndarray:
    g0s, gps = g0_gpi_values(ctx, ps, b, tol)
    return g0s - pi2 * gps


# ---------------------------------------------------------------------------
# CDF representation


@dataclass(frozen=True)
class GPiece:
    b: float
    pi2: float


@dataclass(frozen=True)
class HPiece:
    a: float


@dataclass(frozen=True)
class ConstPiece:
    v: float


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    piece: GPiece | HPiece | ConstPiece


@dataclass(frozen=True)
class CdfSpec:
    """Piecewise-analytic CDF: contiguous segments plus point atoms.

    Segments carry the continuous part (which, for the equilibria built
    here, equals the CDF below every atom); atoms sit at or above the top
    of the continuous range and add their mass from their location on.
    Evaluation is right-continuous.
    """

    ctx: MixedContext | None
    segments: tuple[Segment, ...]
    atoms: tuple[tuple[float, float], ...]

    def piece_value(self, seg: Segment, x: float) -> float:
        p = seg.piece
        if isinstance(p, ConstPiece):
            return p.v
        if self.ctx is None:
            raise ValueError("analytic piece requires a mixed context")
        if isinstance(p, GPiece):
            return eval_g(self.ctx, x, p.b, p.pi2)
        return eval_h(self.ctx, x, p.a)

    def piece_values(self, seg: Segment, xs: np.ndarray) -> np.ndarray:
        p = seg.piece
        xs = np.asarray(xs, dtype=float)
        if isinstance(p, ConstPiece):
            return np.full(xs.shape, p.v)
        if self.ctx is None:
            raise ValueError("analytic piece requires a mixed context")
        if isinstance(p, GPiece):
            return g_values(self.ctx, xs, p.b, p.pi2)
        return h_values(self.ctx, xs, p.a)

    def piece_density(self, seg: Segment, xs: np.ndarray) -> np.ndarray:
        p = seg.piece
        xs = np.asarray(xs, dtype=float)
        if isinstance(p, ConstPiece):
            return np.zeros(xs.shape)
        if self.ctx is None:
            raise ValueError("analytic piece requires a mixed context")
        lam, delta = self.ctx.lambda2, self.ctx.delta
        if isinstance(p, GPiece):
            vals = g_values(self.ctx, xs, p.b, p.pi2)
            return lam * (vals - 1.0 + 2.0 * p.pi2 / (xs + delta) ** 2)
        vals = h_values(self.ctx, xs, p.a)
        return lam * (4.0 * (p.a - delta) / (xs - delta) ** 2 - vals)

    def _continuous_part(self, x: float) -> float:
        if not self.segments:
            return 0.0
        if x < self.segments[0].lo:
            return 0.0
        last = self.segments[0]
        for seg in self.segments:
            if seg.lo <= x:
                last = seg
            else:
                break
        return self.piece_value(last, min(x, last.hi))

    def value(self, x: float) -> float:
        """Right-continuous CDF value at x."""
        total = self._continuous_part(x)
        for loc, mass in self.atoms:
            if loc <= x:
                total += mass
        return total

    def value_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.zeros(xs.shape)
        if self.segments:
            bottom = self.segments[0].lo
            for i, seg in enumerate(self.segments):
                hi_open = self.segments[i + 1].lo if i + 1 < len(
                    self.segments
                ) else np.inf
                mask = (xs >= seg.lo) & (xs < hi_open)
                if mask.any():
                    out[mask] = self.piece_values(seg, np.minimum(xs[mask], seg.hi))
            top_seg = self.segments[-1]
            mask = xs >= top_seg.hi
            if mask.any():
                out[mask] = self.piece_value(top_seg, top_seg.hi)
            out[xs < bottom] = 0.0
        for loc, mass in self.atoms:
            out[xs >= loc] += mass
        return out

    @property
    def support_bottom(self) -> float:
        lows = [s.lo for s in self.segments] + [a[0] for a in self.atoms]
        return min(lows)

    @property
    def support_top(self) -> float:
        highs = [s.hi for s in self.segments] + [a[0] for a in self.atoms]
        return max(highs)

    def total_mass(self) -> float:
        return self.value(self.support_top + 1.0)


@dataclass(frozen=True)
class MixedEquilibrium:
    kind: str
    ctx: MixedContext
    w: float
    F1: CdfSpec
    F2: CdfSpec
    profits: tuple[float, float]


# ---------------------------------------------------------------------------
# region gates, width equations, side conditions


def region_gates(z1: float, z2: float, kind: str) -> bool:
    """Location-only gates that must hold before a width is even sought."""
    if kind == "M1":
        return (
            z1 <= 0.5
            and z1 + z2 >= 1.0
            and (1.0 - z1) * (0.5 + z1 + z2) < 2.0 * z1
        )
    if kind in ("M2", "M3"):
        return 0.5 <= z1 < z2 and (1.0 - 2.0 * z1 + z2) * (2.0 - z2) > z2
    raise ValueError(f"unknown mixed kind {kind!r}")


def _width_residual(ctx: MixedContext, kind: str, w: float) -> float:
    z1, z2 = ctx.z.z1, ctx.z.z2
    lam = ctx.lambda2
    if kind == "M1":
        h = eval_h(ctx, z2, z2 - w)
        return h / (2.0 * lam) + z1 + z2 + 0.5 - 2.0 * w / z1 - 2.0 * (
            z1 - w
        ) / (1.0 - z1)
    if kind == "M2":
        top = 1.0 - 2.0 * z1 + z2
        return eval_h(ctx, top, top - w) - 1.0
    top = 1.0 - z1
    return eval_g0(ctx, top - w, top) - z2 * eval_gpi(ctx, top - w, top)


def _width_residual_many(
    ctx: MixedContext, kind: str, ws: np.ndarray
) -> np.ndarray:
    z1, z2 = ctx.z.z1, ctx.z.z2
    lam = ctx.lambda2
    if kind == "M1":
        hs = _h_varying_anchor(ctx, z2, z2 - ws, _PRESCAN_TOL)
        return hs / (2.0 * lam) + z1 + z2 + 0.5 - 2.0 * ws / z1 - 2.0 * (
            z1 - ws
        ) / (1.0 - z1)
    if kind == "M2":
        top = 1.0 - 2.0 * z1 + z2
        return _h_varying_anchor(ctx, top, top - ws, _PRESCAN_TOL) - 1.0
    top = 1.0 - z1
    g0s, gps = g0_gpi_values(ctx, top - ws, top, _PRESCAN_TOL)
    return g0s - z2 * gps


def bracket_w(
    ctx: MixedContext, kind: str, samples: int = 1000
) -> list[tuple[float, float]]:
    """Sign-change brackets of the width equation, smallest first.

    Dense pre-scan over the admissible interval (uniform samples plus a
    short geometric tail near zero so onset widths are not missed).
    Exact zeros are returned as degenerate brackets.
    """
    if kind not in MIXED_KINDS:
        raise ValueError(f"unknown mixed kind {kind!r}")
    hi = ctx.z.z1 if kind == "M1" else 1.0 - ctx.z.z1
    if hi <= 0.0:
        raise NoRootError(f"empty width search interval for {kind}")
    uniform = hi * np.arange(1, samples + 1) / (samples + 1)
    near_zero = np.geomspace(hi * 1e-8, uniform[0], 12)[:-1]
    ws = np.concatenate([near_zero, uniform])
    rs = _width_residual_many(ctx, kind, ws)

    r0, r1 = rs[:-1], rs[1:]
    finite = np.isfinite(r0) & np.isfinite(r1)
    hits = np.nonzero(finite & (r0 == 0.0))[0]
    flips = np.nonzero(finite & (r0 * r1 < 0.0))[0]
    brackets = [(float(ws[i]), float(ws[i])) for i in hits]
    brackets += [(float(ws[i]), float(ws[i + 1])) for i in flips]
    if np.isfinite(rs[-1]) and rs[-1] == 0.0:
        brackets.append((float(ws[-1]), float(ws[-1])))
    brackets.sort()
    if not brackets:
        raise NoRootError(f"no sign change for the {kind} width equation")
    return brackets


def refine_w(
    ctx: MixedContext,
    kind: str,
    bracket: tuple[float, float],
    residual_tol: float = 1e-12,
) -> float:
    """Shrink one sign bracket to width 1e-14 and return the root.

    False-position steps with Illinois damping and a midpoint fallback:
    the bracket is never lost, convergence is superlinear.
    """
    a, b = bracket
    if a == b:
        return a
    ra = _width_residual(ctx, kind, a)
    rb = _width_residual(ctx, kind, b)
    side = 0
    w, rw = a, ra
    while b - a > 1e-14 and rw != 0.0:
        if rb != ra:
            m = (a * rb - b * ra) / (rb - ra)
        else:
            m = 0.5 * (a + b)
        if not (a < m < b):
            m = 0.5 * (a + b)
        rm = _width_residual(ctx, kind, m)
        if rm == 0.0:
            w, rw = m, 0.0
            break
        if (rm < 0.0) == (ra < 0.0):
            a, ra = m, rm
            if side == 1:
                rb *= 0.5
            side = 1
        else:
            b, rb = m, rm
            if side == -1:
                ra *= 0.5
            side = -1
        w, rw = (a, ra) if abs(ra) <= abs(rb) else (b, rb)
    if abs(rw) > residual_tol:
        raise NoRootError(
            f"{kind} width root residual {rw:.3e} exceeds {residual_tol:g}"
        )
    return float(w)


def solve_w(
    ctx: MixedContext,
    kind: str,
    samples: int = 1000,
    residual_tol: float = 1e-12,
) -> float:
    """Smallest admissible positive root of the kind's width equation.

    Sign-bracket pre-scan with ``samples`` uniform points, then bracketed
    refinement to interval width 1e-14.  More than one bracket triggers
    :class:`MultipleRootsWarning`; the smallest root wins.
    """
    brackets = bracket_w(ctx, kind, samples)
    if len(brackets) > 1:
        warnings.warn(
            f"{kind} width equation has {len(brackets)} candidate roots at "
            f"({ctx.z.z1}, {ctx.z.z2}); returning the smallest",
            MultipleRootsWarning,
            stacklevel=2,
        )
    for br in brackets:
        w = refine_w(ctx, kind, br, residual_tol)
        if w > MIN_WIDTH:
            return w
    raise NoRootError(f"only boundary-noise roots (w <= {MIN_WIDTH}) for {kind}")


def side_conditions(ctx: MixedContext, kind: str, w: float) -> bool:
    """Exact inequality checks attached to each equilibrium kind."""
    z1, z2 = ctx.z.z1, ctx.z.z2
    if kind == "M1":
        g0_low = eval_g0(ctx, z1 - w, z1)
        gpi_low = eval_gpi(ctx, z1 - w, z1)
        if gpi_low == 0.0:
            return False
        pi2 = g0_low / gpi_low
        val = (
            2.0
            - 0.5 * w
            - (1.5 - z2) * eval_g0(ctx, z1, z1)
            + (
                w / (z2 * (z2 - w))
                + (1.5 - z2) * eval_gpi(ctx, z1, z1)
                - 1.0 / (1.0 - z2)
            )
            * pi2
        )
        return val <= 0.0
    top = 1.0 - 2.0 * z1 + z2
    if kind == "M2":
        g0_low = eval_g0(ctx, 1.0 - z1 - w, 1.0 - z1)
        gpi_low = eval_gpi(ctx, 1.0 - z1 - w, 1.0 - z1)
        if gpi_low == 0.0:
            return False
        pi2 = g0_low / gpi_low
        lhs = z1 - (1.0 - z2) * (z2 - z1) + 0.5 * (1.0 - z2) * w
        rhs = (z1 / top + (1.0 - z2) / (top - w) - 1.0) * pi2
        return lhs >= rhs and pi2 >= z2
    if kind == "M3":
        cap = eval_h(ctx, top, top - w)
        balance = (
            (z2 - z1) * z2
            + 2.0 * z1
            + 0.5 * (1.0 - z2) * w
            - z1 * z2 / top
            - (1.0 - z2) * z2 / (top - w)
        )
        return cap <= 1.0 and balance >= 0.0
    raise ValueError(f"unknown mixed kind {kind!r}")


# ---------------------------------------------------------------------------
# construction


def _check_density(spec: CdfSpec, label: str, n: int = 129) -> None:
    for seg in spec.segments:
        if isinstance(seg.piece, ConstPiece) or seg.hi <= seg.lo:
            continue
        xs = np.linspace(seg.lo, seg.hi, n)
        dens = spec.piece_density(seg, xs)
        if float(dens.min()) < -1e-9:
            raise ConstructionError(
                f"{label} density dips to {dens.min():.3e}; point misclassified"
            )


def _checked_mass(mass: float, label: str) -> float:
    if not -1e-12 <= mass <= 1.0 + 1e-12:
        raise ConstructionError(f"{label} atom mass {mass} outside [0, 1]")
    return min(max(mass, 0.0), 1.0)


def build_mixed(ctx: MixedContext, kind: str, w: float) -> MixedEquilibrium:
    """Assemble the CDF pair and profits for a solved width.

    Raises :class:`ConstructionError` when the resulting object is not a
    valid distribution pair (negative density, atom mass outside [0,1],
    missing continuity) - the signal that the point was misclassified.
    """
    z1, z2 = ctx.z.z1, ctx.z.z2
    if kind not in MIXED_KINDS:
        raise ValueError(f"unknown mixed kind {kind!r}")
    if not w > 0.0:
        raise ConditionError("support width must be positive")

    if kind == "M1":
        if not w < z1:
            raise ConditionError("M1 needs w < z1")
        g0_low = eval_g0(ctx, z1 - w, z1)
        gpi_low = eval_gpi(ctx, z1 - w, z1)
        pi2 = g0_low / gpi_low
        pi1 = 2.0 * (z1 - w)
        g_top = eval_g(ctx, z1, z1, pi2)
        segs1 = [Segment(z1 - w, z1, GPiece(b=z1, pi2=pi2))]
        if 1.0 - z1 > z1:
            segs1.append(Segment(z1, 1.0 - z1, ConstPiece(g_top)))
        f1 = CdfSpec(
            ctx,
            tuple(segs1),
            ((1.0 - z1, _checked_mass(1.0 - g_top, "M1 F1")),),
        )
        h_top = eval_h(ctx, z2, z2 - w)
        f2 = CdfSpec(
            ctx,
            (Segment(z2 - w, z2, HPiece(a=z2 - w)),),
            ((z2, _checked_mass(1.0 - h_top, "M1 F2")),),
        )
    else:
        if not w < 1.0 - z1:
            raise ConditionError(f"{kind} needs w < 1 - z1")
        b = 1.0 - z1
        if kind == "M2":
            g0_low = eval_g0(ctx, b - w, b)
            gpi_low = eval_gpi(ctx, b - w, b)
            pi2 = g0_low / gpi_low
        else:
            pi2 = z2
        pi1 = 2.0 * (b - w)
        g_top = eval_g(ctx, b, b, pi2)
        f1 = CdfSpec(
            ctx,
            (Segment(b - w, b, GPiece(b=b, pi2=pi2)),),
            ((b, _checked_mass(1.0 - g_top, f"{kind} F1")),),
        )
        top = 1.0 - 2.0 * z1 + z2
        h_top = eval_h(ctx, top, top - w)
        if kind == "M2":
            if abs(h_top - 1.0) > 1e-9:
                raise ConstructionError(
                    f"M2 top value {h_top} should be 1 by the width equation"
                )
            f2 = CdfSpec(ctx, (Segment(top - w, top, HPiece(a=top - w)),), ())
        else:
            segs2 = [Segment(top - w, top, HPiece(a=top - w))]
            if z2 > top:
                segs2.append(Segment(top, z2, ConstPiece(h_top)))
            f2 = CdfSpec(
                ctx,
                tuple(segs2),
                ((z2, _checked_mass(1.0 - h_top, "M3 F2")),),
            )

    eq = MixedEquilibrium(kind=kind, ctx=ctx, w=w, F1=f1, F2=f2, profits=(pi1, pi2))
    _check_density(f1, f"{kind} F1")
    _check_density(f2, f"{kind} F2")
    # continuity at the bottom of the low firm's island is exact by the
    # definition of pi2 for M1/M2 and by the width equation for M3
    low = f1.segments[0]
    if abs(eq.F1.piece_value(low, low.lo)) > 1e-9:
        raise ConstructionError(f"{kind} F1 fails continuity at its lower edge")
    return eq
