"""Independent numerical audit of constructed equilibria.

``expected_profit`` integrates a firm's deterministic demand share
against the opponent's mixed-price distribution: quadrature of
share times density over the continuous pieces plus share times mass at
the atoms.  The density comes from the first-order identities of the
kernels, so no exponential-integral derivative is ever formed, and the
share factor is exactly the market model's (reservation truncation, tie
splitting and all).  Audits then scan on-support grids (profit must be
flat at the equilibrium level) and the off-support ranges where a
deviation could pay (excess must stay nonpositive).

For speed, each continuous CDF piece can be replaced by a panelled
Chebyshev interpolant built once per audit; the panels are validated
against the analytic evaluation at off-node probes when built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import QuadratureError
from .market import LocationPair, _share_pair, _share_pair_vec
from .mixed import CdfSpec, ConstPiece, GPiece, MixedEquilibrium, Segment
from .pure import PureEquilibrium

_PROBE_FRACTIONS = np.array([0.0731, 0.2193, 0.3847, 0.5521, 0.7069, 0.8623, 0.9537])


def _bary_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1::2] = -1.0
    w[0] *= 0.5
    w[n] *= 0.5
    return w


def _bary_eval(
    nodes: np.ndarray, vals: np.ndarray, weights: np.ndarray, xs: np.ndarray
) -> np.ndarray:
    diff = xs[:, None] - nodes[None, :]
    hit = diff == 0.0
    diff = np.where(hit, 1.0, diff)
    ratio = weights[None, :] / diff
    out = (ratio @ vals) / ratio.sum(axis=1)
    rows = hit.any(axis=1)
    if rows.any():
        out[rows] = vals[hit[rows].argmax(axis=1)]
    return out


class _Panel:
    __slots__ = ("lo", "hi", "nodes", "vals", "weights")

    def __init__(self, lo: float, hi: float, nodes, vals, weights):
        self.lo, self.hi = lo, hi
        self.nodes, self.vals, self.weights = nodes, vals, weights


class CdfEvaluator:
    """Per-segment evaluation cache for one opponent distribution.

    ``fast=True`` builds panelled Chebyshev interpolants of the analytic
    pieces (validated at off-node probes to 1e-13 of the piece scale);
    ``fast=False`` evaluates every query through the analytic route.
    """

    def __init__(self, spec: CdfSpec, fast: bool = True, nodes: int = 32):
        self.spec = spec
        self.fast = fast
        self.nodes = nodes
        self._panels: dict[int, list[_Panel]] = {}

    def _build(self, seg: Segment, lo: float, hi: float, depth: int, out: list):
        n = self.nodes
        k = np.cos(np.pi * np.arange(n + 1) / n)[::-1]
        xs = 0.5 * (lo + hi) + 0.5 * (hi - lo) * k
        vals = self.spec.piece_values(seg, xs)
        weights = _bary_weights(n)[::-1]
        probes = lo + (hi - lo) * _PROBE_FRACTIONS
        approx = _bary_eval(xs, vals, weights, probes)
        exact = self.spec.piece_values(seg, probes)
        scale = max(1.0, float(np.abs(vals).max()))
        if (
            float(np.abs(approx - exact).max()) <= 1e-13 * scale
            or depth >= 8
            or hi - lo < 1e-12
        ):
            out.append(_Panel(lo, hi, xs, vals, weights))
            return
        mid = 0.5 * (lo + hi)
        self._build(seg, lo, mid, depth + 1, out)
        self._build(seg, mid, hi, depth + 1, out)

    def _segment_panels(self, seg: Segment) -> list[_Panel]:
        key = id(seg)
        if key not in self._panels:
            panels: list[_Panel] = []
            self._build(seg, seg.lo, seg.hi, 0, panels)
            self._panels[key] = panels
        return self._panels[key]

    def cont_values(self, seg: Segment, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if isinstance(seg.piece, ConstPiece):
            return np.full(xs.shape, seg.piece.v)
        if not self.fast:
            return self.spec.piece_values(seg, xs)
        out = np.empty(xs.shape)
        for panel in self._segment_panels(seg):
            mask = (xs >= panel.lo) & (xs <= panel.hi)
            if mask.any():
                out[mask] = _bary_eval(
                    panel.nodes, panel.vals, panel.weights, xs[mask]
                )
        return out

    def cont_value(self, seg: Segment, x: float) -> float:
        return float(self.cont_values(seg, np.array([x]))[0])

    def density_values(self, seg: Segment, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        piece = seg.piece
        if isinstance(piece, ConstPiece):
            return np.zeros(xs.shape)
        if not self.fast:
            return self.spec.piece_density(seg, xs)
        ctx = self.spec.ctx
        vals = self.cont_values(seg, xs)
        lam, delta = ctx.lambda2, ctx.delta
        if isinstance(piece, GPiece):
            return lam * (vals - 1.0 + 2.0 * piece.pi2 / (xs + delta) ** 2)
        return lam * (4.0 * (piece.a - delta) / (xs - delta) ** 2 - vals)


# ---------------------------------------------------------------------------
# expected profit against a mixed opponent


def _winall_share(firm: int, z: LocationPair, p: float) -> float:
    r = 1.0 - p
    pos = z.z1 if firm == 1 else z.z2
    return max(0.0, min(pos + r, 1.0) - max(pos - r, 0.0))


def _winall_share_vec(firm: int, z: LocationPair, ps: np.ndarray) -> np.ndarray:
    r = 1.0 - ps
    pos = z.z1 if firm == 1 else z.z2
    return np.maximum(np.minimum(pos + r, 1.0) - np.maximum(pos - r, 0.0), 0.0)


def _interior_share_many(
    firm: int, z: LocationPair, p: float, qs: np.ndarray
) -> np.ndarray:
    """Informed share inside the competitive window, as a function of the
    opponent price.  Piecewise linear; kinks handled by the caller."""
    z1, z2 = z.z1, z.z2
    if firm == 1:
        t = 0.5 * (z1 + z2 + qs - p)
        cap = min(z1 + 1.0 - p, 1.0)
        lot = max(p - (1.0 - z1), 0.0)
        return np.maximum(np.minimum(t, cap) - lot, 0.0)
    t = 0.5 * (z1 + z2 + p - qs)
    cap = min(1.0, z2 + 1.0 - p)
    lot = max(z2 - (1.0 - p), 0.0)
    return np.maximum(cap - np.maximum(t, lot), 0.0)


def _interior_kinks(firm: int, z: LocationPair, p: float) -> tuple[float, float]:
    """Opponent prices where the in-window share formula changes slope."""
    z1, z2 = z.z1, z.z2
    if firm == 1:
        cap = min(z1 + 1.0 - p, 1.0)
        lot = max(p - (1.0 - z1), 0.0)
        return (2.0 * cap - (z1 + z2) + p, 2.0 * lot - (z1 + z2) + p)
    cap = min(1.0, z2 + 1.0 - p)
    lot = max(z2 - (1.0 - p), 0.0)
    return ((z1 + z2 + p) - 2.0 * cap, (z1 + z2 + p) - 2.0 * lot)


_SIMPSON_W: dict[int, np.ndarray] = {}


def _simpson_weights(n: int) -> np.ndarray:
    w = _SIMPSON_W.get(n)
    if w is None:
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        _SIMPSON_W[n] = w
    return w


def _simpson_adaptive(fvec, u: float, v: float, max_level: int = 14) -> float:
    n = 16
    prev = None
    for _ in range(max_level):
        h = (v - u) / n
        xs = u + h * np.arange(n + 1)
        ys = fvec(xs)
        s = float(ys @ _simpson_weights(n)) * h / 3.0
        if prev is not None and abs(s - prev) <= 15.0 * max(
            1e-12 * abs(s), 1e-16
        ):
            return s
        prev = s
        n *= 2
    raise QuadratureError("expected-profit quadrature did not converge")


def expected_profit(
    firm: int,
    p: float,
    z: LocationPair,
    opponent: CdfSpec,
    left_limit: bool = False,
    evaluator: CdfEvaluator | None = None,
) -> float:
    """Expected profit of ``firm`` charging ``p`` against a mixed rival.

    ``left_limit=True`` evaluates the one-sided limit as the firm's price
    approaches ``p`` from below, which resolves exact indifference ties in
    the firm's favour (used for boundary prices).
    """
    if not p > 0.0:
        raise ValueError("price must be positive")
    z1, z2 = z.z1, z.z2
    delta = z2 - z1
    tie = 0
    if left_limit:
        tie = 1 if firm == 1 else -1
    ev = evaluator if evaluator is not None else CdfEvaluator(opponent, fast=False)

    demand = 1.0 if (p <= 1.0 - z1 if firm == 1 else p <= z2) else 0.0

    for loc, mass in opponent.atoms:
        if mass <= 0.0:
            continue
        if firm == 1:
            share = _share_pair(z1, z2, p, loc, tie)[0]
        else:
            share = _share_pair(z1, z2, loc, p, tie)[1]
        demand += share * mass

    wlo, whi = p - delta, p + delta
    winall = _winall_share(firm, z, p)
    for seg in opponent.segments:
        if isinstance(seg.piece, ConstPiece) or seg.hi <= seg.lo:
            continue
        # opponent prices above the window: firm wins every consumer in reach
        above = max(seg.lo, whi)
        if above < seg.hi and winall > 0.0:
            mass_above = ev.cont_value(seg, seg.hi) - ev.cont_value(seg, above)
            demand += winall * mass_above
        # inside the window: quadrature of share x density
        u, v = max(seg.lo, wlo), min(seg.hi, whi)
        if u < v:
            cuts = [u, v]
            for k in _interior_kinks(firm, z, p):
                if u < k < v:
                    cuts.append(k)
            cuts = sorted(set(cuts))
            for a, b in zip(cuts[:-1], cuts[1:]):
                if b - a < 1e-15:
                    continue
                demand += _simpson_adaptive(
                    lambda xs: _interior_share_many(firm, z, p, xs)
                    * ev.density_values(seg, xs),
                    a,
                    b,
                )
        # below the window the rival undercuts everywhere: share is zero
    return p * demand


def _expected_profit_batch(
    firm: int,
    ps: np.ndarray,
    z: LocationPair,
    opponent: CdfSpec,
    ev: CdfEvaluator,
    left_limit: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised expected profit plus a mask of prices whose competitive
    window overlaps a continuous piece (those need the scalar quadrature
    path; their batch values are incomplete)."""
    ps = np.asarray(ps, dtype=float)
    z1, z2 = z.z1, z.z2
    delta = z2 - z1
    tie = 0
    if left_limit:
        tie = 1 if firm == 1 else -1
    demand = (
        (ps <= 1.0 - z1) if firm == 1 else (ps <= z2)
    ).astype(float)
    for loc, mass in opponent.atoms:
        if mass <= 0.0:
            continue
        locs = np.full(ps.shape, loc)
        if firm == 1:
            s = _share_pair_vec(z1, z2, ps, locs, tie)[0]
        else:
            s = _share_pair_vec(z1, z2, locs, ps, tie)[1]
        demand += s * mass
    winall = _winall_share_vec(firm, z, ps)
    needs_quad = np.zeros(ps.shape, dtype=bool)
    for seg in opponent.segments:
        if isinstance(seg.piece, ConstPiece) or seg.hi <= seg.lo:
            continue
        f_hi = ev.cont_value(seg, seg.hi)
        cut = np.clip(ps + delta, seg.lo, seg.hi)
        demand += winall * (f_hi - ev.cont_values(seg, cut))
        needs_quad |= (ps + delta > seg.lo) & (ps - delta < seg.hi)
    return ps * demand, needs_quad


# ---------------------------------------------------------------------------
# audits


@dataclass
class AuditReport:
    """Outcome of a deviation scan against one equilibrium."""

    max_on_support_deviation: float
    max_off_support_excess: float
    scanned_points: int
    worst_price: float
    tol_on: float = 1e-9
    tol_off: float = 1e-9
    notes: str = field(default="")

    @property
    def passed(self) -> bool:
        return (
            self.max_on_support_deviation <= self.tol_on
            and self.max_off_support_excess <= self.tol_off
        )


def _open_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Multiples of ``step`` strictly inside (lo, hi)."""
    k0 = int(math.floor(lo / step)) + 1
    pts = []
    k = max(k0, 1)
    while True:
        x = k * step
        if x >= hi - 1e-12:
            break
        if x > lo + 1e-12:
            pts.append(x)
        k += 1
    return np.array(pts)


def _closed_grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(int(math.floor((hi - lo) / step + 1e-9)), 0)
    pts = [lo + k * step for k in range(n + 1)]
    if hi - pts[-1] > 1e-12:
        pts.append(hi)
    return np.array(pts)


def _scan_ranges(eq: MixedEquilibrium) -> tuple[dict, dict]:
    """Off-support intervals and on-support grids, per firm."""
    z1, z2 = eq.ctx.z.z1, eq.ctx.z.z2
    w = eq.w
    if eq.kind == "M1":
        off = {
            1: [(0.0, z1 - w), (z1, 1.0 - z1)],
            2: [(0.0, z2 - w)],
        }
        on = {1: [(z1 - w, z1)], 2: [(z2 - w, z2)]}
    else:
        top = 1.0 - 2.0 * z1 + z2
        off = {1: [(0.0, 1.0 - z1 - w)], 2: [(0.0, top - w)]}
        if eq.kind == "M3":
            off[2].append((top, z2))
        on = {1: [(1.0 - z1 - w, 1.0 - z1)], 2: [(top - w, top)]}
    return off, on


def audit_mixed(
    eq: MixedEquilibrium,
    z: LocationPair | None = None,
    price_step: float = 0.001,
    tol_on: float = 1e-9,
    tol_off: float = 1e-9,
    fast: bool = True,
) -> AuditReport:
    """Scan the equilibrium's on-support and deviation price grids.

    On-support: |E[profit] - profit*| must stay within ``tol_on``.
    Off-support: E[profit] - profit* must stay below ``tol_off``.
    """
    z = z or eq.ctx.z
    off_ranges, on_ranges = _scan_ranges(eq)
    opp = {1: eq.F2, 2: eq.F1}
    evs = {1: CdfEvaluator(eq.F2, fast=fast), 2: CdfEvaluator(eq.F1, fast=fast)}
    atoms_on = {1: [a[0] for a in eq.F1.atoms], 2: [a[0] for a in eq.F2.atoms]}

    # every price is audited as a left limit E[pi](p - 0): that is the
    # supremum side of any tie discontinuity (so off-support checks are
    # conservative) and the side on which on-support constancy extends to
    # the island endpoints where a rival atom sits exactly one location
    # gap away
    def profile(firm: int, prices: np.ndarray) -> np.ndarray:
        es, needs_quad = _expected_profit_batch(
            firm, prices, z, opp[firm], evs[firm], left_limit=True
        )
        for i in np.nonzero(needs_quad)[0]:
            es[i] = expected_profit(
                firm, float(prices[i]), z, opp[firm], left_limit=True,
                evaluator=evs[firm],
            )
        return es

    max_on = 0.0
    max_off = -math.inf
    worst = math.nan
    scanned = 0
    for firm in (1, 2):
        target = eq.profits[firm - 1]
        for lo, hi in off_ranges[firm]:
            prices = _open_grid(lo, hi, price_step)
            if prices.size == 0:
                continue
            excess = profile(firm, prices) - target
            scanned += prices.size
            i = int(np.argmax(excess))
            if excess[i] > max_off:
                max_off = float(excess[i])
                worst = float(prices[i])
        on_prices: list[float] = []
        for lo, hi in on_ranges[firm]:
            on_prices.extend(_closed_grid(lo, hi, price_step))
        on_prices.extend(a for a in atoms_on[firm] if a not in on_prices)
        devs = np.abs(profile(firm, np.array(on_prices)) - target)
        scanned += len(on_prices)
        max_on = max(max_on, float(devs.max()))
    if scanned == 0:
        raise ValueError("price_step exceeds every scan range; nothing scanned")
    return AuditReport(
        max_on_support_deviation=max_on,
        max_off_support_excess=max_off,
        scanned_points=scanned,
        worst_price=worst,
        tol_on=tol_on,
        tol_off=tol_off,
        notes=f"{eq.kind} at ({eq.ctx.z.z1}, {eq.ctx.z.z2})",
    )


def audit_pure(
    eq: PureEquilibrium,
    z: LocationPair,
    price_step: float = 0.001,
    price_max: float = 1.5,
    tol_off: float = 1e-9,
) -> AuditReport:
    """Brute-force unilateral deviation scan around a pure equilibrium."""
    from .market import profit_grid, profit_pair

    grid = np.arange(1, int(round(price_max / price_step)) + 1) * price_step
    recomputed = profit_pair(z, eq.prices)
    max_on = max(
        abs(recomputed[0] - eq.profits[0]), abs(recomputed[1] - eq.profits[1])
    )
    max_off = -math.inf
    worst = math.nan
    for firm in (1, 2):
        opp_price = eq.prices.p2 if firm == 1 else eq.prices.p1
        profs = profit_grid(z, firm, grid, opp_price)
        excess = profs - eq.profits[firm - 1]
        i = int(np.argmax(excess))
        if excess[i] > max_off:
            max_off = float(excess[i])
            worst = float(grid[i])
    return AuditReport(
        max_on_support_deviation=max_on,
        max_off_support_excess=max_off,
        scanned_points=2 * grid.size,
        worst_price=worst,
        tol_on=1e-12,
        tol_off=tol_off,
        notes=f"{eq.kind} at ({z.z1}, {z.z2})",
    )
