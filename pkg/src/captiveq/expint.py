"""Exponential integral Ei and the adaptive quadrature behind it.

Two evaluation routes are kept deliberately distinct so they can referee
each other:

* positive arguments: power series ``gamma + ln x + sum x^n/(n*n!)``,
  switching to the divergent asymptotic series ``e^x/x * sum k!/x^k``
  once ``x > 40`` where the power series needs too many terms;
* negative arguments (and every in-model Ei *difference*): composite
  Simpson quadrature of ``exp(t)/t``, successively halving the panels of
  each sub-interval until the Richardson error estimate drops below the
  relative target.

Same-sign intervals are pre-split so that every sub-interval spans at
most a factor of two in magnitude and at most two units in length; the
integrand then varies mildly on each piece and the refinement loop
converges in a few doublings.  Intervals never cross the logarithmic
singularity at zero.

``ei_delta`` (the difference ``Ei(b) - Ei(a)``) is the preferred entry
point for the equilibrium kernels: it avoids the catastrophic
cancellation of subtracting two nearly equal Ei values and, through the
``shift`` mechanism of :func:`_integrate`, also avoids overflow when the
difference is later multiplied by a large exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EiDomainError, QuadratureError

EULER_GAMMA = 0.5772156649015328606065120900824024

# below this magnitude the logarithmic singularity makes double-precision
# evaluation meaningless; in-model arguments stay well away from it
SINGULARITY_GUARD = 1e-12

# power series -> asymptotic series crossover for positive arguments
_SERIES_SWITCH = 40.0

# |Ei(-50)| < 3.8e-24: truncating the negative tail there is invisible at
# the 1e-12 relative target for the tested argument range
_NEG_ANCHOR = -50.0

_MAX_NODES_PER_PIECE = 1 << 16


@dataclass(frozen=True)
class QuadTolerance:
    """Accuracy contract for the refined Simpson quadrature."""

    relative_error_target: float = 1e-12
    max_refinements: int = 40

    def __post_init__(self) -> None:
        if not (self.relative_error_target > 0.0):
            raise ValueError("relative_error_target must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")


DEFAULT_TOL = QuadTolerance()


def _piece_edges(a: float, b: float) -> list[float]:
    """Split the same-sign interval [min,max] into mildly varying pieces.

    Consecutive edges differ by at most a factor of two in magnitude or
    by at most two units, whichever ladder is finer locally.
    """
    lo, hi = (a, b) if a < b else (b, a)
    if lo > 0.0:
        sgn, m0, m1 = 1.0, lo, hi
    else:
        sgn, m0, m1 = -1.0, -hi, -lo
    edges = {m0, m1}
    g = m0
    while g * 2.0 < m1:
        g *= 2.0
        edges.add(g)
    t = m0 + 2.0
    while t < m1:
        edges.add(t)
        t += 2.0
    mags = sorted(edges)
    if sgn > 0.0:
        return mags
    return [-m for m in reversed(mags)]


def _integrate_pieces(
    edges: np.ndarray, shift: float, tol: QuadTolerance
) -> np.ndarray:
    """Per-gap integrals of exp(t - shift)/t over consecutive edge pairs.

    All edges share one sign.  Each gap is refined independently
    (panel-count doubling) until the Richardson estimate
    |S_2n - S_n| / 15 falls below the relative target, measured against
    the larger of the gap's own value and its fair share of the total.
    """
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    m = lo.size
    S = np.full(m, np.nan)
    done = np.zeros(m, dtype=bool)
    n = 4
    for _ in range(tol.max_refinements):
        act = ~done
        width = hi[act] - lo[act]
        x = lo[act][:, None] + width[:, None] * np.linspace(0.0, 1.0, n + 1)
        f = np.exp(x - shift) / x
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        S_new = f @ w * (width / (3.0 * n))
        prev = S[act]
        S[act] = S_new
        scale = np.abs(S).sum()
        with np.errstate(invalid="ignore"):
            # Richardson estimate with a safety factor: the |S_2n - S_n|/15
            # extrapolation slightly understates the true residual error
            err = np.abs(S_new - prev) / 15.0
            ok = err <= 0.2 * tol.relative_error_target * np.maximum(
                np.abs(S_new), scale / m
            )
        ok &= ~np.isnan(prev)
        done[act] = ok
        if done.all():
            return S
        n *= 2
        if n > _MAX_NODES_PER_PIECE:
            break
    raise QuadratureError(
        f"Simpson refinement did not reach {tol.relative_error_target:g} "
        f"within {tol.max_refinements} doublings"
    )


def _simpson_piece_scalar(
    lo: float, hi: float, shift: float, tol: QuadTolerance
) -> float:
    """One piece of the refined Simpson rule, plain-Python inner loop.

    Same refinement and stop rule as the vectorised path; for the short
    intervals that dominate kernel evaluation this avoids array overhead.
    """
    exp = math.exp
    n = 8
    prev = None
    for _ in range(tol.max_refinements):
        h = (hi - lo) / n
        odd = 0.0
        even = 0.0
        for k in range(1, n, 2):
            t = lo + k * h
            odd += exp(t - shift) / t
        for k in range(2, n, 2):
            t = lo + k * h
            even += exp(t - shift) / t
        s = (
            exp(lo - shift) / lo + exp(hi - shift) / hi + 4.0 * odd + 2.0 * even
        ) * h / 3.0
        if prev is not None and abs(s - prev) / 15.0 <= 0.2 * (
            tol.relative_error_target * abs(s)
        ):
            return s
        prev = s
        n *= 2
        if n > _MAX_NODES_PER_PIECE:
            break
    raise QuadratureError(
        f"Simpson refinement did not reach {tol.relative_error_target:g} "
        f"within {tol.max_refinements} doublings"
    )


def _integrate(a: float, b: float, shift: float, tol: QuadTolerance) -> float:
    """Signed integral of exp(t - shift)/t over a same-sign interval."""
    if a == b:
        return 0.0
    edges = _piece_edges(a, b)
    if len(edges) <= 4:
        total = sum(
            _simpson_piece_scalar(lo, hi, shift, tol)
            for lo, hi in zip(edges[:-1], edges[1:])
        )
    else:
        total = float(_integrate_pieces(np.array(edges), shift, tol).sum())
    return total if b > a else -total


def _ei_pos_scalar(x: float) -> float:
    """Ei for x > 0 via power series, or asymptotic series past x = 40."""
    if x <= _SERIES_SWITCH:
        term = x
        total = x
        n = 1
        while True:
            n += 1
            term *= x / n
            contrib = term / n
            total += contrib
            # truncation rule: stop once the next term is negligible
            if contrib < 1e-16 * abs(total):
                return EULER_GAMMA + math.log(x) + total
            if n > 500:  # pragma: no cover - series converges long before
                raise QuadratureError("power series failed to converge")
    s = 1.0
    term = 1.0
    for k in range(1, 100):
        term *= k / x
        if term < 1e-16:
            s += term
            break
        s += term
    return math.exp(x) / x * s


def _ei_pos_many(xs: np.ndarray) -> np.ndarray:
    """Vectorised positive-argument Ei (same branch logic as the scalar)."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    low = xs <= _SERIES_SWITCH
    if low.any():
        x = xs[low]
        term = x.copy()
        total = x.copy()
        n = 1
        while True:
            n += 1
            term *= x / n
            contrib = term / n
            total += contrib
            if np.all(contrib < 1e-16 * np.abs(total)):
                break
            if n > 500:  # pragma: no cover
                raise QuadratureError("power series failed to converge")
        out[low] = EULER_GAMMA + np.log(x) + total
    if (~low).any():
        x = xs[~low]
        s = np.ones_like(x)
        term = np.ones_like(x)
        for k in range(1, 100):
            term = term * k / x
            s += term
            if np.all(term < 1e-16):
                break
        out[~low] = np.exp(x) / x * s
    return out


def _ei_diff_many(
    base: float, xs: np.ndarray, tol: QuadTolerance | None = None
) -> np.ndarray:
    """Ei(x_i) - Ei(base) for same-sign points, by cumulative quadrature.

    Errors stay relative to the local differences, so the result is safe
    to scale by large exponentials afterwards.
    """
    tol = tol or DEFAULT_TOL
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return xs.copy()
    pts = np.unique(np.append(xs, base))
    if pts[0] * pts[-1] <= 0.0 or abs(pts[0]) < SINGULARITY_GUARD or abs(
        pts[-1]
    ) < SINGULARITY_GUARD:
        raise EiDomainError("batch Ei difference requires same-sign arguments")
    if pts.size == 1:
        return np.zeros_like(xs)
    edges = np.unique(np.append(pts, _piece_edges(pts[0], pts[-1])))
    gaps = _integrate_pieces(edges, 0.0, tol)
    cum = np.concatenate([[0.0], np.cumsum(gaps)])
    at = cum[np.searchsorted(edges, pts)]
    base_val = at[np.searchsorted(pts, base)]
    return at[np.searchsorted(pts, xs)] - base_val


def ei(x: float, tol: QuadTolerance | None = None) -> float:
    """Exponential integral Ei(x) for real nonzero x.

    Positive arguments go through the series route, negative ones through
    refined Simpson quadrature anchored at t = -50 (the tail beyond the
    anchor is below 4e-24 in magnitude).  Arguments within 1e-12 of the
    singularity at zero are rejected.
    """
    tol = tol or DEFAULT_TOL
    if not math.isfinite(x):
        raise EiDomainError(f"Ei argument must be finite, got {x!r}")
    if abs(x) < SINGULARITY_GUARD:
        raise EiDomainError("Ei is singular at 0; |x| >= 1e-12 required")
    if x > 0.0:
        return _ei_pos_scalar(x)
    return _integrate(_NEG_ANCHOR, x, 0.0, tol)


def ei_delta(a: float, b: float, tol: QuadTolerance | None = None) -> float:
    """Ei(b) - Ei(a) for a, b of one sign, evaluated as a single integral."""
    tol = tol or DEFAULT_TOL
    if not (math.isfinite(a) and math.isfinite(b)):
        raise EiDomainError("ei_delta arguments must be finite")
    if abs(a) < SINGULARITY_GUARD or abs(b) < SINGULARITY_GUARD:
        raise EiDomainError("ei_delta arguments must satisfy |x| >= 1e-12")
    if (a > 0.0) != (b > 0.0):
        raise EiDomainError(
            "ei_delta interval must not cross the singularity at 0"
        )
    return _integrate(a, b, 0.0, tol)
