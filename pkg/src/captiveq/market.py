"""Deterministic demand and profit model for the two-firm price game.

Two firms sit at ``z1 <= z2`` on the unit interval.  Each firm has a
loyal (captive) buyer at its own end of the line who never considers
the rival, plus a unit mass of informed consumers spread uniformly on
(0, 1) who buy whichever product gives higher utility
``1 - price - distance``, or nothing if both utilities are negative.

Tie handling: when a whole segment of informed consumers is exactly
indifferent (rival prices differ by exactly the location gap), the
segment's demand is split equally between the firms.  A consumer whose
best utility is exactly zero buys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RegimeError


@dataclass(frozen=True)
class ModelConstants:
    """Normalisations of the model; all anchored at one."""

    reservation: float = 1.0
    transport_rate: float = 1.0
    captive_mass: float = 1.0
    informed_mass: float = 1.0

    def __post_init__(self) -> None:
        for name in ("reservation", "transport_rate", "captive_mass", "informed_mass"):
            if getattr(self, name) != 1.0:
                raise ValueError(f"{name} is normalised to 1 in this model")


@dataclass(frozen=True)
class LocationPair:
    """Firm positions on [0, 1] in canonical orientation z1 <= z2."""

    z1: float
    z2: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.z1 <= self.z2 <= 1.0):
            raise ValueError(
                f"locations must satisfy 0 <= z1 <= z2 <= 1, got ({self.z1}, {self.z2})"
            )


@dataclass(frozen=True)
class PricePair:
    p1: float
    p2: float

    def __post_init__(self) -> None:
        if self.p1 < 0.0 or self.p2 < 0.0:
            raise ValueError("prices must be nonnegative")


@dataclass(frozen=True)
class DemandBreakdown:
    """Demand masses served per firm, split by consumer type."""

    captive1: float
    captive2: float
    informed1: float
    informed2: float

    def __post_init__(self) -> None:
        if min(self.captive1, self.captive2, self.informed1, self.informed2) < 0.0:
            raise ValueError("demand masses must be nonnegative")
        if self.informed1 + self.informed2 > 1.0 + 1e-9:
            raise ValueError("informed demand cannot exceed total measure 1")


def _seg(lo: float, hi: float) -> float:
    return hi - lo if hi > lo else 0.0


def _share_pair(
    z1: float, z2: float, p1: float, p2: float, tie_sign: int = 0
) -> tuple[float, float]:
    """Informed demand (share1, share2) for one price pair.

    ``tie_sign`` resolves exact indifference ties: 0 splits them equally,
    +1 awards them to firm 1, -1 to firm 2.  The nonzero settings realise
    one-sided price limits (a firm charging an epsilon less).
    """
    delta = z2 - z1
    r1 = 1.0 - p1
    r2 = 1.0 - p2
    adv_left = (p2 - p1) + delta  # firm 1's utility lead left of z1
    adv_right = (p2 - p1) - delta  # firm 1's utility lead right of z2

    win1 = _seg(max(z1 - r1, 0.0), min(z1 + r1, 1.0))
    win2 = _seg(max(z2 - r2, 0.0), min(z2 + r2, 1.0))

    if adv_left < 0.0 or (adv_left == 0.0 and tie_sign < 0):
        return 0.0, win2
    if adv_right > 0.0 or (adv_right == 0.0 and tie_sign > 0):
        return win1, 0.0
    if adv_left == 0.0 and adv_right == 0.0:
        # co-located equal prices: every buying consumer is indifferent
        return 0.5 * win1, 0.5 * win1
    if adv_right == 0.0 and tie_sign == 0:
        # consumers at and beyond z2 are indifferent; split that segment
        s1 = _seg(max(z1 - r1, 0.0), min(z1 + r1, z2))
        tie = _seg(z2, min(z2 + r2, 1.0))
        return s1 + 0.5 * tie, 0.5 * tie
    if adv_left == 0.0 and tie_sign == 0:
        # mirror case: consumers at and below z1 are indifferent
        s2 = _seg(max(z2 - r2, z1, 0.0), min(z2 + r2, 1.0))
        tie = _seg(max(z1 - r1, 0.0), z1)
        return 0.5 * tie, s2 + 0.5 * tie
    t = 0.5 * (z1 + z2 + p2 - p1)
    s1 = _seg(max(z1 - r1, 0.0), min(t, z1 + r1, 1.0))
    s2 = _seg(max(t, z2 - r2, 0.0), min(z2 + r2, 1.0))
    return s1, s2


def _share_pair_vec(
    z1: float,
    z2: float,
    p1: np.ndarray,
    p2: np.ndarray,
    tie_sign: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`_share_pair` over broadcastable price arrays."""
    p1, p2 = np.broadcast_arrays(np.asarray(p1, float), np.asarray(p2, float))
    delta = z2 - z1
    r1 = 1.0 - p1
    r2 = 1.0 - p2
    adv_left = (p2 - p1) + delta
    adv_right = (p2 - p1) - delta

    win1 = np.maximum(np.minimum(z1 + r1, 1.0) - np.maximum(z1 - r1, 0.0), 0.0)
    win2 = np.maximum(np.minimum(z2 + r2, 1.0) - np.maximum(z2 - r2, 0.0), 0.0)

    t = 0.5 * (z1 + z2 + p2 - p1)
    s1_int = np.maximum(
        np.minimum(np.minimum(t, z1 + r1), 1.0) - np.maximum(z1 - r1, 0.0), 0.0
    )
    s2_int = np.maximum(
        np.minimum(z2 + r2, 1.0) - np.maximum(np.maximum(t, z2 - r2), 0.0), 0.0
    )

    m_b = (adv_left < 0.0) | ((adv_left == 0.0) & (tie_sign < 0))
    m_a = ((adv_right > 0.0) | ((adv_right == 0.0) & (tie_sign > 0))) & ~m_b
    m_both = (adv_left == 0.0) & (adv_right == 0.0) & ~m_a & ~m_b
    taken = m_a | m_b | m_both
    m_c = (adv_right == 0.0) & (tie_sign == 0) & ~taken
    taken |= m_c
    m_cp = (adv_left == 0.0) & (tie_sign == 0) & ~taken

    s1c = np.maximum(np.minimum(z1 + r1, z2) - np.maximum(z1 - r1, 0.0), 0.0)
    tie_c = np.maximum(np.minimum(z2 + r2, 1.0) - z2, 0.0)
    s2cp = np.maximum(
        np.minimum(z2 + r2, 1.0) - np.maximum(np.maximum(z2 - r2, z1), 0.0), 0.0
    )
    tie_cp = np.maximum(z1 - np.maximum(z1 - r1, 0.0), 0.0)

    s1 = np.where(m_b, 0.0, np.where(m_a, win1, s1_int))
    s2 = np.where(m_b, win2, np.where(m_a, 0.0, s2_int))
    s1 = np.where(m_both, 0.5 * win1, s1)
    s2 = np.where(m_both, 0.5 * win1, s2)
    s1 = np.where(m_c, s1c + 0.5 * tie_c, s1)
    s2 = np.where(m_c, 0.5 * tie_c, s2)
    s1 = np.where(m_cp, 0.5 * tie_cp, s1)
    s2 = np.where(m_cp, s2cp + 0.5 * tie_cp, s2)
    return s1, s2


def marginal_consumer(z: LocationPair, p: PricePair) -> float:
    """Location of the informed consumer indifferent between the firms.

    Only defined in the interior regime |p1 - p2| < z2 - z1 where the
    crossover point lies strictly between the firms.
    """
    delta = z.z2 - z.z1
    if not abs(p.p1 - p.p2) < delta:
        raise RegimeError(
            "no interior indifferent consumer: |p1 - p2| must be below z2 - z1"
        )
    return 0.5 * (z.z1 + z.z2 + p.p2 - p.p1)


def informed_shares(z: LocationPair, p: PricePair) -> tuple[float, float]:
    """Informed demand captured by each firm, with equal-split ties."""
    return _share_pair(z.z1, z.z2, p.p1, p.p2, tie_sign=0)


def captive_demand(firm: int, z: LocationPair, price: float) -> float:
    """Demand from the firm's own captive buyer: 1 if in reach, else 0."""
    if firm == 1:
        return 1.0 if price <= 1.0 - z.z1 else 0.0
    if firm == 2:
        return 1.0 if price <= z.z2 else 0.0
    raise ValueError(f"firm must be 1 or 2, got {firm}")


def demand_breakdown(z: LocationPair, p: PricePair) -> DemandBreakdown:
    s1, s2 = informed_shares(z, p)
    return DemandBreakdown(
        captive1=captive_demand(1, z, p.p1),
        captive2=captive_demand(2, z, p.p2),
        informed1=s1,
        informed2=s2,
    )


def profit_pair(z: LocationPair, p: PricePair) -> tuple[float, float]:
    """Profits (pi1, pi2) at a deterministic price pair; zero cost."""
    d = demand_breakdown(z, p)
    return p.p1 * (d.captive1 + d.informed1), p.p2 * (d.captive2 + d.informed2)


def profit_grid(
    z: LocationPair, firm: int, own_prices: np.ndarray, opp_price: float
) -> np.ndarray:
    """Profit of ``firm`` over a grid of own prices, opponent fixed."""
    own = np.asarray(own_prices, dtype=float)
    if firm == 1:
        s1, _ = _share_pair_vec(z.z1, z.z2, own, np.full_like(own, opp_price))
        cap = (own <= 1.0 - z.z1).astype(float)
        return own * (cap + s1)
    if firm == 2:
        _, s2 = _share_pair_vec(z.z1, z.z2, np.full_like(own, opp_price), own)
        cap = (own <= z.z2).astype(float)
        return own * (cap + s2)
    raise ValueError(f"firm must be 1 or 2, got {firm}")
