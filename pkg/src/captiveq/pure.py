"""Pure-strategy price equilibria P1-P4: condition checks and constructors.

Each kind has a closed-form price pair and profit pair determined by the
locations alone.  P1/P2 are the split-market equilibria (both firms serve
a segment of informed consumers, prices pinned at the captive reservation
levels), P3/P4 have the left firm take the whole informed market while
the right firm retreats to its captive buyer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConditionError
from .market import LocationPair, PricePair

# split point between the P3 and P4 price rules for the left firm
P3_P4_SPLIT = 2.0 * (math.sqrt(2.0) - 1.0)

PURE_KINDS = ("P1", "P2", "P3", "P4")


@dataclass(frozen=True)
class PureEquilibrium:
    kind: str
    prices: PricePair
    profits: tuple[float, float]


def check_p1(z: LocationPair) -> bool:
    """Both firms serve informed segments at reservation prices."""
    z1, z2 = z.z1, z.z2
    return (
        z2 <= z1 + 0.5
        and (1.0 - z1) * (0.5 + z1 + z2) >= 2.0 * z1
        and z2 * (2.5 - z1 - z2) >= 2.0 * (1.0 - z2)
    )


def check_p2(z: LocationPair) -> bool:
    """Firms far apart: reservation utility truncates both markets."""
    return z.z2 >= z.z1 + 0.5


def check_p3(z: LocationPair) -> bool:
    """Left firm takes all informed consumers at its captive price."""
    z1, z2 = z.z1, z.z2
    return (
        (1.0 - 2.0 * z1 + z2) * (2.0 - z2) <= z2
        and z1 <= P3_P4_SPLIT
        and z2 >= 2.0 / 3.0
    )


def check_p4(z: LocationPair) -> bool:
    """Left firm prices above its captive reach, still wins the market."""
    z1, z2 = z.z1, z.z2
    return (1.0 + 0.5 * z1 - z2) * (2.0 - 0.5 * z1) <= z2 and z1 > P3_P4_SPLIT


_CHECKS = {"P1": check_p1, "P2": check_p2, "P3": check_p3, "P4": check_p4}


def build_pure(z: LocationPair, kind: str) -> PureEquilibrium:
    """Construct the closed-form equilibrium of the given kind."""
    if kind not in _CHECKS:
        raise ValueError(f"unknown pure equilibrium kind {kind!r}")
    if not _CHECKS[kind](z):
        raise ConditionError(f"{kind} conditions do not hold at ({z.z1}, {z.z2})")
    z1, z2 = z.z1, z.z2
    if kind == "P1":
        prices = PricePair(1.0 - z1, z2)
        profits = ((1.0 - z1) * (z1 + z2 + 0.5), z2 * (2.5 - z1 - z2))
    elif kind == "P2":
        prices = PricePair(1.0 - z1, z2)
        profits = ((1.0 - z1) * (1.0 + 2.0 * z1), z2 * (3.0 - 2.0 * z2))
    elif kind == "P3":
        prices = PricePair(1.0 - z1, z2)
        profits = (2.0 * (1.0 - z1), z2)
    else:
        prices = PricePair(1.0 - 0.5 * z1, z2)
        profits = ((1.0 - 0.5 * z1) ** 2, z2)
    return PureEquilibrium(kind=kind, prices=prices, profits=profits)
