import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from captiveq.errors import RegimeError
from captiveq.market import (
    DemandBreakdown,
    LocationPair,
    ModelConstants,
    PricePair,
    _share_pair,
    _share_pair_vec,
    captive_demand,
    demand_breakdown,
    informed_shares,
    marginal_consumer,
    profit_grid,
    profit_pair,
)

from oracles import consumer_grid_shares


def test_location_pair_validation():
    LocationPair(0.0, 1.0)
    LocationPair(0.4, 0.4)
    with pytest.raises(ValueError):
        LocationPair(0.7, 0.3)
    with pytest.raises(ValueError):
        LocationPair(-0.1, 0.5)


def test_price_pair_validation():
    with pytest.raises(ValueError):
        PricePair(-0.01, 0.5)


def test_model_constants_pinned():
    c = ModelConstants()
    assert (c.reservation, c.transport_rate, c.captive_mass, c.informed_mass) == (
        1.0,
        1.0,
        1.0,
        1.0,
    )
    with pytest.raises(ValueError):
        ModelConstants(reservation=2.0)


def test_marginal_consumer():
    assert marginal_consumer(LocationPair(0.4, 0.7), PricePair(0.6, 0.7)) == pytest.approx(0.6)
    assert marginal_consumer(LocationPair(0.3, 0.7), PricePair(0.5, 0.5)) == pytest.approx(0.5)
    assert marginal_consumer(LocationPair(0.48, 0.6), PricePair(0.2, 0.2)) == pytest.approx(0.54)
    with pytest.raises(RegimeError):
        marginal_consumer(LocationPair(0.4, 0.7), PricePair(0.9, 0.5))
    with pytest.raises(RegimeError):
        marginal_consumer(LocationPair(0.5, 0.5), PricePair(0.3, 0.3))


def test_informed_shares_examples():
    s = informed_shares(LocationPair(0.4, 0.7), PricePair(0.6, 0.7))
    assert s == (pytest.approx(0.6), pytest.approx(0.4))
    s = informed_shares(LocationPair(0.7, 0.8), PricePair(0.3, 0.8))
    assert s == (pytest.approx(1.0), pytest.approx(0.0))
    # reservation truncation on the left flank
    s = informed_shares(LocationPair(0.84, 0.9), PricePair(0.58, 0.9))
    assert s == (pytest.approx(0.58), pytest.approx(0.0))


def test_captive_demand_boundaries():
    z = LocationPair(0.4, 0.7)
    assert captive_demand(1, z, 0.6) == 1.0
    assert captive_demand(1, z, 0.601) == 0.0
    assert captive_demand(1, LocationPair(0.0, 0.5), 1.0) == 1.0
    assert captive_demand(2, z, 0.7) == 1.0
    assert captive_demand(2, z, 0.7000001) == 0.0
    with pytest.raises(ValueError):
        captive_demand(3, z, 0.5)


def test_profit_examples():
    assert profit_pair(LocationPair(0.4, 0.7), PricePair(0.6, 0.7)) == (
        pytest.approx(0.96),
        pytest.approx(0.98),
    )
    assert profit_pair(LocationPair(0.25, 0.85), PricePair(0.75, 0.85)) == (
        pytest.approx(1.125),
        pytest.approx(1.105),
    )
    assert profit_pair(LocationPair(0.7, 0.8), PricePair(0.3, 0.8)) == (
        pytest.approx(0.6),
        pytest.approx(0.8),
    )


def test_demand_breakdown_fields():
    d = demand_breakdown(LocationPair(0.4, 0.7), PricePair(0.6, 0.7))
    assert d.captive1 == 1.0 and d.captive2 == 1.0
    assert d.informed1 + d.informed2 <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        DemandBreakdown(1.0, 1.0, 0.7, 0.5)


def test_brute_force_oracle_agreement():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        z1, z2 = sorted(rng.uniform(0.0, 1.0, 2))
        p1, p2 = rng.uniform(0.0, 1.3, 2)
        s1, s2 = _share_pair(z1, z2, p1, p2)
        o1, o2 = consumer_grid_shares(z1, z2, p1, p2)
        assert abs(s1 - o1) <= 2e-5, (z1, z2, p1, p2)
        assert abs(s2 - o2) <= 2e-5, (z1, z2, p1, p2)


def test_tie_split_against_grid_oracle():
    # prices engineered so the whole upper segment is exactly indifferent
    z1, z2 = 0.25, 0.5
    p2 = 0.5
    p1 = p2 - (z2 - z1)
    s1, s2 = _share_pair(z1, z2, p1, p2)
    o1, o2 = consumer_grid_shares(z1, z2, p1, p2)
    assert abs(s1 - o1) <= 2e-5 and abs(s2 - o2) <= 2e-5
    assert s2 > 0.0  # the tie segment is shared, not lost


def test_monotone_in_own_price():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        z1, z2 = sorted(rng.uniform(0.0, 1.0, 2))
        p2 = rng.uniform(0.0, 1.2)
        grid = np.sort(rng.uniform(0.0, 1.3, 12))
        s1 = _share_pair_vec(z1, z2, grid, np.full(12, p2))[0]
        assert np.all(np.diff(s1) <= 1e-12)


def test_winner_take_all_regime():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        z1, z2 = sorted(rng.uniform(0.05, 0.95, 2))
        # low enough that the reservation constraint never binds anywhere
        p1 = rng.uniform(0.0, max(min(z1, 1.0 - z1) - 1e-6, 1e-9))
        p2 = p1 + (z2 - z1) + rng.uniform(1e-6, 0.2)
        assert _share_pair(z1, z2, p1, p2) == (1.0, 0.0)


def test_swap_symmetry_exact_on_dyadics():
    rng = np.random.default_rng(5)
    for _ in range(500):
        z1, z2 = sorted(rng.integers(0, 257, 2) / 256.0)
        p1, p2 = rng.integers(0, 321, 2) / 256.0
        a = profit_pair(LocationPair(z1, z2), PricePair(p1, p2))
        b = profit_pair(
            LocationPair(1.0 - z2, 1.0 - z1), PricePair(p2, p1)
        )
        assert a[0] == b[1] and a[1] == b[0]


def test_swap_symmetry_general_floats():
    rng = np.random.default_rng(6)
    for _ in range(500):
        z1, z2 = sorted(rng.uniform(0.0, 1.0, 2))
        p1, p2 = rng.uniform(0.0, 1.3, 2)
        a = profit_pair(LocationPair(z1, z2), PricePair(p1, p2))
        b = profit_pair(LocationPair(1.0 - z2, 1.0 - z1), PricePair(p2, p1))
        assert a[0] == pytest.approx(b[1], abs=1e-12)
        assert a[1] == pytest.approx(b[0], abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    z=st.tuples(st.floats(0.01, 0.99), st.floats(0.01, 0.99)),
    p=st.tuples(st.floats(0.0, 1.2), st.floats(0.0, 1.2)),
)
def test_shares_bounded_and_consistent(z, p):
    z1, z2 = sorted(z)
    s1, s2 = _share_pair(z1, z2, *p)
    assert 0.0 <= s1 <= 1.0 and 0.0 <= s2 <= 1.0
    assert s1 + s2 <= 1.0 + 1e-12


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(12)
    z1, z2 = 0.37, 0.72
    p1s = rng.uniform(0.0, 1.3, 200)
    p2s = rng.uniform(0.0, 1.3, 200)
    v1, v2 = _share_pair_vec(z1, z2, p1s, p2s)
    for i in range(200):
        s1, s2 = _share_pair(z1, z2, float(p1s[i]), float(p2s[i]))
        assert v1[i] == pytest.approx(s1, abs=1e-15)
        assert v2[i] == pytest.approx(s2, abs=1e-15)


def test_profit_grid_matches_pointwise():
    z = LocationPair(0.48, 0.6)
    grid = np.arange(1, 1500) * 0.001
    for firm, opp in ((1, 0.6), (2, 0.52)):
        profs = profit_grid(z, firm, grid, opp)
        for idx in (0, 250, 700, 1200):
            pp = (
                profit_pair(z, PricePair(float(grid[idx]), opp))[0]
                if firm == 1
                else profit_pair(z, PricePair(opp, float(grid[idx])))[1]
            )
            assert profs[idx] == pytest.approx(pp, abs=1e-15)
