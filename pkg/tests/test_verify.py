import numpy as np
import pytest

from captiveq.market import LocationPair, PricePair, profit_pair
from captiveq.mixed import CdfSpec, MixedContext, build_mixed, solve_w
from captiveq.pure import build_pure
from captiveq.verify import (
    AuditReport,
    CdfEvaluator,
    audit_mixed,
    audit_pure,
    expected_profit,
)

from oracles import discretized_expected_profit

FIGS = {"M1": (0.48, 0.6), "M2": (0.52, 0.65), "M3": (0.57, 0.67)}


@pytest.fixture(scope="module")
def equilibria():
    out = {}
    for kind, (z1, z2) in FIGS.items():
        ctx = MixedContext.from_pair(z1, z2)
        out[kind] = build_mixed(ctx, kind, solve_w(ctx, kind))
    return out


def test_degenerate_single_atom_opponent():
    rng = np.random.default_rng(21)
    for _ in range(50):
        z1, z2 = sorted(rng.uniform(0.05, 0.95, 2))
        z = LocationPair(z1, z2)
        p, q = rng.uniform(0.05, 1.1, 2)
        opp = CdfSpec(ctx=None, segments=(), atoms=((q, 1.0),))
        e1 = expected_profit(1, p, z, opp)
        assert e1 == pytest.approx(profit_pair(z, PricePair(p, q))[0], abs=1e-14)
        e2 = expected_profit(2, p, z, opp)
        assert e2 == pytest.approx(profit_pair(z, PricePair(q, p))[1], abs=1e-14)


def test_on_support_constancy_m1(equilibria):
    eq = equilibria["M1"]
    z = eq.ctx.z
    w = eq.w
    ev = CdfEvaluator(eq.F2, fast=False)
    for p in np.linspace(z.z1 - w + 1e-9, z.z1 - 1e-9, 20):
        e = expected_profit(1, float(p), z, eq.F2, evaluator=ev)
        assert e == pytest.approx(2.0 * (z.z1 - w), abs=1e-9)


def test_on_support_constancy_all(equilibria):
    for kind, eq in equilibria.items():
        z = eq.ctx.z
        ev2 = CdfEvaluator(eq.F2, fast=False)
        ev1 = CdfEvaluator(eq.F1, fast=False)
        lo1, hi1 = eq.F1.segments[0].lo, eq.F1.segments[0].hi
        for p in np.linspace(lo1, hi1, 9):
            e = expected_profit(1, float(p), z, eq.F2, left_limit=True, evaluator=ev2)
            assert e == pytest.approx(eq.profits[0], abs=1e-9), (kind, p)
        lo2, hi2 = eq.F2.segments[0].lo, eq.F2.segments[0].hi
        for p in np.linspace(lo2, hi2, 9):
            e = expected_profit(2, float(p), z, eq.F1, left_limit=True, evaluator=ev1)
            assert e == pytest.approx(eq.profits[1], abs=1e-9), (kind, p)


def test_atom_price_earns_equilibrium_profit(equilibria):
    for kind, eq in equilibria.items():
        z = eq.ctx.z
        e = expected_profit(1, 1.0 - z.z1, z, eq.F2, left_limit=True)
        assert e == pytest.approx(eq.profits[0], abs=1e-9), kind
    # M3: the high firm's atom at its captive price earns exactly z2
    eq = equilibria["M3"]
    e = expected_profit(2, eq.ctx.z.z2, eq.ctx.z, eq.F1, left_limit=True)
    assert e == pytest.approx(eq.ctx.z.z2, abs=1e-12)


def test_left_limit_bound_at_rival_reach(equilibria):
    # E[pi2](1 - z2 - 0) <= pi2*: the bound the side conditions encode
    for kind, eq in equilibria.items():
        z = eq.ctx.z
        e = expected_profit(2, 1.0 - z.z2, z, eq.F1, left_limit=True)
        assert e <= eq.profits[1] + 1e-9, kind


def test_left_limit_vs_exact_at_tie_price(equilibria):
    # at the top of M1's low island the rival atom sits exactly one gap
    # away: the exact evaluation dips, the left limit stays at level
    eq = equilibria["M1"]
    z = eq.ctx.z
    left = expected_profit(1, z.z1, z, eq.F2, left_limit=True)
    exact = expected_profit(1, z.z1, z, eq.F2)
    assert left == pytest.approx(eq.profits[0], abs=1e-9)
    assert exact < left - 1e-3


def test_discretized_oracle_agreement(equilibria):
    for kind, eq in equilibria.items():
        z1, z2 = FIGS[kind]
        z = eq.ctx.z
        w = eq.w
        lo1 = eq.F1.segments[0].lo
        for p in (lo1 + 0.3 * w, lo1 + 0.8 * w, 0.15, 0.9 * (1 - z1)):
            mine = expected_profit(1, float(p), z, eq.F2)
            ref = discretized_expected_profit(1, float(p), z1, z2, eq.F2)
            assert mine == pytest.approx(ref, abs=1e-6), (kind, p)
        lo2 = eq.F2.segments[0].lo
        for p in (lo2 + 0.4 * w, 0.2):
            mine = expected_profit(2, float(p), z, eq.F1)
            ref = discretized_expected_profit(2, float(p), z1, z2, eq.F1)
            assert mine == pytest.approx(ref, abs=1e-6), (kind, p)


def test_fast_evaluator_matches_exact(equilibria):
    for eq in equilibria.values():
        z = eq.ctx.z
        fast = CdfEvaluator(eq.F2, fast=True)
        exact = CdfEvaluator(eq.F2, fast=False)
        lo, hi = eq.F2.segments[0].lo, eq.F2.segments[0].hi
        for p in np.linspace(lo - 0.05, hi + 0.05, 11):
            a = expected_profit(1, float(p) + 0.2, z, eq.F2, evaluator=fast)
            b = expected_profit(1, float(p) + 0.2, z, eq.F2, evaluator=exact)
            assert a == pytest.approx(b, abs=1e-11)


@pytest.mark.parametrize("kind", ["M1", "M2", "M3"])
def test_audit_mixed_quick(kind, equilibria):
    rep = audit_mixed(equilibria[kind], price_step=0.01)
    assert rep.passed
    assert rep.max_on_support_deviation <= 1e-9
    assert rep.max_off_support_excess <= 1e-9
    assert rep.scanned_points > 0


def test_audit_refinement_stability(equilibria):
    # halving the scan step keeps the report passing and cannot push the
    # on-support deviation up by more than quadrature noise
    eq = equilibria["M1"]
    coarse = audit_mixed(eq, price_step=0.02)
    fine = audit_mixed(eq, price_step=0.01)
    assert coarse.passed and fine.passed
    assert fine.max_on_support_deviation <= coarse.max_on_support_deviation + 1e-10


def test_audit_empty_scan_guard(equilibria):
    with pytest.raises(ValueError):
        audit_mixed(equilibria["M1"], price_step=5.0)


def test_audit_pure_examples():
    for z1, z2, kind in ((0.4, 0.7, "P1"), (0.84, 0.9, "P4")):
        z = LocationPair(z1, z2)
        eq = build_pure(z, kind)
        rep = audit_pure(eq, z)
        assert rep.max_off_support_excess <= 1e-9
        assert rep.scanned_points == 2 * 1500
        assert rep.passed


def test_report_pass_logic():
    rep = AuditReport(
        max_on_support_deviation=2e-9,
        max_off_support_excess=-1.0,
        scanned_points=10,
        worst_price=0.5,
    )
    assert not rep.passed
    rep = AuditReport(
        max_on_support_deviation=0.0,
        max_off_support_excess=2e-9,
        scanned_points=10,
        worst_price=0.5,
    )
    assert not rep.passed
