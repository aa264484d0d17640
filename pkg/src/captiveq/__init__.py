"""Solver and numerical auditor for the two-firm price game with captive
endpoint buyers: pure and mixed price equilibria, closed-form
construction, independent verification, and plane-sweep mapping."""

from .errors import (
    CaptiveqError,
    ConditionError,
    ConstructionError,
    EiDomainError,
    NoRootError,
    QuadratureError,
    RegimeError,
    SingularityError,
)
from .expint import QuadTolerance, ei, ei_delta
from .mapper import (
    GridConfig,
    RegionRecord,
    SolveResult,
    canonicalize,
    classify_point,
    emit_cdf,
    emit_map,
    scan_grid,
    solve_point,
)
from .market import (
    DemandBreakdown,
    LocationPair,
    ModelConstants,
    PricePair,
    captive_demand,
    demand_breakdown,
    informed_shares,
    marginal_consumer,
    profit_pair,
)
from .mixed import (
    CdfSpec,
    ConstPiece,
    GPiece,
    HPiece,
    MixedContext,
    MixedEquilibrium,
    MultipleRootsWarning,
    Segment,
    build_mixed,
    density_g,
    density_h,
    eval_g,
    eval_g0,
    eval_gpi,
    eval_h,
    region_gates,
    side_conditions,
    solve_w,
)
from .pure import PureEquilibrium, build_pure, check_p1, check_p2, check_p3, check_p4
from .verify import AuditReport, CdfEvaluator, audit_mixed, audit_pure, expected_profit

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "CaptiveqError",
    "CdfEvaluator",
    "CdfSpec",
    "ConditionError",
    "ConstPiece",
    "ConstructionError",
    "DemandBreakdown",
    "EiDomainError",
    "GPiece",
    "GridConfig",
    "HPiece",
    "LocationPair",
    "MixedContext",
    "MixedEquilibrium",
    "ModelConstants",
    "MultipleRootsWarning",
    "NoRootError",
    "PricePair",
    "PureEquilibrium",
    "QuadTolerance",
    "QuadratureError",
    "RegimeError",
    "RegionRecord",
    "Segment",
    "SingularityError",
    "SolveResult",
    "audit_mixed",
    "audit_pure",
    "build_mixed",
    "build_pure",
    "canonicalize",
    "captive_demand",
    "check_p1",
    "check_p2",
    "check_p3",
    "check_p4",
    "classify_point",
    "demand_breakdown",
    "density_g",
    "density_h",
    "ei",
    "ei_delta",
    "emit_cdf",
    "emit_map",
    "eval_g",
    "eval_g0",
    "eval_gpi",
    "eval_h",
    "expected_profit",
    "informed_shares",
    "marginal_consumer",
    "profit_pair",
    "region_gates",
    "scan_grid",
    "side_conditions",
    "solve_point",
    "solve_w",
]
