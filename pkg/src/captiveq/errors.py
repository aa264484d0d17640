"""Exception hierarchy shared across the package."""


class CaptiveqError(Exception):
    """Base class for all package-specific failures."""


class EiDomainError(CaptiveqError, ValueError):
    """Exponential-integral argument outside the supported domain."""


class QuadratureError(CaptiveqError, RuntimeError):
    """Adaptive quadrature exhausted its refinement budget."""


class RegimeError(CaptiveqError, ValueError):
    """Price pair is outside the regime required by the operation."""


class SingularityError(CaptiveqError, ValueError):
    """An evaluation hit a vanishing denominator."""


class NoRootError(CaptiveqError, RuntimeError):
    """Support-width equation has no sign change on the search interval."""


class ConditionError(CaptiveqError, ValueError):
    """Equilibrium construction requested where its conditions fail."""


class ConstructionError(CaptiveqError, RuntimeError):
    """Constructed distribution violates a structural requirement."""
