"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: scenario/parse problems
exit 2, infeasible plans exit 3.
"""


class QSteerError(Exception):
    """Base class for package-specific errors."""


class ScenarioError(QSteerError):
    """A scenario or system file could not be parsed or validated."""


class InfeasiblePlanError(QSteerError):
    """A steering plan cannot be realized on the given system."""


class UncontrollableSystemError(InfeasiblePlanError):
    """The Lie-algebra rank test failed while pulse-level control was requested."""


class ZeroGapError(InfeasiblePlanError):
    """The relaxation generator has no spectral gap (non-mixing environment)."""


class NonUniqueSteadyStateError(QSteerError):
    """The generator kernel has dimension greater than one."""
