"""Shared exception types."""


class DimensionMismatchError(ValueError):
    """A payoff vector or direction has the wrong dimension."""


class InfeasiblePointError(ValueError):
    """A point required to lie in a feasible set does not."""


class NoStrictImprovementError(ValueError):
    """No feasible point strictly dominates the disagreement point."""


class ZeroProbabilityActionError(ValueError):
    """Conditioning on an action that has probability zero."""


class UnbalancedWeightsError(ValueError):
    """Coalition weights do not balance the collection."""


class SolverConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget without converging."""
