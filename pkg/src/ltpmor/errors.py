"""Exception types shared across the package.

``ValueError`` is used for bad arguments and inconsistent dimensions;
the classes below mark numerical failures so callers (notably the CLI)
can distinguish them from configuration mistakes.
"""


class NumericalError(RuntimeError):
    """Base class for numerical failures (instability, non-convergence)."""


class StabilityError(NumericalError):
    """System is not asymptotically stable enough for an infinite-horizon sum."""


class ConvergenceError(NumericalError):
    """An iterative solver did not reach its tolerance within the iteration cap."""


class ReachabilityError(NumericalError):
    """A state is not reachable: the controllability Gramian is singular."""
