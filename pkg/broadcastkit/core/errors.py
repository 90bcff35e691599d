"""
Exception hierarchy for broadcastkit.

Validation failures subclass ValueError so callers that already catch
ValueError (the CLI, the parameter validators) keep working.
"""


class BroadcastKitError(Exception):
    """Base class for every error raised by broadcastkit"""


class DimensionError(BroadcastKitError, ValueError):
    """Operands have incompatible shapes or subsystem dimensions"""


class NotDensityOperatorError(BroadcastKitError, ValueError):
    """A matrix fails the Hermitian / unit-trace / PSD checks"""


class ConsistencyError(BroadcastKitError, RuntimeError):
    """Two independent computations of the same quantity disagree"""


class SearchBudgetError(BroadcastKitError, RuntimeError):
    """The channel search was asked to run without any evaluations"""
