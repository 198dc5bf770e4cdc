"""Exception hierarchy shared by all qbdpoly modules."""


class QbdPolyError(Exception):
    """Base class for all qbdpoly errors."""


class DomainError(QbdPolyError, ValueError):
    """A parameter lies outside its mathematical domain."""


class UsageError(QbdPolyError, ValueError):
    """An operation was invoked with an incompatible combination of arguments."""


class NumericError(QbdPolyError, RuntimeError):
    """A numerical routine failed to reach its accuracy or convergence target."""


class ModelIntegrityError(QbdPolyError, RuntimeError):
    """A probabilistic sanity check failed on a constructed model."""
