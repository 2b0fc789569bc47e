"""Exception hierarchy shared by all modules."""


class OimError(Exception):
    """Base class for every error raised by oimshil."""


class ContractError(OimError, ValueError):
    """An argument violates a documented precondition (shape, length, range)."""


class SizeGuardError(ContractError):
    """Exhaustive search requested on an instance that is too large."""


class ConfigError(OimError, ValueError):
    """Invalid run configuration or variation scenario."""


class CapacityError(OimError):
    """A SHIL architecture cannot drive the requested number of nodes."""


class IntegrationError(OimError, ArithmeticError):
    """Phase integration produced a non-finite value."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
