"""Exception types shared across the package."""


class ICISError(Exception):
    """Base class for all package errors."""


class NonPrimeCharacteristic(ICISError):
    pass


class NoRoot(ICISError):
    """No root of the requested order exists in the presented field."""


class NeedsExtension(ICISError):
    """A witness transformation needs a root that the field does not contain."""


class PrecisionLoss(ICISError):
    pass


class CapExceeded(ICISError):
    """Jet stabilization did not happen before the degree cap.

    ``profile`` maps each truncation degree tried to the cokernel dimension
    found there.
    """

    def __init__(self, message, profile=None):
        super().__init__(message)
        self.profile = dict(profile or {})


class BudgetExceeded(ICISError):
    pass


class NotQuasiHomogeneous(ICISError):
    pass


class NotApplicable(ICISError):
    pass


class NotCompleteIntersection(ICISError):
    pass


class DerivativeNotUnit(ICISError):
    pass


class InvalidParameters(ICISError):
    pass


class ParseError(ICISError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class WrongVariableCount(ICISError):
    pass
