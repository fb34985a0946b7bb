class KMulError(Exception):
    """Base class for errors raised by this package."""


class InconsistentSystemError(KMulError, ArithmeticError):
    pass


class InterpolationError(KMulError, ArithmeticError):
    """Values are not in the image of the evaluation map."""


class SetupError(KMulError, ValueError):
    """Invalid evaluation setup (duplicate places, Q among evaluation places, ...)."""


class UnsupportedPlaceError(KMulError, ValueError):
    pass


class CapacityError(KMulError, RuntimeError):
    """Exhaustive verification would exceed the configured budget."""


class PlanningError(KMulError, RuntimeError):
    pass


class ConfigurationError(KMulError, ValueError):
    pass
