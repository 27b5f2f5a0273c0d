"""Exception hierarchy.

Every failure raised by the library derives from :class:`CocycleLabError`, so
callers (and the CLI) can separate library diagnostics from programming errors.
"""


class CocycleLabError(Exception):
    """Base class for all library errors."""


class ConfigError(CocycleLabError, ValueError):
    """Malformed input data; ``path`` locates the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionViolated(CocycleLabError, ValueError):
    pass


class DimensionMismatch(CocycleLabError, ValueError):
    pass


class SingularMatrix(CocycleLabError, ArithmeticError):
    pass


class Degenerate(CocycleLabError, ValueError):
    pass


class TooLarge(CocycleLabError):
    """An exhaustive enumeration would exceed its cap."""


class NoPseudoorbit(CocycleLabError):
    pass


class NotFound(CocycleLabError):
    pass


class NotInvariant(CocycleLabError):
    pass


class NotOnStableSet(CocycleLabError):
    pass


class NotOnUnstableSet(CocycleLabError):
    pass


class NotHomoclinic(CocycleLabError):
    pass


class Diverging(CocycleLabError):
    """Holonomy increments kept growing; signals failure of fiber-bunching."""


class NotBunched(CocycleLabError):
    pass


class NotConverged(CocycleLabError):
    pass


class NotRotationFixedPoint(CocycleLabError):
    """The obstruction test is inconclusive for this fixed point."""


class MatherSetEmpty(CocycleLabError):
    pass
