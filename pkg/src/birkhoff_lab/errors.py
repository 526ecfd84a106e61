"""Exception hierarchy shared by all modules."""


class BirkhoffError(Exception):
    """Base class for every error raised by birkhoff_lab."""


class ShapeError(BirkhoffError, ValueError):
    pass


class ValidationError(BirkhoffError, ValueError):
    pass


class DimMismatch(BirkhoffError, ValueError):
    pass


class DimError(BirkhoffError, ValueError):
    """Operation only defined for a specific dimension."""


class RangeError(BirkhoffError, ValueError):
    pass


class LengthMismatch(BirkhoffError, ValueError):
    pass


class NegativeEntry(BirkhoffError, ValueError):
    pass


class ConvergenceError(BirkhoffError, RuntimeError):
    pass


class SingularInput(BirkhoffError, ArithmeticError):
    pass


class InternalError(BirkhoffError, RuntimeError):
    """A construction that is guaranteed to succeed did not.

    Always indicates a tolerance or logic bug; the message carries diagnostics.
    """


class DegenerateDenominator(BirkhoffError, ArithmeticError):
    pass


class CuspSingularity(BirkhoffError, ZeroDivisionError):
    pass


class CollinearAnchors(BirkhoffError, ValueError):
    pass


class InvalidPlane(BirkhoffError, ValueError):
    pass


class StepTooSmall(BirkhoffError, ValueError):
    pass
