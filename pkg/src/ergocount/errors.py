class ErgocountError(Exception):
    """Base class for all errors raised by ergocount."""


class ValidationError(ErgocountError, ValueError):
    """Invalid input: malformed lattice, region, scenario or origami."""


class BudgetExceeded(ErgocountError):
    """An enumeration would scan more candidates than the configured budget."""


class SingularBlockError(ValidationError):
    """The top-left m x m block of a matrix is singular (outside the open set of decomposable matrices)."""
