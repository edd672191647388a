class PurityLensError(Exception):
    pass


class DimensionError(PurityLensError, ValueError):
    pass


class NotHermitianError(PurityLensError, ValueError):
    pass


class NoConvergenceError(PurityLensError, ArithmeticError):
    pass


class InvariantError(PurityLensError, ValueError):
    """A density or correlation operator violates its defining invariants."""


class ImaginaryResidueTooLarge(PurityLensError, ArithmeticError):
    pass
