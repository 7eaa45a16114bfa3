"""Exception types raised across the package."""


class RejectedInput(ValueError):
    """Input violates an operation's precondition (shape, Hermiticity, density)."""


class NotHermitianError(RejectedInput):
    pass


class InvalidDensityError(RejectedInput):
    pass


class ConvergenceError(RuntimeError):
    """The Jacobi eigensolver did not converge within its sweep budget."""


class NumericalConsistencyError(ArithmeticError):
    """A quantity that must be real came out with a non-negligible imaginary part."""
