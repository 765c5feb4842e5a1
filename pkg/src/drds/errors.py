"""Exception types shared across the toolkit."""


class DrdsError(Exception):
    """Base class for all toolkit errors."""


class ZeroDenominator(DrdsError):
    """A rational function was constructed with an identically zero denominator."""


class DivisionByZero(DrdsError):
    """A denominator evaluated to zero (or an interval denominator contains zero)."""

    def __init__(self, message="division by zero", step=None):
        super().__init__(message if step is None else f"{message} at step {step}")
        self.step = step


class Overflow(DrdsError):
    """A float orbit coordinate left the representable range [1e-300, 1e300]."""

    def __init__(self, message="orbit overflow", step=None):
        super().__init__(message if step is None else f"{message} at step {step}")
        self.step = step


class ExpressionTooLarge(DrdsError):
    """A symbolic expression exceeded the configured term-count budget."""


class ParseError(DrdsError):
    """Input text does not conform to the expression grammar."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at position {position})")
        self.position = position


class LagTooDeep(DrdsError):
    """An equation references a lag outside the declared order."""


class UnknownSymbol(DrdsError):
    """An expression references a symbol not in the declared variable set."""


class DegenerateEquation(DrdsError):
    """The equilibrium polynomial is identically zero: every point is an equilibrium."""


class JacobianSingularEvaluation(DrdsError):
    """A Jacobian entry's denominator vanishes at the evaluation point."""


class NotPerfectSquare(DrdsError):
    """The cleared denominator failed the perfect-square identity (implementation bug)."""


class IndefiniteDenominator(DrdsError):
    """Positivity of a cleared denominator could not be established syntactically."""


class UnsupportedKind(DrdsError):
    """The requested residual-norm kind is not defined for this conjecture."""


class NoStableFixedPoint(DrdsError):
    """The global-stability driver precondition failed (no usable positive fixed point)."""


class NotConverged(DrdsError):
    """An orbit tail did not settle onto a periodic cycle within tolerance."""


class NotPositive(DrdsError):
    """An invariant numerator has a non-positive stored coefficient."""


class InterpolationMismatch(DrdsError):
    """Parameter interpolation of invariant coefficients failed validation."""
