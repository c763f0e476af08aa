"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """An argument is outside the range an operation accepts."""


class DegenerateDomain(ArgumentError):
    """A triangle with zero area, or a rectangle with empty extent."""


class NonConvergence(RuntimeError):
    """Adaptive refinement stopped before meeting its tolerance.

    ``result`` holds the best available :class:`~diamondquad.quad.IntegralResult`
    (the value and the summed error estimate at the point of giving up).
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class NonFiniteIntegrand(ArithmeticError):
    """The integrand returned NaN or infinity at a quadrature node."""
