class ParameterError(ValueError):
    """A model or configuration parameter is outside its valid domain."""


class NumericalError(ArithmeticError):
    """Quadrature, series truncation or rejection sampling did not converge."""
