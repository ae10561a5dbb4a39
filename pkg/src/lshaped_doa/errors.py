"""Exception types shared across the package."""


class NumericError(ArithmeticError):
    """A numerical kernel failed (non-finite input, non-convergence).

    Attributes:
        iterations: iteration count reached by the failing kernel, if known.
    """

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class DegenerateInputError(NumericError):
    """The observation carries no usable signal subspace."""


class UnreliableGeneratorError(ValueError):
    """Estimated generators are too far from the unit circle to map to angles."""

    def __init__(self, message, indices):
        super().__init__(message)
        self.indices = tuple(indices)


class PairingError(RuntimeError):
    """Azimuth/elevation pairing could not produce a one-to-one assignment."""


class CrbRankError(ArithmeticError):
    """The Fisher information block is singular for the listed parameters."""

    def __init__(self, message, parameters):
        super().__init__(message)
        self.parameters = tuple(parameters)
