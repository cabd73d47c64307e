"""Exception hierarchy shared by the forward, sensitivity and inversion code."""


class DomainError(ValueError):
    """An argument lies outside the domain a routine is defined on."""


class KappaDomainError(DomainError):
    """Local wave number is zero, imaginary or below the configured guard."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DimensionMismatch(ValueError):
    pass


class PolePassageError(ArithmeticError):
    """The coefficient ratio x_i = B_i/A_i hit a pole (A_{i+1} ~ 0).

    ``l`` and ``interface`` identify where propagation broke down. ``interface``
    is 1-based, matching the breakpoint r_i the matrix was built at.
    """

    def __init__(self, message, l=None, interface=None):
        super().__init__(message)
        self.l = l
        self.interface = interface


class NoConvergence(RuntimeError):
    def __init__(self, message, trace=None, kappa=None):
        super().__init__(message)
        self.trace = trace
        self.kappa = kappa


class StepFailure(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NonConvergedRefinement(RuntimeError):
    pass


class EmptyWindow(ValueError):
    pass
