"""Exception hierarchy shared by all modules."""


class AiryLabError(Exception):
    """Base class for errors raised by airylab."""


class DomainError(AiryLabError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ArgumentError(AiryLabError, ValueError):
    """Invalid combination of arguments (bad index, bad configuration)."""


class DivergenceError(AiryLabError, ArithmeticError):
    """A requested infinite sum does not converge."""


class AccuracyError(AiryLabError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` carries the best value obtained and ``achieved`` the error
    estimate that was reached.
    """

    def __init__(self, message, estimate=None, achieved=None):
        super().__init__(message)
        self.estimate = estimate
        self.achieved = achieved
