"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class DegenerateParameterError(DomainError):
    """A derived approximation parameter collapsed out of its open domain.

    Raised e.g. when a matched logarithmic/negative-binomial parameter
    computes to 0 or 1, so no approximating law of the family exists.
    """


class NumericError(RuntimeError):
    """A certified numeric computation could not reach its tolerance."""


class TruncationError(NumericError):
    """A series truncation failed to certify the requested tolerance.

    Attributes:
        best_bound: tightest remainder bound that was achieved.
    """

    def __init__(self, message: str, best_bound: float = float("inf")):
        super().__init__(message)
        self.best_bound = best_bound


class IntegrationError(NumericError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Attributes:
        value: best integral estimate.
        error_estimate: reported error estimate for that value.
    """

    def __init__(self, message: str, value: float = float("nan"),
                 error_estimate: float = float("inf")):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
