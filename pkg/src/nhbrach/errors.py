"""Exception types raised by the package."""


class NormalizationError(ValueError):
    """A spinor/co-spinor pair does not satisfy ``<u~|u> = 1``."""


class ExceptionalPointError(ValueError):
    """The input sits on an exceptional point (coalescing eigenvalues or a
    self-orthogonal state), where the requested quantity is undefined."""


class NotOnBranchError(ValueError):
    """The input does not belong to the real-spectrum (hyperboloid) branch."""


class IntegrationError(RuntimeError):
    """Adaptive integration failed; keeps the last accepted state."""

    def __init__(self, message, t_last=None, y_last=None):
        super().__init__(message)
        self.t_last = t_last
        self.y_last = y_last
