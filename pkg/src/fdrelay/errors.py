"""Exception types shared by the numerical kernels and the CLI."""


class DomainError(ValueError):
    """Argument outside the domain where a function is defined."""


class UnsupportedAnalyticError(DomainError):
    """Analytic path requested for parameters it cannot handle (e.g. non-integer m)."""


class ConfigError(ValueError):
    """Invalid configuration, preset, sweep axis or flag combination."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` and ``error`` carry the best value reached so far, and
    ``term`` names the piece of a larger computation that failed, when known.
    """

    def __init__(self, message, estimate=None, error=None, term=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.term = term

    def with_term(self, term):
        self.term = term if self.term is None else f"{term}/{self.term}"
        return self

    def __str__(self):
        msg = super().__str__()
        if self.term:
            msg = f"[{self.term}] {msg}"
        if self.estimate is not None:
            msg += f" (estimate={self.estimate!r}, error={self.error!r})"
        return msg
