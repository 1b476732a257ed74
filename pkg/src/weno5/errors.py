"""Exception types shared by the solver modules and the CLI."""


class ConfigError(ValueError):
    """Invalid scheme, grid, boundary or stepping configuration."""


class NonFiniteError(ArithmeticError):
    """A NaN or Inf reached a reconstruction kernel."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class AdmissibilityError(ArithmeticError):
    """Density or pressure left the admissible set.

    ``index`` is the offending grid index (tuple in 2D), ``stage`` the
    Runge--Kutta stage and ``time`` the step start time once the stepper has
    annotated the error.
    """

    def __init__(self, message, index=None, stage=None, time=None):
        super().__init__(message)
        self.index = index
        self.stage = stage
        self.time = time

    def __str__(self):
        msg = super().__str__()
        extra = []
        if self.index is not None:
            extra.append(f"index={self.index}")
        if self.stage is not None:
            extra.append(f"stage={self.stage}")
        if self.time is not None:
            extra.append(f"t={self.time:.17g}")
        return f"{msg} ({', '.join(extra)})" if extra else msg


class NonPositiveDensity(AdmissibilityError):
    pass


class NonPositivePressure(AdmissibilityError):
    pass
