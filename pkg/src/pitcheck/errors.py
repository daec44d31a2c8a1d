"""Exception types raised across the package."""


class PitError(ValueError):
    """Base class for all input and domain errors in pitcheck."""


class DomainError(PitError):
    pass


class ConvergenceError(ArithmeticError):
    """A series or continued fraction did not converge within its iteration cap."""


class EmptySample(PitError):
    pass


class BoundaryValue(PitError):
    """A PIT value is exactly 0 or 1 where the method needs the open interval."""

    def __init__(self, message=None):
        if message is None:
            message = (
                "PIT values of exactly 0 or 1 are not allowed here; compute PITs "
                "from the parametric predictive CDF (randomizing for discrete "
                "models) instead of normalized ranks"
            )
        super().__init__(message)


class InvalidPartition(PitError):
    pass


class DegenerateP(PitError):
    """A p-value of exactly 0 or 1 would map to an infinite Cauchy variate."""

    def __init__(self, message=None):
        if message is None:
            message = (
                "p-values of exactly 0 or 1 have infinite Cauchy transforms; "
                "use TCCT for p = 1, and compute PITs from parametric CDFs to "
                "avoid p = 0"
            )
        super().__init__(message)


class NonFiniteInput(PitError):
    pass


class GammaOutOfRange(PitError):
    pass


class IndexMismatch(PitError):
    pass


class TieError(PitError):
    pass


class ConfigError(PitError):
    pass


class ExperimentAborted(RuntimeError):
    """Raised when a simulation run exceeds its per-replicate error budget."""

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0] if self.errors else None
        msg = f"{len(self.errors)} replicate(s) failed"
        if first is not None:
            msg += f"; first at replicate {first[0]}: {first[1]}"
        super().__init__(msg)
