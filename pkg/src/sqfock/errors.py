"""Exception hierarchy shared by every module of the package."""


class SqfockError(Exception):
    """Base class for all package errors."""


class CapacityError(SqfockError, ValueError):
    """A Fock index exceeds the configured cap."""


class InvalidParametersError(SqfockError, ValueError):
    """Parameters violate a domain invariant (normalizability, ranges)."""


class SingularConfigurationError(SqfockError, ValueError):
    """Input sits on a branch point of a closed-form expression (a = +-1)."""


class UnheraldableOutcomeError(SqfockError):
    """The requested photon-number outcome has vanishing probability."""

    def __init__(self, message, probability=0.0):
        super().__init__(message)
        self.probability = probability


class NoSolutionError(SqfockError):
    """No input squeezing satisfies the generation conditions.

    ``landscape`` holds diagnostic ``(seed, residual_norm)`` pairs when the
    failure comes from an iterative solve.
    """

    def __init__(self, message, landscape=()):
        super().__init__(message)
        self.landscape = list(landscape)


class ConvergenceError(SqfockError):
    """An iterative or self-verifying numerical step did not reach tolerance."""


class TruncationError(SqfockError):
    """A Fock expansion leaves more norm outside the cutoff than allowed."""

    def __init__(self, message, tail_mass):
        super().__init__(message)
        self.tail_mass = tail_mass


class NormalizationError(SqfockError, ValueError):
    """A wavefunction passed as normalized is not."""
