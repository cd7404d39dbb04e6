"""Exception types raised by the library."""


class ElastomodeError(Exception):
    """Base class for all library errors."""


class ContrastZero(ElastomodeError):
    """The contrast c(omega) vanishes, so omega_1 is undefined."""


class SingularPoint(ElastomodeError):
    """A kernel was evaluated at coincident points."""


class IndexOutOfRange(ElastomodeError):
    """A mode or harmonic index violates its admissible range."""


class DegreeTooLow(ElastomodeError):
    """The quadrature grid cannot resolve the requested mode."""


class GridMismatch(ElastomodeError):
    """Two surface fields or operators live on different grids."""


class SingularSystem(ElastomodeError):
    """A dense solve was refused because the system is (nearly) singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class RealityViolation(ElastomodeError):
    """A quantity expected to be real has a significant imaginary part."""


class AtResonance(ElastomodeError):
    """A modal eigenvalue tau is too close to zero."""

    def __init__(self, message, mode=None):
        super().__init__(message)
        self.mode = mode


class ExteriorViolation(ElastomodeError):
    """An evaluation point lies inside or on the particle."""


class ParameterConditionViolated(ElastomodeError):
    """The contrast parameters do not satisfy the resonance sign conditions."""

    def __init__(self, message, mode=None):
        super().__init__(message)
        self.mode = mode


class DiscriminantSignUnexpected(ElastomodeError):
    """A cubic discriminant has the wrong sign for its small-size case."""


class ResidualTooLarge(ElastomodeError):
    """A computed root fails its post-check."""


class PreconditionViolated(ElastomodeError):
    """An operation was called outside its domain of validity."""


class QuadratureFailure(ElastomodeError):
    """An adaptive quadrature did not reach its tolerance."""


class ConfigError(ElastomodeError):
    """A configuration file is malformed or incomplete."""
