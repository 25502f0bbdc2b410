"""Custom exceptions raised by the dark-soliton laboratory."""


class DarkSolitonLabError(Exception):
    """Base class of all the errors raised by this package."""


class SpectralDomainError(DarkSolitonLabError, ValueError):
    """Raised if a spectral map is evaluated at z = 0."""


class SingularParameterError(DarkSolitonLabError, ValueError):
    """Raised if a Jost solution is requested too close to the singular point z = 0."""


class GridError(DarkSolitonLabError, ValueError):
    """Raised if a spatial or spectral grid is inconsistent (e.g. a sample count that is not a power of two)."""


class BoundaryConditionError(DarkSolitonLabError, ValueError):
    """Raised if a potential does not reach a unimodular background at the ends of its grid."""


class NumericError(DarkSolitonLabError):
    """Raised if a numerical integration produces non-finite values or a coefficient vanishes where it cannot."""


class ZeroNotFound(DarkSolitonLabError):
    """Raised if the refinement of a zero of the Wronskian does not converge."""


class InconsistentNormingConstant(DarkSolitonLabError):
    """Raised if the two independent formulas for a norming constant disagree.

    This typically signals an inaccurate zero, or a truncation of the spatial domain that is too short.
    """


class PoleProximityError(DarkSolitonLabError, ValueError):
    """Raised if the T-function is evaluated too close to one of its poles."""


class InvalidSolitonSpec(DarkSolitonLabError, ValueError):
    """Raised if reflectionless data violate the admissibility conditions (distinct unit-circle poles, c = i z |c|)."""


class ConfigurationError(DarkSolitonLabError, ValueError):
    """Raised if a run configuration is invalid."""


class BlowUpError(DarkSolitonLabError):
    """Raised if the numerical evolution produces non-finite values."""


class BoundaryLeakError(DarkSolitonLabError):
    """Raised if the evolved field reaches the ends of the periodic box beyond the allowed tolerance."""
