"""Exception hierarchy.

The three intermediate classes map onto CLI exit codes: configuration
problems (2), bad input data (3) and numerical degeneracy (4).
"""


class LagCohError(ValueError):
    """Base class for all errors raised by lagcoh."""


class ConfigError(LagCohError):
    pass


class DataError(LagCohError):
    pass


class NumericalError(LagCohError):
    pass


class InvalidData(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class RaggedData(DataError):
    pass


class FormatError(DataError):
    pass


class BandMismatch(ConfigError):
    pass


class SingularCrossSpectrum(NumericalError):
    pass


class InvalidMatrix(NumericalError):
    pass


class DegenerateResidual(NumericalError):
    pass


class PerfectLaggedFit(NumericalError):
    pass


class InvalidCoherence(NumericalError):
    pass


class OrderingViolation(NumericalError):
    """Constrained residual came out smaller than the unconstrained one.

    This cannot happen for a correct fit and signals a bug upstream.
    """
