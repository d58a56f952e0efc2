"""Lagged coherence between two multivariate time series.

The lagged measures compare the residual covariance of an unconstrained
complex-coefficient frequency-domain regression of Y on X with that of a
regression restricted to real (zero-lag) coefficients.
"""

from lagcoh.errors import (
    BandMismatch,
    ConfigError,
    DataError,
    DegenerateResidual,
    FormatError,
    InvalidCoherence,
    InvalidData,
    InvalidMatrix,
    LagCohError,
    NumericalError,
    PerfectLaggedFit,
    RaggedData,
    ShapeMismatch,
    SingularCrossSpectrum,
)
from lagcoh.inference import TestReport, f_test_bivariate, lrt_chi_square
from lagcoh.measures import (
    LaggedResult,
    bivariate_lagged,
    lagged_from_spectra,
    lagged_measures,
    legacy_2007_lagC,
    multiple_correlations,
    univariate_multivariate_lagged,
)
from lagcoh.regression import (
    RegressionFit,
    constrained_fit,
    fit_models,
    psd_order_check,
    unconstrained_fit,
)
from lagcoh.spectra import (
    CrossSpectra,
    EpochedTimeSeries,
    SpectralTensor,
    band_aggregate,
    cross_spectra,
    dft_epochs,
    normalize_to_phase,
)

from lagcoh._version import __version__

__all__ = [
    "BandMismatch",
    "ConfigError",
    "CrossSpectra",
    "DataError",
    "DegenerateResidual",
    "EpochedTimeSeries",
    "FormatError",
    "InvalidCoherence",
    "InvalidData",
    "InvalidMatrix",
    "LagCohError",
    "LaggedResult",
    "NumericalError",
    "PerfectLaggedFit",
    "RaggedData",
    "RegressionFit",
    "ShapeMismatch",
    "SingularCrossSpectrum",
    "SpectralTensor",
    "TestReport",
    "band_aggregate",
    "bivariate_lagged",
    "constrained_fit",
    "cross_spectra",
    "dft_epochs",
    "f_test_bivariate",
    "fit_models",
    "lagged_from_spectra",
    "lagged_measures",
    "legacy_2007_lagC",
    "lrt_chi_square",
    "multiple_correlations",
    "normalize_to_phase",
    "psd_order_check",
    "unconstrained_fit",
    "univariate_multivariate_lagged",
]
