"""Tests of the null hypothesis that the coupling is purely instantaneous."""

from __future__ import annotations

from dataclasses import dataclass

from lagcoh.distributions import chi2_sf, f_sf
from lagcoh.errors import InvalidCoherence

COHERENCE_TOL = 1e-10


@dataclass(frozen=True)
class TestReport:
    statistic: float
    df1: int
    df2: int | None
    p_value: float
    kind: str

    __test__ = False  # not a pytest class


def lrt_chi_square(lagA: float, n_epochs: int, p: int, q: int) -> TestReport:
    """Likelihood-ratio statistic ``N_E * lagA`` against chi2 with q*p df."""
    if n_epochs < 1:
        raise ValueError("n_epochs must be >= 1")
    if not lagA >= 0:
        raise ValueError(f"lagA must be nonnegative, got {lagA}")
    stat = n_epochs * lagA
    df = q * p
    p_value = min(max(chi2_sf(stat, df), 0.0), 1.0)
    return TestReport(stat, df, None, p_value, "chi_square_lrt")


def _f_report(stat, n_epochs):
    df2 = n_epochs - 3
    p_value = min(max(f_sf(stat, 1, df2), 0.0), 1.0)
    return TestReport(stat, 1, df2, p_value, "f_test")


def f_test_bivariate(c_xy: complex, n_epochs: int) -> TestReport:
    """F test with (1, N_E - 3) df from the complex coherency."""
    if n_epochs < 4:
        raise ValueError("the F test needs at least 4 epochs")
    c_xy = complex(c_xy)
    denom = 1.0 - c_xy.real**2 - c_xy.imag**2
    if denom <= COHERENCE_TOL:
        raise InvalidCoherence(f"|coherency| = {abs(c_xy):.12g} is not below 1")
    stat = (n_epochs - 3) * c_xy.imag**2 / denom
    return _f_report(stat, n_epochs)


def f_test_from_residuals(s_eps: float, s_delta: float, n_epochs: int) -> TestReport:
    """Same F statistic written as ``(N_E - 3)(s_delta - s_eps) / s_eps``."""
    if n_epochs < 4:
        raise ValueError("the F test needs at least 4 epochs")
    if not s_eps > 0:
        raise InvalidCoherence("residual variance must be positive")
    stat = max((n_epochs - 3) * (s_delta - s_eps) / s_eps, 0.0)
    return _f_report(stat, n_epochs)
